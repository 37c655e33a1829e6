"""Exact univariate root finding over the rationals.

Polynomials here are plain ascending coefficient lists of Fractions.
Rational roots are found exactly by the divisor test (numerator divides
the trailing coefficient, denominator divides the leading one, after
clearing denominators and powers of x), with integer factorization done
by trial division plus deterministic Brent-Pollard rho.  Remaining real
roots are certified irrational by deflation and located by Sturm-chain
bisection down to width 1e-12; sampling-free sign variation counts make
the root counts in each interval exact, so nothing is ever reported as a
root that is not one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ZiiError

__all__ = [
    "uni_eval",
    "uni_derivative",
    "uni_gcd",
    "squarefree_part",
    "rational_roots",
    "sturm_chain",
    "count_real_roots",
    "isolate_real_roots",
    "RealRoots",
    "real_roots",
]

_Z = Fraction(0)
ISOLATION_WIDTH = Fraction(1, 10**12)


def _trim(coeffs: list[Fraction]) -> list[Fraction]:
    out = list(coeffs)
    while out and out[-1] == 0:
        out.pop()
    return out


def uni_eval(coeffs: list[Fraction], x: Fraction) -> Fraction:
    acc = _Z
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def uni_derivative(coeffs: list[Fraction]) -> list[Fraction]:
    return [k * c for k, c in enumerate(coeffs)][1:]


def _divmod(num: list[Fraction], den: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    den = _trim(den)
    if not den:
        raise ZeroDivisionError("univariate division by zero polynomial")
    rem = _trim(num)
    q = [_Z] * max(len(rem) - len(den) + 1, 0)
    while len(rem) >= len(den):
        shift = len(rem) - len(den)
        factor = rem[-1] / den[-1]
        q[shift] = factor
        rem = _trim(
            [r - factor * den[i - shift] if 0 <= i - shift < len(den) else r
             for i, r in enumerate(rem)][:-1]
        )
        if len(rem) < len(den):
            break
    return q, rem


def uni_gcd(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    """Monic gcd by the Euclidean algorithm."""
    a, b = _trim(a), _trim(b)
    while b:
        _, r = _divmod(a, b)
        a, b = b, r
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def squarefree_part(coeffs: list[Fraction]) -> list[Fraction]:
    p = _trim(coeffs)
    if len(p) <= 2:
        return p
    g = uni_gcd(p, uni_derivative(p))
    if len(g) <= 1:
        return p
    q, r = _divmod(p, g)
    assert not r, "gcd must divide its argument"
    return q


# -- integer factorization for the divisor test ---------------------------

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent_rho(n: int) -> int:
    # deterministic parameter sweep; n is odd, composite, not a prime power of 2
    for c in range(1, 20):
        y, m, g, r, q = 2, 128, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ZiiError(f"integer factorization gave up on {n}")


def _factorize(n: int) -> dict[int, int]:
    factors: dict[int, int] = {}
    for p in (2, 3, 5, 7, 11, 13):
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
    d = 17
    while d * d <= n and d < 10_000:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += 2
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if _is_prime(m):
            factors[m] = factors.get(m, 0) + 1
            continue
        f = _brent_rho(m)
        stack.extend((f, m // f))
    return factors


def _divisors(n: int) -> list[int]:
    if n == 0:
        raise ValueError("zero has no divisor list")
    divs = [1]
    for p, e in _factorize(abs(n)).items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(set(divs))


def rational_roots(
    coeffs: list[Fraction],
    within: tuple[Fraction | None, Fraction | None] | None = None,
) -> list[Fraction]:
    """All rational roots (without multiplicity), sorted ascending.

    `within=(lo, hi)` restricts the search to lo <= root <= hi (either end
    may be None); candidates outside are skipped before any evaluation,
    which matters when the caller only accepts roots in a declared range.
    """
    lo, hi = within if within is not None else (None, None)
    p = _trim(coeffs)
    if not p:
        raise ValueError("the zero polynomial vanishes everywhere")
    if len(p) == 1:
        return []
    if lo is not None and lo == hi:
        # pinned range: the only possible root is the pin itself
        return [lo] if uni_eval(p, lo) == 0 else []
    den_lcm = 1
    for c in p:
        den_lcm = den_lcm * c.denominator // math.gcd(den_lcm, c.denominator)
    ints = [int(c * den_lcm) for c in p]
    low = 0
    while ints[low] == 0:
        low += 1
    roots: set[Fraction] = set()
    zero_ok = (lo is None or lo <= 0) and (hi is None or hi >= 0)
    if low > 0 and zero_ok:
        roots.add(_Z)
    ints = ints[low:]
    if len(ints) > 1:
        n = len(ints) - 1
        lo_n = lo.numerator if lo is not None else None
        lo_d = lo.denominator if lo is not None else None
        hi_n = hi.numerator if hi is not None else None
        hi_d = hi.denominator if hi is not None else None
        for num in _divisors(ints[0]):
            for den in _divisors(ints[-1]):
                if math.gcd(num, den) != 1:
                    continue
                for sn in (num, -num):
                    # integer bound tests before any Fraction is built
                    if lo_n is not None and sn * lo_d < lo_n * den:
                        continue
                    if hi_n is not None and sn * hi_d > hi_n * den:
                        continue
                    # integer Horner: den^n * P(sn/den), no Fraction ops
                    acc = ints[-1]
                    dpow = 1
                    for k in range(n - 1, -1, -1):
                        dpow *= den
                        acc = acc * sn + ints[k] * dpow
                    if acc == 0:
                        roots.add(Fraction(sn, den))
    return sorted(roots)


# -- Sturm chains -----------------------------------------------------------


def sturm_chain(coeffs: list[Fraction]) -> list[list[Fraction]]:
    p = _trim(coeffs)
    chain = [p, uni_derivative(p)]
    while len(chain[-1]) > 1:
        _, r = _divmod(chain[-2], chain[-1])
        if not r:
            break
        chain.append([-c for c in r])
    return [c for c in chain if c]


def _variations(chain: list[list[Fraction]], x: Fraction) -> int:
    signs = []
    for c in chain:
        v = uni_eval(c, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_real_roots(chain: list[list[Fraction]], lo: Fraction, hi: Fraction) -> int:
    """Number of distinct real roots in (lo, hi] for a squarefree chain head."""
    if lo >= hi:
        return 0
    return _variations(chain, lo) - _variations(chain, hi)


def _cauchy_bound(coeffs: list[Fraction]) -> Fraction:
    lead = coeffs[-1]
    return 1 + max(abs(c / lead) for c in coeffs[:-1]) if len(coeffs) > 1 else Fraction(1)


def isolate_real_roots(
    coeffs: list[Fraction], width: Fraction = ISOLATION_WIDTH
) -> list[tuple[Fraction, Fraction]]:
    """Disjoint intervals (lo, hi], each holding exactly one real root.

    Input must be squarefree (use squarefree_part first); intervals are
    bisected down to the requested width.
    """
    p = _trim(coeffs)
    if len(p) <= 1:
        return []
    chain = sturm_chain(p)
    bound = _cauchy_bound(p)
    work = [(-bound, bound)]
    isolated = []
    while work:
        lo, hi = work.pop()
        n = count_real_roots(chain, lo, hi)
        if n == 0:
            continue
        if n == 1:
            while hi - lo > width:
                mid = (lo + hi) / 2
                if count_real_roots(chain, lo, mid) == 1:
                    hi = mid
                else:
                    lo = mid
            isolated.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        work.append((lo, mid))
        work.append((mid, hi))
    return sorted(isolated)


@dataclass(frozen=True)
class RealRoots:
    """Exact rational roots plus isolating intervals for the irrational rest."""

    rational: tuple[Fraction, ...]
    irrational_intervals: tuple[tuple[Fraction, Fraction], ...]

    @property
    def count(self) -> int:
        return len(self.rational) + len(self.irrational_intervals)


def _deflate(coeffs: list[Fraction], root: Fraction) -> list[Fraction]:
    # synthetic division by (x - root); exact by construction
    acc = _Z
    result = []
    for c in reversed(coeffs):
        acc = acc * root + c
        result.append(acc)
    assert result[-1] == 0, "deflation by a non-root"
    quotient = result[:-1]
    quotient.reverse()
    return quotient


def real_roots(coeffs: list[Fraction]) -> RealRoots:
    """Complete real-root description of a nonzero univariate polynomial."""
    sf = squarefree_part(coeffs)
    rats = rational_roots(sf)
    rest = sf
    for r in rats:
        rest = _deflate(rest, r)
    intervals = isolate_real_roots(rest) if len(rest) > 2 else []
    return RealRoots(tuple(rats), tuple(intervals))
