"""Monomial bases and truncated moment matrices.

The degree-d basis lists all bivariate monomials of total degree at most
d in the fixed graded order

    1, x, y, x^2, x*y, y^2, x^3, x^2*y, ...

i.e. degree blocks ascending, and within the block of degree i the x
exponent descending.  The moment matrix M_d has (r, c) entry equal to the
moment of the product of basis monomials r and c, so it is symmetric and
each entry depends only on the exponent sum; entries are shared Poly
objects, making large symbolic matrices cheap to hold.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DegreeOutOfRange
from .measures import DensityFamily
from .poly import Poly

__all__ = ["MonomialBasis", "MomentMatrix", "build_basis", "build_matrix", "monomial_label"]

MAX_DEGREE = 64


def _check_degree(degree: int):
    if not isinstance(degree, int) or degree < 0 or degree > MAX_DEGREE:
        raise DegreeOutOfRange(f"degree must be an integer in 0..{MAX_DEGREE}, got {degree}")


def monomial_label(exps: tuple[int, int]) -> str:
    i, j = exps
    parts = []
    if i == 1:
        parts.append("x")
    elif i > 1:
        parts.append(f"x^{i}")
    if j == 1:
        parts.append("y")
    elif j > 1:
        parts.append(f"y^{j}")
    return "*".join(parts) if parts else "1"


@dataclass(frozen=True)
class MonomialBasis:
    degree: int
    exponents: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.exponents)

    def label(self, index: int) -> str:
        return monomial_label(self.exponents[index])

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(monomial_label(e) for e in self.exponents)


def build_basis(degree: int) -> MonomialBasis:
    _check_degree(degree)
    exps = []
    for i in range(degree + 1):
        for j in range(i + 1):
            exps.append((i - j, j))
    assert len(exps) == (degree + 1) * (degree + 2) // 2
    return MonomialBasis(degree, tuple(exps))


@dataclass(frozen=True)
class MomentMatrix:
    family: DensityFamily
    basis: MonomialBasis
    entries: tuple[tuple[Poly, ...], ...]

    def __len__(self) -> int:
        return len(self.basis)

    @property
    def degree(self) -> int:
        return self.basis.degree

    def rows(self) -> list[list[Poly]]:
        return [list(r) for r in self.entries]

    def entry(self, r: int, c: int) -> Poly:
        return self.entries[r][c]


def build_matrix(family: DensityFamily, degree: int) -> MomentMatrix:
    """M_d with (r, c) entry moment(b_r * b_c); symmetric by construction."""
    basis = build_basis(degree)
    cache: dict[tuple[int, int], Poly] = {}
    n = len(basis)
    rows = [[None] * n for _ in range(n)]
    for r in range(n):
        pr, qr = basis.exponents[r]
        for c in range(r, n):
            pc, qc = basis.exponents[c]
            key = (pr + pc, qr + qc)
            if key not in cache:
                cache[key] = family.moment(*key)
            rows[r][c] = rows[c][r] = cache[key]
    return MomentMatrix(family, basis, tuple(tuple(row) for row in rows))
