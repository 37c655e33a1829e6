"""Univariate real-root machinery: rational roots, Sturm chains, isolation."""

from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import sympy

from zii.roots import (
    ISOLATION_WIDTH,
    count_real_roots,
    isolate_real_roots,
    rational_roots,
    real_roots,
    squarefree_part,
    sturm_chain,
    uni_derivative,
    uni_eval,
    uni_gcd,
)

F = Fraction


def poly_from_roots(roots):
    """Coefficients (ascending) of prod (x - r)."""
    coeffs = [F(1)]
    for r in roots:
        coeffs = [F(0)] + coeffs
        for k in range(len(coeffs) - 1):
            coeffs[k] -= r * coeffs[k + 1]
    return coeffs


small_fracs = st.fractions(
    min_value=F(-12), max_value=F(12), max_denominator=6
)


class TestRationalRoots:
    @settings(max_examples=60, deadline=None)
    @given(st.lists(small_fracs, min_size=1, max_size=4))
    def test_recovers_constructed_roots(self, roots):
        coeffs = poly_from_roots(roots)
        got = rational_roots(coeffs)
        assert set(got) == set(roots)

    def test_no_rational_roots(self):
        # x^2 + 1 and x^2 - 2 have none
        assert rational_roots([F(1), F(0), F(1)]) == []
        assert rational_roots([F(-2), F(0), F(1)]) == []

    def test_zero_root(self):
        assert rational_roots([F(0), F(0), F(1)]) == [F(0)]

    def test_within_filters(self):
        coeffs = poly_from_roots([F(-3), F(0), F(2), F(5)])
        assert set(rational_roots(coeffs, within=(F(0), F(4)))) == {F(0), F(2)}
        assert set(rational_roots(coeffs, within=(None, F(0)))) == {F(-3), F(0)}
        assert set(rational_roots(coeffs, within=(F(1), None))) == {F(2), F(5)}

    def test_pinned_range(self):
        coeffs = poly_from_roots([F(2), F(7)])
        assert rational_roots(coeffs, within=(F(2), F(2))) == [F(2)]
        assert rational_roots(coeffs, within=(F(3), F(3))) == []

    def test_denominator_roots(self):
        coeffs = poly_from_roots([F(1, 3), F(-5, 7)])
        assert set(rational_roots(coeffs)) == {F(1, 3), F(-5, 7)}

    @settings(max_examples=40, deadline=None)
    @given(st.lists(small_fracs, min_size=1, max_size=4))
    def test_agrees_with_sympy(self, coeffs):
        if all(c == 0 for c in coeffs):
            return
        x = sympy.Symbol("x")
        expr = sum(sympy.Rational(c) * x**i for i, c in enumerate(coeffs))
        want = {
            F(int(r.p), int(r.q))
            for r in sympy.roots(sympy.Poly(expr, x), multiple=True)
            if r.is_rational
        }
        assert set(rational_roots(list(coeffs))) == want


class TestSturm:
    def test_count_on_known_polynomial(self):
        # (x-1)(x+2)(x-1/2): three real roots
        coeffs = poly_from_roots([F(1), F(-2), F(1, 2)])
        chain = sturm_chain(coeffs)
        assert count_real_roots(chain, F(-10), F(10)) == 3
        assert count_real_roots(chain, F(0), F(10)) == 2
        assert count_real_roots(chain, F(-10), F(0)) == 1

    def test_no_real_roots(self):
        chain = sturm_chain([F(1), F(0), F(1)])  # x^2 + 1
        assert count_real_roots(chain, F(-100), F(100)) == 0

    def test_isolation_of_sqrt2(self):
        intervals = isolate_real_roots([F(-2), F(0), F(1)])
        assert len(intervals) == 2
        for lo, hi in intervals:
            assert hi - lo <= ISOLATION_WIDTH
        (lo1, hi1), (lo2, hi2) = sorted(intervals)
        assert float(lo1) <= -math.sqrt(2) <= float(hi1)
        assert float(lo2) <= math.sqrt(2) <= float(hi2)

    def test_isolation_width_is_tight(self):
        assert ISOLATION_WIDTH == F(1, 10**12)

    @settings(max_examples=30, deadline=None)
    @given(st.lists(small_fracs, min_size=2, max_size=5))
    def test_interval_count_matches_sympy_real_roots(self, roots_in):
        coeffs = poly_from_roots(roots_in)
        x = sympy.Symbol("x")
        expr = sum(sympy.Rational(c) * x**i for i, c in enumerate(coeffs))
        want = len(sympy.Poly(expr, x).real_roots())  # with multiplicity
        distinct = len(set(roots_in))
        rr = real_roots(coeffs)
        assert rr.count == distinct
        assert want == len(roots_in)


class TestHelpers:
    def test_uni_eval_horner(self):
        # 2 - x + 3x^2 at x = 1/2
        assert uni_eval([F(2), F(-1), F(3)], F(1, 2)) == F(2) - F(1, 2) + F(3, 4)

    def test_derivative(self):
        assert uni_derivative([F(5), F(4), F(3)]) == [F(4), F(6)]

    def test_gcd_of_shared_factor(self):
        a = poly_from_roots([F(1), F(2)])
        b = poly_from_roots([F(2), F(3)])
        g = uni_gcd(a, b)
        # monic gcd is (x - 2)
        assert len(g) == 2
        assert uni_eval(g, F(2)) == 0

    def test_squarefree_part_drops_multiplicity(self):
        # (x-1)^3 -> (x-1) up to constant
        cubed = poly_from_roots([F(1), F(1), F(1)])
        sf = squarefree_part(cubed)
        assert len(sf) == 2
        assert uni_eval(sf, F(1)) == 0

    def test_real_roots_mixed(self):
        # (x-2)(x^2-3): one rational root, two irrational
        coeffs = poly_from_roots([F(2)])
        x2m3 = [F(-3), F(0), F(1)]
        # multiply (x-2) * (x^2-3)
        prod = [F(0)] * 4
        for i, a in enumerate(coeffs):
            for j, b in enumerate(x2m3):
                prod[i + j] += a * b
        rr = real_roots(prod)
        assert rr.rational == (F(2),)
        assert len(rr.irrational_intervals) == 2
        assert rr.count == 3
