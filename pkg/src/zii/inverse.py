"""Exact determinants, cofactors, and adjugate inverses of symbolic matrices.

The workhorse is fraction-free Bareiss elimination: every intermediate
entry is a minor of the original matrix, so the single division per step
is exact (checked, not trusted, via Poly.exact_divide).  Row swaps handle
zero pivots and only flip the sign.  A plain cofactor expansion is kept
as an independent cross-check for small matrices; the two must agree.

The inverse is returned exactly as (adjugate, determinant): entries of
M^(-1) are adj[r][c] / det, with no rational normal form imposed here.
On symmetric input the adjugate is symmetric and only one triangle is
computed.  A cheap self-check substitutes a fixed rational point and
verifies M(v) * adj(v) == det(v) * I before returning.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ._parallel import pmap
from .errors import SingularMatrix
from .poly import Poly
from .symbols import SymbolTable

__all__ = [
    "det_bareiss",
    "det_cofactor",
    "minor_det",
    "cofactor",
    "connected_components",
    "determinant",
    "blocked_cofactors",
    "invert_exact",
    "ExactInverse",
]

Rows = list[list[Poly]]

SELF_CHECK_MAX = 24  # adjugate cost dominates far below this anyway


def _square(rows: Rows) -> int:
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("matrix must be square")
    return n


def det_bareiss(rows: Rows) -> Poly:
    """Fraction-free determinant; input is not modified."""
    n = _square(rows)
    if n == 0:
        raise ValueError("empty matrix has no determinant here")
    table = rows[0][0].table
    work = [list(r) for r in rows]
    sign = 1
    prev = Poly.const(table, 1)
    for k in range(n - 1):
        if work[k][k].is_zero:
            swap = next((i for i in range(k + 1, n) if not work[i][k].is_zero), None)
            if swap is None:
                return Poly.zero(table)
            work[k], work[swap] = work[swap], work[k]
            sign = -sign
        pivot = work[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                work[i][j] = (pivot * work[i][j] - work[i][k] * work[k][j]).exact_divide(prev)
            work[i][k] = Poly.zero(table)
        prev = pivot
    det = work[n - 1][n - 1]
    return -det if sign < 0 else det


def det_cofactor(rows: Rows) -> Poly:
    """Expansion along the first row, memoized on active column sets.

    Exponential in n; intended only as an independent cross-check for
    small matrices (n <= 8 in the tests).
    """
    n = _square(rows)
    table = rows[0][0].table
    memo: dict[tuple[int, ...], Poly] = {}

    def minor(depth: int, cols: tuple[int, ...]) -> Poly:
        if not cols:
            return Poly.const(table, 1)
        if cols in memo:
            return memo[cols]
        total = Poly.zero(table)
        for pos, c in enumerate(cols):
            entry = rows[depth][c]
            if entry.is_zero:
                continue
            sub = minor(depth + 1, cols[:pos] + cols[pos + 1:])
            term = entry * sub
            total = total - term if pos % 2 else total + term
        memo[cols] = total
        return total

    return minor(0, tuple(range(n)))


def minor_det(rows: Rows, skip_row: int, skip_col: int) -> Poly:
    sub = [
        [rows[i][j] for j in range(len(rows)) if j != skip_col]
        for i in range(len(rows))
        if i != skip_row
    ]
    if not sub:
        return Poly.const(rows[0][0].table, 1)
    return det_bareiss(sub)


def cofactor(rows: Rows, r: int, c: int) -> Poly:
    """Signed minor C_rc = (-1)^(r+c) det(M with row r, column c removed)."""
    m = minor_det(rows, r, c)
    return -m if (r + c) % 2 else m


def connected_components(rows: Rows) -> tuple[tuple[int, ...], ...]:
    """Index blocks of the zero pattern under simultaneous row/column permutation.

    Indices i and j are joined when either of the symmetric entries (i, j),
    (j, i) is nonzero, so entries between different blocks are zero in both
    triangles and sorting by block makes the matrix block-diagonal.  Parity
    structure (e.g. vanishing odd moments of a symmetric domain) is picked
    up automatically.  Blocks are sorted by smallest member, ascending inside.
    """
    n = _square(rows)
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(n):
        for j in range(i + 1, n):
            if not rows[i][j].is_zero or not rows[j][i].is_zero:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return tuple(tuple(g) for g in sorted(groups.values()))


def _submatrix(rows: Rows, idx: tuple[int, ...]) -> Rows:
    return [[rows[i][j] for j in idx] for i in idx]


def determinant(rows: Rows) -> Poly:
    """Determinant as the product of Bareiss determinants of diagonal blocks.

    On an interleaved block matrix plain Bareiss keeps rescaling the
    untouched blocks by growing minors; splitting first avoids that blowup
    and is exact because the grouping permutation acts on rows and columns
    alike (its two signs cancel).
    """
    comps = connected_components(rows)
    if len(comps) == 1:
        return det_bareiss(rows)
    table = rows[0][0].table
    out = Poly.const(table, 1)
    for comp in comps:
        block = det_bareiss(_submatrix(rows, comp))
        if block.is_zero:
            return Poly.zero(table)
        out = out * block
    return out


def blocked_cofactors(rows: Rows, positions) -> list[Poly]:
    """Cofactors C(r, c) at the given positions, sharing work across blocks.

    A cofactor joining two different blocks vanishes identically: the minor
    keeps all columns of one block but loses one of its rows, leaving those
    columns short of full rank.  Inside a block it factors as the
    block-local cofactor times the determinants of all other blocks (the
    adjugate identity applied blockwise; again no sign appears because rows
    and columns are permuted together).
    """
    positions = list(positions)
    comps = connected_components(rows)
    if len(comps) == 1:
        return list(pmap(lambda rc: cofactor(rows, rc[0], rc[1]), positions))
    table = rows[0][0].table
    home = {i: ci for ci, comp in enumerate(comps) for i in comp}
    blocks = [_submatrix(rows, comp) for comp in comps]
    dets = pmap(det_bareiss, blocks)
    zero = Poly.zero(table)

    def one(pos: tuple[int, int]) -> Poly:
        r, c = pos
        ci = home[r]
        if ci != home[c]:
            return zero
        comp = comps[ci]
        local = cofactor(blocks[ci], comp.index(r), comp.index(c))
        for j, block_det in enumerate(dets):
            if j != ci:
                local = local * block_det
        return local

    return list(pmap(one, positions))


@dataclass(frozen=True)
class ExactInverse:
    """M^(-1) = adjugate / determinant, both exact."""

    adjugate: tuple[tuple[Poly, ...], ...]
    determinant: Poly

    def entry(self, r: int, c: int) -> tuple[Poly, Poly]:
        return self.adjugate[r][c], self.determinant

    def rational_entries(self) -> list[list[Fraction]]:
        """Entries of the inverse as plain rationals (constant matrices only)."""
        det = self.determinant.constant_value()
        return [[a.constant_value() / det for a in row] for row in self.adjugate]


def _is_symmetric(rows: Rows) -> bool:
    n = len(rows)
    return all(rows[i][j] == rows[j][i] for i in range(n) for j in range(i + 1, n))


def _self_check_point(table: SymbolTable, det: Poly) -> dict[str, Fraction] | None:
    # fixed small odd primes, shifted until the determinant is nonzero there
    primes = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53]
    names = table.names
    if len(names) > len(primes):
        return None
    for shift in range(5):
        point = {
            name: Fraction(primes[(i + shift) % len(primes)], 2)
            for i, name in enumerate(names)
        }
        if det.evaluate(point) != 0:
            return point
    return None


def invert_exact(matrix, self_check: bool = True) -> ExactInverse:
    """Adjugate inverse of a MomentMatrix or plain list-of-lists of Poly."""
    rows = matrix.rows() if hasattr(matrix, "rows") else [list(r) for r in matrix]
    n = _square(rows)
    table = rows[0][0].table
    det = determinant(rows)
    if det.is_zero:
        raise SingularMatrix(f"matrix of order {n} has identically zero determinant")
    symmetric = _is_symmetric(rows)
    if symmetric:
        jobs = [(r, c) for r in range(n) for c in range(r, n)]
    else:
        jobs = [(r, c) for r in range(n) for c in range(n)]
    # adj[r][c] = cofactor(c, r); transpose is free for symmetric input
    results = blocked_cofactors(rows, [(c, r) for r, c in jobs])
    adj: list[list[Poly]] = [[None] * n for _ in range(n)]
    for (r, c), value in zip(jobs, results):
        adj[r][c] = value
        if symmetric:
            adj[c][r] = value
    inverse = ExactInverse(tuple(tuple(row) for row in adj), det)
    if self_check and n <= SELF_CHECK_MAX:
        point = _self_check_point(table, det)
        if point is not None:
            _verify_adjugate(rows, inverse, point)
    return inverse


def _verify_adjugate(rows: Rows, inverse: ExactInverse, point: dict[str, Fraction]):
    n = len(rows)
    m_num = [[e.evaluate(point) for e in row] for row in rows]
    a_num = [[e.evaluate(point) for e in row] for row in inverse.adjugate]
    d_num = inverse.determinant.evaluate(point)
    for i in range(n):
        for j in range(n):
            acc = sum(m_num[i][k] * a_num[k][j] for k in range(n))
            expected = d_num if i == j else 0
            if acc != expected:
                raise AssertionError(
                    f"adjugate self-check failed at entry ({i}, {j}): {acc} != {expected}"
                )
