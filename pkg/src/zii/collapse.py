"""Search for the degree at which the vanishing equations force independence.

The solution-set analysis is deliberately conservative: everything it
asserts positively (a witness point, an exact root, inconsistency of a
linear system) is verified in exact rational arithmetic, and sampling
evidence is reported as evidence, never as a proof of emptiness.

Pipeline for one cumulative equation system:

  1. eliminate parameters that appear linearly with a rational constant
     coefficient, first from declared equality constraints, then greedily
     from the equations themselves (each such step is an equivalence);
  2. if nothing remains, the system is trivially satisfiable;
  3. if one parameter remains, intersect the exact real-root sets of the
     residual equations (gcd, divisor test, Sturm isolation);
  4. otherwise sample a deterministic grid over the declared (or default)
     bounds, tally sign patterns, and recover exact witnesses by solving
     the last residual equation for the last free parameter along each
     grid slice; every candidate is re-checked exactly before being
     called a witness.

A degree collapses when admissible witnesses exist and every one of them
puts the density in product form; the verdict is witness-based, which the
reports say out loud.  Densities on the unit disk can never be product
form (the support itself is not a product), so they carry a distinct
verdict and never collapse.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .equations import EquationSystem, zii_equations
from .errors import ConstraintViolation
from .measures import DensityFamily, ParamDecl, UnitDisk
from .poly import Poly
from .roots import RealRoots, rational_roots, real_roots, uni_eval, uni_gcd
from .symbols import Assumption, PI_NAME

__all__ = [
    "SolveStatus",
    "ProductVerdict",
    "Witness",
    "GridSummary",
    "SolutionAnalysis",
    "DegreeReport",
    "CollapseReport",
    "solve_univariate",
    "analyze_system",
    "check_product_form",
    "moment_factorization_check",
    "collapse_order",
]

DEFAULT_GRID_POINTS = 21
GRID_LEAF_CAP = 500_000
WITNESS_CAP = 64
TRIVIAL_SCAN_CAP = 20_000


class SolveStatus(enum.Enum):
    TRIVIAL = "trivial"  # no equations survive stripping/elimination, no residue
    EXACT = "exact"      # solved by elimination and exact univariate roots
    EMPTY = "empty"      # proven inconsistent in exact arithmetic
    SAMPLED = "sampled"  # grid evidence only; emptiness is never claimed


class ProductVerdict(enum.Enum):
    PRODUCT_FORM = "product-form"
    NOT_PRODUCT_FORM = "not-product-form"
    DOMAIN_NOT_PRODUCT = "domain-not-product"


@dataclass(frozen=True)
class Witness:
    """A full admissible parameter assignment satisfying the system."""

    values: tuple[tuple[str, Fraction], ...]

    def as_dict(self) -> dict[str, Fraction]:
        return dict(self.values)

    def text(self) -> str:
        return ", ".join(f"{n} = {v}" for n, v in self.values) if self.values else "(empty)"


@dataclass(frozen=True)
class GridSummary:
    symbols: tuple[str, ...]
    axis_sizes: tuple[int, ...]
    total_points: int
    # per residual equation: (negative, zero, positive) counts over the grid
    sign_counts: tuple[tuple[int, int, int], ...]


@dataclass(frozen=True)
class SolutionAnalysis:
    status: SolveStatus
    residual: tuple[str, ...]  # equation texts after elimination
    eliminations: tuple[tuple[str, str], ...]  # (symbol, replacement text)
    witnesses: tuple[Witness, ...]
    intervals: tuple[tuple[str, Fraction, Fraction], ...]  # irrational root evidence
    grid: GridSummary | None
    notes: tuple[str, ...]


# -- grids -----------------------------------------------------------------


def default_bounds(decl: ParamDecl) -> tuple[Fraction, Fraction]:
    lo, hi = decl.lower, decl.upper
    if lo is None or hi is None:
        if decl.assumption is Assumption.POSITIVE:
            dlo, dhi = Fraction(1, 10), Fraction(2)
        elif decl.assumption is Assumption.NONNEG_INT:
            dlo, dhi = Fraction(0), Fraction(10)
        else:
            dlo, dhi = Fraction(-2), Fraction(2)
        lo = dlo if lo is None else lo
        hi = dhi if hi is None else hi
    if lo > hi:
        raise ConstraintViolation(f"{decl.name}: empty bound interval [{lo}, {hi}]")
    return lo, hi


def grid_values(decl: ParamDecl, points: int = DEFAULT_GRID_POINTS) -> list[Fraction]:
    lo, hi = default_bounds(decl)
    if decl.assumption is Assumption.NONNEG_INT:
        start, stop = -(-lo.numerator // lo.denominator), hi.numerator // hi.denominator
        ints = list(range(start, stop + 1))
        if len(ints) > points:
            stride = -(-len(ints) // points)
            ints = ints[::stride]
        return [Fraction(k) for k in ints]
    if lo == hi or points <= 1:
        return [lo]
    step = (hi - lo) / (points - 1)
    return [lo + k * step for k in range(points)]


# -- elimination -------------------------------------------------------------


def _linear_candidate(
    poly: Poly, candidates: Sequence[str]
) -> tuple[str, Poly] | None:
    """First parameter in table order where poly == A*s + B, A a nonzero
    rational constant and B free of s; returns (s, -B/A)."""
    table = poly.table
    for name in candidates:
        idx = table.index(name)
        coeff = None
        ok = True
        rest = {}
        for exps, c in poly.terms.items():
            e = exps[idx]
            if e == 0:
                rest[exps] = c
            elif e == 1 and sum(exps) == 1:
                coeff = c
            else:
                ok = False
                break
        if ok and coeff:
            b = Poly(table, rest)
            return name, b * (-1 / coeff)
    return None


def _apply_substitution(polys: list[Poly], name: str, repl: Poly) -> list[Poly]:
    out = []
    for p in polys:
        q = p.subs_symbol(name, repl)
        q = q.strip_known_nonzero_factors()
        if not q.is_zero and q not in out:
            out.append(q)
    return out


def _extend_assignment(
    free_values: Mapping[str, Fraction], eliminations: Sequence[tuple[str, Poly]]
) -> dict[str, Fraction]:
    # later eliminations only reference symbols still free at their time,
    # so resolving them in reverse order needs no iteration
    full = dict(free_values)
    for name, repl in reversed(eliminations):
        full[name] = repl.evaluate(full)
    return full


# -- witnesses ----------------------------------------------------------------


def _admit(
    family: DensityFamily,
    free_values: Mapping[str, Fraction],
    eliminations: Sequence[tuple[str, Poly]],
    equations: Sequence[Poly],
) -> Witness | None:
    """Full exact recheck of a candidate; returns a Witness or None."""
    try:
        full = _extend_assignment(free_values, eliminations)
    except Exception:
        return None
    try:
        checked = family.check_point(full)
    except ConstraintViolation:
        return None
    for eq in equations:
        # partial substitution keeps a possible PI factor symbolic; the
        # result must be the zero polynomial (PI is transcendental over Q)
        if not eq.substitute(checked).is_zero:
            return None
    order = {n: i for i, n in enumerate(family.table.names)}
    return Witness(tuple(sorted(checked.items(), key=lambda kv: order[kv[0]])))


# -- univariate --------------------------------------------------------------


def solve_univariate(poly: Poly) -> RealRoots:
    """Exact real roots of a polynomial in exactly one symbol."""
    names = poly.free_symbols()
    if not names:
        raise ValueError("constant polynomial; nothing to solve")
    # as_univariate raises NotUnivariate when more symbols are present
    return real_roots(poly.as_univariate(names[0]))


# -- the analysis pipeline -----------------------------------------------------


def analyze_system(
    system: EquationSystem | Iterable[Poly],
    family: DensityFamily,
    grid_points: int = DEFAULT_GRID_POINTS,
    witness_cap: int = WITNESS_CAP,
) -> SolutionAnalysis:
    if isinstance(system, EquationSystem):
        polys = [e.poly for e in system.entries]
    else:
        polys = list(system)
    equations = []
    for p in polys:
        q = p.strip_known_nonzero_factors()
        if not q.is_zero and q not in equations:
            equations.append(q)
    original_equations = list(equations)
    params = list(family.param_names)
    notes: list[str] = []
    eliminations: list[tuple[str, Poly]] = []

    # phase 1: equality constraints, phase 2: greedy over the equations
    eq_constraints = [c.poly for c in family.constraints if c.relation == "="]
    changed = True
    while changed:
        changed = False
        remaining_params = [p for p in params if p not in dict(eliminations)]
        for source, pool in (("constraint", eq_constraints), ("equation", equations)):
            found = None
            for p in pool:
                found = _linear_candidate(p, remaining_params)
                if found:
                    break
            if found:
                name, repl = found
                eliminations.append((name, repl))
                eq_constraints = _apply_substitution(eq_constraints, name, repl)
                equations = _apply_substitution(equations, name, repl)
                notes.append(f"eliminated {name} from a linear {source}")
                changed = True
                break

    if eq_constraints:
        notes.append(
            "equality constraints without a linear pivot remain; they are "
            "enforced exactly on every witness"
        )

    for p in equations:
        if PI_NAME in p.free_symbols():
            raise ConstraintViolation(
                "a residual equation still involves the constant PI after "
                "stripping; the walk only samples declared parameters "
                f"(offending equation: {p.to_text()})"
            )

    inconsistent = [p for p in equations if not p.free_symbols()]
    if inconsistent:
        return SolutionAnalysis(
            SolveStatus.EMPTY,
            tuple(p.to_text() for p in equations),
            _elim_texts(eliminations),
            (),
            (),
            None,
            tuple(notes + ["a nonzero constant equation remains: no solutions"]),
        )

    eliminated = {n for n, _ in eliminations}
    free = [p for p in params if p not in eliminated]
    residual_texts = tuple(p.to_text() for p in equations)

    if not equations:
        witnesses, scan_note = _scan_for_admissible(
            family, free, eliminations, original_equations, grid_points
        )
        if scan_note:
            notes.append(scan_note)
        status = SolveStatus.EXACT if eliminations else SolveStatus.TRIVIAL
        if not eliminations:
            notes.append("every mask equation stripped to zero")
        return SolutionAnalysis(
            status, residual_texts, _elim_texts(eliminations), witnesses, (), None, tuple(notes)
        )

    involved = sorted(
        {s for p in equations for s in p.free_symbols()},
        key=family.table.names.index,
    )
    if len(involved) == 1:
        return _univariate_analysis(
            family, equations, involved[0], free, eliminations,
            original_equations, residual_texts, notes, grid_points,
        )
    return _sampled_analysis(
        family, equations, free, eliminations, original_equations,
        residual_texts, notes, grid_points, witness_cap,
    )


def _elim_texts(eliminations: Sequence[tuple[str, Poly]]) -> tuple[tuple[str, str], ...]:
    return tuple((n, r.to_text()) for n, r in eliminations)


def _decl_for(family: DensityFamily, name: str) -> ParamDecl:
    return family.param(name)


def _scan_for_admissible(
    family: DensityFamily,
    free: Sequence[str],
    eliminations: Sequence[tuple[str, Poly]],
    original_equations: Sequence[Poly],
    grid_points: int,
) -> tuple[tuple[Witness, ...], str | None]:
    """First admissible grid point for a system with no residual equations."""
    if not free:
        w = _admit(family, {}, eliminations, original_equations)
        return ((w,) if w else ()), None if w else "determined point fails constraints"
    grids = [grid_values(_decl_for(family, n), grid_points) for n in free]
    scanned = 0
    for combo in itertools.product(*grids):
        if scanned >= TRIVIAL_SCAN_CAP:
            return (), f"no admissible point in the first {TRIVIAL_SCAN_CAP} grid points"
        scanned += 1
        w = _admit(family, dict(zip(free, combo)), eliminations, original_equations)
        if w:
            return (w,), None
    return (), "no admissible grid point satisfies the constraints"


def _univariate_analysis(
    family, equations, symbol, free, eliminations,
    original_equations, residual_texts, notes, grid_points,
) -> SolutionAnalysis:
    g = None
    for p in equations:
        coeffs = p.as_univariate(symbol)
        g = coeffs if g is None else uni_gcd(g, coeffs)
    if len(g) == 1:
        return SolutionAnalysis(
            SolveStatus.EMPTY, residual_texts, _elim_texts(eliminations), (), (), None,
            tuple(notes + [f"equations in {symbol} share no common root"]),
        )
    found = real_roots(g)
    other_free = [n for n in free if n != symbol]
    witnesses: list[Witness] = []
    for root in found.rational:
        if other_free:
            grids = [grid_values(_decl_for(family, n), grid_points) for n in other_free]
            for combo in itertools.product(*grids):
                values = dict(zip(other_free, combo))
                values[symbol] = root
                w = _admit(family, values, eliminations, original_equations)
                if w:
                    witnesses.append(w)
                    break
        else:
            w = _admit(family, {symbol: root}, eliminations, original_equations)
            if w:
                witnesses.append(w)
    intervals = tuple((symbol, lo, hi) for lo, hi in found.irrational_intervals)
    if intervals:
        notes = notes + [
            "irrational roots isolated but not admitted as witnesses "
            "(exact product-form checks need rational points)"
        ]
    return SolutionAnalysis(
        SolveStatus.EXACT, residual_texts, _elim_texts(eliminations),
        tuple(witnesses), intervals, None, tuple(notes),
    )


def _sampled_analysis(
    family, equations, free, eliminations, original_equations,
    residual_texts, notes, grid_points, witness_cap=WITNESS_CAP,
) -> SolutionAnalysis:
    # only symbols the equations mention are walked; the rest do not affect
    # sign patterns and are gridded at admission time to complete a witness
    involved = {s for p in equations for s in p.free_symbols()}
    active = [n for n in free if n in involved]
    inactive = [n for n in free if n not in involved]
    grids = {n: grid_values(_decl_for(family, n), grid_points) for n in active}
    points = grid_points
    while points > 2:
        total = 1
        for g in grids.values():
            total *= len(g)
        if total <= GRID_LEAF_CAP:
            break
        points = (points + 1) // 2
        grids = {n: grid_values(_decl_for(family, n), points) for n in active}
    if points != grid_points:
        notes = notes + [f"grid reduced to {points} points per axis to bound the walk"]
    if inactive:
        notes = notes + [
            "parameters not in the residual equations ("
            + ", ".join(inactive)
            + ") are gridded only when completing a witness"
        ]

    syms = list(active)
    axis = [grids[n] for n in syms]
    last_decl = _decl_for(family, syms[-1])
    # solved candidates outside the declared range would fail admission anyway
    last_within = (last_decl.lower, last_decl.upper)
    inactive_grids = [grid_values(_decl_for(family, n), grid_points) for n in inactive]
    sign_counts = [[0, 0, 0] for _ in equations]
    witnesses: list[Witness] = []
    seen: set[tuple] = set()

    def admit_candidate(values: dict[str, Fraction]):
        if len(witnesses) >= witness_cap:
            return
        key = tuple(sorted(values.items()))
        if key in seen:
            return
        seen.add(key)
        if inactive:
            for combo in itertools.product(*inactive_grids):
                w = _admit(
                    family, {**values, **dict(zip(inactive, combo))},
                    eliminations, original_equations,
                )
                if w:
                    witnesses.append(w)
                    return
        else:
            w = _admit(family, values, eliminations, original_equations)
            if w:
                witnesses.append(w)

    def walk(level: int, polys: list[Poly], assignment: dict[str, Fraction]):
        if level == len(syms) - 1:
            last = syms[level]
            coeff_lists = [p.as_univariate(last) for p in polys]
            for v in axis[level]:
                all_zero = True
                for k, cl in enumerate(coeff_lists):
                    val = uni_eval(cl, v)
                    slot = 1 if val == 0 else (0 if val < 0 else 2)
                    sign_counts[k][slot] += 1
                    if val != 0:
                        all_zero = False
                if all_zero:
                    admit_candidate({**assignment, last: v})
            # exact witnesses off the grid: solve the last non-constant
            # residual equation for the last symbol on this slice
            for cl in reversed(coeff_lists):
                if len(cl) > 1:
                    for root in rational_roots(cl, within=last_within):
                        admit_candidate({**assignment, last: root})
                    break
        else:
            name = syms[level]
            for v in axis[level]:
                walk(
                    level + 1,
                    [p.substitute({name: v}) for p in polys],
                    {**assignment, name: v},
                )

    walk(0, list(equations), {})
    total = 1
    for g in axis:
        total *= len(g)
    grid = GridSummary(
        tuple(syms), tuple(len(g) for g in axis), total,
        tuple(tuple(c) for c in sign_counts),
    )
    if len(witnesses) >= witness_cap:
        notes = notes + [f"witness collection capped at {witness_cap}"]
    if not witnesses:
        notes = notes + [
            "no exact witness found on the sample; this is evidence, not a "
            "proof that the system has no admissible solutions"
        ]
    return SolutionAnalysis(
        SolveStatus.SAMPLED, residual_texts, _elim_texts(eliminations),
        tuple(witnesses), (), grid, tuple(notes),
    )


# -- product form ---------------------------------------------------------------


def _rank(rows: list[list[Fraction]]) -> int:
    work = [list(r) for r in rows]
    rank = 0
    cols = len(work[0]) if work else 0
    row = 0
    for col in range(cols):
        pivot = next((r for r in range(row, len(work)) if work[r][col] != 0), None)
        if pivot is None:
            continue
        work[row], work[pivot] = work[pivot], work[row]
        pv = work[row][col]
        for r in range(row + 1, len(work)):
            if work[r][col] != 0:
                f = work[r][col] / pv
                work[r] = [a - f * b for a, b in zip(work[r], work[row])]
        rank += 1
        row += 1
        if row == len(work):
            break
    return rank


def check_product_form(family: DensityFamily, point: Mapping[str, Fraction]) -> ProductVerdict:
    """Does the density at this admissible point factor as g(x) h(y)?

    Exact rank test on the coefficient grid; rank <= 1 over a product
    base measure means the density separates.  The disk support is not a
    product set, so disk families get their own verdict unconditionally.
    """
    values = family.check_point(point)
    if isinstance(family.base, UnitDisk):
        return ProductVerdict.DOMAIN_NOT_PRODUCT
    grid = family.coefficient_grid(values)
    return (
        ProductVerdict.PRODUCT_FORM
        if _rank(grid) <= 1
        else ProductVerdict.NOT_PRODUCT_FORM
    )


@dataclass(frozen=True)
class FactorizationReport:
    residuals: tuple[tuple[tuple[int, int], Fraction], ...]
    max_abs: Fraction

    def residual(self, p: int, q: int) -> Fraction:
        return dict(self.residuals)[(p, q)]


def moment_factorization_check(
    family: DensityFamily, point: Mapping[str, Fraction], max_p: int, max_q: int
) -> FactorizationReport:
    """Exact residuals E[x^p y^q] - E[x^p] E[y^q] at a parameter point.

    Expectations are moments normalized by the mass; any shared power of
    PI cancels between numerator and denominator, keeping disk families
    exact as well.
    """
    values = family.check_point(point)
    mass = family.moment(0, 0)
    residuals = []
    biggest = Fraction(0)
    for p in range(max_p + 1):
        for q in range(max_q + 1):
            num = family.moment(p, q) * mass - family.moment(p, 0) * family.moment(0, q)
            den = mass * mass
            val = _pi_free_ratio(num, den, values)
            residuals.append(((p, q), val))
            biggest = max(biggest, abs(val))
    return FactorizationReport(tuple(residuals), biggest)


def _pi_free_ratio(num: Poly, den: Poly, values: Mapping[str, Fraction]) -> Fraction:
    if num.is_zero:
        return Fraction(0)
    table = num.table
    idx = table.index(PI_NAME)
    k_den = min(e[idx] for e in den.terms)
    if k_den:
        if min(e[idx] for e in num.terms) < k_den:
            raise ConstraintViolation("PI does not cancel in the expectation ratio")
        pi_pow = Poly.symbol(table, PI_NAME) ** k_den
        num = num.exact_divide(pi_pow)
        den = den.exact_divide(pi_pow)
    if any(e[idx] for e in num.terms) or any(e[idx] for e in den.terms):
        raise ConstraintViolation("PI does not cancel in the expectation ratio")
    d = den.evaluate(values)
    if d == 0:
        raise ConstraintViolation("zero mass at the given point")
    return num.evaluate(values) / d


# -- the search -------------------------------------------------------------------


@dataclass(frozen=True)
class DegreeReport:
    degree: int
    system: EquationSystem
    cumulative: tuple[str, ...]
    analysis: SolutionAnalysis
    verdicts: tuple[tuple[Witness, ProductVerdict], ...]
    collapsed: bool


@dataclass(frozen=True)
class CollapseReport:
    family_name: str
    max_degree: int
    entries: tuple[DegreeReport, ...]
    order: int | None

    def entry(self, degree: int) -> DegreeReport:
        for e in self.entries:
            if e.degree == degree:
                return e
        raise KeyError(degree)


def collapse_order(
    family: DensityFamily,
    max_degree: int,
    grid_points: int = DEFAULT_GRID_POINTS,
    witness_cap: int = WITNESS_CAP,
    stop_at_first: bool = True,
) -> CollapseReport:
    """Smallest degree whose cumulative system forces product form.

    The system analyzed at degree d is the union of the stripped systems
    for every degree up to d, so conclusions are monotone in d.
    """
    cumulative: list[Poly] = []
    entries: list[DegreeReport] = []
    order = None
    for d in range(1, max_degree + 1):
        system = zii_equations(family, d)
        for p in system.polys():
            if not p.is_zero and p not in cumulative:
                cumulative.append(p)
        analysis = analyze_system(list(cumulative), family, grid_points, witness_cap)
        verdicts = tuple(
            (w, check_product_form(family, w.as_dict())) for w in analysis.witnesses
        )
        collapsed = bool(verdicts) and all(
            v is ProductVerdict.PRODUCT_FORM for _, v in verdicts
        )
        entries.append(
            DegreeReport(
                d, system, tuple(p.to_text() for p in cumulative),
                analysis, verdicts, collapsed,
            )
        )
        if collapsed and order is None:
            order = d
            if stop_at_first:
                break
    return CollapseReport(family.name, max_degree, tuple(entries), order)
