"""Invariance verdicts: strict, on-manifold, and conditional; rank counting.

Every "invariant" verdict is an exact symbolic zero, cross-checked by
independent rational evaluation at seeded sample points; every
"not-invariant" verdict carries a residual certified nonzero at a recorded
witness point.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .expr import (
    Expr,
    IrrationalValue,
    SingularPoint,
    as_expr,
    collect,
    expr_str,
    is_zero,
)
from .fields import ProlongedField, VectorField, prolong, rank_exact
from .jets import JetSpace
from .symbols import Kind, Symbol, by_id

DEFAULT_SEED = 20100901
MAX_RESAMPLE = 20


class LeadingDerivativeRemains(Exception):
    pass


class DegeneratePoint(Exception):
    pass


@dataclass
class CheckEntry:
    subject: str
    invariant: bool
    residual: Expr | None = None
    witness: str = ""
    note: str = ""


@dataclass
class InvarianceReport:
    entries: list[CheckEntry] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(e.invariant for e in self.entries)

    def failures(self):
        return [e for e in self.entries if not e.invariant]

    def entry(self, subject: str) -> CheckEntry:
        for e in self.entries:
            if e.subject == subject:
                return e
        raise KeyError(subject)


class PdeSystem:
    """Equations (each = 0) with an optional solved form for leading
    derivatives; the composed solved form must reduce every equation to zero.
    """

    def __init__(self, space: JetSpace, equations, solved_form=None,
                 name: str = ""):
        self.space = space
        self.name = name
        self.equations = [as_expr(e) for e in equations]
        self.solved_form = dict(solved_form or {})
        self.composed = _compose_solved(self.solved_form)
        for i, e in enumerate(self.equations):
            if self.solved_form and not is_zero(e.substitute(self.composed)):
                raise ValueError(
                    f"solved form inconsistent with equation {i + 1} of "
                    f"{name or 'system'}")

    def order(self) -> int:
        return max(self.space.jet_order(e) for e in self.equations)

    def augmented(self, conditions, extra_solved=None,
                  name: str = "") -> "PdeSystem":
        solved = dict(self.solved_form)
        solved.update(extra_solved or {})
        return PdeSystem(self.space, self.equations + [as_expr(c) for c in
                                                       conditions],
                         solved_form=solved,
                         name=name or f"{self.name}+conditions")


def _compose_solved(solved: dict) -> dict:
    """Iterate substitution until images are free of every solved symbol."""
    solved = {s: as_expr(e) for s, e in solved.items()}
    keys = set(solved)
    for _ in range(len(solved) + 1):
        dirty = False
        for s, e in solved.items():
            if {by_id(i) for i in e.symbol_ids()} & keys:
                solved[s] = e.substitute(solved)
                dirty = True
        if not dirty:
            return solved
    raise LeadingDerivativeRemains(
        "cyclic solved form cannot be composed")


def solve_linear_leading(equation, sym: Symbol) -> Expr:
    """Solve equation = 0 for sym when it appears linearly."""
    equation = as_expr(equation)
    a = equation.derivative(sym)
    if sym.id in a.symbol_ids():
        raise ValueError(f"{sym.name} does not appear linearly")
    if a.is_zero():
        raise ValueError(f"{sym.name} does not appear in the equation")
    b = equation.substitute({sym: Expr.zero()})
    return Expr.zero() - b / a


# -- seeded sample points -----------------------------------------------------


def _rand_fraction(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-50, 50), rng.randint(1, 50))


def _sum_of_squares_pairs(exprs, space) -> list[tuple[Symbol, Symbol]]:
    """Coordinate pairs (a, b) whose squares form a radical base a^2 + b^2."""
    pairs = []
    for e in exprs:
        for rm in e.terms:
            for b, _ in rm:
                ids = sorted(b.symbol_ids())
                if len(ids) != 2:
                    continue
                sa, sb = by_id(ids[0]), by_id(ids[1])
                probe = Expr.from_poly(b)
                sq = as_expr(sa) ** 2 + as_expr(sb) ** 2
                if is_zero(probe - sq) and (sa, sb) not in pairs:
                    pairs.append((sa, sb))
    return pairs


def sample_point(space: JetSpace, rng: random.Random, order=None,
                 square_pairs=()) -> dict:
    """Random rational values for every coordinate.

    Coordinates listed in square_pairs get a Pythagorean parametrization so
    the corresponding sum-of-squares radical base evaluates to an exact
    square.
    """
    point = {s: _rand_fraction(rng) for s in space.coordinates(order)}
    for (sa, sb) in square_pairs:
        m = rng.randint(2, 9)
        nn = rng.randint(1, m - 1)
        k = Fraction(rng.randint(1, 50), rng.randint(1, 20))
        den = m * m + nn * nn
        point[sa] = k * Fraction(m * m - nn * nn, den)
        point[sb] = k * Fraction(2 * m * nn, den)
    return point


def evaluate_resampling(exprs, space, seed, order=None, parameters=()):
    """Values of exprs at a common nonsingular point, resampling as needed.

    Returns (values, point).  Parameters named in `parameters` receive random
    values as well.
    """
    rng = random.Random(seed)
    pairs = _sum_of_squares_pairs(exprs, space)
    for _ in range(MAX_RESAMPLE):
        point = sample_point(space, rng, order, pairs)
        for q in parameters:
            point[q] = _rand_fraction(rng)
        try:
            return [e.evaluate(point) for e in exprs], point
        except (SingularPoint, IrrationalValue):
            continue
    raise DegeneratePoint("no nonsingular sample point found")


def _point_str(point: dict) -> str:
    return ", ".join(f"{s.name}={v}" for s, v in
                     sorted(point.items(), key=lambda kv: kv[0].id))


def certify_nonzero(e: Expr, space: JetSpace, seed, parameters=()) -> str:
    """Witness description for a nonzero residual."""
    rng = random.Random(seed)
    pairs = _sum_of_squares_pairs([e], space)
    for _ in range(MAX_RESAMPLE):
        point = sample_point(space, rng, None, pairs)
        for q in parameters:
            point[q] = _rand_fraction(rng)
        try:
            v = e.evaluate(point)
        except (SingularPoint, IrrationalValue):
            continue
        if v != 0:
            return f"value {v} at {_point_str(point)}"
    # fall back to certifying one coefficient of the canonical form
    for rm, rf in e.terms.items():
        coeff = Expr.from_rf(rf)
        for _ in range(MAX_RESAMPLE):
            point = sample_point(space, rng)
            for q in parameters:
                point[q] = _rand_fraction(rng)
            try:
                v = coeff.evaluate(point)
            except (SingularPoint, IrrationalValue):
                continue
            if v != 0:
                return (f"radical-monomial coefficient value {v} at "
                        f"{_point_str(point)}")
    raise DegeneratePoint("could not certify the residual nonzero")


def _parameters_of(exprs) -> list[Symbol]:
    out = []
    for e in exprs:
        for i in sorted(e.symbol_ids()):
            s = by_id(i)
            if s.kind is Kind.PARAMETER and s not in out:
                out.append(s)
    return out


def _summand_cross_check(parts, space, seed) -> bool:
    """Independent re-evaluation: the parts must sum to zero numerically."""
    params = _parameters_of(parts)
    for k in range(3):
        try:
            values, _ = evaluate_resampling(parts, space, seed + k,
                                            parameters=params)
        except DegeneratePoint:
            return True  # nothing evaluable; symbolic verdict stands
        if sum(values, Fraction(0)) != 0:
            return False
    return True


# -- invariance verdicts ------------------------------------------------------


def _as_prolonged(f, order: int) -> ProlongedField:
    if isinstance(f, ProlongedField):
        if f.order < order:
            return prolong(f.base, order)
        return f
    return prolong(f, order)


def strict_invariance(f, exprs, names=None, seed=DEFAULT_SEED,
                      cross_check=True) -> InvarianceReport:
    """Annihilation check: the prolonged field must kill each expression."""
    exprs = [as_expr(e) for e in exprs]
    report = InvarianceReport()
    space = f.space
    for i, e in enumerate(exprs):
        order = max(space.jet_order(e), 1)
        pf = _as_prolonged(f, order)
        parts = []
        for s, c in pf.base.coeffs.items():
            d = e.derivative(s)
            if not d.is_zero():
                parts.append(c * d)
        for s, c in pf.jet_coeffs.items():
            d = e.derivative(s)
            if not d.is_zero():
                parts.append(c * d)
        residual = Expr.zero()
        for part in parts:
            residual = residual + part
        subject = names[i] if names else f"expr{i + 1}"
        if is_zero(residual):
            ok = (not cross_check) or _summand_cross_check(parts, space, seed)
            note = "" if ok else "summand evaluation disagrees"
            report.entries.append(CheckEntry(subject, ok, note=note))
        else:
            witness = certify_nonzero(residual, space, seed,
                                      parameters=_parameters_of([residual]))
            report.entries.append(
                CheckEntry(subject, False, residual=residual, witness=witness))
    return report


def _solved_symbol_check(residual: Expr, solved: dict):
    leftover = {by_id(i) for i in residual.symbol_ids()} & set(solved)
    if leftover:
        raise LeadingDerivativeRemains(
            "solved derivatives remain after substitution: "
            + ", ".join(s.name for s in sorted(leftover)))


def manifold_invariance(f, sys: PdeSystem, split=(), seed=DEFAULT_SEED,
                        cross_check=True) -> InvarianceReport:
    """Invariance on the solution manifold cut out by the solved form.

    With split symbols given (parameterized generators), the residual is
    collected and every coefficient must vanish.
    """
    report = InvarianceReport()
    order = sys.order()
    pf = _as_prolonged(f, order)
    space = sys.space
    for i, eq in enumerate(sys.equations):
        raw = pf.apply(eq)
        residual = raw.substitute(sys.composed)
        _solved_symbol_check(residual, sys.composed)
        subject = f"eq{i + 1}"
        if split:
            groups = collect(residual, set(split))
            bad = [(m, c) for m, c in groups if not is_zero(c)]
            if not bad:
                ok = (not cross_check) or _manifold_cross_check(
                    raw, sys, seed, split)
                report.entries.append(CheckEntry(
                    subject, ok, note=f"split into {len(groups)} monomials"))
            else:
                m, c = bad[0]
                witness = certify_nonzero(c, space, seed,
                                          parameters=_parameters_of([c]))
                report.entries.append(CheckEntry(
                    subject, False, residual=c,
                    witness=f"coefficient of {expr_str(m)}: {witness}"))
            continue
        if is_zero(residual):
            ok = (not cross_check) or _manifold_cross_check(raw, sys, seed, ())
            report.entries.append(CheckEntry(subject, ok))
        else:
            witness = certify_nonzero(residual, space, seed,
                                      parameters=_parameters_of([residual]))
            report.entries.append(CheckEntry(subject, False, residual=residual,
                                             witness=witness))
    return report


def _manifold_cross_check(raw: Expr, sys: PdeSystem, seed, split) -> bool:
    """Evaluate the unsubstituted residual at points on the manifold."""
    rng = random.Random(seed ^ 0x5EED)
    solved = sys.composed
    exprs = [raw] + list(solved.values())
    pairs = _sum_of_squares_pairs(exprs, sys.space)
    params = _parameters_of(exprs)
    checked = 0
    for _ in range(MAX_RESAMPLE):
        point = sample_point(sys.space, rng, None, pairs)
        for q in params:
            point[q] = _rand_fraction(rng)
        for s in split:
            point[s] = _rand_fraction(rng)
        try:
            for s, img in solved.items():
                point[s] = img.evaluate(point)
            if raw.evaluate(point) != 0:
                return False
        except (SingularPoint, IrrationalValue):
            continue
        checked += 1
        if checked >= 3:
            return True
    return checked > 0


def conditional_invariance(f, sys: PdeSystem, conditions,
                           condition_solved=None, seed=DEFAULT_SEED,
                           cross_check=True) -> InvarianceReport:
    """Invariance of the system jointly with the side conditions.

    Verdicts are reported per original equation and per condition; with no
    conditions this is exactly manifold_invariance.
    """
    conditions = [as_expr(c) for c in conditions]
    if not conditions:
        return manifold_invariance(f, sys, seed=seed, cross_check=cross_check)
    aug = sys.augmented(conditions, extra_solved=condition_solved)
    rep = manifold_invariance(f, aug, seed=seed, cross_check=cross_check)
    neq = len(sys.equations)
    for i, entry in enumerate(rep.entries):
        entry.subject = (f"eq{i + 1}" if i < neq
                         else f"condition{i - neq + 1}")
    return rep


# -- rank computations -----------------------------------------------------------


def _field_list(fields) -> list[VectorField]:
    if isinstance(fields, dict):
        return list(fields.values())
    out = []
    for f in fields:
        out.append(f[1] if isinstance(f, tuple) else f)
    return out


def orbit_rank(fields, space: JetSpace, order: int, seed=DEFAULT_SEED) -> int:
    """Generic rank of the prolonged generators, agreed at two seeds."""
    prolonged = [prolong(f, order) for f in _field_list(fields)]
    coords = space.coordinates(order)
    exprs = []
    for pf in prolonged:
        exprs.extend(pf.coefficient_vector(coords))
    params = _parameters_of(exprs)

    def rank_at(s):
        values, _ = evaluate_resampling(exprs, space, s, order=order,
                                        parameters=params)
        k = len(coords)
        matrix = [values[i * k:(i + 1) * k] for i in range(len(prolonged))]
        return rank_exact(matrix)

    r1 = rank_at(seed)
    r2 = rank_at(seed ^ 0x9E3779B9)
    if r1 != r2:
        r3 = rank_at(seed + 101)
        if r3 != max(r1, r2):
            raise DegeneratePoint("rank disagrees across seeds")
        return max(r1, r2)
    return r1


def functional_rank(exprs, space: JetSpace, seed=DEFAULT_SEED) -> int:
    """Rank of the Jacobian of the expressions over all coordinates."""
    exprs = [as_expr(e) for e in exprs]
    coords = space.coordinates()
    rows = []
    for e in exprs:
        rows.append([e.derivative(s) for s in coords])
    flat = [d for row in rows for d in row]
    params = _parameters_of(flat)

    def rank_at(s):
        values, _ = evaluate_resampling(flat, space, s, parameters=params)
        k = len(coords)
        matrix = [values[i * k:(i + 1) * k] for i in range(len(exprs))]
        return rank_exact(matrix)

    r1 = rank_at(seed)
    r2 = rank_at(seed ^ 0x9E3779B9)
    if r1 != r2:
        r3 = rank_at(seed + 101)
        if r3 != max(r1, r2):
            raise DegeneratePoint("rank disagrees across seeds")
        return max(r1, r2)
    return r1
