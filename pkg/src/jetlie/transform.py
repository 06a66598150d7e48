"""Finite one-parameter point transformations and their jet prolongations."""
from __future__ import annotations

from fractions import Fraction

from .expr import Expr, Polynomial, RationalFunction, as_expr, is_zero
from .fields import VectorField
from .jets import JetSpace, mi_add, mi_order
from .symbols import Kind, Symbol, by_id


class SingularJacobian(Exception):
    pass


class MissingDerivativeMap(Exception):
    pass


class InconsistentProlongation(Exception):
    pass


def det(matrix) -> Expr:
    """Determinant of a small matrix of expressions by Laplace expansion."""
    m = len(matrix)
    if m == 1:
        return matrix[0][0]
    total = Expr.zero()
    sign = 1
    for j in range(m):
        minor = [row[:j] + row[j + 1:] for row in matrix[1:]]
        total = total + sign * matrix[0][j] * det(minor)
        sign = -sign
    return total


class PointTransformation:
    """One-parameter substitution family for base coordinates.

    base_maps sends base symbols to their images in unprimed variables and
    the parameter; unmapped coordinates stay fixed.  Rotation-style families
    carry cos/sin as two parameter symbols related by c**2 + s**2 = 1, with
    identity at (c, s) = (1, 0).
    """

    def __init__(self, space: JetSpace, parameter: Symbol, base_maps: dict,
                 name: str = "", trig: tuple[Symbol, Symbol] | None = None):
        self.space = space
        self.parameter = parameter
        self.name = name
        self.trig = trig
        maps: dict[Symbol, Expr] = {}
        for s, e in base_maps.items():
            if s not in space.base_coordinates():
                raise ValueError(f"{s.name} is not a base coordinate")
            maps[s] = as_expr(e)
        self.base_maps = maps
        self.derivative_maps: dict[Symbol, Expr] = {}
        self._validate()

    def _identity_subst(self) -> dict:
        sub = {self.parameter: Expr.zero()}
        if self.trig is not None:
            c, s = self.trig
            sub[c] = Expr.const(1)
            sub[s] = Expr.zero()
        return sub

    def _validate(self):
        at0 = self._identity_subst()
        for s, e in self.base_maps.items():
            if not is_zero(e.substitute(at0) - as_expr(s)):
                raise ValueError(
                    f"map of {s.name} is not the identity at parameter 0")
        dep_ids = {d.id for d in self.space.dependents}
        for s in self.space.independents:
            img = self.base_maps.get(s)
            if img is not None and img.symbol_ids() & dep_ids:
                raise ValueError(
                    f"image of {s.name} involves dependent variables")

    def map_of(self, s: Symbol) -> Expr:
        got = self.base_maps.get(s)
        if got is not None:
            return got
        got = self.derivative_maps.get(s)
        if got is not None:
            return got
        if s in self.space.base_coordinates():
            return as_expr(s)
        raise MissingDerivativeMap(
            f"{self.name or 'transformation'} lacks a map for {s.name}; "
            f"prolong it first")

    def substitution(self, order: int | None = None) -> dict:
        sub = dict(self.base_maps)
        sub.update(self.derivative_maps)
        return sub


def prolong_transformation(t: PointTransformation, order: int,
                           cross_check: bool = True) -> PointTransformation:
    """Fill derivative maps by exact Cramer inversion of the chain rule.

    D_i(image of u) = sum_j (image of u_j) * D_i(image of x_j), solved for
    the first-order images; iterated once more for order 2.
    """
    sp = t.space
    n = len(sp.independents)
    jac = [[sp.total_derivative(t.map_of(xj), i) for xj in sp.independents]
           for i in range(n)]

    def cleared(row: list[Expr]) -> tuple[list[Expr], Expr]:
        # scale a row to polynomial entries; Cramer ratios are row-scale free
        mult = Expr.const(1)
        for e in row:
            for rm, rf in e.terms.items():
                if not rf.den.is_const():
                    mult = mult * Expr.from_poly(rf.den)
        if mult.is_const():
            return row, mult
        return [e * mult for e in row], mult

    def solve(rhs: list[Expr]) -> list[Expr]:
        rows = [cleared(jac[i] + [rhs[i]])[0] for i in range(n)]
        d = det([r[:n] for r in rows])
        if is_zero(d):
            raise SingularJacobian(t.name or "transformation")
        out = []
        for j in range(n):
            col = [[rows[i][k] if k != j else rows[i][n] for k in range(n)]
                   for i in range(n)]
            out.append(det(col) / d)
        return out

    maps: dict[Symbol, Expr] = {}
    for di, dep in enumerate(sp.dependents):
        rhs = [sp.total_derivative(t.map_of(dep), i) for i in range(n)]
        sol = solve(rhs)
        for j in range(n):
            mi = mi_add((0,) * n, j)
            maps[sp.coordinate(di, mi)] = sol[j]
    if order >= 2:
        first = dict(maps)
        for di, dep in enumerate(sp.dependents):
            for i in range(n):
                mi = mi_add((0,) * n, i)
                v = first[sp.coordinate(di, mi)]
                rhs = [sp.total_derivative(v, k) for k in range(n)]
                sol = solve(rhs)
                for j in range(n):
                    target = sp.coordinate(di, mi_add(mi, j))
                    if target in maps:
                        if cross_check and not is_zero(maps[target] - sol[j]):
                            raise InconsistentProlongation(target.name)
                    else:
                        maps[target] = sol[j]
    out = PointTransformation(sp, t.parameter, t.base_maps, name=t.name,
                              trig=t.trig)
    out.derivative_maps = maps
    return out


def pullback(t: PointTransformation, e: Expr) -> Expr:
    """Substitute every coordinate of e by its image."""
    sub = {}
    for i in sorted(e.symbol_ids()):
        s = by_id(i)
        if s.kind is Kind.PARAMETER:
            continue
        img = t.map_of(s)
        sub[s] = img
    return e.substitute(sub)


def infinitesimal(t: PointTransformation) -> VectorField:
    """Generator under the fixed convention: minus d/dparameter at 0.

    Rotation families are truncated first: cos -> 1, sin -> parameter.
    """
    p = t.parameter
    coeffs = {}
    for s in t.space.base_coordinates():
        m = t.base_maps.get(s)
        if m is None:
            continue
        if t.trig is not None:
            c, sy = t.trig
            m = m.substitute({c: Expr.const(1), sy: as_expr(p)})
        c0 = -(m.derivative(p).substitute({p: Expr.zero()}))
        if not is_zero(c0):
            coeffs[s] = c0
    return VectorField(t.space, coeffs, name=f"gen({t.name})")


def reduce_circle(e: Expr, c: Symbol, s: Symbol) -> Expr:
    """Rewrite modulo s**2 -> 1 - c**2 in every coefficient and base."""
    one_minus = Expr.const(1) - as_expr(c) ** 2

    def reduce_poly(p: Polynomial) -> Expr:
        out = Expr.zero()
        for m, coeff in p.terms.items():
            k = 0
            rest = []
            for i, e_ in m:
                if i == s.id:
                    k = e_
                else:
                    rest.append((i, e_))
            term = Expr.from_poly(Polynomial({tuple(rest): coeff}, _trusted=True))
            if k:
                term = term * one_minus ** (k // 2) * as_expr(s) ** (k % 2)
            out = out + term
        return out

    total = Expr.zero()
    for rm, rf in e.terms.items():
        for b, _ in rm:
            if s.id in b.symbol_ids():
                raise ValueError("sin parameter inside a radical base")
        v = reduce_poly(rf.num)
        if not rf.den.is_const():
            v = v / reduce_poly(rf.den)
        else:
            dv = rf.den.const_value()
            if dv != 1:
                v = v / Expr.const(dv)
        if rm:
            v = v * Expr({rm: RationalFunction.const(1)})
        total = total + v
    return total


def residual_of_identity(t: PointTransformation, lhs: Expr, rhs: Expr) -> Expr:
    """pullback(t, lhs) - rhs, circle-reduced for rotation families."""
    r = pullback(t, lhs) - rhs
    if t.trig is not None and not is_zero(r):
        r = reduce_circle(r, *t.trig)
    return r


def verify_transform_identity(t: PointTransformation, lhs: Expr,
                              rhs: Expr) -> tuple[bool, Expr]:
    r = residual_of_identity(t, lhs, rhs)
    return is_zero(r), r


def vanishes_to_second_order(e: Expr, p: Symbol) -> bool:
    """True when e = O(p**2) with denominators regular at p = 0."""
    zero_p = {p: Expr.zero()}
    for rm, rf in e.terms.items():
        for b, _ in rm:
            if p.id in b.symbol_ids():
                raise ValueError("parameter inside a radical base")
        den0 = Expr.from_poly(rf.den).substitute(zero_p)
        if is_zero(den0):
            return False
        num = Expr.from_poly(rf.num)
        if not is_zero(num.substitute(zero_p)):
            return False
        if not is_zero(num.derivative(p).substitute(zero_p)):
            return False
    return True


def first_order_consistency(t: PointTransformation, prolonged,
                            coords) -> list[tuple[str, bool]]:
    """Check map(z) - z + p * X(z) = O(p**2) for each coordinate z.

    `prolonged` is the prolonged generator paired with t under the global
    sign convention.
    """
    p = t.parameter
    trig_sub = None
    if t.trig is not None:
        c, s = t.trig
        trig_sub = {c: Expr.const(1), s: as_expr(p)}
    out = []
    for z in coords:
        m = t.map_of(z)
        if trig_sub is not None:
            m = m.substitute(trig_sub)
        r = m - as_expr(z) + as_expr(p) * prolonged.apply(as_expr(z))
        out.append((z.name, vanishes_to_second_order(r, p)))
    return out


def transport(field: VectorField, new_space: JetSpace, fwd: dict,
              inv: dict, name: str = "") -> VectorField:
    """Push a field through an invertible base change.

    fwd maps old base symbols to expressions in the new coordinates; inv maps
    new base symbols to expressions in the old ones.
    """
    coeffs = {}
    for z in new_space.base_coordinates():
        zi = inv.get(z, as_expr(z))
        c = field.apply(zi).substitute(fwd)
        if not is_zero(c):
            coeffs[z] = c
    mult = None
    if field.multiplier is not None:
        mult = field.multiplier.substitute(fwd)
    return VectorField(new_space, coeffs, multiplier=mult,
                       name=name or field.name)
