"""Built-in catalog: algebra realizations, invariants, systems, transformations.

Every entry self-validates on construction: systems check their solved form,
transformations check identity at parameter zero, and expected derivative
maps are compared against the engine's own Jacobian prolongation at load.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .expr import Expr, as_expr, assumptions, is_zero
from .fields import CommutatorTable, VectorField, structure_constants
from .invariance import PdeSystem, solve_linear_leading
from .jets import JetSpace
from .symbols import Kind, Symbol, parameter
from .transform import (
    PointTransformation,
    det,
    prolong_transformation,
    transport,
)


class UnknownKey(Exception):
    pass


class BadParams(Exception):
    pass


class CatalogEntry:
    def __init__(self, key: str, kind: str, payload, ref: str):
        self.key = key
        self.kind = kind
        self.payload = payload
        self.ref = ref

    def __repr__(self):
        return f"CatalogEntry({self.kind}:{self.key})"


class AlgebraEntry:
    def __init__(self, space, fields, table=None):
        self.space = space
        self.fields = list(fields)  # ordered (name, VectorField)
        self.table = table

    def named(self) -> dict:
        return dict(self.fields)

    def field(self, name: str) -> VectorField:
        try:
            return self.named()[name]
        except KeyError:
            raise UnknownKey(f"generator {name!r}") from None


class TransformEntry:
    def __init__(self, transformation, generator, expected_maps=None):
        self.transformation = transformation
        self.generator = generator
        self.expected_maps = expected_maps or {}


class Catalog:
    def __init__(self):
        self.entries: dict[str, CatalogEntry] = {}
        self.spaces: dict[str, JetSpace] = {}
        self.params: dict[str, Symbol] = {}
        self.bridges: dict[tuple[int, int], dict] = {}

    def add(self, key, kind, payload, ref):
        if key in self.entries:
            raise ValueError(f"duplicate catalog key {key}")
        self.entries[key] = CatalogEntry(key, kind, payload, ref)

    def _get(self, key, kind):
        e = self.entries.get(key)
        if e is None or e.kind != kind:
            raise UnknownKey(f"{kind} {key!r}")
        return e.payload

    def algebra(self, key) -> AlgebraEntry:
        return self._get(key, "algebra")

    def invariant(self, key) -> Expr:
        return self._get(key, "invariant")[1]

    def invariant_space(self, key) -> JetSpace:
        return self._get(key, "invariant")[0]

    def system(self, key) -> PdeSystem:
        return self._get(key, "system")

    def transformation(self, key) -> TransformEntry:
        return self._get(key, "transformation")

    def table(self, key) -> CommutatorTable:
        return self._get(key, "table")

    def keys(self, kind=None):
        return [k for k, e in self.entries.items()
                if kind is None or e.kind == kind]


# -- generator builders ---------------------------------------------------------


def plane_scalar_fields(space) -> list:
    """Conformal Galilei generators acting on a scalar over the plane:
    levelled time reparametrizations, shifted/boosted/accelerated
    translations, and the spatial rotation; the dependent is untouched.
    """
    t, r1, r2 = (as_expr(s) for s in space.independents[:3])
    T, R1, R2 = space.independents[:3]
    out = []
    for lev in (-1, 0, 1):
        out.append((_xname(lev), VectorField(space, {
            T: -t ** (lev + 1),
            R1: -(lev + 1) * t ** lev * r1,
            R2: -(lev + 1) * t ** lev * r2,
        }, name=_xname(lev))))
    for j, Rj in ((1, R1), (2, R2)):
        for lev in (-1, 0, 1):
            out.append((_yname(j, lev), VectorField(space, {
                Rj: -t ** (lev + 1),
            }, name=_yname(j, lev))))
    out.append(("R12", VectorField(space, {R2: -r1, R1: r2}, name="R12")))
    return out


def _xname(lev: int) -> str:
    return f"X{lev}" if lev >= 0 else f"Xm{-lev}"


def _yname(j: int, lev: int) -> str:
    return f"Y{j}_{lev}" if lev >= 0 else f"Y{j}_m{-lev}"


def general_cga_fields(space, n: int, levels, lam: Symbol) -> list:
    """Level-graded realization with scaling multiplier and phase variables.

    The space carries t, r_1..r_n and the phase variables g_1..g_n as base
    coordinates; lam stays symbolic.
    """
    t = as_expr(space.independents[0])
    T = space.independents[0]
    rs = space.independents[1:1 + n]
    gs = space.independents[1 + n:1 + 2 * n]
    lam_e = as_expr(lam)
    out = []
    for lev in sorted(levels):
        coeffs = {T: -t ** (lev + 1)}
        for R in rs:
            coeffs[R] = -(lev + 1) * t ** lev * as_expr(R)
        gamma_dot_r = Expr.zero()
        for R, G in zip(rs, gs):
            gamma_dot_r = gamma_dot_r + as_expr(G) * as_expr(R)
        mult = (-lam_e * (lev + 1) * t ** lev
                - lev * (lev + 1) * t ** (lev - 1) * gamma_dot_r)
        out.append((_xname(lev), VectorField(space, coeffs, multiplier=mult,
                                             name=_xname(lev))))
    for j in range(1, n + 1):
        R, G = rs[j - 1], gs[j - 1]
        for lev in sorted(levels):
            mult = -(lev + 1) * t ** lev * as_expr(G)
            out.append((_yname(j, lev), VectorField(
                space, {R: -t ** (lev + 1)}, multiplier=mult,
                name=_yname(j, lev))))
    for j in range(1, n + 1):
        for k in range(j + 1, n + 1):
            Rj, Rk = rs[j - 1], rs[k - 1]
            Gj, Gk = gs[j - 1], gs[k - 1]
            out.append((f"R{j}{k}", VectorField(space, {
                Rk: -as_expr(Rj), Rj: as_expr(Rk),
                Gk: -as_expr(Gj), Gj: as_expr(Gk),
            }, name=f"R{j}{k}")))
    return out


ECGA_NAMES = ("Xm1", "Y1_m1", "Y2_m1", "Theta", "Y1_0", "Y2_0",
              "Y1_1", "Y2_1", "X0", "X1", "R12")


def exotic_fields(space, coords=None, mutate=None) -> list:
    """The 11-generator centrally extended realization.

    coords supplies (t, x1, x2, a, b, w); defaults to the space's base
    coordinates in declaration order.  mutate is a (name, symbol) pair whose
    coefficient gets its sign flipped (regression harness hook).
    """
    if coords is None:
        coords = tuple(space.independents) + tuple(space.dependents)
    T, X1_, X2_, A, B, W = coords
    t, x1, x2, a, b = (as_expr(s) for s in (T, X1_, X2_, A, B))

    defs = {
        "Xm1": {T: Expr.const(-1)},
        "Y1_m1": {X1_: Expr.const(-1)},
        "Y2_m1": {X2_: Expr.const(-1)},
        "Theta": {W: Expr.const(1)},
        "Y1_0": {X1_: -t, A: Expr.const(1), W: -b / 2},
        "Y2_0": {X2_: -t, B: Expr.const(1), W: a / 2},
        "Y1_1": {X1_: -t ** 2, A: 2 * t, W: -(2 * x2 + t * b)},
        "Y2_1": {X2_: -t ** 2, B: 2 * t, W: 2 * x1 + t * a},
        "X0": {T: -t, X1_: -x1, X2_: -x2},
        "X1": {T: -t ** 2, X1_: -2 * t * x1, X2_: -2 * t * x2,
               A: 2 * x1, B: 2 * x2, W: -(x1 * b - x2 * a)},
        "R12": {X2_: -x1, X1_: x2, B: -a, A: b},
    }
    if mutate is not None:
        name, sym = mutate
        defs[name] = dict(defs[name])
        defs[name][sym] = -defs[name][sym]
    return [(nm, VectorField(space, defs[nm], name=nm)) for nm in ECGA_NAMES]


ECGA_MUTATIONS = (
    ("M01", "Y1_0", 3), ("M02", "Y1_0", 5), ("M03", "Y2_0", 4),
    ("M04", "Y2_0", 5), ("M05", "Y1_1", 3), ("M06", "Y1_1", 5),
    ("M07", "Y2_1", 4), ("M08", "Y2_1", 5), ("M09", "X1", 3),
    ("M10", "X1", 5), ("M11", "R12", 1), ("M12", "Theta", 5),
)


def shallow_water_fields(space) -> list:
    t, x, y = (as_expr(s) for s in space.independents)
    T, X_, Y_ = space.independents
    U1, U2, W = space.dependents
    u1, u2, w = (as_expr(s) for s in space.dependents)
    defs = [
        ("Xm1", {T: Expr.const(-1)}),
        ("Y1_m1", {X_: Expr.const(-1)}),
        ("Y2_m1", {Y_: Expr.const(-1)}),
        ("Y1_0", {X_: -t, U1: Expr.const(-1)}),
        ("Y2_0", {Y_: -t, U2: Expr.const(-1)}),
        # time coefficient -2t: the -t variant fails the system and does not
        # close with the projective generator
        ("X0", {T: -2 * t, X_: -x, Y_: -y, U1: u1, U2: u2, W: 2 * w}),
        ("X1", {T: -t ** 2, X_: -t * x, Y_: -t * y,
                U1: -(x - t * u1), U2: -(y - t * u2), W: 2 * t * w}),
        ("R12", {Y_: -x, X_: y, U2: -u1, U1: u2}),
        ("D", {T: t, X_: x, Y_: y}),
    ]
    return [(nm, VectorField(space, c, name=nm)) for nm, c in defs]


# -- expected commutator tables ----------------------------------------------------


def cga_table(x_levels, y_levels, n: int, exotic: bool = False,
              max_level: int | None = None) -> CommutatorTable:
    """Level-graded table; pairs landing outside the catalogued levels are
    marked skipped rather than asserted zero."""
    if max_level is None:
        max_level = max(max(abs(v) for v in x_levels),
                        max(abs(v) for v in y_levels))
    tb = CommutatorTable()
    xs = sorted(x_levels)
    ys = sorted(y_levels)
    for i, a in enumerate(xs):
        for b_ in xs[i + 1:]:
            if a == b_:
                continue
            target = a + b_
            if target in x_levels:
                if a != b_:
                    tb.set(_xname(a), _xname(b_), [(a - b_, _xname(target))])
            elif a - b_ != 0:
                tb.skip(_xname(a), _xname(b_))
    for a in xs:
        for j in range(1, n + 1):
            for m in ys:
                target = a + m
                if target in y_levels:
                    if a - m != 0:
                        tb.set(_xname(a), _yname(j, m),
                               [(a - m, _yname(j, target))])
                elif a - m != 0:
                    tb.skip(_xname(a), _yname(j, m))
    for j in range(1, n + 1):
        for k in range(j + 1, n + 1):
            for l in range(1, n + 1):
                for m in ys:
                    combo = []
                    if j == l:
                        combo.append((1, _yname(k, m)))
                    if k == l:
                        combo.append((-1, _yname(j, m)))
                    if combo:
                        tb.set(f"R{j}{k}", _yname(l, m), combo)
    # so(n) brackets among rotations
    rots = [(j, k) for j in range(1, n + 1) for k in range(j + 1, n + 1)]
    for i, (a, b_) in enumerate(rots):
        for (c, d) in rots[i + 1:]:
            combo = {}

            def add(cf, j, k):
                if j == k:
                    return
                if j > k:
                    j, k, cf = k, j, -cf
                combo[(j, k)] = combo.get((j, k), 0) + cf
            if a == c:
                add(1, b_, d)
            if b_ == d:
                add(1, a, c)
            if b_ == c:
                add(-1, a, d)
            if a == d:
                add(-1, b_, c)
            entry = [(cf, f"R{j}{k}") for (j, k), cf in combo.items() if cf]
            if entry:
                tb.set(f"R{a}{b_}", f"R{c}{d}", entry)
    if exotic:
        for nlev in y_levels:
            for mlev in y_levels:
                if nlev + mlev == 0:
                    coeff = 3 - 2 if nlev == 0 else -2
                    tb.set(_yname(1, nlev), _yname(2, mlev),
                           [(coeff, "Theta")])
    return tb


def schcr_table() -> CommutatorTable:
    """Abstract half-level table with the central mass element (N = 1)."""
    tb = CommutatorTable()
    xs = {-1: "Xm1", 0: "X0", 1: "X1"}
    ys = {Fraction(-1, 2): "Y1_mh", Fraction(1, 2): "Y1_ph"}
    for a in xs:
        for b in xs:
            if a < b and a + b in xs and a != b:
                tb.set(xs[a], xs[b], [(a - b, xs[a + b])])
    for a in xs:
        for m in ys:
            c = Fraction(a, 2) - m
            if a + m in ys and c:
                tb.set(xs[a], ys[m], [(c, ys[a + m])])
    tb.set("Y1_ph", "Y1_mh", [(1, "M0")])
    return tb


# -- catalog construction ------------------------------------------------------------


def _det3(rows):
    return det([[as_expr(v) for v in row] for row in rows])


@lru_cache(maxsize=1)
def build_catalog() -> Catalog:
    cat = Catalog()
    p = parameter("p")
    q = parameter("q")
    c_ = parameter("c")
    s_ = parameter("s")
    lam = parameter("lambda")
    alpha1 = parameter("alpha1")
    alpha2 = parameter("alpha2")
    lams = [parameter(f"lambda{i}") for i in range(1, 5)]
    cat.params = {sym.name: sym for sym in
                  (p, q, c_, s_, lam, alpha1, alpha2, *lams)}

    # -- spaces -------------------------------------------------------------
    sp2 = JetSpace(["t", "r1", "r2"], ["u"], 2)
    sp2uv = JetSpace(["t", "r1", "r2"], ["u", "v"], 2)
    sp3d = JetSpace(["t", "r1", "r2", "r3"], ["u"], 2)
    spe = JetSpace(["t", "r1", "r2"], ["u1", "u2", "u3"], 1)
    spsw = JetSpace(["t", "x", "y"], ["u1", "u2", "w"], 1)
    spmt = JetSpace(["t", "r1", "r2", "v1", "v2", "vw"], ["psi"], 2)
    spg2 = JetSpace(["t", "r1", "r2", "g1", "g2"], [], 1)
    spg3 = JetSpace(["t", "r1", "r2", "r3", "g1", "g2", "g3"], [], 1)
    cat.spaces = {"plane_scalar": sp2, "plane_pair": sp2uv,
                  "space_scalar": sp3d, "exotic": spe, "surface_flow": spsw,
                  "wave6": spmt, "phase2": spg2, "phase3": spg3}

    n2 = sp2.ns()
    ne = spe.ns()
    nw = spsw.ns()
    pe, qe = as_expr(p), as_expr(q)

    u_sq = n2.u_r1 ** 2 + n2.u_r2 ** 2
    one_minus_pt = 1 - pe * n2.t
    assumptions.assume_positive(u_sq)
    assumptions.assume_positive(one_minus_pt)

    # -- algebras ------------------------------------------------------------
    cga2 = plane_scalar_fields(sp2)
    cat.add("cga2", "algebra",
            AlgebraEntry(sp2, cga2, cga_table({-1, 0, 1}, {-1, 0, 1}, 2)),
            ref="algebra:cga2")

    for nn, space in ((2, spg2), (3, spg3)):
        for tag, levels in (("", range(-1, 2)), ("_ext", range(-3, 4))):
            fields = general_cga_fields(space, nn, set(levels), lam)
            table = cga_table(set(levels), set(levels), nn, max_level=3)
            cat.add(f"cga_general_n{nn}{tag}", "algebra",
                    AlgebraEntry(space, fields, table),
                    ref=f"algebra:cga_general(n={nn}, levels={list(levels)})")

    ecga = exotic_fields(spe)
    ecga_named = dict(ecga)
    ecga_table = cga_table({-1, 0, 1}, {-1, 0, 1}, 2, exotic=True)
    cat.add("ecga", "algebra", AlgebraEntry(spe, ecga, ecga_table),
            ref="algebra:ecga")

    def subset(names):
        return [(nm, ecga_named[nm]) for nm in names]

    ea1_names = ["Xm1", "Y1_m1", "Y2_m1", "Y1_0", "Y2_0", "Y1_1", "Y2_1",
                 "Theta"]
    ea2_names = ea1_names + ["X0", "X1"]
    ea3_names = ea1_names + ["X0", "R12"]

    def restricted_table(names):
        tb = cga_table({-1, 0, 1} if "X1" in names else
                       ({-1, 0} if "X0" in names else {-1}),
                       {-1, 0, 1}, 2, exotic=True, max_level=1)
        keep = set(names)
        out = CommutatorTable()
        for (a, b), combo in tb.entries.items():
            if a in keep and b in keep:
                out.set(a, b, [(cf, nm) for cf, nm in combo])
        for (a, b) in tb.skips:
            if a in keep and b in keep:
                out.skip(a, b)
        return out

    cat.add("ea1", "algebra",
            AlgebraEntry(spe, subset(ea1_names), restricted_table(ea1_names)),
            ref="algebra:ea1")
    cat.add("ea2", "algebra",
            AlgebraEntry(spe, subset(ea2_names), restricted_table(ea2_names)),
            ref="algebra:ea2")
    cat.add("ea3", "algebra",
            AlgebraEntry(spe, subset(ea3_names), restricted_table(ea3_names)),
            ref="algebra:ea3")

    sw = shallow_water_fields(spsw)
    sw_table = structure_constants(sw)
    if sw_table is None:
        raise BadParams("surface-flow generators fail to close")
    cat.add("shallow_water_mai", "algebra", AlgebraEntry(spsw, sw, sw_table),
            ref="algebra:shallow_water_mai")

    # exotic realization acting on the 6-variable wave space
    mt_coords = tuple(spmt.independents)
    ecga_mt = exotic_fields(spmt, coords=mt_coords)
    cat.add("ecga_wave6", "algebra", AlgebraEntry(spmt, ecga_mt, None),
            ref="algebra:ecga on wave6")

    # exotic subalgebra transported through the surface-flow variable change
    T3, R1, R2 = spe.independents
    U1e, U2e, U3e = spe.dependents
    Tw, Xw, Yw = spsw.independents
    U1w, U2w, Ww = spsw.dependents
    fwd = {R1: Fraction(-3, 2) * as_expr(Xw), R2: Fraction(-3, 2) * as_expr(Yw),
           U3e: Fraction(3, 2) * qe * as_expr(Ww),
           T3: as_expr(Tw), U1e: as_expr(U1w), U2e: as_expr(U2w)}
    inv = {Xw: Fraction(-2, 3) * as_expr(R1), Yw: Fraction(-2, 3) * as_expr(R2),
           Ww: Fraction(2, 3) * as_expr(U3e) / qe,
           Tw: as_expr(T3), U1w: as_expr(U1e), U2w: as_expr(U2e)}
    cat.bridges[(id(spe), id(spsw))] = {"fwd": fwd, "inv": inv}
    ecga_xyw = [(nm, transport(f, spsw, fwd, inv, name=nm)) for nm, f in ecga]
    cat.add("ecga_xyw", "algebra", AlgebraEntry(spsw, ecga_xyw, None),
            ref="algebra:ecga transported to surface-flow variables")

    # -- invariants: plane scalar ----------------------------------------------
    lap = n2.u_r1r1 + n2.u_r2r2
    hess = (n2.u_r1 ** 2 * n2.u_r1r1 + 2 * n2.u_r1 * n2.u_r2 * n2.u_r1r2
            + n2.u_r2 ** 2 * n2.u_r2r2)
    monge = n2.u_r1r1 * n2.u_r2r2 - n2.u_r1r2 ** 2
    WI = _det3([[n2.u_t, n2.u_r1, n2.u_r2],
                [n2.u_tr1, n2.u_r1r1, n2.u_r1r2],
                [n2.u_tr2, n2.u_r1r2, n2.u_r2r2]])
    WII = _det3([[n2.u_tt, n2.u_tr1, n2.u_tr2],
                 [n2.u_tr1, n2.u_r1r1, n2.u_r1r2],
                 [n2.u_tr2, n2.u_r1r2, n2.u_r2r2]])
    WIII = _det3([[Expr.zero(), n2.u_r1, n2.u_r2],
                  [n2.u_r1, n2.u_r1r1, n2.u_r1r2],
                  [n2.u_r2, n2.u_r1r2, n2.u_r2r2]])
    gal_args = [as_expr(sp2.dependents[0]), u_sq, lap, hess, monge, WI, WII]
    for i, e in enumerate(gal_args, start=1):
        cat.add(f"gal_arg{i}", "invariant", (sp2, e), ref=f"invariant:gal_arg{i}")
    cat.add("WI", "invariant", (sp2, WI), ref="invariant:WI")
    cat.add("WII", "invariant", (sp2, WII), ref="invariant:WII")
    cat.add("WIII", "invariant", (sp2, WIII), ref="invariant:WIII")
    Z1 = lap / u_sq
    Z2 = hess / u_sq ** 2
    Z3 = monge / u_sq ** 2
    Z4 = WI * u_sq ** Fraction(-5, 2)
    for nm, e in (("Z1", Z1), ("Z2", Z2), ("Z3", Z3), ("Z4", Z4)):
        cat.add(nm, "invariant", (sp2, e), ref=f"invariant:{nm}")

    # 3-space variant of the degeneracy determinant
    n3 = sp3d.ns()
    WIII3 = det([[Expr.zero(), n3.u_r1, n3.u_r2, n3.u_r3],
                 [n3.u_r1, n3.u_r1r1, n3.u_r1r2, n3.u_r1r3],
                 [n3.u_r2, n3.u_r1r2, n3.u_r2r2, n3.u_r2r3],
                 [n3.u_r3, n3.u_r1r3, n3.u_r2r3, n3.u_r3r3]])
    cat.add("WIII_n3", "invariant", (sp3d, WIII3), ref="invariant:WIII_n3")

    # -- invariants: two dependent functions -------------------------------------
    nuv = sp2uv.ns()

    def rows_first(f):
        return [getattr(nuv, f"{f}_t"), getattr(nuv, f"{f}_r1"),
                getattr(nuv, f"{f}_r2")]

    def rows_second(f):
        return [getattr(nuv, f"{f}_tr1"), getattr(nuv, f"{f}_r1r1"),
                getattr(nuv, f"{f}_r1r2")]

    def rows_third(f):
        return [getattr(nuv, f"{f}_tr2"), getattr(nuv, f"{f}_r1r2"),
                getattr(nuv, f"{f}_r2r2")]

    def WI_of(a, b, c):
        return _det3([rows_first(a), rows_second(b), rows_third(c)])

    def WIII_of(a, b, c):
        return _det3([
            [Expr.zero(), getattr(nuv, f"{a}_r1"), getattr(nuv, f"{a}_r2")],
            [getattr(nuv, f"{b}_r1"), getattr(nuv, f"{b}_r1r1"),
             getattr(nuv, f"{b}_r1r2")],
            [getattr(nuv, f"{c}_r2"), getattr(nuv, f"{c}_r1r2"),
             getattr(nuv, f"{c}_r2r2")],
        ])

    uv_dot = nuv.u_r1 * nuv.v_r1 + nuv.u_r2 * nuv.v_r2
    u_sq_uv = nuv.u_r1 ** 2 + nuv.u_r2 ** 2
    v_sq_uv = nuv.v_r1 ** 2 + nuv.v_r2 ** 2
    lap_u = nuv.u_r1r1 + nuv.u_r2r2
    lap_v = nuv.v_r1r1 + nuv.v_r2r2
    hess_u = (nuv.u_r1 ** 2 * nuv.u_r1r1
              + 2 * nuv.u_r1 * nuv.u_r2 * nuv.u_r1r2
              + nuv.u_r2 ** 2 * nuv.u_r2r2)
    hess_v = (nuv.v_r1 ** 2 * nuv.v_r1r1
              + 2 * nuv.v_r1 * nuv.v_r2 * nuv.v_r1r2
              + nuv.v_r2 ** 2 * nuv.v_r2r2)
    monge_u = nuv.u_r1r1 * nuv.u_r2r2 - nuv.u_r1r2 ** 2
    monge_v = nuv.v_r1r1 * nuv.v_r2r2 - nuv.v_r1r2 ** 2
    pair_invs = {
        "Zu1": u_sq_uv / uv_dot, "Zv1": v_sq_uv / uv_dot,
        "Zu2": lap_u / uv_dot, "Zv2": lap_v / uv_dot,
        "Zu3": hess_u / uv_dot ** 2, "Zv3": hess_v / uv_dot ** 2,
        "Zu4": monge_u / uv_dot ** 2, "Zv4": monge_v / uv_dot ** 2,
    }
    for nm, e in pair_invs.items():
        cat.add(nm, "invariant", (sp2uv, e), ref=f"invariant:{nm}")
    le = [as_expr(s) for s in lams]
    wi_combo = (le[0] * WI_of("u", "u", "u") + le[1] * WI_of("v", "u", "u")
                + le[2] * WI_of("u", "v", "v") + le[3] * WI_of("v", "v", "v"))
    wiii_combo = (le[0] * WIII_of("u", "u", "u") + le[1] * WIII_of("v", "u", "u")
                  + le[2] * WIII_of("u", "v", "v")
                  + le[3] * WIII_of("v", "v", "v"))
    Zuv = u_sq_uv ** Fraction(-5, 2) * wi_combo
    cat.add("Zuv", "invariant", (sp2uv, Zuv), ref="invariant:Zuv")
    cat.add("Zuv_condition", "invariant", (sp2uv, wiii_combo),
            ref="invariant:Zuv_condition")

    cga2_uv = plane_scalar_fields(sp2uv)
    cat.add("cga2_pair", "algebra",
            AlgebraEntry(sp2uv, cga2_uv,
                         cga_table({-1, 0, 1}, {-1, 0, 1}, 2)),
            ref="algebra:cga2 on the two-function space")

    # -- invariants: exotic first-order family ------------------------------------
    W1 = (2 * ne.u1_t + 2 * ne.u3_r2 - 2 * ne.u1 * ne.u1_r1
          + ne.u1 * ne.u2_r2 - 3 * ne.u2 * ne.u1_r2)
    W2 = (2 * ne.u2_t - 2 * ne.u3_r1 - 2 * ne.u2 * ne.u2_r2
          + ne.u2 * ne.u1_r1 - 3 * ne.u1 * ne.u2_r1)
    W3 = (2 * ne.u3_t - ne.u2 * ne.u1_t + ne.u1 * ne.u2_t
          - 2 * ne.u1 * ne.u3_r1 - 2 * ne.u2 * ne.u3_r2
          + ne.u1 * ne.u2 * ne.u1_r1 - ne.u1 * ne.u2 * ne.u2_r2
          - ne.u1 ** 2 * ne.u2_r1 + ne.u2 ** 2 * ne.u1_r2)
    dskew = ne.u1_r2 - ne.u2_r1
    for nm, e in (("W1", W1), ("W2", W2), ("W3", W3)):
        cat.add(nm, "invariant", (spe, e), ref=f"invariant:{nm}")
    cat.add("Wstar_1", "invariant", (spe, W1 / dskew), ref="invariant:Wstar_1")
    cat.add("Wstar_2", "invariant", (spe, W2 / dskew), ref="invariant:Wstar_2")
    cat.add("Wstar_3", "invariant", (spe, W3 / dskew), ref="invariant:Wstar_3")
    cat.add("ratio_diff", "invariant",
            (spe, (ne.u1_r1 - ne.u2_r2) / dskew), ref="invariant:ratio_diff")
    cat.add("ratio_u12", "invariant", (spe, ne.u1_r2 / dskew),
            ref="invariant:ratio_u12")
    Wstar_12 = (W1 ** 2 + W2 ** 2) / dskew ** 2
    Wstar = (ne.u1_r1 * W1 ** 2 + ne.u2_r2 * W2 ** 2
             + (ne.u1_r2 + ne.u2_r1) * W1 * W2) / dskew ** 3
    trace_ratio = (ne.u1_r1 + ne.u2_r2) / dskew
    U_ratio = (ne.u1_r1 ** 2 + ne.u1_r2 ** 2 + ne.u2_r1 ** 2
               + ne.u2_r2 ** 2) / dskew ** 2
    Ustar = ((ne.u1_r1 - ne.u2_r2) ** 2 + 2 * ne.u1_r2 ** 2
             + 2 * ne.u2_r1 ** 2) / dskew ** 2
    Vstar = 2 * Wstar - trace_ratio * Wstar_12
    cat.add("Wstar_12", "invariant", (spe, Wstar_12), ref="invariant:Wstar_12")
    cat.add("Wstar", "invariant", (spe, Wstar), ref="invariant:Wstar")
    cat.add("trace_ratio", "invariant", (spe, trace_ratio),
            ref="invariant:trace_ratio")
    cat.add("U_ratio", "invariant", (spe, U_ratio), ref="invariant:U_ratio")
    cat.add("Ustar", "invariant", (spe, Ustar), ref="invariant:Ustar")
    cat.add("Vstar", "invariant", (spe, Vstar), ref="invariant:Vstar")

    # -- systems ---------------------------------------------------------------
    u1t_sol = solve_linear_leading(W1, spe.jet("u1", "t"))
    u2t_sol = solve_linear_leading(W2, spe.jet("u2", "t"))
    u3t_sol = solve_linear_leading(W3, spe.jet("u3", "t"))

    cat.add("sys_4_1", "system", PdeSystem(
        spe, [W1, W2, ne.u1_r1 + ne.u2_r2],
        solved_form={spe.jet("u1", "t"): u1t_sol,
                     spe.jet("u2", "t"): u2t_sol,
                     spe.jet("u2", "r2"): -ne.u1_r1},
        name="sys_4_1"), ref="system:sys_4_1")

    e1 = nw.u1_t + nw.u1 * nw.u1_x + nw.u2 * nw.u1_y - qe * nw.w_y
    e2 = nw.u2_t + nw.u1 * nw.u2_x + nw.u2 * nw.u2_y + qe * nw.w_x
    e3 = nw.u1_x + nw.u2_y
    cat.add("sys_4_2", "system", PdeSystem(
        spsw, [e1, e2, e3],
        solved_form={spsw.jet("u1", "t"):
                     -(nw.u1 * nw.u1_x + nw.u2 * nw.u1_y - qe * nw.w_y),
                     spsw.jet("u2", "t"):
                     -(nw.u1 * nw.u2_x + nw.u2 * nw.u2_y + qe * nw.w_x),
                     spsw.jet("u2", "y"): -nw.u1_x},
        name="sys_4_2"), ref="system:sys_4_2")

    s1 = nw.u1_t + nw.u1 * nw.u1_x + nw.u2 * nw.u1_y + qe * nw.w_x
    s2 = nw.u2_t + nw.u1 * nw.u2_x + nw.u2 * nw.u2_y + qe * nw.w_y
    s3 = (nw.w_t + nw.u1_x * nw.w + nw.u1 * nw.w_x + nw.u2_y * nw.w
          + nw.u2 * nw.w_y)
    cat.add("shallow_water", "system", PdeSystem(
        spsw, [s1, s2, s3],
        solved_form={spsw.jet("u1", "t"):
                     -(nw.u1 * nw.u1_x + nw.u2 * nw.u1_y + qe * nw.w_x),
                     spsw.jet("u2", "t"):
                     -(nw.u1 * nw.u2_x + nw.u2 * nw.u2_y + qe * nw.w_y),
                     spsw.jet("w", "t"):
                     -(nw.u1_x * nw.w + nw.u1 * nw.w_x + nw.u2_y * nw.w
                       + nw.u2 * nw.w_y)},
        name="shallow_water"), ref="system:shallow_water")

    cat.add("sys_4_7", "system", PdeSystem(
        spe, [W1, W2, dskew],
        solved_form={spe.jet("u1", "t"): u1t_sol,
                     spe.jet("u2", "t"): u2t_sol,
                     spe.jet("u2", "r1"): ne.u1_r2},
        name="sys_4_7"), ref="system:sys_4_7")

    cat.add("sys_4_8", "system", PdeSystem(
        spe, [W1, W2, W3],
        solved_form={spe.jet("u1", "t"): u1t_sol,
                     spe.jet("u2", "t"): u2t_sol,
                     spe.jet("u3", "t"): u3t_sol},
        name="sys_4_8"), ref="system:sys_4_8")

    nm_ = spmt.ns()
    wave = (nm_.psi_tvw - nm_.psi_r1v2 + nm_.psi_r2v1
            - nm_.v1 / 2 * nm_.psi_r1vw - nm_.v2 / 2 * nm_.psi_r2vw)
    cat.add("mt_wave", "system", PdeSystem(
        spmt, [wave],
        solved_form={spmt.jet("psi", "tvw"):
                     solve_linear_leading(wave, spmt.jet("psi", "tvw"))},
        name="mt_wave"), ref="system:mt_wave")

    # -- transformations -----------------------------------------------------------
    T2, R12_, R22_ = sp2.independents
    s2f = one_minus_pt

    proj = PointTransformation(sp2, p, {
        T2: n2.t / s2f, R12_: n2.r1 / s2f ** 2, R22_: n2.r2 / s2f ** 2,
    }, name="projective_2_11")
    proj = prolong_transformation(proj, 2)
    expected_2_12a = {
        sp2.jet("u", "r1"): n2.u_r1 * s2f ** 2,
        sp2.jet("u", "r2"): n2.u_r2 * s2f ** 2,
        sp2.jet("u", "t"): (n2.u_t * s2f ** 2
                            - 2 * pe * (n2.r1 * n2.u_r1 + n2.r2 * n2.u_r2)
                            * s2f),
        sp2.jet("u", "r1r1"): n2.u_r1r1 * s2f ** 4,
        sp2.jet("u", "r1r2"): n2.u_r1r2 * s2f ** 4,
        sp2.jet("u", "r2r2"): n2.u_r2r2 * s2f ** 4,
        sp2.jet("u", "tr1"): s2f ** 3 * (
            s2f * n2.u_tr1
            - 2 * pe * (n2.r1 * n2.u_r1r1 + n2.r2 * n2.u_r1r2)
            - 2 * pe * n2.u_r1),
        sp2.jet("u", "tr2"): s2f ** 3 * (
            s2f * n2.u_tr2
            - 2 * pe * (n2.r1 * n2.u_r1r2 + n2.r2 * n2.u_r2r2)
            - 2 * pe * n2.u_r2),
    }
    _check_expected_maps(proj, expected_2_12a, "projective_2_11")
    cat.add("projective_2_11", "transformation",
            TransformEntry(proj, dict(cga2)["X1"], expected_2_12a),
            ref="transformation:projective_2_11")

    accel1 = prolong_transformation(PointTransformation(
        sp2, p, {R12_: n2.r1 + pe * n2.t ** 2}, name="acceleration_2_8"), 2)
    accel2 = prolong_transformation(PointTransformation(
        sp2, p, {R22_: n2.r2 + pe * n2.t ** 2}, name="acceleration_2_8b"), 2)
    cat.add("acceleration_2_8", "transformation",
            TransformEntry(accel1, dict(cga2)["Y1_1"]),
            ref="transformation:acceleration_2_8")
    cat.add("acceleration_2_8b", "transformation",
            TransformEntry(accel2, dict(cga2)["Y2_1"]),
            ref="transformation:acceleration_2_8b")

    Te, R1e, R2e = spe.independents
    U1s, U2s, U3s = spe.dependents
    sef = 1 - pe * ne.t
    eproj = PointTransformation(spe, p, {
        Te: ne.t / sef, R1e: ne.r1 / sef ** 2, R2e: ne.r2 / sef ** 2,
        U1s: ne.u1 - 2 * pe * ne.r1 / sef,
        U2s: ne.u2 - 2 * pe * ne.r2 / sef,
        U3s: ne.u3 + pe * (ne.r1 * ne.u2 - ne.r2 * ne.u1) / sef,
    }, name="ecga_projective")
    eproj = prolong_transformation(eproj, 1)
    expected_3_29 = {
        spe.jet("u1", "r1"): sef ** 2 * ne.u1_r1 - 2 * pe * sef,
        spe.jet("u2", "r2"): sef ** 2 * ne.u2_r2 - 2 * pe * sef,
        spe.jet("u1", "r2"): sef ** 2 * ne.u1_r2,
        spe.jet("u2", "r1"): sef ** 2 * ne.u2_r1,
    }
    _check_expected_maps(eproj, expected_3_29, "ecga_projective")
    cat.add("ecga_projective", "transformation",
            TransformEntry(eproj, ecga_named["X1"], expected_3_29),
            ref="transformation:ecga_projective")

    ce, se = as_expr(c_), as_expr(s_)
    rot = PointTransformation(spe, p, {
        R1e: ce * ne.r1 - se * ne.r2,
        R2e: se * ne.r1 + ce * ne.r2,
        U1s: ce * ne.u1 - se * ne.u2,
        U2s: se * ne.u1 + ce * ne.u2,
    }, name="rotation", trig=(c_, s_))
    rot = prolong_transformation(rot, 1)
    cat.add("rotation", "transformation",
            TransformEntry(rot, ecga_named["R12"]),
            ref="transformation:rotation")

    for k in range(4):
        tr = prolong_transformation(PointTransformation(
            spsw, p, {Ww: nw.w + pe * nw.t ** k}, name=f"xinf_phi_t{k}"), 1)
        gen = VectorField(spsw, {Ww: -nw.t ** k}, name=f"Xinf_t{k}")
        cat.add(f"xinf_phi_t{k}", "transformation", TransformEntry(tr, gen),
                ref=f"transformation:xinf_phi_t{k}")

    # -- abstract tables -----------------------------------------------------------
    cat.add("schcr", "table", schcr_table(), ref="table:schcr")

    return cat


def _check_expected_maps(t: PointTransformation, expected: dict, name: str):
    for sym, want in expected.items():
        got = t.derivative_maps.get(sym)
        if got is None or not is_zero(got - want):
            raise BadParams(
                f"{name}: computed map of {sym.name} deviates from the "
                f"catalogued closed form")


def mutated_exotic(label: str):
    """One catalogued sign-flip of the exotic realization, by label."""
    cat = build_catalog()
    spe = cat.spaces["exotic"]
    coords = tuple(spe.independents) + tuple(spe.dependents)
    for lab, gen, idx in ECGA_MUTATIONS:
        if lab == label:
            return exotic_fields(spe, mutate=(gen, coords[idx]))
    raise UnknownKey(f"mutation {label!r}")
