"""Vector fields on jet spaces: prolongation, brackets, commutator tables."""
from __future__ import annotations

from fractions import Fraction

from .expr import Expr, as_expr, expr_str, is_zero
from .jets import JetSpace, OrderExceeded, mi_add, mi_order
from .symbols import Kind, Symbol, by_id


class SpaceMismatch(Exception):
    pass


class MultiplierNotProlongable(Exception):
    pass


class UnknownGeneratorName(Exception):
    pass


class VectorField:
    """First-order operator with one coefficient per base coordinate.

    Coefficients may involve base coordinates and parameters only; the
    optional multiplier is a zero-order (multiplication) part that takes part
    in brackets but cannot be prolonged.
    """

    def __init__(self, space: JetSpace, coeffs: dict, multiplier=None,
                 name: str = ""):
        self.space = space
        self.name = name
        base = set(space.base_coordinates())
        clean: dict[Symbol, Expr] = {}
        for s, c in coeffs.items():
            if s not in base:
                raise ValueError(f"{s.name} is not a base coordinate")
            c = as_expr(c)
            if c.is_zero():
                continue
            self._check_base_only(c)
            clean[s] = c
        self.coeffs = clean
        if multiplier is not None:
            multiplier = as_expr(multiplier)
            if multiplier.is_zero():
                multiplier = None
            else:
                self._check_base_only(multiplier)
        self.multiplier = multiplier

    def _check_base_only(self, e: Expr):
        base_ids = {s.id for s in self.space.base_coordinates()}
        for i in e.symbol_ids():
            s = by_id(i)
            if i in base_ids or s.kind is Kind.PARAMETER:
                continue
            raise ValueError(
                f"coefficient uses {s.name}, which is neither a base "
                f"coordinate nor a parameter")

    @property
    def xi(self) -> dict:
        return {s: c for s, c in self.coeffs.items()
                if s in self.space.independents}

    @property
    def eta(self) -> dict:
        return {s: c for s, c in self.coeffs.items()
                if s in self.space.dependents}

    def coefficient(self, s: Symbol) -> Expr:
        return self.coeffs.get(s, Expr.zero())

    def is_zero(self) -> bool:
        return not self.coeffs and self.multiplier is None

    def __eq__(self, other):
        return (self.space is other.space and self.coeffs == other.coeffs
                and self.multiplier == other.multiplier)

    def apply(self, e: Expr, include_multiplier: bool = False) -> Expr:
        """Derivation part applied to e, optionally plus multiplier * e."""
        out = Expr.zero()
        for s, c in self.coeffs.items():
            out = out + c * e.derivative(s)
        if include_multiplier and self.multiplier is not None:
            out = out + self.multiplier * e
        return out

    def scaled(self, c, name: str = "") -> "VectorField":
        c = as_expr(c)
        return VectorField(
            self.space,
            {s: c * v for s, v in self.coeffs.items()},
            multiplier=None if self.multiplier is None else c * self.multiplier,
            name=name or self.name,
        )

    def plus(self, other: "VectorField", name: str = "") -> "VectorField":
        if other.space is not self.space:
            raise SpaceMismatch(f"{self.name} vs {other.name}")
        coeffs = dict(self.coeffs)
        for s, v in other.coeffs.items():
            coeffs[s] = coeffs.get(s, Expr.zero()) + v
        mult = self.multiplier
        if other.multiplier is not None:
            mult = other.multiplier if mult is None else mult + other.multiplier
        return VectorField(self.space, coeffs, multiplier=mult, name=name)

    def __repr__(self):
        parts = [f"({expr_str(c)})@{s.name}" for s, c in sorted(
            self.coeffs.items(), key=lambda kv: kv[0].id)]
        if self.multiplier is not None:
            parts.append(f"scalar({expr_str(self.multiplier)})")
        body = " + ".join(parts) if parts else "0"
        return f"VectorField({self.name or body})"


class ProlongedField:
    """A point generator extended to derivative coordinates."""

    def __init__(self, base: VectorField, order: int, jet_coeffs: dict):
        self.base = base
        self.space = base.space
        self.order = order
        self.jet_coeffs = jet_coeffs

    def coefficient(self, s: Symbol) -> Expr:
        got = self.base.coeffs.get(s)
        if got is not None:
            return got
        return self.jet_coeffs.get(s, Expr.zero())

    def apply(self, e: Expr) -> Expr:
        if self.space.jet_order(e) > self.order:
            raise OrderExceeded(
                f"expression of order {self.space.jet_order(e)} under a "
                f"prolongation of order {self.order}")
        out = self.base.apply(e)
        for s, c in self.jet_coeffs.items():
            d = e.derivative(s)
            if not d.is_zero():
                out = out + c * d
        return out

    def coefficient_vector(self, coords) -> list[Expr]:
        return [self.coefficient(s) for s in coords]


def prolong(f: VectorField, order: int) -> ProlongedField:
    """Recursive prolongation: eta_{J,i} = D_i eta_J - sum_j D_i(xi_j) u_{J+e_j}."""
    if f.multiplier is not None:
        raise MultiplierNotProlongable(
            f"{f.name or 'field'} carries a zero-order multiplier")
    sp = f.space
    if order > sp.max_order:
        raise OrderExceeded(
            f"prolongation order {order} beyond space order {sp.max_order}")
    n = len(sp.independents)
    jet_coeffs: dict[Symbol, Expr] = {}
    eta_by_key: dict[tuple[int, tuple], Expr] = {}
    for d, dep in enumerate(sp.dependents):
        eta_by_key[(d, (0,) * n)] = f.coefficient(dep)
    for k in range(1, order + 1):
        for (d, mi), eta in list(eta_by_key.items()):
            if mi_order(mi) != k - 1:
                continue
            for i in range(n):
                nmi = mi_add(mi, i)
                key = (d, nmi)
                if key in eta_by_key:
                    continue
                coeff = sp.total_derivative(eta, i)
                for j, xj in enumerate(sp.independents):
                    xij = f.coefficient(xj)
                    if xij.is_zero():
                        continue
                    u_next = sp.coordinate(d, mi_add(mi, j))
                    coeff = coeff - sp.total_derivative(xij, i) * as_expr(u_next)
                eta_by_key[key] = coeff
                jet_coeffs[sp.coordinate(d, nmi)] = coeff
    return ProlongedField(f, order, jet_coeffs)


def lie_bracket(a: VectorField, b: VectorField, name: str = "") -> VectorField:
    """[a, b]: coefficients a(b^i) - b(a^i); multipliers a(b0) - b(a0)."""
    if a.space is not b.space:
        raise SpaceMismatch(f"{a.name} vs {b.name}")
    coeffs = {}
    for s in a.space.base_coordinates():
        c = a.apply(b.coefficient(s)) - b.apply(a.coefficient(s))
        if not c.is_zero():
            coeffs[s] = c
    mult = None
    if a.multiplier is not None or b.multiplier is not None:
        am = a.multiplier if a.multiplier is not None else Expr.zero()
        bm = b.multiplier if b.multiplier is not None else Expr.zero()
        m = a.apply(bm) - b.apply(am)
        if not m.is_zero():
            mult = m
    return VectorField(a.space, coeffs, multiplier=mult,
                       name=name or f"[{a.name}, {b.name}]")


def bracket_of_prolonged(pa: ProlongedField, pb: ProlongedField) -> dict:
    """Coefficient dict of [pa, pb] over all coordinates up to their order."""
    if pa.space is not pb.space:
        raise SpaceMismatch("prolonged fields on different spaces")
    order = min(pa.order, pb.order)
    out = {}
    coords = pa.space.coordinates(order)
    for s in coords:
        c = pa.apply(pb.coefficient(s)) - pb.apply(pa.coefficient(s))
        if not c.is_zero():
            out[s] = c
    return out


class CommutatorTable:
    """Expected brackets as linear combinations of named generators.

    Unlisted pairs mean zero; pairs in `skips` fall outside the catalogued
    generator range and are not checked.
    """

    def __init__(self):
        self.entries: dict[tuple[str, str], tuple] = {}
        self.skips: set[tuple[str, str]] = set()

    def set(self, a: str, b: str, combo):
        combo = tuple((as_expr(c), n) for c, n in combo)
        self.entries[(a, b)] = combo

    def skip(self, a: str, b: str):
        self.skips.add((a, b))
        self.skips.add((b, a))

    def expected(self, a: str, b: str):
        got = self.entries.get((a, b))
        if got is not None:
            return got
        rev = self.entries.get((b, a))
        if rev is not None:
            return tuple((Expr.zero() - c, n) for c, n in rev)
        return ()

    def pairs(self):
        return sorted(self.entries)


class PairResult:
    def __init__(self, a, b, ok, residual=None):
        self.a = a
        self.b = b
        self.ok = ok
        self.residual = residual  # VectorField when not ok

    def __repr__(self):
        return f"PairResult({self.a},{self.b},{'ok' if self.ok else 'FAIL'})"


class TableReport:
    def __init__(self, results, skipped):
        self.results = results
        self.skipped = skipped

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def failures(self):
        return [r for r in self.results if not r.ok]


def verify_table(fields, table: CommutatorTable) -> TableReport:
    """Check every unordered generator pair against the expected table."""
    named = dict(fields)
    for (a, b) in table.entries:
        if a not in named or b not in named:
            raise UnknownGeneratorName(f"table names unknown generator in [{a},{b}]")
        for _, n in table.entries[(a, b)]:
            if n not in named:
                raise UnknownGeneratorName(n)
    names = list(named)
    results = []
    skipped = []
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            a, b = names[i], names[j]
            if (a, b) in table.skips:
                skipped.append((a, b))
                continue
            br = lie_bracket(named[a], named[b])
            expect = table.expected(a, b)
            diff = br
            for c, n in expect:
                diff = diff.plus(named[n].scaled(Expr.zero() - c))
            results.append(PairResult(a, b, diff.is_zero(), residual=diff))
    return TableReport(results, skipped)


def jacobi_report(fields) -> list:
    """[(names, ok)] for every unordered triple; brackets cached pairwise."""
    named = list(dict(fields).items())
    n = len(named)
    cache: dict[tuple[int, int], VectorField] = {}

    def br(i, j):
        if i == j:
            raise ValueError("triple with repeated generator")
        if (i, j) in cache:
            return cache[(i, j)]
        if (j, i) in cache:
            return cache[(j, i)].scaled(-1)
        v = lie_bracket(named[i][1], named[j][1])
        cache[(i, j)] = v
        return v

    out = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                s = lie_bracket(br(i, j), named[k][1]).plus(
                    lie_bracket(br(j, k), named[i][1])).plus(
                    lie_bracket(br(k, i), named[j][1]))
                out.append(((named[i][0], named[j][0], named[k][0]),
                            s.is_zero()))
    return out


def structure_constants(fields) -> CommutatorTable | None:
    """Solve each bracket as a rational linear combination of the basis.

    Returns None when some bracket falls outside the span (non-closure).
    Used to attach a closure-certifying table to algebras whose structure
    constants the catalog does not hard-code.
    """
    named = list(dict(fields).items())
    space = named[0][1].space

    def rows_of(v: VectorField):
        rows = {}
        for s, c in v.coeffs.items():
            for rm, rf in c.terms.items():
                if not rf.den.is_const():
                    raise ValueError("rational coefficients unsupported here")
                scale = rf.den.const_value()
                for m, cc in rf.num.terms.items():
                    rows[(s.id, rm, m)] = cc / scale
        if v.multiplier is not None:
            for rm, rf in v.multiplier.terms.items():
                scale = rf.den.const_value()
                for m, cc in rf.num.terms.items():
                    rows[(-1, rm, m)] = cc / scale
        return rows

    basis_rows = [rows_of(v) for _, v in named]
    table = CommutatorTable()
    for i in range(len(named)):
        for j in range(i + 1, len(named)):
            target = rows_of(lie_bracket(named[i][1], named[j][1]))
            keys = sorted({k for r in basis_rows for k in r} | set(target),
                          key=repr)
            mat = [[basis_rows[c].get(k, Fraction(0)) for c in
                    range(len(named))] + [target.get(k, Fraction(0))]
                   for k in keys]
            sol = _solve_exact(mat, len(named))
            if sol is None:
                return None
            combo = [(Expr.const(c), named[k][0])
                     for k, c in enumerate(sol) if c]
            if combo:
                table.set(named[i][0], named[j][0], combo)
    return table


def _solve_exact(mat, ncols):
    """Gaussian elimination for an overdetermined consistent system."""
    rows = [r[:] for r in mat]
    piv = []
    r = 0
    for c in range(ncols):
        p = next((k for k in range(r, len(rows)) if rows[k][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for k in range(len(rows)):
            if k != r and rows[k][c]:
                f = rows[k][c]
                rows[k] = [a - f * b for a, b in zip(rows[k], rows[r])]
        piv.append(c)
        r += 1
    for k in range(r, len(rows)):
        if rows[k][ncols]:
            return None  # inconsistent
    sol = [Fraction(0)] * ncols
    for idx, c in enumerate(piv):
        sol[c] = rows[idx][ncols]
    return sol


def rank_exact(matrix) -> int:
    """Rank of a matrix of Fractions by exact elimination."""
    rows = [list(r) for r in matrix if any(r)]
    rank = 0
    col = 0
    ncols = len(rows[0]) if rows else 0
    while rank < len(rows) and col < ncols:
        p = next((k for k in range(rank, len(rows)) if rows[k][col]), None)
        if p is None:
            col += 1
            continue
        rows[rank], rows[p] = rows[p], rows[rank]
        lead = rows[rank][col]
        for k in range(rank + 1, len(rows)):
            if rows[k][col]:
                f = rows[k][col] / lead
                rows[k] = [a - f * b for a, b in zip(rows[k], rows[rank])]
        rank += 1
        col += 1
    return rank
