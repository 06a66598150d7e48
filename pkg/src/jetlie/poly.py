"""Sparse multivariate polynomials over exact rationals.

Monomials are sorted tuples of (symbol id, exponent) pairs; the fixed term
order is graded lexicographic over interned symbol ids, so equal polynomials
have identical storage and a deterministic leading term.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd as _int_gcd

from .symbols import Symbol, by_id

Mono = tuple  # ((symbol_id, exponent), ...) sorted by id, exponents > 0

MONO_ONE: Mono = ()

_F0 = Fraction(0)
_F1 = Fraction(1)


def mono_mul(a: Mono, b: Mono) -> Mono:
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        ai, ae = a[i]
        bi, be = b[j]
        if ai < bi:
            out.append(a[i]); i += 1
        elif bi < ai:
            out.append(b[j]); j += 1
        else:
            out.append((ai, ae + be)); i += 1; j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def mono_degree(m: Mono) -> int:
    return sum(e for _, e in m)


def mono_key(m: Mono):
    """Sort key: smaller key = larger monomial in graded lex order."""
    return (-mono_degree(m), tuple((i, -e) for i, e in m))


def mono_divides(a: Mono, b: Mono) -> bool:
    """True when a | b componentwise."""
    db = dict(b)
    return all(db.get(i, 0) >= e for i, e in a)


def mono_div(b: Mono, a: Mono) -> Mono:
    """Exact quotient b / a (caller guarantees divisibility)."""
    da = dict(a)
    out = []
    for i, e in b:
        r = e - da.get(i, 0)
        if r:
            out.append((i, r))
    return tuple(out)


def mono_gcd(a: Mono, b: Mono) -> Mono:
    db = dict(b)
    out = []
    for i, e in a:
        o = db.get(i, 0)
        if o:
            out.append((i, min(e, o)))
    return tuple(out)


class Polynomial:
    __slots__ = ("terms", "_hash", "_key")

    def __init__(self, terms: dict | None = None, _trusted: bool = False):
        if terms is None:
            terms = {}
        if not _trusted:
            terms = {m: Fraction(c) for m, c in terms.items() if c}
        self.terms = terms
        self._hash = None
        self._key = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls({}, _trusted=True)

    @classmethod
    def const(cls, c) -> "Polynomial":
        c = Fraction(c)
        return cls({MONO_ONE: c} if c else {}, _trusted=True)

    @classmethod
    def var(cls, s: Symbol) -> "Polynomial":
        return cls({((s.id, 1),): _F1}, _trusted=True)

    # -- basic queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and MONO_ONE in self.terms)

    def const_value(self) -> Fraction:
        if not self.terms:
            return _F0
        return self.terms[MONO_ONE]

    def degree(self) -> int:
        if not self.terms:
            return 0
        return max(mono_degree(m) for m in self.terms)

    def degree_in(self, sid: int) -> int:
        d = 0
        for m in self.terms:
            for i, e in m:
                if i == sid and e > d:
                    d = e
        return d

    def leading(self) -> tuple[Mono, Fraction]:
        m = min(self.terms, key=mono_key)
        return m, self.terms[m]

    def symbol_ids(self) -> set[int]:
        out = set()
        for m in self.terms:
            for i, _ in m:
                out.add(i)
        return out

    def sort_key(self):
        if self._key is None:
            items = sorted(self.terms.items(), key=lambda kv: mono_key(kv[0]))
            self._key = tuple(
                (mono_key(m), c.numerator, c.denominator) for m, c in items
            )
        return self._key

    # -- arithmetic ----------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.sort_key())
        return self._hash

    def __add__(self, other: "Polynomial") -> "Polynomial":
        if not self.terms:
            return other
        if not other.terms:
            return self
        res = dict(self.terms)
        for m, c in other.terms.items():
            v = res.get(m)
            if v is None:
                res[m] = c
            else:
                v = v + c
                if v:
                    res[m] = v
                else:
                    del res[m]
        return Polynomial(res, _trusted=True)

    def __neg__(self) -> "Polynomial":
        return Polynomial({m: -c for m, c in self.terms.items()}, _trusted=True)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        if not self.terms or not other.terms:
            return Polynomial.zero()
        if len(other.terms) < len(self.terms):
            self, other = other, self
        res: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                v = res.get(m)
                if v is None:
                    res[m] = c1 * c2
                else:
                    v = v + c1 * c2
                    if v:
                        res[m] = v
                    else:
                        del res[m]
        return Polynomial(res, _trusted=True)

    def scale(self, c: Fraction) -> "Polynomial":
        if not c:
            return Polynomial.zero()
        if c == 1:
            return self
        return Polynomial({m: v * c for m, v in self.terms.items()}, _trusted=True)

    def mul_mono(self, mono: Mono, c: Fraction = _F1) -> "Polynomial":
        if not c:
            return Polynomial.zero()
        return Polynomial(
            {mono_mul(m, mono): v * c for m, v in self.terms.items()}, _trusted=True
        )

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Polynomial.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    # -- calculus / evaluation ------------------------------------------------

    def derivative(self, s: Symbol) -> "Polynomial":
        sid = s.id
        res: dict = {}
        for m, c in self.terms.items():
            for idx, (i, e) in enumerate(m):
                if i == sid:
                    if e == 1:
                        nm = m[:idx] + m[idx + 1:]
                    else:
                        nm = m[:idx] + ((i, e - 1),) + m[idx + 1:]
                    v = res.get(nm, _F0) + c * e
                    if v:
                        res[nm] = v
                    elif nm in res:
                        del res[nm]
                    break
        return Polynomial(res, _trusted=True)

    def evaluate(self, point: dict) -> Fraction:
        """point maps symbol ids to Fractions; every id of self must appear."""
        total = _F0
        for m, c in self.terms.items():
            v = c
            for i, e in m:
                v = v * point[i] ** e
            total += v
        return total

    # -- content / primitive part ---------------------------------------------

    def content_signed(self) -> Fraction:
        """c with self/c primitive (integer coprime coeffs, positive lc)."""
        if not self.terms:
            return _F1
        num_gcd = 0
        den_lcm = 1
        for c in self.terms.values():
            num_gcd = _int_gcd(num_gcd, c.numerator)
            den_lcm = den_lcm * c.denominator // _int_gcd(den_lcm, c.denominator)
        c = Fraction(num_gcd, den_lcm)
        if self.leading()[1] < 0:
            c = -c
        return c

    def primitive_signed(self) -> tuple[Fraction, "Polynomial"]:
        c = self.content_signed()
        if c == 1:
            return c, self
        return c, self.scale(1 / c)

    def __repr__(self):
        return f"Polynomial({poly_str(self)})"


def _mono_str(m: Mono) -> str:
    parts = []
    for i, e in m:
        n = by_id(i).name
        parts.append(n if e == 1 else f"{n}^{e}")
    return "*".join(parts)


def poly_str(p: Polynomial) -> str:
    if not p.terms:
        return "0"
    items = sorted(p.terms.items(), key=lambda kv: mono_key(kv[0]))
    out = []
    for m, c in items:
        ms = _mono_str(m)
        if not ms:
            cs = str(c)
        elif c == 1:
            cs = ms
        elif c == -1:
            cs = f"-{ms}"
        else:
            cs = f"{c}*{ms}"
        if out and not cs.startswith("-"):
            out.append("+ " + cs)
        elif out:
            out.append("- " + cs[1:])
        else:
            out.append(cs)
    return " ".join(out)


# -- division ------------------------------------------------------------------


def try_divide(f: Polynomial, g: Polynomial) -> Polynomial | None:
    """Exact quotient f/g, or None when g does not divide f."""
    if g.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    if f.is_zero():
        return Polynomial.zero()
    if g.is_const():
        return f.scale(1 / g.const_value())
    gm, gc = g.leading()
    r = dict(f.terms)
    q: dict = {}
    while r:
        m = min(r, key=mono_key)
        c = r[m]
        if not mono_divides(gm, m):
            return None
        qm = mono_div(m, gm)
        qc = c / gc
        q[qm] = qc
        for m2, c2 in g.terms.items():
            mm = mono_mul(qm, m2)
            v = r.get(mm, _F0) - qc * c2
            if v:
                r[mm] = v
            elif mm in r:
                del r[mm]
    return Polynomial(q, _trusted=True)


def _common_mono(p: Polynomial) -> Mono:
    it = iter(p.terms)
    g = next(it)
    for m in it:
        g = mono_gcd(g, m)
        if not g:
            break
    return g


def _strip_mono(p: Polynomial, m: Mono) -> Polynomial:
    if not m:
        return p
    return Polynomial({mono_div(t, m): c for t, c in p.terms.items()}, _trusted=True)


def _univar_parts(p: Polynomial, sid: int) -> dict[int, Polynomial]:
    """View p as a univariate polynomial in sid with Polynomial coefficients."""
    parts: dict[int, dict] = {}
    for m, c in p.terms.items():
        deg = 0
        rest = []
        for i, e in m:
            if i == sid:
                deg = e
            else:
                rest.append((i, e))
        parts.setdefault(deg, {})[tuple(rest)] = c
    return {d: Polynomial(t, _trusted=True) for d, t in parts.items()}


def _x_pow(sid: int, e: int) -> Polynomial:
    if e == 0:
        return Polynomial.const(1)
    return Polynomial({((sid, e),): _F1}, _trusted=True)


def _x_lead(p: Polynomial, sid: int) -> tuple[int, Polynomial]:
    parts = _univar_parts(p, sid)
    d = max(parts)
    return d, parts[d]


def _prem(f: Polynomial, g: Polynomial, sid: int) -> Polynomial:
    """Pseudo-remainder of f by g with respect to the variable sid."""
    m, lcg = _x_lead(g, sid)
    r = f
    while not r.is_zero():
        d, lcr = _x_lead(r, sid)
        if d < m:
            break
        r = r * lcg - g * lcr * _x_pow(sid, d - m)
    return r


def _content_pp_wrt(p: Polynomial, sid: int) -> tuple[Polynomial, Polynomial]:
    parts = _univar_parts(p, sid)
    cont = Polynomial.zero()
    for d in sorted(parts):
        cont = poly_gcd(cont, parts[d])
        if cont.is_const():
            break
    if cont.is_const():
        return Polynomial.const(1), p.primitive_signed()[1]
    pp = try_divide(p, cont)
    return cont, pp


def _pp_pos(p: Polynomial) -> Polynomial:
    return p.primitive_signed()[1]


_GCD_CACHE: dict = {}


def poly_gcd(f: Polynomial, g: Polynomial) -> Polynomial:
    """Primitive gcd with positive leading coefficient (1 for coprime inputs)."""
    if len(f.terms) > 1 and len(g.terms) > 1:
        key = (f, g) if f.sort_key() <= g.sort_key() else (g, f)
        hit = _GCD_CACHE.get(key)
        if hit is not None:
            return hit
        out = _poly_gcd(f, g)
        if len(_GCD_CACHE) > 20000:
            _GCD_CACHE.clear()
        _GCD_CACHE[key] = out
        return out
    return _poly_gcd(f, g)


def _poly_gcd(f: Polynomial, g: Polynomial) -> Polynomial:
    if f.is_zero():
        return _pp_pos(g) if not g.is_zero() else Polynomial.zero()
    if g.is_zero():
        return _pp_pos(f)
    if f.is_const() or g.is_const():
        return Polynomial.const(1)
    if f is g or f.terms == g.terms or f.terms == (-g).terms:
        return _pp_pos(f)

    mf, mg = _common_mono(f), _common_mono(g)
    mc = mono_gcd(mf, mg)
    if mf or mg:
        f = _strip_mono(f, mf)
        g = _strip_mono(g, mg)
        base = Polynomial({mc: _F1}, _trusted=True) if mc else None
        h = poly_gcd(f, g) if not (f.is_const() or g.is_const()) else Polynomial.const(1)
        return _pp_pos(h * base) if base is not None else h

    if try_divide(f, g) is not None:
        return _pp_pos(g)
    if try_divide(g, f) is not None:
        return _pp_pos(f)

    common = f.symbol_ids() & g.symbol_ids()
    if not common:
        return Polynomial.const(1)

    # factor-wise route when the smaller side splits into known pieces;
    # perfect-power denominators dominate the workload here
    small, big = (f, g) if len(f.terms) <= len(g.terms) else (g, f)
    if len(small.terms) <= 8:
        parts = sqfree_decomposition(small)[1]
        if len(parts) > 1 or (parts and parts[0][1] > 1):
            out = Polynomial.const(1)
            cur = big
            for y, m in parts:
                for _ in range(m):
                    h = poly_gcd(cur, y)
                    if h.is_const():
                        break
                    out = out * h
                    cur = try_divide(cur, h)
            return _pp_pos(out)

    sid = max(common)
    cf, pf = _content_pp_wrt(f, sid)
    cg, pg = _content_pp_wrt(g, sid)
    c = poly_gcd(cf, cg)

    a, b = pf, pg
    if a.degree_in(sid) < b.degree_in(sid):
        a, b = b, a
    while not b.is_zero():
        if b.degree_in(sid) == 0:
            return _pp_pos(c)  # coprime in the main variable
        r = _prem(a, b, sid)
        if not r.is_zero():
            if r.degree_in(sid) == 0:
                return _pp_pos(c)
            r = _content_pp_wrt(r, sid)[1]
        a, b = b, r
    return _pp_pos(c * a)


_SQFREE_CACHE: dict = {}


def sqfree_decomposition(
    f: Polynomial,
) -> tuple[Fraction, list[tuple[Polynomial, int]]]:
    """f = content * prod(base**mult) with square-free, pairwise-coprime bases.

    Bases are primitive with positive leading coefficient; the signed content
    absorbs the rational factor and sign.
    """
    hit = _SQFREE_CACHE.get(f)
    if hit is not None:
        return hit
    out = _sqfree_decomposition(f)
    if len(_SQFREE_CACHE) > 8000:
        _SQFREE_CACHE.clear()
    _SQFREE_CACHE[f] = out
    return out


def _sqfree_decomposition(f):
    if f.is_zero():
        raise ValueError("square-free decomposition of zero")
    cont, p = f.primitive_signed()
    if p.is_const():
        return cont, []
    # w[k] = product of factors with multiplicity > k
    levels = []
    g = p
    while not g.is_const():
        h = g
        for sid in sorted(g.symbol_ids()):
            h = poly_gcd(h, g.derivative(by_id(sid)))
            if h.is_const():
                break
        w = try_divide(g, h)
        levels.append(_pp_pos(w))
        g = h
    factors = []
    for k in range(len(levels)):
        nxt = levels[k + 1] if k + 1 < len(levels) else Polynomial.const(1)
        y = try_divide(levels[k], nxt)
        if y is None:
            raise ArithmeticError("square-free level division failed")
        y = _pp_pos(y)
        if not y.is_const():
            factors.append((y, k + 1))
    prod = Polynomial.const(1)
    for y, k in factors:
        prod = prod * y ** k
    q = try_divide(f, prod)
    if q is None or not q.is_const():
        raise ArithmeticError("square-free decomposition inconsistent")
    return q.const_value(), factors
