"""Exact symbolic expressions: rational functions extended by radical factors.

An Expr is a finite sum of radical monomials (products of rational powers of
polynomials) with rational-function coefficients.  Construction is eagerly
canonical: coefficients are kept coprime to every radical base of their term,
bases are square-free-extracted, and the zero expression is the empty sum.
Perfect-power extraction out of a radical is gated by the positivity registry.
"""
from __future__ import annotations

from fractions import Fraction

from .poly import (
    Polynomial,
    mono_key,
    poly_gcd,
    poly_str,
    sqfree_decomposition,
    try_divide,
)
from .symbols import Symbol, by_id

_F0 = Fraction(0)
_F1 = Fraction(1)


class KernelError(Exception):
    pass


class DivisionByZero(KernelError):
    pass


class UnsupportedRadical(KernelError):
    pass


class SingularPoint(KernelError):
    pass


class IrrationalValue(KernelError):
    pass


class NotPolynomialInSplitVars(KernelError):
    pass


# -- positivity assumptions ------------------------------------------------


class AssumptionRegistry:
    """Polynomials assumed strictly positive.

    Consulted only when extracting perfect powers out of radical bases;
    append-only, so registrations must precede the expressions that rely on
    them.
    """

    def __init__(self):
        self._positive: set[Polynomial] = set()

    def assume_positive(self, p):
        p = as_expr(p)
        if len(p.terms) != 1 or () not in p.terms:
            raise ValueError("positivity assumptions must be polynomial")
        rf = p.terms[()]
        if not rf.den.is_const():
            raise ValueError("positivity assumptions must be polynomial")
        self._positive.add(rf.num.primitive_signed()[1].scale(
            1 if rf.num.content_signed() > 0 else -1))

    def _has(self, p: Polynomial) -> bool:
        return p in self._positive

    def sign_of(self, p: Polynomial) -> int:
        """+1 if p assumed positive, -1 if -p assumed positive, else 0."""
        if self._has(p):
            return 1
        if self._has(-p):
            return -1
        return 0

    def extraction_ok(self, p: Polynomial) -> bool:
        """True when p or p**2 is registered positive (sanctions |p| -> p)."""
        return self.sign_of(p) > 0 or self._has((p * p).primitive_signed()[1])

    def clear(self):
        self._positive.clear()


assumptions = AssumptionRegistry()


# -- rational functions ------------------------------------------------------


class RationalFunction:
    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial, _reduced=False):
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        if not _reduced:
            if num.is_zero():
                den = Polynomial.const(1)
            else:
                if not den.is_const():
                    g = poly_gcd(num, den)
                    if not g.is_const():
                        num = try_divide(num, g)
                        den = try_divide(den, g)
                c = den.content_signed()
                if c != 1:
                    num = num.scale(1 / c)
                    den = den.scale(1 / c)
        self.num = num
        self.den = den

    @classmethod
    def from_poly(cls, p: Polynomial) -> "RationalFunction":
        return cls(p, Polynomial.const(1), _reduced=True)

    @classmethod
    def const(cls, c) -> "RationalFunction":
        return cls.from_poly(Polynomial.const(c))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_const(self) -> bool:
        return self.num.is_const() and self.den.is_const()

    def const_value(self) -> Fraction:
        return self.num.const_value() / self.den.const_value()

    def __eq__(self, other):
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    def __neg__(self):
        return RationalFunction(-self.num, self.den, _reduced=True)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction(self.num * other.num, self.den * other.den)

    def inverse(self) -> "RationalFunction":
        if self.num.is_zero():
            raise DivisionByZero("inverse of zero")
        return RationalFunction(self.den, self.num)

    def derivative(self, s: Symbol) -> "RationalFunction":
        dn = self.num.derivative(s)
        if self.den.is_const():
            return RationalFunction(dn.scale(1 / self.den.const_value()),
                                    Polynomial.const(1))
        dd = self.den.derivative(s)
        return RationalFunction(dn * self.den - self.num * dd, self.den * self.den)

    def evaluate(self, point: dict) -> Fraction:
        dv = self.den.evaluate(point)
        if dv == 0:
            raise SingularPoint("denominator vanishes at sample point")
        return self.num.evaluate(point) / dv

    def symbol_ids(self) -> set[int]:
        return self.num.symbol_ids() | self.den.symbol_ids()

    def __repr__(self):
        return f"RationalFunction(({poly_str(self.num)})/({poly_str(self.den)}))"


# -- radical monomials --------------------------------------------------------

# A radical monomial is a sorted tuple of (base Polynomial, Fraction exponent)
# with non-integer exponents and square-free-extracted bases.
RadMono = tuple


def _rm_key(rm: RadMono):
    return tuple((b.sort_key(), e) for b, e in rm)


def _integer_root(n: int, q: int) -> int | None:
    """Exact q-th root of n >= 0, or None."""
    if n < 2:
        return n
    x = 1 << ((n.bit_length() + q - 1) // q)
    while True:
        y = ((q - 1) * x + n // x ** (q - 1)) // q
        if y >= x:
            break
        x = y
    return x if x ** q == n else None


def _fraction_root(v: Fraction, e: Fraction) -> Fraction:
    """Exact v**e for rational v, raising when the value is irrational."""
    p, q = e.numerator, e.denominator
    sign = 1
    if v < 0:
        if q % 2 == 0:
            raise IrrationalValue("negative base under an even root")
        sign = (-1) ** p
        v = -v
    if v == 0:
        if p < 0:
            raise SingularPoint("zero base with negative exponent")
        return _F0
    rn = _integer_root(v.numerator, q)
    rd = _integer_root(v.denominator, q)
    if rn is None or rd is None:
        raise IrrationalValue(f"{v} is not an exact {q}-th power")
    return sign * Fraction(rn, rd) ** p


def _radicalize(base: Polynomial, e: Fraction):
    """Normalize base**e (e non-integer) into (num, den, factors).

    num/den collect the integer-exponent extractions, factors the residual
    non-integer powers of square-free bases.
    """
    q = e.denominator
    content, parts = sqfree_decomposition(base)
    # prefer the registered sign of each square-free factor
    factors = []
    for y, m in parts:
        if assumptions.sign_of(-y) > 0:
            y = -y
            if m % 2 == 1:
                content = -content
        factors.append((y, m))
    if content < 0:
        if q % 2 == 0:
            raise UnsupportedRadical(
                f"negative content {content} under a {q}-th root")
        sign = -1
        content = -content
    else:
        sign = 1
    cr = content ** e if content == 1 else None
    if cr is None:
        p_, q_ = e.numerator, e.denominator
        rn = _integer_root(content.numerator, q_)
        rd = _integer_root(content.denominator, q_)
        if rn is None or rd is None:
            raise UnsupportedRadical(
                f"content {content} of a radical base is not a perfect "
                f"{q_}-th power")
        cr = Fraction(rn, rd) ** p_
    if sign < 0:
        cr = cr * (-1) ** e.numerator
    num = Polynomial.const(cr)
    den = Polynomial.const(1)
    out = []
    for y, m in factors:
        beta = m * e
        positive = assumptions.extraction_ok(y)
        if beta.denominator == 1:
            b = int(beta)
            # extraction of an integer power out of the radical
            if not (positive or b % 2 == 0 or m % 2 == 1):
                raise UnsupportedRadical(
                    f"cannot extract ({poly_str(y)})^{b} without a "
                    f"positivity assumption")
            if b > 0:
                num = num * y ** b
            elif b < 0:
                den = den * y ** (-b)
        else:
            if not (positive or m % 2 == 1):
                raise UnsupportedRadical(
                    f"({poly_str(y)})^{m} under a {beta.denominator}-th root "
                    f"needs a positivity assumption")
            out.append((y, beta))
    return num, den, out


def _rm_combine(factors):
    """Merge factor list by base; integer exponents go to (num, den)."""
    acc: dict[Polynomial, Fraction] = {}
    for b, e in factors:
        acc[b] = acc.get(b, _F0) + e
    num = Polynomial.const(1)
    den = Polynomial.const(1)
    out = []
    for b, e in acc.items():
        if e == 0:
            continue
        if e.denominator == 1:
            k = int(e)
            if k > 0:
                num = num * b ** k
            else:
                den = den * b ** (-k)
        else:
            out.append((b, e))
    out.sort(key=lambda fe: (fe[0].sort_key(), fe[1]))
    return num, den, tuple(out)


# -- expressions ----------------------------------------------------------------


class Expr:
    __slots__ = ("terms", "_hash")

    def __init__(self, terms: dict, _trusted=False):
        if not _trusted:
            terms = _build(terms.items())
        self.terms = terms
        self._hash = None

    # -- constructors ----------------------------------------------------------

    @classmethod
    def zero(cls) -> "Expr":
        return cls({}, _trusted=True)

    @classmethod
    def const(cls, c) -> "Expr":
        c = Fraction(c)
        if not c:
            return cls.zero()
        return cls({(): RationalFunction.const(c)}, _trusted=True)

    @classmethod
    def sym(cls, s: Symbol) -> "Expr":
        return cls({(): RationalFunction.from_poly(Polynomial.var(s))},
                   _trusted=True)

    @classmethod
    def from_poly(cls, p: Polynomial) -> "Expr":
        if p.is_zero():
            return cls.zero()
        return cls({(): RationalFunction.from_poly(p)}, _trusted=True)

    @classmethod
    def from_rf(cls, rf: RationalFunction) -> "Expr":
        if rf.is_zero():
            return cls.zero()
        return cls({(): rf}, _trusted=True)

    # -- queries ------------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_rational(self) -> bool:
        """True when self is a plain rational function (no radical factors)."""
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def is_const(self) -> bool:
        return not self.terms or (
            len(self.terms) == 1 and () in self.terms and self.terms[()].is_const()
        )

    def const_value(self) -> Fraction:
        if not self.terms:
            return _F0
        return self.terms[()].const_value()

    def as_rf(self) -> RationalFunction:
        if not self.terms:
            return RationalFunction.const(0)
        if not self.is_rational():
            raise UnsupportedRadical("expression carries radical factors")
        return self.terms[()]

    def symbol_ids(self) -> set[int]:
        out: set[int] = set()
        for rm, rf in self.terms.items():
            out |= rf.symbol_ids()
            for b, _ in rm:
                out |= b.symbol_ids()
        return out

    def symbols(self) -> list[Symbol]:
        return [by_id(i) for i in sorted(self.symbol_ids())]

    def __eq__(self, other):
        if not isinstance(other, Expr):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(sorted(
                (_rm_key(rm), hash(rf)) for rm, rf in self.terms.items())))
        return self._hash

    # -- arithmetic ------------------------------------------------------------------

    def __add__(self, other) -> "Expr":
        other = as_expr(other)
        if not self.terms:
            return other
        if not other.terms:
            return self
        return Expr(_build(list(self.terms.items()) + list(other.terms.items())),
                    _trusted=True)

    __radd__ = __add__

    def __neg__(self) -> "Expr":
        return Expr({rm: -rf for rm, rf in self.terms.items()}, _trusted=True)

    def __sub__(self, other) -> "Expr":
        return self + (-as_expr(other))

    def __rsub__(self, other) -> "Expr":
        return as_expr(other) + (-self)

    def __mul__(self, other) -> "Expr":
        other = as_expr(other)
        if not self.terms or not other.terms:
            return Expr.zero()
        pairs = []
        for rm1, rf1 in self.terms.items():
            for rm2, rf2 in other.terms.items():
                rf = rf1 * rf2
                if rm1 or rm2:
                    n, d, rm = _rm_combine(list(rm1) + list(rm2))
                    rf = rf * RationalFunction(n, d)
                else:
                    rm = ()
                pairs.append((rm, rf))
        return Expr(_build(pairs), _trusted=True)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Expr":
        other = as_expr(other)
        if other.is_zero():
            raise DivisionByZero("division by a symbolically zero expression")
        if len(other.terms) != 1:
            raise UnsupportedRadical("division by a sum of radical terms")
        ((rm, rf),) = other.terms.items()
        inv_rm = tuple((b, -e) for b, e in rm)
        inv = Expr({inv_rm: rf.inverse()})
        return self * inv

    def __rtruediv__(self, other) -> "Expr":
        return as_expr(other) / self

    def __pow__(self, e) -> "Expr":
        e = Fraction(e)
        if e.denominator == 1:
            n = int(e)
            if n == 0:
                return Expr.const(1)
            if n < 0:
                return Expr.const(1) / self ** (-n)
            result = Expr.const(1)
            base = self
            while n:
                if n & 1:
                    result = result * base
                if n > 1:
                    base = base * base
                n >>= 1
            return result
        if self.is_zero():
            if e > 0:
                return Expr.zero()
            raise DivisionByZero("negative power of zero")
        if len(self.terms) != 1:
            raise UnsupportedRadical(
                "rational power of a sum of radical terms")
        ((rm, rf),) = self.terms.items()
        factors = []
        num = Polynomial.const(1)
        den = Polynomial.const(1)
        for b, a in rm:
            # rewriting (b**a)**e needs b >= 0 unless a already forces it
            if a.denominator % 2 != 0 and assumptions.sign_of(b) <= 0:
                raise UnsupportedRadical(
                    f"cannot raise ({poly_str(b)})^{a} to a fractional power "
                    f"without a positivity assumption")
            ae = a * e
            if ae.denominator == 1:
                k = int(ae)
                if k > 0:
                    num = num * b ** k
                elif k < 0:
                    den = den * b ** (-k)
            else:
                factors.append((b, ae))
        n1, d1, f1 = _radicalize(rf.num, e)
        n2, d2, f2 = _radicalize(rf.den, -e)
        n, d, rm_out = _rm_combine(factors + f1 + f2)
        coeff = RationalFunction(num * n1 * n2 * n, den * d1 * d2 * d)
        return Expr(_build([(rm_out, coeff)]), _trusted=True)

    # -- calculus ------------------------------------------------------------------

    def derivative(self, s: Symbol) -> "Expr":
        pairs = []
        for rm, rf in self.terms.items():
            drf = rf.derivative(s)
            if not drf.is_zero():
                pairs.append((rm, drf))
            for idx, (b, e) in enumerate(rm):
                db = b.derivative(s)
                if db.is_zero():
                    continue
                nrm = rm[:idx] + ((b, e - 1),) + rm[idx + 1:]
                pairs.append((nrm, rf * RationalFunction.from_poly(db.scale(e))))
        return Expr(_build(pairs), _trusted=True)

    def substitute(self, sigma: dict) -> "Expr":
        """Simultaneous substitution of symbols by expressions."""
        if not sigma or not self.terms:
            return self
        images = {s.id: as_expr(v) for s, v in sigma.items()}
        dom = set(images)
        total = Expr.zero()
        for rm, rf in self.terms.items():
            ids = rf.symbol_ids()
            for b, _ in rm:
                ids |= b.symbol_ids()
            if not (ids & dom):
                total = total + Expr({rm: rf}, _trusted=True)
                continue
            val = _poly_subst(rf.num, images)
            if not rf.den.is_const():
                val = val / _poly_subst(rf.den, images)
            elif rf.den.const_value() != 1:
                val = val / Expr.const(rf.den.const_value())
            for b, e in rm:
                val = val * _poly_subst(b, images) ** e
            total = total + val
        return total

    def evaluate(self, point: dict, radical_free_only=False) -> Fraction:
        """Exact evaluation at a rational point (symbols -> Fractions)."""
        pt = {s.id: Fraction(v) for s, v in point.items()}
        total = _F0
        for rm, rf in self.terms.items():
            if rm and radical_free_only:
                continue
            v = rf.evaluate(pt)
            for b, e in rm:
                bv = b.evaluate(pt)
                if bv == 0:
                    raise SingularPoint("radical base vanishes at sample point")
                v = v * _fraction_root(bv, e)
            total += v
        return total

    def __repr__(self):
        return f"Expr({expr_str(self)})"


def _poly_subst(p: Polynomial, images: dict) -> Expr:
    total = Expr.zero()
    for m, c in p.terms.items():
        term = Expr.const(c)
        for i, e in m:
            img = images.get(i)
            if img is None:
                img = Expr.sym(by_id(i))
            term = term * img ** e
        total = total + term
    return total


def _extract(rm: RadMono, rf: RationalFunction):
    """Make the coefficient coprime to every radical base of the term."""
    num, den = rf.num, rf.den
    changed = False
    out = []
    for b, e in rm:
        a = 0
        while True:
            q = try_divide(num, b)
            if q is None:
                break
            num = q
            a += 1
        d = 0
        while True:
            q = try_divide(den, b)
            if q is None:
                break
            den = q
            d += 1
        if a or d:
            changed = True
            e = e + a - d
        out.append((b, e))
    if not changed:
        return rm, rf
    out.sort(key=lambda fe: (fe[0].sort_key(), fe[1]))
    return tuple(out), RationalFunction(num, den)


def _build(pairs) -> dict:
    acc: dict = {}
    pending = list(pairs)
    while pending:
        nxt = []
        for rm, rf in pending:
            if rf.is_zero():
                continue
            if rm:
                rm, rf = _extract(rm, rf)
            prev = acc.pop(rm, None)
            if prev is None:
                acc[rm] = rf
            else:
                s = prev + rf
                if s.is_zero():
                    continue
                if rm:
                    nxt.append((rm, s))  # the sum may divide a base again
                else:
                    acc[rm] = s
        pending = nxt
    return acc


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, Symbol):
        return Expr.sym(x)
    if isinstance(x, Polynomial):
        return Expr.from_poly(x)
    if isinstance(x, (int, Fraction)):
        return Expr.const(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to Expr")


def is_zero(e: Expr) -> bool:
    """True iff the canonical form of e is the empty sum."""
    return not e.terms


# -- structure queries -------------------------------------------------------------


def collect(e: Expr, split) -> list[tuple[Expr, Expr]]:
    """Split e as a polynomial in the given symbols.

    Returns (monomial, coefficient) pairs whose product-sum reproduces e;
    coefficients contain no split symbol.
    """
    ids = {s.id for s in split}
    groups: dict = {}
    for rm, rf in e.terms.items():
        for b, _ in rm:
            if b.symbol_ids() & ids:
                raise NotPolynomialInSplitVars(
                    "split symbol inside a radical base")
        if rf.den.symbol_ids() & ids:
            raise NotPolynomialInSplitVars(
                "split symbol inside a denominator")
        for m, c in rf.num.terms.items():
            sm = tuple((i, x) for i, x in m if i in ids)
            rest = tuple((i, x) for i, x in m if i not in ids)
            part = Expr(
                {rm: RationalFunction(Polynomial({rest: c}, _trusted=True),
                                      rf.den)},
                _trusted=False,
            )
            groups[sm] = groups.get(sm, Expr.zero()) + part
    out = []
    for sm in sorted(groups, key=mono_key):
        if groups[sm].is_zero():
            continue
        mono = Expr.from_poly(Polynomial({sm: _F1}, _trusted=True))
        out.append((mono, groups[sm]))
    return out


def expr_str(e: Expr) -> str:
    """Deterministic textual form, parseable by the definition language."""
    if not e.terms:
        return "0"
    parts = []
    for rm in sorted(e.terms, key=_rm_key):
        rf = e.terms[rm]
        num = poly_str(rf.num)
        if len(rf.num.terms) > 1:
            num = f"({num})"
        piece = num
        if not rf.den.is_const() or rf.den.const_value() != 1:
            piece += f"/({poly_str(rf.den)})"
        for b, ex in rm:
            piece += f"*({poly_str(b)})^({ex})"
        parts.append(piece)
    return " + ".join(parts)
