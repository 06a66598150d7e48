import random
from fractions import Fraction

import pytest

from jetlie.expr import (
    DivisionByZero,
    Expr,
    IrrationalValue,
    NotPolynomialInSplitVars,
    UnsupportedRadical,
    as_expr,
    assumptions,
    collect,
    expr_str,
    is_zero,
)
from jetlie.symbols import Kind, symbol

# test-local symbols; jet spaces are exercised elsewhere
T = symbol("kt", Kind.PARAMETER)
P = symbol("kp", Kind.PARAMETER)
U1 = symbol("ku1", Kind.PARAMETER)
U2 = symbol("ku2", Kind.PARAMETER)
UT = symbol("kut", Kind.PARAMETER)
A1 = symbol("ka1", Kind.PARAMETER)
A2 = symbol("ka2", Kind.PARAMETER)

t, p, u1, u2, ut = (as_expr(s) for s in (T, P, U1, U2, UT))
usq = u1 * u1 + u2 * u2
one_minus_pt = 1 - p * t

assumptions.assume_positive(one_minus_pt)
assumptions.assume_positive(usq)


def radical_factors(e):
    ((rm, rf),) = e.terms.items()
    return rm, rf


def test_integer_power_folds_into_radical_exponent():
    e = usq ** Fraction(-5, 2) * usq
    rm, rf = radical_factors(e)
    assert len(rm) == 1
    assert rm[0][1] == Fraction(-3, 2)
    assert rf.is_const() and rf.const_value() == 1


def test_perfect_square_extraction_under_positivity():
    e = (one_minus_pt ** 4 * usq) ** Fraction(1, 2)
    want = one_minus_pt ** 2 * usq ** Fraction(1, 2)
    assert e == want


def test_zero_numerator_division():
    assert is_zero((t * t - t * t) / u1)


def test_division_by_symbolic_zero_rejected():
    with pytest.raises(DivisionByZero):
        _ = u1 / (t - t)


def test_differentiate_power_rule():
    e = one_minus_pt ** 2
    assert e.derivative(T) == -2 * p * one_minus_pt


def test_differentiate_radical_power_rule():
    e = usq ** Fraction(-5, 2)
    want = -5 * u1 * usq ** Fraction(-7, 2)
    assert e.derivative(U1) == want


def test_differentiate_product():
    assert (ut * u1).derivative(UT) == u1


def test_substitute_projective_image():
    e = u1.substitute({U1: u1 * one_minus_pt ** 2})
    assert e == u1 * one_minus_pt ** 2


def test_substitute_empty_is_identity():
    e = usq ** Fraction(1, 2) + t
    assert e.substitute({}) == e


def test_substitute_degenerate_radical_needs_assumption():
    v1 = as_expr(symbol("kv1", Kind.PARAMETER))
    v2 = as_expr(symbol("kv2", Kind.PARAMETER))
    base = v1 * v1 + v2 * v2  # not registered positive
    e = base ** Fraction(1, 2)
    with pytest.raises(UnsupportedRadical):
        e.substitute({symbol("kv2"): Expr.zero()})
    assumptions.assume_positive(v1 * v1)
    got = e.substitute({symbol("kv2"): Expr.zero()})
    assert got == v1


def test_is_zero_examples():
    assert is_zero(u1 * u2 - u2 * u1)
    w2 = ut * ut  # stand-in nonzero expression
    assert not is_zero(w2)


def test_radical_merge_across_coefficient():
    # u_sq * u_sq**(-5/2) and u_sq**(-3/2) must cancel exactly
    e = usq * usq ** Fraction(-5, 2) - usq ** Fraction(-3, 2)
    assert is_zero(e)


def test_collect_basic():
    e = A1.__class__ and as_expr(A1) * t * u1 + as_expr(A2) * u2
    groups = collect(e, {A1, A2, symbol("kt")})
    assert len(groups) == 2
    rebuilt = Expr.zero()
    for mono, coeff in groups:
        for s in (A1, A2, T):
            assert s.id not in coeff.symbol_ids()
        rebuilt = rebuilt + mono * coeff
    assert rebuilt == e


def test_collect_zero_and_errors():
    assert collect(Expr.zero(), {P}) == []
    with pytest.raises(NotPolynomialInSplitVars):
        collect(u1 / p, {P})
    with pytest.raises(NotPolynomialInSplitVars):
        collect((p * p + u1 * u1) ** Fraction(1, 2), {P})


def test_eval_exact_examples():
    u11 = as_expr(symbol("ku11", Kind.PARAMETER))
    u22 = as_expr(symbol("ku22", Kind.PARAMETER))
    z1 = (u11 + u22) / usq
    val = z1.evaluate({symbol("ku1"): 1, symbol("ku2"): 0,
                       symbol("ku11"): 2, symbol("ku22"): 3})
    assert val == 5
    assert ut.evaluate({UT: Fraction(7, 3)}) == Fraction(7, 3)
    e = usq ** Fraction(1, 2)
    assert e.evaluate({U1: 3, U2: 4}) == 5
    with pytest.raises(IrrationalValue):
        e.evaluate({U1: 1, U2: 1})


def rand_expr(rng, depth=3):
    syms = [t, p, u1, u2]
    if depth == 0 or rng.random() < 0.3:
        choice = rng.random()
        if choice < 0.5:
            return syms[rng.randrange(len(syms))]
        return as_expr(Fraction(rng.randint(-4, 4), rng.randint(1, 3)))
    op = rng.random()
    a = rand_expr(rng, depth - 1)
    b = rand_expr(rng, depth - 1)
    if op < 0.45:
        return a + b
    if op < 0.9:
        return a * b
    return a - b


def test_ring_axioms_on_random_trees():
    rng = random.Random(20100901)
    for _ in range(40):
        a, b, c = (rand_expr(rng) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert a * (b + c) == a * b + a * c


def test_derivation_property_random():
    rng = random.Random(4)
    for _ in range(30):
        a, b = rand_expr(rng), rand_expr(rng)
        assert (a * b).derivative(T) == a.derivative(T) * b + a * b.derivative(T)
        assert (a + b).derivative(T) == a.derivative(T) + b.derivative(T)


def test_substitute_evaluate_compatibility():
    rng = random.Random(9)
    sigma = {U1: t * t + 1, U2: p - t}
    for _ in range(25):
        e = rand_expr(rng)
        pt = {T: Fraction(rng.randint(-5, 5), rng.randint(1, 5)),
              P: Fraction(rng.randint(-5, 5), rng.randint(1, 5))}
        full = dict(pt)
        full[U1] = sigma[U1].evaluate(pt)
        full[U2] = sigma[U2].evaluate(pt)
        assert e.substitute(sigma).evaluate(pt) == e.evaluate(full)


def test_is_zero_agrees_with_eval():
    rng = random.Random(13)
    for _ in range(30):
        e = rand_expr(rng)
        vanishes = is_zero(e)
        seen_nonzero = False
        for k in range(5):
            pt = {s: Fraction(rng.randint(-9, 9), rng.randint(1, 5))
                  for s in (T, P, U1, U2)}
            if e.evaluate(pt) != 0:
                seen_nonzero = True
        if vanishes:
            assert not seen_nonzero
        # nonzero expressions must witness at some sampled point, with high
        # probability; tolerate the rare all-zero sample rather than flake


def test_canonical_idempotence():
    rng = random.Random(17)
    for _ in range(20):
        e = rand_expr(rng)
        again = Expr(dict(e.terms))
        assert again == e


def test_pow_negative_and_rational():
    e = (u1 + u2) ** -2
    assert e * (u1 + u2) ** 2 == Expr.const(1)
    r = usq ** Fraction(3, 2)
    assert r * usq ** Fraction(-1, 2) == usq ** 2 / usq
    with pytest.raises(UnsupportedRadical):
        (u1 + usq ** Fraction(1, 2)) ** Fraction(1, 2)


def test_expr_str_deterministic():
    e = usq ** Fraction(-5, 2) * ut + t / (1 - p * t)
    assert expr_str(e) == expr_str(Expr(dict(e.terms)))
    assert expr_str(Expr.zero()) == "0"
