import random
from fractions import Fraction

import pytest

from jetlie.expr import Expr, as_expr, is_zero
from jetlie.fields import (
    CommutatorTable,
    MultiplierNotProlongable,
    SpaceMismatch,
    UnknownGeneratorName,
    VectorField,
    bracket_of_prolonged,
    jacobi_report,
    lie_bracket,
    prolong,
    rank_exact,
    structure_constants,
    verify_table,
)
from jetlie.jets import JetSpace

sp = JetSpace(["jt", "jx", "jy"], ["ju"], 2)
T, X, Y = sp.independents
U = sp.dependents[0]
n = sp.ns()


def sl2_like(level):
    """-t^(n+1) d_t - (n+1) t^n (x d_x + y d_y)."""
    return VectorField(sp, {
        T: -n.jt ** (level + 1),
        X: -(level + 1) * n.jt ** level * n.jx,
        Y: -(level + 1) * n.jt ** level * n.jy,
    }, name=f"L{level}")


L = {k: sl2_like(k) for k in (-1, 0, 1)}


def test_apply_translation():
    f = VectorField(sp, {T: Expr.const(-1)}, name="shift")
    assert f.apply(n.jt * n.ju_jx) == -n.ju_jx


def test_prolonged_dilatation_on_ut():
    pf = prolong(L[0], 2)
    assert pf.apply(n.ju_jt) == n.ju_jt


def test_translations_prolong_trivially():
    pf = prolong(VectorField(sp, {T: Expr.const(-1)}), 2)
    assert all(is_zero(c) for c in pf.jet_coeffs.values())


def test_bracket_antisymmetry_and_sl2():
    a = L[1]
    assert lie_bracket(a, a).is_zero()
    got = lie_bracket(L[1], L[-1])
    want = L[0].scaled(2)
    assert got == want


def test_bracket_space_mismatch():
    other = JetSpace(["jt2"], ["ju2"], 1)
    g = VectorField(other, {other.independents[0]: Expr.const(1)})
    with pytest.raises(SpaceMismatch):
        lie_bracket(L[0], g)


def test_multiplier_bracket():
    # multiplication parts enter brackets as a(b0) - b(a0)
    a = VectorField(sp, {T: Expr.const(-1)}, multiplier=n.jt * n.jx)
    b = VectorField(sp, {X: Expr.const(-1)})
    br = lie_bracket(a, b)
    assert br.coeffs == {}
    # a(b0) = 0 and b(a0) = -d_x(t*x) = -t, so the bracket multiplier is +t
    assert br.multiplier == n.jt


def test_multiplier_rejected_by_prolong():
    a = VectorField(sp, {T: Expr.const(-1)}, multiplier=n.jx)
    with pytest.raises(MultiplierNotProlongable):
        prolong(a, 1)


def test_apply_is_derivation():
    rng = random.Random(8)
    coords = sp.coordinates(1)
    pf = prolong(L[1], 2)

    def rand_e():
        e = Expr.const(Fraction(rng.randint(-3, 3), rng.randint(1, 2)))
        for _ in range(rng.randint(0, 2)):
            e = e * as_expr(coords[rng.randrange(len(coords))])
        return e + rng.randint(-2, 2)

    for _ in range(20):
        e, f = rand_e(), rand_e()
        assert pf.apply(e * f) == pf.apply(e) * f + e * pf.apply(f)


def test_prolongation_linear_in_field():
    a, b = L[0], L[1]
    comb = a.scaled(3).plus(b.scaled(Fraction(-1, 2)))
    pc = prolong(comb, 2)
    pa, pb = prolong(a, 2), prolong(b, 2)
    for s in pc.jet_coeffs:
        want = 3 * pa.coefficient(s) + Fraction(-1, 2) * pb.coefficient(s)
        assert pc.coefficient(s) == want


def test_prolongation_respects_brackets():
    for (a, b) in [(L[1], L[-1]), (L[0], L[1]), (L[0], L[-1])]:
        br = lie_bracket(a, b)
        lhs = prolong(br, 2)
        rhs = bracket_of_prolonged(prolong(a, 2), prolong(b, 2))
        for s in set(lhs.jet_coeffs) | set(rhs):
            assert lhs.coefficient(s) == rhs.get(s, Expr.zero())


def sl2_table():
    tb = CommutatorTable()
    tb.set("L1", "L-1", [(2, "L0")])
    tb.set("L0", "L1", [(-1, "L1")])
    tb.set("L0", "L-1", [(1, "L-1")])
    return tb


def test_verify_table_passes():
    fields = [(f"L{k}", L[k]) for k in (1, 0, -1)]
    rep = verify_table(fields, sl2_table())
    assert rep.ok and len(rep.results) == 3


def test_verify_table_detects_corruption():
    bad = dict((f"L{k}", L[k]) for k in (1, 0, -1))
    bad["L1"] = VectorField(sp, {
        T: -n.jt ** 2,
        X: +2 * n.jt * n.jx,  # flipped sign
        Y: -2 * n.jt * n.jy,
    }, name="L1")
    rep = verify_table(list(bad.items()), sl2_table())
    assert not rep.ok
    failing = {(r.a, r.b) for r in rep.failures()}
    assert any("L1" in pair for pair in failing)
    # untouched pair still passes
    assert all("L1" in pair for pair in failing)


def test_verify_table_unknown_name():
    tb = CommutatorTable()
    tb.set("L1", "nope", [(1, "L0")])
    with pytest.raises(UnknownGeneratorName):
        verify_table([(f"L{k}", L[k]) for k in (1, 0, -1)], tb)


def test_table_skip():
    tb = sl2_table()
    tb.skip("L1", "L0")
    rep = verify_table([(f"L{k}", L[k]) for k in (1, 0, -1)], tb)
    assert ("L0", "L1") in rep.skipped or ("L1", "L0") in rep.skipped
    assert len(rep.results) == 2


def test_jacobi_sl2():
    rep = jacobi_report([(f"L{k}", L[k]) for k in (1, 0, -1)])
    assert all(ok for _, ok in rep)


def test_structure_constants_recovers_sl2():
    tb = structure_constants([(f"L{k}", L[k]) for k in (1, 0, -1)])
    assert tb is not None
    rep = verify_table([(f"L{k}", L[k]) for k in (1, 0, -1)], tb)
    assert rep.ok
    combo = tb.expected("L1", "L-1")
    assert [(c.const_value(), g) for c, g in combo] == [(2, "L0")]


def test_rank_exact():
    m = [[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)],
         [Fraction(0), Fraction(1)]]
    assert rank_exact(m) == 2
    assert rank_exact([[Fraction(0)]]) == 0
