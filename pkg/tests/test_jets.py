import random
from fractions import Fraction

import pytest

from jetlie.expr import Expr, as_expr, is_zero
from jetlie.jets import DuplicateName, JetSpace, OrderExceeded, coordinate_count
from jetlie.symbols import Kind, symbol


sp2 = JetSpace(["jt", "jx", "jy"], ["ju"], 2)
sp1 = JetSpace(["jt"], ["jv"], 1)


def test_coordinate_counts():
    assert len(sp2.coordinates()) == 13  # 3 + 1 + 3 + 6
    sp = JetSpace(["jt", "jx", "jy"], ["jw1", "jw2", "jw3"], 1)
    assert len(sp.coordinates()) == 15  # 3 + 3 + 9
    assert len(sp1.coordinates()) == 3
    for n_ind, n_dep, order in [(3, 1, 2), (3, 3, 1), (1, 1, 1), (2, 2, 3)]:
        names_i = [f"ci{n_ind}{n_dep}{order}{k}" for k in range(n_ind)]
        names_d = [f"cd{n_ind}{n_dep}{order}{k}" for k in range(n_dep)]
        s = JetSpace(names_i, names_d, order)
        assert len(s.coordinates()) == coordinate_count(n_ind, n_dep, order)


def test_duplicate_name_rejected():
    with pytest.raises(DuplicateName):
        JetSpace(["jt", "jt"], ["jq"], 1)


def test_symmetric_second_derivatives_identified():
    a = sp2.jet("ju", "jxjy")
    b = sp2.coordinate(0, (0, 1, 1))
    assert a is b


def test_total_derivative_basics():
    n = sp2.ns()
    t, x = sp2.independents[0], sp2.independents[1]
    # D_t(u) = u_t
    assert sp2.total_derivative(as_expr(sp2.dependents[0]), 0) == n.ju_jt
    # D_x(t * x) = t
    assert sp2.total_derivative(n.jt * n.jx, 1) == n.jt
    # Leibniz: D_x(u_t * u_x) = u_tx u_x + u_t u_xx
    got = sp2.total_derivative(n.ju_jt * n.ju_jx, 1)
    assert got == n.ju_jtjx * n.ju_jx + n.ju_jt * n.ju_jxjx


def test_total_derivative_of_constant_is_zero():
    q = as_expr(symbol("jqpar", Kind.PARAMETER))
    assert is_zero(sp2.total_derivative(q + 3, 0))


def test_order_escalation_is_opt_in():
    n = sp2.ns()
    with pytest.raises(OrderExceeded):
        sp2.total_derivative(n.ju_jxjx, 1)
    e = sp2.total_derivative(n.ju_jxjx, 1, escalate=True)
    assert not is_zero(e)


def rand_jet_expr(rng, space):
    coords = space.coordinates(space.max_order - 2)
    e = Expr.zero()
    for _ in range(rng.randint(1, 4)):
        term = Expr.const(Fraction(rng.randint(-3, 3), rng.randint(1, 2)))
        for _ in range(rng.randint(0, 2)):
            term = term * as_expr(coords[rng.randrange(len(coords))])
        e = e + term
    return e


def test_total_derivatives_commute():
    rng = random.Random(42)
    for _ in range(25):
        e = rand_jet_expr(rng, sp2)
        d01 = sp2.total_derivative(sp2.total_derivative(e, 0), 1)
        d10 = sp2.total_derivative(sp2.total_derivative(e, 1), 0)
        assert d01 == d10


def test_suffix_parse_multichar_names():
    sp = JetSpace(["mt", "mr1", "mr2"], ["mu1"], 2)
    assert sp.jet("mu1", "mr1mr2") is sp.coordinate(0, (0, 1, 1))
    assert sp.jet("mu1", "mtmt") is sp.coordinate(0, (2, 0, 0))
    assert sp.parse_suffix("zz") is None
