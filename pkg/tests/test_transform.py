from fractions import Fraction

import pytest

from jetlie.expr import Expr, as_expr, is_zero
from jetlie.fields import VectorField, prolong
from jetlie.jets import JetSpace
from jetlie.symbols import Kind, symbol
from jetlie.transform import (
    MissingDerivativeMap,
    PointTransformation,
    SingularJacobian,
    first_order_consistency,
    infinitesimal,
    prolong_transformation,
    pullback,
    reduce_circle,
    transport,
    vanishes_to_second_order,
    verify_transform_identity,
)

sp = JetSpace(["jt", "jx", "jy"], ["ju"], 2)
T, X, Y = sp.independents
U = sp.dependents[0]
n = sp.ns()
P = symbol("p", Kind.PARAMETER)
p = as_expr(P)
s_ = 1 - p * n.jt  # shrinking factor of the projective family


def projective():
    return PointTransformation(sp, P, {
        T: n.jt / s_,
        X: n.jx / s_ ** 2,
        Y: n.jy / s_ ** 2,
    }, name="projective")


def dilatation_generator():
    return VectorField(sp, {T: -n.jt ** 2, X: -2 * n.jt * n.jx,
                            Y: -2 * n.jt * n.jy}, name="gen")


def test_identity_family_prolongs_to_identity():
    ident = PointTransformation(sp, P, {}, name="identity")
    out = prolong_transformation(ident, 2)
    for sym_, img in out.derivative_maps.items():
        assert img == as_expr(sym_)


def test_projective_first_order_maps():
    out = prolong_transformation(projective(), 2)
    assert out.derivative_maps[sp.jet("ju", "jx")] == n.ju_jx * s_ ** 2
    assert out.derivative_maps[sp.jet("ju", "jy")] == n.ju_jy * s_ ** 2
    want_t = n.ju_jt * s_ ** 2 - 2 * p * (n.jx * n.ju_jx + n.jy * n.ju_jy) * s_
    assert out.derivative_maps[sp.jet("ju", "jt")] == want_t


def test_projective_second_order_maps():
    out = prolong_transformation(projective(), 2)
    assert out.derivative_maps[sp.jet("ju", "jxjx")] == n.ju_jxjx * s_ ** 4
    assert out.derivative_maps[sp.jet("ju", "jxjy")] == n.ju_jxjy * s_ ** 4
    want_tx = s_ ** 3 * (s_ * n.ju_jtjx
                         - 2 * p * (n.jx * n.ju_jxjx + n.jy * n.ju_jxjy)
                         - 2 * p * n.ju_jx)
    assert out.derivative_maps[sp.jet("ju", "jtjx")] == want_tx


def test_pullback_requires_maps():
    t = projective()
    with pytest.raises(MissingDerivativeMap):
        pullback(t, n.ju_jx)


def test_infinitesimal_of_projective():
    g = infinitesimal(projective())
    want = dilatation_generator()
    assert g.coeffs == want.coeffs


def test_mixing_family_prolongs():
    # identity at parameter 0 keeps the Jacobian determinant unit there, so
    # well-formed families never trip SingularJacobian
    t = PointTransformation(sp, P, {T: n.jt + p * n.jx, X: n.jx + p * n.jt})
    out = prolong_transformation(t, 1)
    assert out.derivative_maps
    ident = {T: Expr.zero() + n.jt}
    with pytest.raises(ValueError):
        PointTransformation(sp, P, {T: n.jt + 1})  # not identity at 0


def test_first_order_consistency_projective():
    t = prolong_transformation(projective(), 2)
    pf = prolong(dilatation_generator(), 2)
    coords = [c for c in sp.coordinates(2) if c not in sp.independents]
    checks = first_order_consistency(t, pf, list(sp.independents) + coords)
    assert all(ok for _, ok in checks)


def test_vanishes_to_second_order():
    e = p ** 2 * n.jx / (1 - p * n.jt)
    assert vanishes_to_second_order(e, P)
    assert not vanishes_to_second_order(p * n.jx, P)
    assert not vanishes_to_second_order(n.jx / (p + p ** 2), P)


C = symbol("c", Kind.PARAMETER)
S = symbol("s", Kind.PARAMETER)


def rotation():
    c, s = as_expr(C), as_expr(S)
    return PointTransformation(sp, P, {
        X: c * n.jx - s * n.jy,
        Y: s * n.jx + c * n.jy,
    }, name="rotation", trig=(C, S))


def test_rotation_identity_at_c1_s0():
    rotation()  # identity validation happens in the constructor


def test_rotation_pullback_invariance_with_circle_reduction():
    t = prolong_transformation(rotation(), 1)
    r2 = n.jx ** 2 + n.jy ** 2
    ok, residual = verify_transform_identity(t, r2, r2)
    assert ok, residual
    grad2 = n.ju_jx ** 2 + n.ju_jy ** 2
    ok, residual = verify_transform_identity(t, grad2, grad2)
    assert ok, residual


def test_rotation_infinitesimal():
    g = infinitesimal(rotation())
    assert g.coeffs[X] == n.jy
    assert g.coeffs[Y] == -n.jx


def test_reduce_circle_basic():
    c, s = as_expr(C), as_expr(S)
    e = s ** 2 + c ** 2 - 1
    assert is_zero(reduce_circle(e, C, S))
    e2 = s ** 3 - s * (1 - c ** 2)
    assert is_zero(reduce_circle(e2, C, S))


def test_transport_scaling():
    dst = JetSpace(["jt", "jX2", "jY2"], ["jU2"], 1)
    Xn, Yn = dst.independents[1], dst.independents[2]
    Un = dst.dependents[0]
    # old coords in terms of new: x = 2 X, y = 2 Y, u = 3 U
    fwd = {X: 2 * as_expr(Xn), Y: 2 * as_expr(Yn), U: 3 * as_expr(Un)}
    inv = {Xn: as_expr(X) / 2, Yn: as_expr(Y) / 2, Un: as_expr(U) / 3}
    f = VectorField(sp, {X: n.jy, U: as_expr(U)}, name="f")
    g = transport(f, dst, fwd, inv)
    m = dst.ns()
    assert g.coeffs[Xn] == m.jY2  # (1/2) * (2 Y)
    assert g.coeffs[Un] == m.jU2
