import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from hkhitchin import hk
from hkhitchin.lattice import (Configuration, Grid, MatrixField, TangentVector, constant_unitary,
                               gauge_act, gauge_act_tangent, random_configuration, random_gauge,
                               random_tangent)

FORMS = (hk.metric_g, hk.omega, hk.q1, hk.q2)


def as_pair(X):
    return (X.alpha_zbar.data, X.gamma_z.data)


def rel(a, b, scale):
    return abs(a - b) / scale


def scale_of(X, Y):
    return math.sqrt(hk.metric_g(X, X) * hk.metric_g(Y, Y))


def constant_vector(g, a, c):
    return TangentVector(MatrixField.constant(g, a), MatrixField.constant(g, c))


def test_closed_forms_on_constant_vectors():
    rng = np.random.default_rng(1)
    g = Grid(4, 1.5, 2.0)
    for _ in range(10):
        a, c, b, dd = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)) for _ in range(4))
        X, Y = constant_vector(g, a, c), constant_vector(g, b, dd)
        expected = oracles.constant_forms(a, c, b, dd, g.area)
        got = [f(X, Y) for f in FORMS]
        assert np.allclose(got, expected, rtol=1e-12, atol=1e-12)


def test_forms_match_real_component_oracle():
    g = Grid(16, 1.0, 1.3)
    for s in range(5):
        X, Y = random_tangent(s, g), random_tangent(s + 50, g)
        ox, oy = as_pair(X), as_pair(Y)
        s_ = scale_of(X, Y)
        assert rel(hk.metric_g(X, Y), oracles.metric(ox, oy, g).real, s_) < 1e-12
        assert rel(hk.omega(X, Y), oracles.omega(ox, oy, g).real, s_) < 1e-12
        assert rel(hk.q1(X, Y), oracles.q1(ox, oy, g).real, s_) < 1e-12
        assert rel(hk.q2(X, Y), oracles.q2(ox, oy, g).real, s_) < 1e-12
        # the underlying integrals are real
        for v in (oracles.metric(ox, oy, g), oracles.omega(ox, oy, g), oracles.q1(ox, oy, g),
                  oracles.q2(ox, oy, g)):
            assert abs(v.imag) < 1e-12 * s_


def test_complex_structures_match_form_action():
    g = Grid(8)
    X = random_tangent(3, g)
    I, J = oracles.apply_I(as_pair(X)), oracles.apply_J(as_pair(X))
    assert np.allclose(hk.apply_I(X).alpha_zbar.data, I[0]) and np.allclose(hk.apply_I(X).gamma_z.data, I[1])
    assert np.allclose(hk.apply_J(X).alpha_zbar.data, J[0]) and np.allclose(hk.apply_J(X).gamma_z.data, J[1])
    IJ = oracles.apply_I(J)
    assert np.allclose(hk.apply_K(X).alpha_zbar.data, IJ[0])
    assert np.allclose(hk.apply_K(X).gamma_z.data, IJ[1])


def test_complex_structures_are_real_linear():
    g = Grid(8)
    X, Y = random_tangent(1, g), random_tangent(2, g)
    for op in (hk.apply_I, hk.apply_J, hk.apply_K):
        assert op(2.5 * X - Y).max_diff(2.5 * op(X) - op(Y)) < 1e-14


def test_J_is_antilinear_in_stored_components():
    g = Grid(8)
    X = random_tangent(1, g)
    assert hk.apply_J(1j * X).max_diff(-1j * hk.apply_J(X)) < 1e-14


def test_isometries():
    g = Grid(16)
    for s in range(10):
        X, Y = random_tangent(s, g), random_tangent(s + 100, g)
        for op in (hk.apply_I, hk.apply_J, hk.apply_K):
            assert rel(hk.metric_g(op(X), op(Y)), hk.metric_g(X, Y), scale_of(X, Y)) < 1e-10


def test_antisymmetry_and_bilinearity():
    g = Grid(8)
    X, Y, Z = (random_tangent(s, g) for s in (1, 2, 3))
    for f in (hk.omega, hk.q1, hk.q2):
        assert abs(f(X, Y) + f(Y, X)) < 1e-12
        assert abs(f(2 * X - Z, Y) - (2 * f(X, Y) - f(Z, Y))) < 1e-12
    assert abs(hk.metric_g(X, Y) - hk.metric_g(Y, X)) < 1e-12


def test_metric_is_positive_definite():
    g = Grid(8)
    for s in range(200):
        X = random_tangent(s, g, scale=10.0 ** (s % 5 - 2))
        assert hk.metric_g(X, X) > 0
    zero = TangentVector.zero(g)
    assert hk.metric_g(zero, zero) == 0
    tiny = random_tangent(0, g, scale=1e-16)
    assert hk.metric_g(tiny, tiny) < 1e-20 and tiny.max_norm() < 1e-14


def test_metric_chain():
    g = Grid(16)
    for s in range(10):
        X, Y = random_tangent(s, g), random_tangent(s + 7, g)
        gxx = hk.metric_g(X, X)
        assert rel(hk.hitchin_g1(X).real, gxx, gxx) < 1e-10
        assert abs(hk.hitchin_g1(X).imag) < 1e-12 * gxx
        assert rel(hk.metric_hodge(X, Y), hk.metric_g(X, Y), scale_of(X, Y)) < 1e-10
        a = hk.metric_alpha_hodge(X, Y)
        assert rel(a.real, hk.metric_alpha_im(X, Y), scale_of(X, Y)) < 1e-10
        assert abs(a.imag) < 1e-12 * scale_of(X, Y)


def test_q_complex_is_q1_plus_i_q2():
    g = Grid(16)
    for s in range(20):
        X, Y = random_tangent(s, g), random_tangent(s + 9, g)
        q = hk.q_complex(X, Y)
        assert abs(q - (hk.q1(X, Y) + 1j * hk.q2(X, Y))) < 1e-10 * scale_of(X, Y)


def test_theta_potentials_closed_form():
    g = Grid(4, 2.0, 1.0)
    rng = np.random.default_rng(4)
    phi, a = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)) for _ in range(2))
    c = Configuration.from_fields(MatrixField.zeros(g), MatrixField.constant(g, phi))
    X = constant_vector(g, a, np.zeros((2, 2)))
    assert np.isclose(hk.theta1(c, X), -4 * g.area * np.trace(phi @ a).imag)
    assert np.isclose(hk.theta2(c, X), 4 * g.area * np.trace(phi @ a).real)
    assert abs(hk.theta1_complex(c, X).imag) < 1e-12
    assert abs(hk.theta2_complex(c, X).imag) < 1e-12


def test_dtheta_equals_q():
    g = Grid(16)
    c = random_configuration(2, g, 2)
    for s in range(5):
        X, Y = random_tangent(s, g), random_tangent(s + 30, g)
        sc = scale_of(X, Y)
        for which, f in (("theta1", hk.q1), ("theta2", hk.q2)):
            dt = hk.dtheta(which, c, X, Y)
            assert abs(dt.analytic - f(X, Y)) <= 1e-10 * sc
            assert abs(dt.finite_difference - f(X, Y)) <= 1e-6 * sc
            assert dt.discrepancy <= 1e-6 * sc
    dt = hk.dtheta(1, c, X, Y)
    assert np.isclose(dt.eps, 1e-4 * (1 + max(c.a_zbar.max_norm(), c.phi_z.max_norm())))


def test_identity4():
    g = Grid(16)
    for s in range(10):
        X, Y = random_tangent(s, g), random_tangent(s + 3, g)
        lhs, rhs = hk.identity4_sides(X, Y)
        assert abs(lhs - rhs) <= 1e-10 * scale_of(X, Y)


def test_kw_and_prequantum():
    g = Grid(8)
    X, Y = random_tangent(1, g), random_tangent(2, g)
    wI, wJ, wK = hk.kw_forms(X, Y)
    assert np.isclose(wI, -hk.omega(X, Y) / (2 * np.pi))
    assert np.isclose(wJ, hk.q2(X, Y) / (2 * np.pi))
    assert np.isclose(wK, -hk.q1(X, Y) / (2 * np.pi))
    curv = hk.prequantum_curvatures(X, Y)
    assert curv == (1j / np.pi * hk.omega(X, Y), 1j / np.pi * hk.q1(X, Y), 1j / np.pi * hk.q2(X, Y))
    assert max(abs(z.real) for z in curv) <= 1e-12
    assert np.allclose(hk.prequantum_curvatures(X, X), 0, atol=1e-13)


@pytest.mark.parametrize("N, gauge, tol", [(16, "constant", 1e-12), (32, "band", 1e-6)])
def test_gauge_invariance(N, gauge, tol):
    g = Grid(N)
    c = random_configuration(5, g, N // 8)
    G = constant_unitary(6, g) if gauge == "constant" else random_gauge(6, g)
    gc = gauge_act(G, c)
    for s in range(5):
        X, Y = random_tangent(s, g), random_tangent(s + 40, g)
        gX, gY = gauge_act_tangent(G, X), gauge_act_tangent(G, Y)
        for f in FORMS:
            assert abs(f(gX, gY) - f(X, Y)) <= tol * scale_of(X, Y)
        for th in (hk.theta1, hk.theta2):
            ref = abs(th(c, X)) + c.phi_z.l2_norm() * X.alpha_zbar.l2_norm()
            assert abs(th(gc, gX) - th(c, X)) <= tol * ref


def test_bilinear_report_serialization():
    g = Grid(8)
    X, Y = random_tangent(1, g), random_tangent(2, g)
    rep = hk.bilinear_report(X, Y)
    d = rep.to_dict()
    assert set(d) == {"g", "omega", "q1", "q2", "q_complex", "omega123", "identity_residuals"}
    assert len(d["omega123"]) == 3 and len(d["q_complex"]) == 2
    assert max(d["identity_residuals"].values()) < 1e-12


def test_mismatched_grids_rejected():
    X, Y = random_tangent(1, Grid(8)), random_tangent(2, Grid(16))
    with pytest.raises(ValueError):
        hk.omega(X, Y)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 31), st.integers(1, 3))
def test_compatibility_property(seed, n):
    g = Grid(8, n=n)
    X, Y = random_tangent(seed, g), random_tangent(seed + 1, g)
    sc = scale_of(X, Y)
    assert abs(hk.omega(X, Y) - hk.metric_g(X, hk.apply_I(Y))) <= 1e-10 * sc
    assert abs(hk.q1(X, Y) - hk.metric_g(X, hk.apply_J(Y))) <= 1e-10 * sc
    assert abs(hk.q2(X, Y) - hk.metric_g(X, hk.apply_K(Y))) <= 1e-10 * sc
