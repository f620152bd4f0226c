import math

import numpy as np
import pytest

from lieosc.integrability import _diagonal_reduction, quartic_transform
from lieosc.sl2 import GroupElement
from lieosc.system import (
    PhaseState, Trajectory, caldirola_kanai, constant_curve, from_frequency, integrate_trajectory,
)
from lieosc.transform import (
    TransformCurve, compose_action, gauge_transform_coeffs, integrate_connecting,
    riccati_rhs_matrix, solve_connecting_curve, transform_trajectory,
)

from conftest import random_curve, random_transform


def system_matrix_array(b, t):
    b0, b1, b2 = b(t)
    return np.array([[b1 / 2, b0], [-b2, -b1 / 2]])


def test_identity_gauge():
    b = caldirola_kanai(1.0, 0.5, 2.0)
    g = gauge_transform_coeffs(b, TransformCurve.identity())
    t = np.linspace(0, 3, 7)
    assert np.allclose(g(t), b(t), rtol=1e-15, atol=0)


@pytest.mark.parametrize("m0,mu,w", [(1.0, 0.5, 2.0), (2.0, 3.0, 1.0), (0.5, -0.2, 1.3)])
def test_ck_reduces_to_constant(m0, mu, w):
    b = caldirola_kanai(m0, mu, w)
    # diagonal reduction with c0 = c2 = 1
    g = gauge_transform_coeffs(b, _diagonal_reduction(b, 1.0, 1.0))
    t = np.linspace(0, 5, 11)
    assert np.allclose(g(t), np.tile([w, mu, w], (t.size, 1)), rtol=1e-12, atol=1e-12)


def test_quartic_transform_action():
    u0, u1, w = 1.0, 0.5, 2.0
    b = from_frequency(lambda t: (u1 * np.asarray(t) + u0) ** -4.0, omega=w)
    g = gauge_transform_coeffs(b, quartic_transform(u0, u1))
    t = np.linspace(0, 10, 21)
    V = u1 * t + u0
    assert np.allclose(g(t), np.column_stack([V ** -2, 0 * t, w * w / V ** 2]), rtol=1e-12, atol=1e-14)


def test_gauge_matches_matrix_form(rng):
    # M' = A M A^{-1} + A' A^{-1}
    for _ in range(10):
        b, a = random_curve(rng), random_transform(rng)
        g = gauge_transform_coeffs(b, a)
        for t in rng.uniform(0, 10, 5):
            A, dA = a(t), a.derivative(t)
            Ainv = np.linalg.inv(A)
            ref = A @ system_matrix_array(b, t) @ Ainv + dA @ Ainv
            assert np.allclose(system_matrix_array(g, t), ref, atol=1e-12)


def test_gauge_rejects_non_unimodular():
    g = gauge_transform_coeffs(constant_curve(1, 0, 1), TransformCurve.constant(np.diag([2.0, 1.0])))
    with pytest.raises(ValueError, match="unimodular"):
        g(0.0)


def test_transform_trajectory_examples():
    traj = Trajectory(np.array([0.0, 1.0]), np.array([[1.0, 4.0], [2.0, 3.0]]))
    assert np.array_equal(transform_trajectory(TransformCurve.identity(), traj).states, traj.states)
    out = transform_trajectory(TransformCurve.constant(np.diag([2.0, 0.5])), traj)
    assert np.array_equal(out.states[0], [2.0, 2.0])


def test_gauge_covariance(rng):
    t = np.linspace(0, 5, 51)
    for _ in range(5):
        b, a = random_curve(rng), random_transform(rng)
        xi0 = PhaseState(*rng.uniform(-1, 1, 2))
        moved = transform_trajectory(a, integrate_trajectory(b, t, xi0, 1e-11, 1e-13))
        direct = integrate_trajectory(gauge_transform_coeffs(b, a), t, moved.state(0), 1e-11, 1e-13)
        assert np.max(np.abs(moved.states - direct.states)) < 1e-6


def test_composition_law(rng):
    for _ in range(10):
        b, a1, a2 = random_curve(rng), random_transform(rng), random_transform(rng)
        two_step = gauge_transform_coeffs(gauge_transform_coeffs(b, a1), a2)
        one_step = gauge_transform_coeffs(b, compose_action(a2, a1))
        t = rng.uniform(0, 10, 7)
        assert np.max(np.abs(two_step(t) - one_step(t))) < 1e-8


def test_compose_identity_and_inverse(rng):
    a = random_transform(rng)
    c = compose_action(TransformCurve.identity(), a)
    inv = compose_action(a, a.inverse())
    for t in (0.0, 1.3, 7.2):
        assert np.array_equal(c(t), a(t)) and np.array_equal(c.derivative(t), a.derivative(t))
        assert np.allclose(inv(t), np.eye(2), atol=1e-10)
        assert np.allclose(inv.derivative(t), 0.0, atol=1e-10)


def test_riccati_matrix_examples(rng):
    z = constant_curve(0, 0, 0)
    assert np.array_equal(riccati_rhs_matrix(z, z, 0.0), np.zeros((4, 4)))
    u = constant_curve(1, 0, 1)
    assert np.array_equal(riccati_rhs_matrix(u, u, 0.0),
                          [[0, 1, 1, 0], [-1, 0, 0, 1], [-1, 0, 0, 1], [0, -1, -1, 0]])
    for _ in range(20):
        b, bp = random_curve(rng), random_curve(rng)
        assert abs(np.trace(riccati_rhs_matrix(b, bp, rng.uniform(0, 10)))) < 1e-15


def test_riccati_matrix_is_the_connecting_equation(rng):
    b, bp = random_curve(rng), random_curve(rng)
    A = rng.normal(size=(2, 2))
    t = 1.7
    ref = system_matrix_array(bp, t) @ A - A @ system_matrix_array(b, t)
    assert np.allclose(riccati_rhs_matrix(b, bp, t) @ A.ravel(), ref.ravel(), atol=1e-14)


def test_connecting_identity():
    b = caldirola_kanai(1.0, 0.5, 2.0)
    grid = np.linspace(0, 5, 11)
    a = solve_connecting_curve(b, b, GroupElement.identity(), grid)
    for t in (0.0, 2.5, 3.3, 5.0):
        assert np.allclose(a(t), np.eye(2), atol=1e-12)


def test_connecting_roundtrip(rng):
    grid = np.linspace(0, 5, 501)
    for _ in range(3):
        b, target = random_curve(rng), random_transform(rng)
        a0 = target(0.0)
        start = TransformCurve(lambda t: target(t) @ np.linalg.inv(a0),
                               lambda t: target.derivative(t) @ np.linalg.inv(a0))
        bp = gauge_transform_coeffs(b, start)
        got = solve_connecting_curve(b, bp, GroupElement.identity(), grid)
        for t in grid[::25]:
            assert np.max(np.abs(got(t) - start(t))) < 1e-6


def test_connecting_det_first_integral(rng):
    grid = np.linspace(0, 10, 101)
    for det0 in (1.0, 3.0, -0.5):
        b, bp = random_curve(rng), random_curve(rng)
        a0 = np.array([[det0, 0.4], [0.0, 1.0]])
        mats = integrate_connecting(b, bp, a0, grid)
        assert np.max(np.abs(np.linalg.det(mats) - det0)) < 1e-8


def test_connecting_rejects_non_unimodular_start():
    b = constant_curve(1, 0, 1)
    with pytest.raises(ValueError):
        solve_connecting_curve(b, b, GroupElement(2, 0, 0, 1), [0.0, 1.0])


def test_connecting_methods_agree(rng):
    grid = np.linspace(0, 10, 101)
    for _ in range(3):
        b, bp = random_curve(rng), random_curve(rng)
        a0 = rng.normal(size=(2, 2))
        g = integrate_connecting(b, bp, a0, grid)
        d = integrate_connecting(b, bp, a0, grid, method="direct")
        assert np.max(np.abs(g - d)) < 1e-8 * np.max(np.abs(g))
    with pytest.raises(ValueError):
        integrate_connecting(b, bp, a0, grid, method="magnus")
