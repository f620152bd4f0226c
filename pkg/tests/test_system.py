import math

import numpy as np
import pytest

from lieosc.closed_form import ReducedSystem, fundamental_matrix
from lieosc.sl2 import GroupElement, Traceless
from lieosc.system import (
    BlowUpError, DerivativeUnavailable, GroupPath, PhaseState, TdfhoSpec, caldirola_kanai,
    catalog_curve, coeffs_from_spec, constant_curve, flow_state, from_frequency, integrate_group,
    integrate_trajectory, powerlaw2, quartic, riccati_project, sampled_coefficients, system_matrix,
)

from conftest import random_curve

one = lambda t: np.ones_like(np.asarray(t, dtype=float))


def test_coeffs_unit_oscillator():
    b = coeffs_from_spec(TdfhoSpec(one, one, 1.0))
    assert np.array_equal(b(np.array([0.0, 2.0])), [[1, 0, 1], [1, 0, 1]])


def test_coeffs_free_particle():
    b = coeffs_from_spec(TdfhoSpec(one, lambda t: 0 * one(t), 3.0))
    assert np.array_equal(b(1.5), [1, 0, 0])


def test_coeffs_caldirola_kanai():
    m0, mu, w = 2.0, 0.4, 1.5
    b = caldirola_kanai(m0, mu, w)
    t = np.linspace(0, 3, 7)
    assert np.allclose(b(t), np.column_stack([np.exp(-mu * t) / m0, 0 * t, m0 * w * w * np.exp(mu * t)]),
                       rtol=1e-15)
    assert np.allclose(b.derivative(t)[:, 0], -mu * np.exp(-mu * t) / m0, rtol=1e-14)


def test_coeffs_reject_non_positive_mass():
    with pytest.raises(ValueError, match="mass"):
        coeffs_from_spec(TdfhoSpec(lambda t: 1.0 - np.asarray(t), one, 1.0), span=(0, 2))
    with pytest.raises(ValueError):
        TdfhoSpec(one, one, 0.0)


def test_system_matrix_examples():
    assert system_matrix(constant_curve(1, 0, 1), 0.0) == Traceless(0.0, 1.0, -1.0)
    assert np.array_equal(system_matrix(constant_curve(0, 0, 0), 0.0).to_array(), np.zeros((2, 2)))
    assert system_matrix(caldirola_kanai(1.0, 0.7, 1.0), 0.0) == Traceless(0.0, 1.0, -1.0)


def test_group_identity_for_zero_coefficients():
    path = integrate_group(constant_curve(0, 0, 0), np.linspace(0, 5, 11))
    assert np.all(path.matrices == np.eye(2))


def test_group_rotation():
    t = np.linspace(0, 10, 101)
    path = integrate_group(constant_curve(1, 0, 1), t)
    ref = np.stack([np.stack([np.cos(t), np.sin(t)], -1), np.stack([-np.sin(t), np.cos(t)], -1)], 1)
    assert np.max(np.abs(path.matrices - ref)) < 1e-8


def test_group_ck_matches_fundamental_matrix():
    m0, mu, w = 1.0, 0.5, 2.0
    t = np.linspace(0, 10, 51)
    path = integrate_group(caldirola_kanai(m0, mu, w), t)
    red = ReducedSystem(1.0, mu / w, 1.0, lambda s: w, tau=lambda s: w * s)
    for i, s in enumerate(t):
        # A(t) = Abar0(t)^{-1} exp(w t C) Abar0(0), Abar0 = diag(a, 1/a)
        a, a0 = math.sqrt(m0 * w) * math.exp(mu * s / 2), math.sqrt(m0 * w)
        ref = np.diag([1 / a, a]) @ fundamental_matrix(red, s).to_array() @ np.diag([a0, 1 / a0])
        assert np.allclose(path.matrices[i], ref, rtol=0, atol=1e-6 * max(1, np.abs(ref).max()))


def test_group_determinant_random(rng):
    t = np.linspace(0, 10, 201)
    for _ in range(5):
        path = integrate_group(random_curve(rng), t)
        assert np.max(np.abs(path.det() - 1)) < 1e-9


def test_group_composition(rng):
    # A(t; t0 = 0) = A(t; t0 = s) A(s; t0 = 0)
    b = random_curve(rng)
    first = integrate_group(b, np.linspace(0, 3, 31))
    second = integrate_group(b, np.linspace(3, 6, 31), a0=first.element(-1))
    full = integrate_group(b, np.linspace(0, 6, 61))
    assert np.allclose(second.matrices[-1], full.matrices[-1], atol=1e-7)


def test_group_rejects_non_unimodular_start():
    with pytest.raises(ValueError):
        integrate_group(constant_curve(1, 0, 1), [0.0, 1.0], a0=GroupElement(2, 0, 0, 1))


def test_flow_examples():
    ident = GroupPath(np.array([0.0, 1.0]), np.stack([np.eye(2)] * 2))
    assert np.array_equal(flow_state(ident, PhaseState(1.0, 2.0)).states, [[1, 2], [1, 2]])
    rot = integrate_group(constant_curve(1, 0, 1), [0.0, math.pi / 2])
    assert np.allclose(flow_state(rot, PhaseState(1.0, 0.0)).states[-1], [0.0, -1.0], atol=1e-9)


def test_flow_ck_matches_direct_integration():
    b = caldirola_kanai(1.0, 0.5, 2.0)
    t = np.linspace(0, 10, 201)
    xi0 = PhaseState(1.0, 0.0)
    a = flow_state(integrate_group(b, t), xi0)
    d = integrate_trajectory(b, t, xi0)
    assert np.max(np.abs(a.x - d.x)) / np.max(np.abs(d.x)) < 1e-6


def test_riccati_examples():
    ident = GroupPath(np.array([0.0, 1.0]), np.stack([np.eye(2)] * 2))
    assert np.array_equal(riccati_project(ident, 0.3), [0.3, 0.3])
    rot = GroupPath(np.array([math.pi / 2]), np.array([[[0.0, 1.0], [-1.0, 0.0]]]))
    assert riccati_project(rot, 1.0)[0] == -1.0
    assert riccati_project(rot, math.inf)[0] == 0.0
    assert riccati_project(rot, 0.0)[0] == math.inf


def test_riccati_residual_constant(rng):
    t = np.linspace(0, 1.0, 2001)
    h = t[1] - t[0]
    for _ in range(5):
        b0, b1, b2 = rng.uniform(-1, 1, 3)
        path = integrate_group(constant_curve(b0, b1, b2), t, rel_tol=1e-12, abs_tol=1e-14)
        w = riccati_project(path, rng.uniform(-1, 1))
        dw = (w[2:] - w[:-2]) / (2 * h)
        rhs = b0 + b1 * w[1:-1] + b2 * w[1:-1] ** 2
        # stay away from poles of the Moebius image
        far = (np.abs(w[:-2]) < 10) & (np.abs(w[1:-1]) < 10) & (np.abs(w[2:]) < 10)
        assert far.sum() > 1000
        assert np.max(np.abs(dw - rhs)[far]) < 1e-6


def test_catalog_and_blowup():
    assert catalog_curve("constant", omega=2.0)(0.0)[2] == 4.0
    with pytest.raises(ValueError):
        catalog_curve("nope")
    b = powerlaw2(2.0, 0.3, 1.0)
    assert b.blowup_time == pytest.approx(2 / 0.3)
    with pytest.raises(BlowUpError) as info:
        integrate_group(b, np.linspace(0, 8, 5))
    assert info.value.blowup_time == pytest.approx(6.666666666666667)
    assert quartic(1.0, -0.5, 1.0).blowup_time == 2.0


def test_sampled_coefficients():
    t = np.linspace(0, 2, 401)
    values = np.column_stack([np.ones_like(t), 0 * t, 1 + t ** 2])
    b = sampled_coefficients(t, values)
    assert abs(b(0.75)[2] - (1 + 0.75 ** 2)) < 1e-12
    assert abs(b.derivative(1.0)[2] - 2.0) < 1e-4
    with pytest.raises(ValueError):
        integrate_group(b, np.linspace(0, 3, 4))
    with pytest.raises(ValueError):
        sampled_coefficients(t, values[:, :2])


def test_from_frequency_derivatives():
    b = from_frequency(lambda t: 1 + 0.5 * np.sin(t), omega=2.0)
    assert np.allclose(b(0.3), [1, 0, 4 * (1 + 0.5 * math.sin(0.3))])
    with pytest.raises(DerivativeUnavailable):
        b.derivative(0.3)
