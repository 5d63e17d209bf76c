import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from qubitengine.errors import DomainError, InvalidRegimeError, NoFiniteSolutionError
from qubitengine.protocols import const_mu_schedule, linear_ramp_schedule
from qubitengine.schedule import Schedule
from qubitengine.su2 import BlochState, thermal_state
from qubitengine.unitary import (const_mu_matrix, const_mu_propagator, evolve_static, evolve_unitary,
                                 feat_schedule, feat_times, friction_fraction, generator, ideal_unitary_work,
                                 k_constant_epsilon, mu_quantized, sta_duration, sudden_friction_ratio,
                                 sudden_propagator, sudden_work, tau_min_const_mu)


@settings(max_examples=50, deadline=None)
@given(st.floats(-3, 3), st.floats(0, 20))
def test_const_mu_matrix_matches_expm(mu, theta):
    assert np.allclose(const_mu_matrix(mu, theta), expm(generator(mu) * theta), atol=1e-12)


def test_const_mu_special_cases():
    assert np.allclose(const_mu_matrix(0.7, 0.0), np.eye(3))
    mu = 0.3
    k = np.sqrt(1 + mu**2)
    assert np.allclose(const_mu_matrix(mu, 2 * np.pi / k), np.eye(3), atol=1e-12)
    U = const_mu_matrix(1.0, np.pi / 2)
    x = np.array([0.3, -0.1, 0.2])
    assert np.linalg.norm(U @ x) == pytest.approx(np.linalg.norm(x))
    P = const_mu_propagator(1.0, np.pi / 2, 0.5)
    assert np.allclose(P.matrix, 0.5 * U)


def test_quantization_and_tau_min():
    assert mu_quantized(1, np.pi / 2) == pytest.approx(1 / np.sqrt(15))
    assert mu_quantized(1000, np.pi / 2) < 1e-3
    with pytest.raises((DomainError, NoFiniteSolutionError)):
        mu_quantized(1, 2 * np.pi)
    assert tau_min_const_mu(1.0, np.pi / 2) == pytest.approx(np.sqrt(15))
    assert tau_min_const_mu(1.0, 1e-3) == pytest.approx(2 * np.pi / 1e-3, rel=1e-6)


def test_k_constant_epsilon_small_eps():
    wi, wf, e = 8.0, 4.0, 1e-4
    Oi, Of = np.hypot(wi, e), np.hypot(wf, e)
    assert k_constant_epsilon(wi, wf, e) == pytest.approx((wi / Oi - wf / Of) / e, rel=1e-9)


def test_sudden_propagator():
    P = sudden_propagator(8.0, 6.0, 0.0)
    assert np.allclose(P.matrix, np.diag([0.75, 0.75, 0.75]))
    Pp = sudden_propagator(8.0, 6.0, 0.0, convention="reflection")
    assert Pp.matrix[1, 1] == pytest.approx(-0.75)
    v0 = thermal_state(8.0, 10.0).components
    for Phi in (0.3, 1.0, 2.5):
        v1 = sudden_propagator(8.0, 6.0, Phi).apply(v0)
        assert v1[0] - v0[0] == pytest.approx(sudden_work(v0[0], 8.0, 6.0, Phi))
        # state frozen: polarization unchanged
        assert np.linalg.norm(v1) / 6.0 == pytest.approx(np.linalg.norm(v0) / 8.0)
    Phis = np.linspace(0.01, 3.0, 50)
    assert np.all(sudden_friction_ratio(8.0, 6.0, Phis) >= 0)
    with pytest.raises(DomainError):
        sudden_propagator(8.0, 6.0, 0.1, convention="other")


def test_sudden_matches_fast_ramp():
    sch = const_mu_schedule(8.0, 6.0, 0.0, 0.7, 1e-4, dt=1e-6)
    tr = evolve_unitary(thermal_state(8.0, 10.0), sch)
    jump = sudden_propagator(8.0, 6.0, 0.7).apply(thermal_state(8.0, 10.0).components)
    assert np.allclose(tr.v[-1], jump, atol=2e-3)


def test_static_hamiltonian_precesses():
    sch = Schedule.constant(5.0, 2.0, 1e-3, phi=0.3, kind="unitary")
    v0 = BlochState([-1.0, 0.5, 0.2], "v", 5.0)
    tr = evolve_unitary(v0, sch)
    assert np.allclose(tr.energy, -1.0, atol=1e-12)
    ang = 5.0 * tr.t
    L = 0.5 * np.cos(ang) + 0.2 * np.sin(ang)
    assert np.allclose(tr.v[:, 1], L, atol=1e-9)


@pytest.mark.parametrize("l", [1, 2, 3])
def test_sta_loops_remove_coherence(l):
    tau = sta_duration(8.0, 6.0, np.pi / 2, l)
    sch = const_mu_schedule(8.0, 6.0, 0.0, np.pi / 2, tau)
    assert sch.mu[0] == pytest.approx(-mu_quantized(l, np.pi / 2))
    tr = evolve_unitary(thermal_state(8.0, 10.0), sch)
    assert tr.coherence[-1] < 1e-6
    assert tr.energy[-1] == pytest.approx(thermal_state(8.0, 10.0).components[0] * 6 / 8, rel=1e-9)


def test_const_mu_simulation_matches_closed_form():
    sch = const_mu_schedule(8.0, 6.0, 0.0, 1.2, 2.0)
    v0 = np.array([-2.0, 0.4, -0.3])
    tr = evolve_unitary(BlochState(v0, "v", 8.0), sch)
    mu = sch.mu[0]
    P = const_mu_propagator(mu, sch.theta[-1], 6.0 / 8.0)
    assert np.allclose(tr.v[-1], P.apply(v0), atol=1e-9)


def test_integrator_against_reference():
    t = np.linspace(0, 3, 301)
    sch = Schedule(t, 6 + np.sin(t), np.sin(2 * t), 2 * np.cos(2 * t))
    s0 = np.array([0.1, -0.2, 0.3])
    ref = solve_ivp(lambda tt, y: np.cross([(6 + np.sin(tt)) * np.sin(np.sin(2 * tt)), 0.0,
                                            (6 + np.sin(tt)) * np.cos(np.sin(2 * tt))], y),
                    (0, 3), s0, t_eval=t, rtol=1e-12, atol=1e-14, method="DOP853").y.T
    assert np.allclose(evolve_static(s0, sch), ref, atol=1e-8)


@pytest.mark.parametrize("mu", [0.01, 0.03, 0.1])
def test_slow_driving_mu_squared(mu):
    H0 = thermal_state(8.0, 10.0).components[0]
    fr = []
    thetas = np.linspace(10.0, 10.0 + 2 * np.pi / np.sqrt(1 + mu**2), 41)[:-1]
    for th in thetas[::8]:
        U = const_mu_propagator(mu, th, 0.75)
        E = U.apply([H0, 0, 0])[0]
        fr.append(abs(E - 0.75 * H0) / abs(0.75 * H0))
    assert np.allclose(fr, friction_fraction(mu, thetas[::8]), rtol=1e-9, atol=1e-15)
    avg = np.mean(friction_fraction(mu, thetas))
    assert abs(avg - mu**2) <= 2 * mu**4


def test_ideal_work():
    assert ideal_unitary_work(-2.0, 8.0, 6.0) == pytest.approx(0.5)


def test_feat_times_values():
    bb = feat_times(8.0, 4.0, 1.0)
    assert bb.zeta == pytest.approx(0.49818, abs=1e-5)
    assert bb.tau1 == pytest.approx(0.2545, abs=1e-4)
    assert bb.tau2 == pytest.approx(0.1301, abs=1e-4)
    assert feat_times(5.0, 5.0, 1.0).total == 0.0
    assert bb.total < tau_min_const_mu(1.0, np.arctan(1 / 4) - np.arctan(1 / 8))
    with pytest.raises(DomainError):
        feat_times(8.0, 4.0, 0.0)


def test_feat_reaches_target_direction():
    sch, bb = feat_schedule(8.0, 4.0, 1.0, dt=1e-4)
    s0 = -0.3 * np.array([1.0, 0.0, 8.0]) / np.hypot(8.0, 1.0)
    s = evolve_static(s0, sch)[-1]
    target = -0.3 * np.array([1.0, 0.0, 4.0]) / np.hypot(4.0, 1.0)
    assert np.allclose(s, target, atol=1e-9)


def test_feat_clamp(monkeypatch):
    import qubitengine.unitary as un
    from qubitengine.errors import ValidityWarning

    monkeypatch.setattr(un, "feat_zeta", lambda *a: 1.0 + 1e-13)
    with pytest.warns(ValidityWarning):
        assert un.feat_times(8.0, 4.0, 1.0).zeta == 1.0
    monkeypatch.setattr(un, "feat_zeta", lambda *a: 1.1)
    with pytest.raises(InvalidRegimeError):
        un.feat_times(8.0, 4.0, 1.0)


def test_piecewise_evolution_exact():
    t = np.array([0.0, 0.5, 1.0])
    sch = Schedule.from_controls(t, [3.0, 5.0, 5.0], 0.0, piecewise=True)
    s = evolve_static(np.array([0.2, 0.0, 0.0]), sch)
    ang = 3.0 * 0.5 + 5.0 * 0.5
    assert np.allclose(s[-1], [0.2 * np.cos(ang), 0.2 * np.sin(ang), 0.0])


def test_linear_ramp_commutes():
    sch = linear_ramp_schedule(8.0, 6.0, 0.3)
    tr = evolve_unitary(thermal_state(8.0, 10.0), sch)
    assert tr.coherence.max() < 1e-12
    assert tr.energy[-1] == pytest.approx(thermal_state(8.0, 10.0).components[0] * 0.75)
