import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qubitengine.errors import DomainError, FrameError, InvalidStateError
from qubitengine.su2 import (BlochState, FrameParams, binary_entropy, casimir_companion, coherence_measure,
                             density_matrix, divergence, energy_entropy, expectations_from_gibbs, f_of_r,
                             frame_rotate, gibbs_from_expectations, s_of_k, thermal_polarization,
                             thermal_state, vn_entropy)

finite = st.floats(-1.0, 1.0, allow_nan=False)
params = st.builds(FrameParams.polar, st.floats(0.1, 50.0), st.floats(-np.pi, np.pi), st.floats(-3.0, 3.0))


def ball_vector(x, y, z, r):
    v = np.array([x, y, z])
    n = np.linalg.norm(v)
    return np.zeros(3) if n < 1e-12 else v / n * r


@settings(max_examples=200, deadline=None)
@given(finite, finite, finite, st.floats(0.0, 0.5), params, st.sampled_from("svg"), st.sampled_from("svg"))
def test_frame_round_trip(x, y, z, r, p, a, b):
    s = BlochState(ball_vector(x, y, z, r), "s")
    there = frame_rotate(frame_rotate(s, a, p), b, p)
    back = frame_rotate(there, "s", p)
    assert np.allclose(back.components, s.components, atol=1e-12)
    assert there.polarization == pytest.approx(s.polarization, abs=1e-12)


def test_axis_aligned_frame():
    p = FrameParams(10.0)
    v = frame_rotate(BlochState([0.2, 0.0, -0.1], "s"), "v", p).components
    assert v[0] == pytest.approx(10 * -0.1)
    assert v[1] == pytest.approx(-10 * 0.2)


def test_chi_is_scaled_energy_at_mu_zero():
    p = FrameParams(10.0)
    th = thermal_state(10.0, 10.0)
    g = frame_rotate(th, "g", p).components
    assert g[0] == pytest.approx(np.sqrt(2) * th.components[0] / 10.0)
    assert g[0] == pytest.approx(-np.tanh(0.5) / np.sqrt(2), rel=1e-12)
    assert g[0] == pytest.approx(-0.32677, abs=1e-5)


def test_thermal_polarization_limits():
    assert float(thermal_polarization(10.0, np.inf)) == 0.0
    assert float(thermal_polarization(10.0, 1e-6)) == pytest.approx(-0.5)
    assert float(thermal_polarization(10.0, 10.0)) == pytest.approx(-0.231059, abs=1e-6)
    with pytest.raises(DomainError):
        thermal_polarization(-1.0, 1.0)


def test_thermal_matches_gibbs_matrix():
    rho = density_matrix(thermal_state(10.0, 10.0))
    w = np.linalg.eigvalsh(rho)
    assert w == pytest.approx(np.sort(np.exp([0.5, -0.5]) / (2 * np.cosh(0.5))), rel=1e-12)


def test_entropies():
    mixed = BlochState([0.0, 0.0, 0.0], "s")
    p = FrameParams(5.0)
    assert vn_entropy(mixed) == pytest.approx(np.log(2))
    assert divergence(mixed, p) == 0.0
    pure = BlochState([0.0, 0.0, -0.5], "s")
    assert vn_entropy(pure) == pytest.approx(0.0, abs=1e-12)
    assert energy_entropy(pure, p) == pytest.approx(0.0, abs=1e-12)
    th = thermal_state(10.0, 10.0)
    q = 0.5 - 0.231059
    h = -(q * np.log(q) + (1 - q) * np.log(1 - q))
    assert vn_entropy(th) == pytest.approx(h, rel=1e-5)
    w = np.linalg.eigvalsh(density_matrix(th))
    assert vn_entropy(th) == pytest.approx(-np.sum(w * np.log(w)), rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(finite, finite, finite, st.floats(0.0, 0.499), params)
def test_divergence_nonnegative(x, y, z, r, p):
    s = BlochState(ball_vector(x, y, z, r), "s")
    assert divergence(s, p) >= 0.0
    assert energy_entropy(s, p) >= vn_entropy(s) - 1e-12


def test_coherence_and_casimir():
    p = FrameParams(10.0)
    assert coherence_measure(BlochState([-2.0, 0.0, 0.0], "v", 10.0)) == 0.0
    assert coherence_measure(BlochState([0.0, 5.0, 0.0], "v", 10.0)) == pytest.approx(0.5)
    assert coherence_measure(BlochState([0.0, 1.0, 1.0], "v", 10.0)) == pytest.approx(0.1 * np.sqrt(2))
    assert casimir_companion(thermal_state(10.0, 10.0)) == pytest.approx(0.231059**2, rel=1e-5)
    assert casimir_companion(BlochState([0.0, 0.0, 0.0], "s"), p) == 0.0
    assert casimir_companion(thermal_state(10.0, 1e-3)) == pytest.approx(0.25)


def test_invalid_states():
    with pytest.raises(InvalidStateError):
        vn_entropy(BlochState([0.0, 0.0, 0.6], "s"))
    with pytest.raises(FrameError):
        BlochState([1.0, 0.0, 0.0], "v")
    with pytest.raises(FrameError):
        BlochState([0.0, 0.0, 0.0], "q")
    with pytest.raises(FrameError):
        frame_rotate(BlochState([0.0, 0.0, 0.1], "s"), "v", None)


def test_gibbs_round_trip():
    assert np.allclose(gibbs_from_expectations(0.0).vector, 0.0)
    gp = gibbs_from_expectations(-0.3)
    assert gp.beta == pytest.approx(float(s_of_k(0.3)) * -0.3)
    assert expectations_from_gibbs(gp)[0] == pytest.approx(-0.3, rel=1e-12)
    assert float(f_of_r(1e-9)) == pytest.approx(-0.5)
    assert gibbs_from_expectations(-1e-4).beta == pytest.approx(2e-4, rel=1e-6)
    with pytest.raises(InvalidStateError):
        s_of_k(1 / np.sqrt(2))


@settings(max_examples=100, deadline=None)
@given(finite, finite, finite, st.floats(0.0, 0.7))
def test_gibbs_round_trip_property(x, y, z, k):
    c = ball_vector(x, y, z, k)
    back = expectations_from_gibbs(gibbs_from_expectations(*c))
    assert np.allclose(back, c, atol=1e-10)


def test_binary_entropy_symmetric():
    x = np.linspace(-0.5, 0.5, 11)
    assert np.allclose(binary_entropy(x), binary_entropy(-x))
