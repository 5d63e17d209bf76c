"""Closed-system propagators for the unitary strokes."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.spatial.transform import Rotation

from .errors import DomainError, InvalidRegimeError, NoFiniteSolutionError, ValidityWarning
from .magnus import magnus_path, skew_exp
from .propagator import StrokePropagator
from .schedule import Schedule, time_grid
from .su2 import frame_rotate, FrameParams, rot_y
from .trajectory import Trajectory



def generator(mu):
    """M(mu) with d(v/Omega)/dt = Omega M(mu) (v/Omega) on a unitary stroke."""
    return np.array([[0.0, mu, 0.0], [-mu, 0.0, 1.0], [0.0, -1.0, 0.0]])


def const_mu_matrix(mu, theta):
    """U2(mu, theta) = expm(M(mu) theta); broadcasts over ``theta``."""
    theta = np.asarray(theta, dtype=float)
    k = np.sqrt(1.0 + mu * mu)
    c = np.cos(k * theta)
    s = np.sin(k * theta)
    out = np.empty(theta.shape + (3, 3))
    out[..., 0, 0] = 1.0 + mu * mu * c
    out[..., 0, 1] = k * mu * s
    out[..., 0, 2] = mu * (1.0 - c)
    out[..., 1, 0] = -k * mu * s
    out[..., 1, 1] = k * k * c
    out[..., 1, 2] = k * s
    out[..., 2, 0] = mu * (1.0 - c)
    out[..., 2, 1] = -k * s
    out[..., 2, 2] = mu * mu + c
    return out / (k * k)


def const_mu_propagator(mu, theta, compression=1.0):
    """Constant-mu unitary stroke: compression * U2(mu, theta)."""
    return StrokePropagator(compression * const_mu_matrix(mu, theta))


def mu_quantized(l, Phi):
    """Adiabatic parameter for which a rotation by Phi closes after l loops."""
    if l < 1 or int(l) != l:
        raise DomainError("l must be a positive integer")
    if Phi == 0:
        return 0.0
    q = (2.0 * np.pi * l / Phi) ** 2 - 1.0
    if q <= 0:
        raise NoFiniteSolutionError(f"no finite mu for l={l}, Phi={Phi}")
    return 1.0 / np.sqrt(q)


def tau_min_const_mu(K, Phi):
    """Shortest frictionless constant-mu duration, K sqrt((2 pi/Phi)^2 - 1)."""
    if Phi == 0:
        return np.inf
    q = (2.0 * np.pi / Phi) ** 2 - 1.0
    if q <= 0:
        raise NoFiniteSolutionError(f"no finite duration for Phi={Phi}")
    return abs(K) * np.sqrt(q)


def k_constant_epsilon(omega_i, omega_f, epsilon):
    """Protocol constant K for a constant-epsilon ramp."""
    Oi, Of = np.hypot(omega_i, epsilon), np.hypot(omega_f, epsilon)
    return (omega_i / Oi - omega_f / Of) / epsilon


def k_linear_ramp(Omega_i, Omega_f, Phi):
    """K for the linear-Omega constant-mu schedule (mu = K / tau)."""
    return 2.0 * abs(Phi) / (Omega_i + Omega_f)


def sta_duration(Omega_i, Omega_f, Phi, l=1):
    """Duration of the l-th frictionless linear-ramp constant-mu stroke."""
    mu = mu_quantized(l, abs(Phi))
    return 2.0 * abs(Phi) / (mu * (Omega_i + Omega_f))


# sudden limit -----------------------------------------------------------


def sudden_propagator(Omega_i, Omega_f, Phi, convention="rotation"):
    """Instantaneous jump of the Hamiltonian by Omega_i -> Omega_f, phi -> phi + Phi.

    The spin state is frozen during the jump, so the v components rotate
    by Phi about C and rescale by Omega_f / Omega_i. ``convention="reflection"``
    returns the reflection-form matrix that differs in the L row and column.
    """
    if Omega_i <= 0 or Omega_f <= 0:
        raise DomainError("frequencies must be positive")
    c, s = np.cos(Phi), np.sin(Phi)
    if convention == "rotation":
        m = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    elif convention == "reflection":
        m = np.array([[c, s, 0.0], [s, -c, 0.0], [0.0, 0.0, 1.0]])
    else:
        raise DomainError(f"unknown convention {convention!r}")
    return StrokePropagator(Omega_f / Omega_i * m)


def sudden_work(H0, Omega_i, Omega_f, Phi):
    """Work of a sudden jump from a coherence-free state with energy H0."""
    return H0 * (Omega_f / Omega_i * np.cos(Phi) - 1.0)


def sudden_friction_ratio(Omega_i, Omega_f, Phi):
    """|W_fric / W| for a sudden jump from a coherence-free state."""
    return (1.0 - np.cos(Phi)) / abs(np.cos(Phi) - Omega_i / Omega_f)


def friction_fraction(mu, theta):
    """|W_fric / W_ad| of a constant-mu stroke from a coherence-free state.

    W_ad is the adiabatic change of energy; the exact value
    mu^2 (1 - cos(kappa theta)) / kappa^2 averages to mu^2 + O(mu^4) over
    the final phase.
    """
    k2 = 1.0 + np.asarray(mu, dtype=float) ** 2
    return (k2 - 1.0) * (1.0 - np.cos(np.sqrt(k2) * np.asarray(theta, dtype=float))) / k2


def ideal_unitary_work(H_i, Omega_i, Omega_f):
    """Quantum-adiabatic work (Omega_f/Omega_i - 1) <H_i>."""
    return (Omega_f / Omega_i - 1.0) * H_i


# bang-bang -------------------------------------------------------------


@dataclass(frozen=True)
class BangBangStroke:
    """Two-segment FEAT protocol: omega_f for tau1, then omega_i for tau2."""

    omega_i: float
    omega_f: float
    epsilon: float
    tau1: float
    tau2: float
    zeta: float

    @property
    def total(self):
        return self.tau1 + self.tau2


def feat_zeta(omega_i, omega_f, epsilon):
    p = epsilon**2 + omega_i * omega_f
    Oi, Of = np.hypot(omega_i, epsilon), np.hypot(omega_f, epsilon)
    return (Oi * Of * p - p * p) / (epsilon**2 * (omega_i - omega_f) ** 2)


def feat_times(omega_i, omega_f, epsilon, clamp_tol=1e-12):
    """Switching times of the fastest bang-bang transition.

    Each segment precesses by arccos(zeta) about its own field, giving
    tau1 = arccos(zeta)/Omega_f and tau2 = arccos(zeta)/Omega_i.
    """
    if epsilon <= 0:
        raise DomainError("epsilon must be positive")
    if omega_i == omega_f:
        return BangBangStroke(omega_i, omega_f, epsilon, 0.0, 0.0, 1.0)
    zeta = feat_zeta(omega_i, omega_f, epsilon)
    if abs(zeta) > 1.0:
        if abs(zeta) - 1.0 > clamp_tol:
            raise InvalidRegimeError(f"|zeta| = {abs(zeta):.6g} > 1")
        warnings.warn("zeta clamped to [-1, 1]", ValidityWarning, stacklevel=2)
        zeta = float(np.clip(zeta, -1.0, 1.0))
    psi = np.arccos(zeta)
    Oi, Of = np.hypot(omega_i, epsilon), np.hypot(omega_f, epsilon)
    return BangBangStroke(omega_i, omega_f, epsilon, psi / Of, psi / Oi, float(zeta))


def feat_schedule(omega_i, omega_f, epsilon, dt=1e-3):
    """Piecewise-constant schedule realizing :func:`feat_times`."""
    bb = feat_times(omega_i, omega_f, epsilon)
    t1 = time_grid(bb.tau1, dt, min_points=2)
    t2 = bb.tau1 + time_grid(bb.tau2, dt, min_points=2)
    t = np.concatenate([t1, t2[1:]])
    omega = np.where(t < bb.tau1, omega_f, omega_i)
    omega[-1] = omega_f
    return Schedule.from_controls(t, omega, epsilon, kind="unitary", piecewise=True), bb


# generic ODE propagation -------------------------------------------------


def _field(schedule, t):
    Om = schedule.at("Omega", t)
    ph = schedule.at("phi", t)
    return np.array([Om * np.sin(ph), schedule.at("upsilon", t), Om * np.cos(ph)])


def _static_to_traj(schedule, s, label=""):
    Om, ph = schedule.Omega, schedule.phi
    R = np.stack([rot_y(p) for p in ph])
    v = Om[:, None] * np.einsum("nij,nj->ni", R, s)
    return Trajectory(schedule.t, v, Om, ph, schedule.mu, schedule.Omegadot, "unitary", label=label)


MAX_STEP_PHASE = 0.01


def _field_skew(schedule):
    def gen(t):
        b = _field(schedule, t).T
        out = np.zeros((b.shape[0], 3, 3))
        out[:, 0, 1], out[:, 1, 0] = -b[:, 2], b[:, 2]
        out[:, 0, 2], out[:, 2, 0] = b[:, 1], -b[:, 1]
        out[:, 1, 2], out[:, 2, 1] = -b[:, 0], b[:, 0]
        return out
    return gen


def evolve_static(s0, schedule, max_phase=MAX_STEP_PHASE):
    """Integrate dS/dt = b x S with b = (epsilon, upsilon, omega); static frame.

    Smooth schedules use fourth-order Magnus rotations on a refined grid whose
    steps turn the spin by at most ``max_phase`` radians; every step is an
    exact rotation, so |S| is preserved to rounding.
    """
    s0 = np.asarray(s0, dtype=float)
    t = schedule.t
    if schedule.piecewise:
        out = [s0]
        s = s0
        for k in range(t.size - 1):
            b = _field(schedule, t[k])
            s = Rotation.from_rotvec(b * (t[k + 1] - t[k])).apply(s)
            out.append(s)
        return np.array(out)
    bmax = np.sqrt(schedule.Omega**2 + (0.0 if schedule.upsilon is None else schedule.upsilon**2))
    sub = np.maximum(1, np.ceil(np.diff(t) * 1.5 * np.maximum(bmax[1:], bmax[:-1]) / max_phase)).astype(int)
    fine = np.concatenate([np.linspace(t[k], t[k + 1], m + 1)[:-1] for k, m in enumerate(sub)] + [t[-1:]])
    keep = np.concatenate([[0], np.cumsum(sub)])
    U = magnus_path(fine, _field_skew(schedule), skew_exp, 3)[keep]
    return U @ s0


def evolve_unitary(state, schedule, max_phase=MAX_STEP_PHASE):
    """Trajectory of ``state`` under the closed-system Hamiltonian of ``schedule``.

    ``state`` in any frame; frames v and g are read relative to the controls
    at t = 0.
    """
    p0 = FrameParams.polar(schedule.Omega[0], schedule.phi[0], schedule.mu[0])
    s0 = frame_rotate(state, "s", p0).components if state.frame != "s" else state.components
    s = evolve_static(s0, schedule, max_phase)
    return _static_to_traj(schedule, s)
