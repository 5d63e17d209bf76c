"""Thermodynamic bookkeeping: first law, entropy production, fluxes and forces."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .open_dynamics import BathSpec, OpenStrokeResult, _integrate, name_rates
from .su2 import SQRT2, _PAULI, binary_entropy, gibbs_from_expectations

EIG_FLOOR = 1e-14
MODES = ("engine", "accelerator", "dissipator", "refrigerator", "other")


# entropy production -------------------------------------------------------


def _rho(u):
    """Batched 2x2 density matrices for Bloch vectors u (..., 3)."""
    u = np.asarray(u, dtype=float)
    return 0.5 * np.eye(2) + np.einsum("...i,ijk->...jk", u, _PAULI)


def _logm_h(rho):
    w, V = np.linalg.eigh(rho)
    w = np.maximum(w, EIG_FLOOR)
    return np.einsum("...ij,...j,...kj->...ik", V, np.log(w), V.conj())


def dissipator_rate(u, n, Gamma, delta):
    """Bath part of du/dt: -(Gamma/2)(u + n (n.u)) - (delta/2) n."""
    u = np.asarray(u, dtype=float)
    n = np.asarray(n, dtype=float)
    Gamma = np.asarray(Gamma, dtype=float)[..., None]
    delta = np.asarray(delta, dtype=float)[..., None]
    proj = np.sum(u * n, axis=-1, keepdims=True)
    return -0.5 * Gamma * (u + n * proj) - 0.5 * delta * n


def entropy_production_rate(u, n, Gamma, delta):
    """Spohn rate -tr(D[rho] (ln rho - ln rho_attractor)), batched over samples.

    Parameters
    ----------
    u : array (..., 3)
        Bloch vectors (|u| <= 1/2) in any orthonormal frame.
    n : array (..., 3)
        Relaxation axis in the same frame.
    Gamma, delta : array
        k_down + k_up and k_down - k_up.
    """
    u = np.asarray(u, dtype=float)
    n = np.asarray(n, dtype=float)
    Gamma = np.asarray(Gamma, dtype=float)
    delta = np.asarray(delta, dtype=float)
    attractor = (-0.5 * delta / Gamma)[..., None] * n
    drho = np.einsum("...i,ijk->...jk", dissipator_rate(u, n, Gamma, delta), _PAULI)
    diff = _logm_h(_rho(u)) - _logm_h(_rho(attractor))
    return -np.real(np.einsum("...ij,...ji->...", drho, diff))


def trajectory_entropy_production(traj):
    """Sigma_u at every sample of a dissipative trajectory."""
    if traj.Gamma is None:
        return np.zeros_like(traj.t)
    return entropy_production_rate(traj.u, traj.chi_axis, traj.Gamma, traj.delta)


def effective_temperature(beta_bar, alpha):
    """T' = alpha / (sqrt2 beta_bar) of a coherence-free chi state."""
    return alpha / (SQRT2 * beta_bar)


def sigma_chi_closed(T_eff, alpha, bath, kappa=1.0):
    """Entropy production of a coherence-free state at effective temperature ``T_eff``.

    -(1/T' - 1/T) alpha k_down (e^{-alpha/T'} - e^{-alpha/T}) / (1 + e^{-alpha/T'})
    """
    T = bath.T
    k_down = name_rates(alpha, kappa, bath).k_down
    ep, e = np.exp(-alpha / T_eff), np.exp(-alpha / T)
    return -(1.0 / T_eff - 1.0 / T) * alpha * k_down * (ep - e) / (1.0 + ep)


def sigma_chi_high_T(T_eff, alpha, bath, kappa=1.0):
    """Quadratic-in-force approximation (Gamma (alpha/2)^2) F^2 for alpha/T << 1."""
    r = name_rates(alpha, kappa, bath)
    return onsager_coefficient(alpha, r.Gamma) * (1.0 / T_eff - 1.0 / bath.T) ** 2


# fluxes and forces ---------------------------------------------------------


@dataclass(frozen=True)
class FluxForceBreakdown:
    """Per-channel forces and fluxes; ``total`` is the entropy production rate."""

    forces: np.ndarray
    fluxes: np.ndarray
    T_chi: float
    T: float

    @property
    def terms(self):
        return self.forces * self.fluxes

    @property
    def total(self):
        return float(np.sum(self.terms))


def flux_force_breakdown(state, alpha, Gamma, bath):
    """Split the entropy production of an eigen-frame state into chi and sigma channels.

    ``state`` is an :class:`~qubitengine.open_dynamics.EigenFrameState`
    (or any object with c_chi, c_sx, c_sy).
    """
    c = np.array([state.c_chi, state.c_sx, state.c_sy], dtype=float)
    gp = gibbs_from_expectations(*c)
    c_ia = -np.tanh(alpha / (2.0 * bath.T)) / SQRT2
    T_chi = effective_temperature(gp.beta, alpha) if gp.beta != 0 else np.inf
    forces = np.array([1.0 / T_chi - 1.0 / bath.T, gp.gamma_x / alpha, gp.gamma_y / alpha])
    fluxes = np.array([
        -alpha * Gamma / SQRT2 * (c[0] - c_ia),
        -0.5 * alpha * Gamma * c[1],
        -0.5 * alpha * Gamma * c[2],
    ])
    return FluxForceBreakdown(forces, fluxes, T_chi, bath.T)


def onsager_coefficient(alpha, Gamma):
    """Linear-response coefficient L = Gamma (alpha/2)^2."""
    return Gamma * (alpha / 2.0) ** 2


def linear_response_ratio(alpha, bath, force=1e-6, channel="chi"):
    """J / F for a small force on ``channel`` divided by L."""
    from .open_dynamics import EigenFrameState

    r = name_rates(alpha, 1.0, bath)
    if channel == "chi":
        T_eff = 1.0 / (1.0 / bath.T + force)
        st = EigenFrameState(-np.tanh(alpha / (2.0 * T_eff)) / SQRT2)
        idx = 0
    else:
        gp_beta = SQRT2 * alpha / (2.0 * bath.T)
        g = force * alpha
        from .su2 import GibbsParams, expectations_from_gibbs

        c = expectations_from_gibbs(GibbsParams(gp_beta, g, 0.0))
        st = EigenFrameState(*c)
        idx = 1
    fb = flux_force_breakdown(st, alpha, r.Gamma, bath)
    return fb.fluxes[idx] / fb.forces[idx] / onsager_coefficient(alpha, r.Gamma)


def availability(E, S, T0):
    """Exergy E - T0 S."""
    if T0 < 0:
        raise DomainError("T0 must be non-negative")
    return E - T0 * S


def lost_availability(entropy_production, T0):
    """Work lost to irreversibility, T0 times the entropy produced."""
    return T0 * entropy_production


# ledgers -----------------------------------------------------------------


@dataclass(frozen=True)
class StrokeLedger:
    """Energy and entropy balance of one stroke; W and Q are received by the qubit."""

    label: str
    kind: str
    W: float
    Q: float
    dE: float
    dS_vn: float
    dS_H: float
    sigma: float
    duration: float
    bath_tag: str | None = None

    @property
    def first_law_residual(self):
        return self.dE - self.W - self.Q


def ledger_from_result(result: OpenStrokeResult):
    """Stroke ledger from an :class:`OpenStrokeResult`."""
    tr = result.trajectory
    u = tr.u
    pol = np.linalg.norm(u, axis=1)
    S_vn = binary_entropy(np.minimum(pol, 0.5))
    S_H = binary_entropy(u[:, 0])
    sig = trajectory_entropy_production(tr)
    Q = result.heat if tr.Gamma is not None else 0.0
    return StrokeLedger(
        tr.label, tr.kind, result.work, Q, result.energy_change,
        float(S_vn[-1] - S_vn[0]), float(S_H[-1] - S_H[0]),
        _integrate(sig, tr.t), float(tr.t[-1] - tr.t[0]), tr.bath_tag,
    )


def ledger_from_jump(label, kind, v0, v1, Omega0, Omega1, W, Q, duration=0.0, bath_tag=None, sigma=0.0):
    """Stroke ledger for a map given only by its endpoints."""
    u0, u1 = np.asarray(v0) / Omega0, np.asarray(v1) / Omega1
    S = binary_entropy(np.minimum([np.linalg.norm(u0), np.linalg.norm(u1)], 0.5))
    SH = binary_entropy([u0[0], u1[0]])
    return StrokeLedger(label, kind, float(W), float(Q), float(v1[0] - v0[0]),
                        float(S[1] - S[0]), float(SH[1] - SH[0]), float(sigma), float(duration), bath_tag)


def classify_mode(W, Q_h, Q_c, tol=0.0):
    """Operation mode from cycle work and bath heats (received by the qubit)."""
    if W < -tol and Q_h > tol and Q_c < -tol:
        return "engine"
    if W > tol and Q_c > tol:
        return "refrigerator"
    if W > tol and Q_h > tol and Q_c < -tol:
        return "accelerator"
    if W > tol and Q_h < -tol and Q_c < -tol:
        return "dissipator"
    return "other"


@dataclass(frozen=True)
class ThermoLedger:
    """Per-stroke ledgers and cycle totals."""

    strokes: tuple
    T_h: float
    T_c: float
    hot_tag: str = "hot"
    cold_tag: str = "cold"
    extra: dict = field(default_factory=dict)

    @property
    def tau_cycle(self):
        return float(sum(s.duration for s in self.strokes))

    @property
    def W(self):
        return float(sum(s.W for s in self.strokes))

    def heat(self, tag):
        return float(sum(s.Q for s in self.strokes if s.bath_tag == tag))

    @property
    def Q_h(self):
        return self.heat(self.hot_tag)

    @property
    def Q_c(self):
        return self.heat(self.cold_tag)

    @property
    def efficiency(self):
        """-W / Q_h (negative outside engine mode); NaN when Q_h = 0."""
        return -self.W / self.Q_h if self.Q_h != 0 else float("nan")

    @property
    def power(self):
        """Extracted power -W / tau_cycle."""
        tc = self.tau_cycle
        return -self.W / tc if tc > 0 else float("nan")

    @property
    def sigma_cycle(self):
        """Entropy produced in the baths per cycle."""
        return -self.Q_h / self.T_h - self.Q_c / self.T_c

    @property
    def mode(self):
        scale = max(abs(self.W), abs(self.Q_h), abs(self.Q_c), 1e-300)
        return classify_mode(self.W, self.Q_h, self.Q_c, 1e-12 * scale)

    @property
    def max_first_law_residual(self):
        rel = []
        for s in self.strokes:
            scale = max(abs(s.W), abs(s.Q), abs(s.dE), 1e-300)
            rel.append(abs(s.first_law_residual) / scale)
        return max(rel) if rel else 0.0
