"""Qubit states as polarization 3-vectors in three operator frames.

Frames
------
``s``
    static spin frame, components (<Sx>, <Sy>, <Sz>).
``v``
    dynamical frame, components (<H>, <L>, <C>) carrying the energy scale Omega.
``g``
    eigenoperator frame, components (<chi>, <sigma_x>, <sigma_y>).

Model units hbar = k_B = 1 are used throughout, so a pure state has
polarization magnitude 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import entr

from .errors import DomainError, FrameError, InvalidStateError

SQRT2 = np.sqrt(2.0)
FRAMES = ("s", "v", "g")
STATE_TOL = 1e-10

_PAULI = np.array(
    [[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex
)


@dataclass(frozen=True)
class FrameParams:
    """Control parameters that fix the v and g frames.

    Parameters
    ----------
    omega, epsilon : float
        Hamiltonian coefficients of Sz and Sx.
    mu : float
        Adiabatic parameter; only the g frame depends on it.
    """

    omega: float
    epsilon: float = 0.0
    mu: float = 0.0

    def __post_init__(self):
        if not self.Omega > 0:
            raise DomainError("Omega must be positive")

    @classmethod
    def polar(cls, Omega, phi=0.0, mu=0.0):
        return cls(Omega * np.cos(phi), Omega * np.sin(phi), mu)

    @property
    def Omega(self):
        return float(np.hypot(self.omega, self.epsilon))

    @property
    def phi(self):
        return float(np.arctan2(self.epsilon, self.omega))

    @property
    def kappa(self):
        return float(np.sqrt(1.0 + self.mu**2))

    @property
    def xi(self):
        return float(np.arctan(self.mu))


@dataclass(frozen=True)
class BlochState:
    """Immutable polarization vector tagged with its frame.

    For frame ``v`` the energy scale ``Omega`` travels with the components,
    because <H>, <L>, <C> are polarizations multiplied by Omega.
    """

    components: np.ndarray
    frame: str = "s"
    Omega: float | None = None

    def __post_init__(self):
        if self.frame not in FRAMES:
            raise FrameError(f"unknown frame {self.frame!r}")
        comp = np.array(self.components, dtype=float).reshape(3)
        if not np.all(np.isfinite(comp)):
            raise InvalidStateError("non-finite components")
        comp.flags.writeable = False
        object.__setattr__(self, "components", comp)
        if self.frame == "v":
            if self.Omega is None or not self.Omega > 0:
                raise FrameError("frame 'v' needs a positive Omega")
            object.__setattr__(self, "Omega", float(self.Omega))

    @property
    def polarization(self):
        """Magnitude |S| of the spin polarization."""
        n = np.linalg.norm(self.components)
        if self.frame == "v":
            return n / self.Omega
        if self.frame == "g":
            return n / SQRT2
        return n

    def __iter__(self):
        return iter(self.components)


def check_valid(state, tol=STATE_TOL):
    """Raise :class:`InvalidStateError` if |S| exceeds 1/2 + tol."""
    p = state.polarization
    if p > 0.5 + tol:
        raise InvalidStateError(f"polarization {p:.6g} exceeds 1/2")
    return state


def rot_y(phi):
    """Rotation taking static components to unit-Omega v components."""
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[s, 0.0, c], [-c, 0.0, s], [0.0, 1.0, 0.0]])


def rot_l(mu):
    """Map unit-Omega (H, L, C) onto (chi, sigma_x, sigma_y) directions.

    chi is the energy axis tilted by xi = arctan(mu) about L.
    """
    k = np.sqrt(1.0 + mu * mu)
    return np.array([[1.0 / k, 0.0, mu / k], [-mu / k, 0.0, 1.0 / k], [0.0, 1.0, 0.0]])


def chi_axis(mu):
    """Unit vector of the chi eigenoperator in unit-Omega v coordinates."""
    k = np.sqrt(1.0 + mu * mu)
    return np.array([1.0 / k, 0.0, mu / k])


def _to_static(state, params):
    x = state.components
    if state.frame == "s":
        return x
    if state.frame == "v":
        return rot_y(params.phi).T @ x / state.Omega
    v = rot_l(params.mu).T @ x / SQRT2
    return rot_y(params.phi).T @ v


def frame_rotate(state, to, params):
    """Express ``state`` in frame ``to``.

    v = Omega * R_y(phi) s and g = (sqrt2/Omega) R_L(xi) v.
    """
    if to not in FRAMES:
        raise FrameError(f"unknown frame {to!r}")
    if params is None:
        if state.frame == to:
            return state
        raise FrameError("frame conversion needs FrameParams")
    if state.frame == "v" and not np.isclose(state.Omega, params.Omega, rtol=1e-12):
        raise FrameError("state Omega differs from FrameParams.Omega")
    s = _to_static(state, params)
    if to == "s":
        return BlochState(s, "s")
    v = rot_y(params.phi) @ s
    if to == "v":
        return BlochState(params.Omega * v, "v", params.Omega)
    return BlochState(SQRT2 * (rot_l(params.mu) @ v), "g")


def v_components(state, params=None):
    """<H>, <L>, <C> and Omega for any state."""
    if state.frame == "v":
        return np.asarray(state.components), state.Omega
    if params is None:
        raise FrameError("FrameParams required")
    return frame_rotate(state, "v", params).components, params.Omega


def thermal_polarization(Omega, T):
    """Equilibrium polarization -tanh(Omega/2T)/2 (T may be inf)."""
    Omega = np.asarray(Omega, dtype=float)
    T = np.asarray(T, dtype=float)
    if np.any(Omega <= 0) or np.any(T <= 0):
        raise DomainError("Omega and T must be positive")
    return -0.5 * np.tanh(Omega / (2.0 * T))


def thermal_state(Omega, T):
    """Gibbs state in the v frame: <H> = Omega * S_eq, no coherence."""
    s_eq = float(thermal_polarization(Omega, T))
    return BlochState([Omega * s_eq, 0.0, 0.0], "v", Omega)


def density_matrix(state, params=None):
    """2x2 density matrix; used as an oracle in tests only.

    Frame ``v`` states without ``params`` are read with phi = 0.
    """
    if params is None and state.frame == "v":
        params = FrameParams(state.Omega)
    if params is None and state.frame == "g":
        raise FrameError("frame 'g' needs FrameParams")
    s = _to_static(state, params) if state.frame != "s" else state.components
    return 0.5 * np.eye(2) + np.tensordot(s, _PAULI, axes=1)


def binary_entropy(polarization):
    """Entropy in nats of a qubit with polarization magnitude (or signed S)."""
    p = 0.5 - np.abs(np.asarray(polarization, dtype=float))
    p = np.clip(p, 0.0, 1.0)
    return entr(p) + entr(1.0 - p)


def vn_entropy(state):
    check_valid(state)
    return float(binary_entropy(min(state.polarization, 0.5)))


def energy_polarization(state, params=None):
    """Projection S_H = <H>/Omega of the polarization on the energy axis."""
    v, Om = v_components(state, params)
    return float(v[0] / Om)


def energy_entropy(state, params=None):
    check_valid(state)
    return float(binary_entropy(energy_polarization(state, params)))


def divergence(state, params=None):
    """Relative entropy between dephased and actual state, S_H - S_vn."""
    return max(energy_entropy(state, params) - vn_entropy(state), 0.0)


def coherence_measure(state, params=None):
    """sqrt(<L>^2 + <C>^2)/Omega, between 0 and 1/2."""
    check_valid(state)
    v, Om = v_components(state, params)
    return float(np.hypot(v[1], v[2]) / Om)


def casimir_companion(state, params=None):
    v, Om = v_components(state, params)
    return float(v @ v / Om**2)


# generalized Gibbs form in the g frame -------------------------------------


@dataclass(frozen=True)
class GibbsParams:
    """Multipliers of rho = exp(-(beta chi + gx sigma_x + gy sigma_y))/Z."""

    beta: float
    gamma_x: float = 0.0
    gamma_y: float = 0.0
    _r: float = field(init=False, repr=False, default=0.0)

    def __post_init__(self):
        object.__setattr__(self, "_r", float(np.sqrt(self.beta**2 + self.gamma_x**2 + self.gamma_y**2)))

    @property
    def r(self):
        return self._r

    @property
    def Z(self):
        return 2.0 * np.cosh(self.r / SQRT2)

    @property
    def vector(self):
        return np.array([self.beta, self.gamma_x, self.gamma_y])


def f_of_r(r):
    """<l> = f(r) * multiplier_l with f(r) = -tanh(r/sqrt2)/(sqrt2 r)."""
    r = np.asarray(r, dtype=float)
    small = np.abs(r) < 1e-6
    safe = np.where(small, 1.0, r)
    out = -np.tanh(safe / SQRT2) / (SQRT2 * safe)
    return np.where(small, -0.5 + r * r / 12.0, out)


def s_of_k(k):
    """Inverse map: multiplier_l = s(k) * <l> with k the g-frame norm."""
    k = np.asarray(k, dtype=float)
    if np.any(k >= 1.0 / SQRT2):
        raise InvalidStateError("k >= 1/sqrt2 lies on or outside the Bloch sphere")
    small = k < 1e-6
    safe = np.where(small, 0.5, k)
    out = np.log((1.0 - SQRT2 * safe) / (1.0 + SQRT2 * safe)) / (SQRT2 * safe)
    return np.where(small, -2.0 - 4.0 * k * k / 3.0, out)


def gibbs_from_expectations(c_chi, c_sx=0.0, c_sy=0.0):
    c = np.array([c_chi, c_sx, c_sy], dtype=float)
    s = float(s_of_k(np.linalg.norm(c)))
    return GibbsParams(*(s * c))


def expectations_from_gibbs(gp):
    return float(f_of_r(gp.r)) * gp.vector
