"""Dissipative propagation of the qubit in contact with a heat bath.

All strokes are solved in unit-Omega energy-frame coordinates u = v / Omega.
The dissipator relaxes the projection of u on a chi axis n at rate Gamma
towards -delta / (2 Gamma) and shrinks the orthogonal part at rate Gamma / 2:

    du/dt = Omega M(mu) u - (Gamma/2)(u + n (n.u)) - (delta/2) n

with n carried along by the free propagator (interaction picture). This keeps
the affine solution in closed form whenever the free propagator is known.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import cumulative_simpson, simpson, solve_ivp
from scipy.linalg import expm

from .errors import DomainError, IntegrationError, InvalidStateError, flag_validity
from .propagator import StrokePropagator
from .schedule import Schedule
from .magnus import magnus_path, prefix_products, skew_exp  # noqa: F401
from .su2 import SQRT2, BlochState, FrameParams, chi_axis, rot_l, v_components
from .trajectory import Trajectory
from .unitary import const_mu_matrix, generator

RTOL = 1e-10
ATOL = 1e-12
POSITIVITY_TOL = 1e-9


# baths and rates --------------------------------------------------------


@dataclass(frozen=True)
class BathSpec:
    """Ohmic bath with temperature ``T``, coupling ``A`` and spectral exponent ``n``."""

    T: float
    A: float = 0.01
    n: float = 1.0
    tag: str | None = None

    def __post_init__(self):
        if not self.T > 0:
            raise DomainError("bath temperature must be positive")
        if not self.A > 0:
            raise DomainError("coupling A must be positive")


def bose(x):
    """Bose-Einstein occupation 1/(e^x - 1), zero for x = inf."""
    x = np.asarray(x, dtype=float)
    return np.exp(-x) / -np.expm1(-x)


@dataclass(frozen=True)
class DissipatorRates:
    """Emission ``k_down`` and absorption ``k_up`` rate constants."""

    k_down: np.ndarray | float
    k_up: np.ndarray | float

    @property
    def Gamma(self):
        return self.k_down + self.k_up

    @property
    def delta(self):
        return self.k_down - self.k_up

    @property
    def S_eq(self):
        """Stationary polarization along the relaxation axis."""
        return -self.delta / (2.0 * self.Gamma)


def _rates(prefactor, alpha, T):
    N = bose(np.asarray(alpha, dtype=float) / T)
    return DissipatorRates(prefactor * (1.0 + N), prefactor * N)


def rates_elementary(Omega, bath):
    """Rates for an energy-diagonal coupling at frequency ``Omega``."""
    Omega = np.asarray(Omega, dtype=float)
    if np.any(Omega <= 0):
        raise DomainError("Omega must be positive")
    return _rates(2.0 * bath.A * Omega**bath.n, Omega, bath.T)


def name_rates(alpha, kappa, bath):
    """Rates for the dressed frequency ``alpha`` with adiabaticity factor ``kappa``.

    The prefactor uses alpha / kappa (the bare Omega), the occupation uses
    alpha, so detailed balance holds with respect to alpha.
    """
    alpha = np.asarray(alpha, dtype=float)
    kappa = np.asarray(kappa, dtype=float)
    if np.any(kappa < 1.0 - 1e-15):
        raise DomainError("kappa must be >= 1")
    if np.any(alpha <= 0):
        raise DomainError("alpha must be positive")
    return _rates(2.0 * bath.A * (alpha / kappa) ** bath.n, alpha, bath.T)


@dataclass(frozen=True)
class MeasurementSpec:
    """Weak energy measurement adding -k_d [H, [H, X]] to the generator."""

    k_d: float = 0.0

    def __post_init__(self):
        if self.k_d < 0:
            raise DomainError("k_d must be non-negative")


# isochores ---------------------------------------------------------------


def _as_v(state, Omega, phi=0.0, mu=0.0):
    v, Om = v_components(state, FrameParams.polar(Omega, phi, mu))
    if state.frame == "v" and not np.isclose(Om, Omega, rtol=1e-12):
        raise DomainError("state Omega differs from the stroke Omega")
    return np.array(v, dtype=float)


def isochore_propagator(Omega, bath, tau):
    """Exact map of a fixed-Hamiltonian bath contact of duration ``tau``."""
    r = rates_elementary(Omega, bath)
    a = np.exp(-r.Gamma * tau)
    d = np.exp(-0.5 * r.Gamma * tau)
    c, s = np.cos(Omega * tau), np.sin(Omega * tau)
    m = np.array([[a, 0.0, 0.0], [0.0, d * c, d * s], [0.0, -d * s, d * c]])
    return StrokePropagator(m, [(1.0 - a) * Omega * r.S_eq, 0.0, 0.0])


def evolve_isochore(state, Omega, bath, tau):
    """Final state after relaxing for ``tau`` at fixed ``Omega``."""
    if tau < 0:
        raise DomainError("tau must be non-negative")
    v = isochore_propagator(Omega, bath, tau).apply(_as_v(state, Omega))
    return BlochState(v, "v", Omega)


def sudden_isochore_propagator(Omega, bath, tau, coupling=True, gamma=None,
                               validity=0.05, strict=False):
    """First-order short-time isochore map on (H, L, C).

    Parameters
    ----------
    coupling : bool
        Keep the +-Omega tau precession entries of the coherence block.
    gamma : float, optional
        Override of Gamma; by default the elementary rates of ``bath``.
    validity : float
        Gamma tau above this value raises a validity flag.
    """
    r = rates_elementary(Omega, bath)
    G = float(r.Gamma) if gamma is None else float(gamma)
    if G * tau > validity:
        flag_validity(f"Gamma*tau = {G * tau:.3g} exceeds {validity}", strict)
    w = Omega * tau if coupling else 0.0
    h = 1.0 - 0.5 * G * tau
    m = np.array([[1.0 - G * tau, 0.0, 0.0], [0.0, h, w], [0.0, -w, h]])
    return StrokePropagator(m, [G * tau * Omega * float(r.S_eq), 0.0, 0.0])


# eigenoperator frame -----------------------------------------------------


@dataclass(frozen=True)
class EigenFrameState:
    """Coefficients on the (chi, sigma_x, sigma_y) eigenoperator basis.

    These are the g-frame components; ``c_sigma`` packs the sigma pair as
    (c_sx + i c_sy) / sqrt2 so that c_chi^2 + 2|c_sigma|^2 <= 1/2.
    """

    c_chi: float
    c_sx: float = 0.0
    c_sy: float = 0.0
    mu: float = 0.0
    Omega: float | None = None

    def __post_init__(self):
        if self.c_chi**2 + self.c_sx**2 + self.c_sy**2 > 0.5 + 1e-10:
            raise InvalidStateError("eigen-frame coefficients outside the state space")

    @property
    def c_sigma(self):
        return (self.c_sx + 1j * self.c_sy) / SQRT2

    @property
    def kappa(self):
        return float(np.sqrt(1.0 + self.mu**2))

    @property
    def alpha(self):
        return None if self.Omega is None else self.Omega * self.kappa

    def to_bloch(self):
        return BlochState([self.c_chi, self.c_sx, self.c_sy], "g")

    def u(self):
        """Unit-Omega energy-frame components."""
        return rot_l(self.mu).T @ np.array([self.c_chi, self.c_sx, self.c_sy]) / SQRT2


@dataclass(frozen=True, eq=False)
class EigenTrajectory:
    """Eigen-frame coefficients along a stroke (transported basis)."""

    t: np.ndarray
    c_chi: np.ndarray
    c_sx: np.ndarray
    c_sy: np.ndarray
    trajectory: Trajectory

    @property
    def c_sigma(self):
        return (self.c_sx + 1j * self.c_sy) / SQRT2

    def state(self, i):
        """Coefficients at sample ``i`` on the eigenoperators of the instantaneous mu."""
        tr = self.trajectory
        return EigenFrameState(float(self.c_chi[i]), float(self.c_sx[i]), float(self.c_sy[i]),
                               float(tr.mu[i]), float(tr.Omega[i]))

    @property
    def final(self):
        return self.state(-1)


# stroke solutions --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StrokeSolution:
    """Affine maps u(t_k) = A[k] u(0) + c[k] on the schedule grid.

    ``n`` is the transported chi axis and ``frame`` the transported
    (chi, sigma_x, sigma_y) basis as columns. ``Gamma`` and ``delta`` are
    ``None`` for closed strokes.
    """

    schedule: Schedule
    A: np.ndarray
    c: np.ndarray
    n: np.ndarray
    frame: np.ndarray
    Gamma: np.ndarray
    delta: np.ndarray
    kind: str
    bath: BathSpec | None = None
    dephasing: float = 0.0

    @cached_property
    def propagator(self):
        """Map on v = Omega u from the first to the last sample."""
        Om = self.schedule.Omega
        ratio = Om[-1] / Om[0]
        return StrokePropagator(ratio * self.A[-1], Om[-1] * self.c[-1])

    def u_path(self, u0):
        return np.einsum("nij,j->ni", self.A, np.asarray(u0, dtype=float)) + self.c

    def trajectory(self, v0, label=""):
        """Samples for the initial v-frame components ``v0``."""
        sch = self.schedule
        u = self.u_path(np.asarray(v0, dtype=float) / sch.Omega[0])
        pol = np.linalg.norm(u, axis=1)
        if np.any(pol > 0.5 + POSITIVITY_TOL):
            raise IntegrationError(f"state left the Bloch ball (|S| = {pol.max():.12g})")
        return Trajectory(
            sch.t, sch.Omega[:, None] * u, sch.Omega, sch.phi, sch.mu, sch.Omegadot,
            kind=self.kind, chi_axis=self.n, Gamma=self.Gamma, delta=self.delta,
            alpha=sch.alpha, T=None if self.bath is None else self.bath.T,
            dephasing=self.dephasing, label=label,
            bath_tag=None if self.bath is None else self.bath.tag,
        )


def _name_gamma_delta(schedule, t, bath):
    Om = schedule.at("Omega", t)
    mu = schedule.at("mu", t)
    k = np.sqrt(1.0 + mu * mu)
    r = name_rates(Om * k, k, bath)
    return r.Gamma, r.delta


def _grid_gamma_delta(schedule, bath):
    r = name_rates(schedule.alpha, schedule.kappa, bath)
    return np.asarray(r.Gamma, dtype=float), np.asarray(r.delta, dtype=float)


def _scalar_relaxation(schedule, bath):
    """G = int Gamma and b with b' = -Gamma b - delta/sqrt2, b(0) = 0.

    Uses b(t) = -e^{-G(t)} int_0^t delta e^{G} / sqrt2 with cumulative Simpson
    quadrature, restarted whenever G grows by more than ``_G_CHUNK`` to keep
    the exponentials finite.
    """
    t = schedule.t
    if bath is None:
        z = np.zeros_like(t)
        return z, z, z, z
    Gam, dlt = _grid_gamma_delta(schedule, bath)
    if np.ptp(schedule.Omega) == 0 and np.ptp(schedule.mu) == 0:
        g0, d0 = float(Gam[0]), float(dlt[0])
        G = g0 * (t - t[0])
        b = -(d0 / SQRT2) * (-np.expm1(-G)) / g0
        return G, b, Gam, dlt
    G = _cumulate(Gam, t)
    b = np.zeros_like(t)
    i0 = 0
    while i0 < t.size - 1:
        i1 = int(np.searchsorted(G, G[i0] + _G_CHUNK, side="right"))
        i1 = min(max(i1, i0 + 3), t.size)
        sl = slice(i0, i1)
        g = G[sl] - G[i0]
        inner = _cumulate(dlt[sl] * np.exp(g), t[sl])
        b[sl] = np.exp(-g) * (b[i0] - inner / SQRT2)
        i0 = i1 - 1
    return G, b, Gam, dlt


_G_CHUNK = 200.0


def _free_generator(schedule):
    def gen(s):
        Om = schedule.at("Omega", s)
        mu = schedule.at("mu", s)
        out = np.zeros((s.size, 3, 3))
        out[:, 0, 1] = Om * mu
        out[:, 1, 0] = -Om * mu
        out[:, 1, 2] = Om
        out[:, 2, 1] = -Om
        return out
    return gen


def free_propagators(schedule):
    """Closed-system maps U(t_k) on u; closed form when mu is constant."""
    if schedule.piecewise:
        raise DomainError("piecewise schedules are handled by evolve_unitary")
    if schedule.is_constant_mu():
        return const_mu_matrix(float(schedule.mu[0]), schedule.theta)
    return magnus_path(schedule.t, _free_generator(schedule), skew_exp, 3)


def solve_stroke(schedule, bath=None, dephasing=0.0, inertial_tol=0.1, strict=False,
                 rtol=RTOL, atol=ATOL):
    """Affine solution of one stroke on its grid.

    Parameters
    ----------
    schedule : Schedule
    bath : BathSpec or None
        ``None`` gives closed (unitary) dynamics.
    dephasing : float
        Measurement rate constant k_d; the generator gains -k_d Omega^2 on L and C.
    inertial_tol : float
        Threshold on max |dmu/dt| / Omega before a validity flag is raised.
    """
    mu0 = float(schedule.mu[0])
    n0 = chi_axis(mu0)
    B0 = rot_l(mu0).T  # columns: chi, sigma_x, sigma_y
    kind = "unitary" if bath is None else schedule.kind if schedule.kind != "unitary" else "open"
    if bath is not None and not schedule.is_constant_mu():
        rate = np.max(np.abs(np.gradient(schedule.mu, schedule.t)) / schedule.Omega)
        if rate > inertial_tol:
            flag_validity(f"inertial condition: |dmu/dt|/Omega = {rate:.3g} > {inertial_tol}", strict)
    if dephasing > 0:
        return _solve_dephased(schedule, bath, dephasing, n0, B0, kind, rtol, atol)
    U = free_propagators(schedule)
    G, b, Gam, dlt = _scalar_relaxation(schedule, bath)
    a = np.exp(-G)
    d = np.exp(-0.5 * G)
    P = np.outer(n0, n0)
    core = d[:, None, None] * np.eye(3) + (a - d)[:, None, None] * P
    A = U @ core
    n = U @ n0
    c = n * (b / SQRT2)[:, None]
    if bath is None:
        Gam = dlt = None
    return StrokeSolution(schedule, A, c, n, U @ B0, Gam, dlt, kind, bath, 0.0)


def _max_step(schedule):
    return max(10.0 * float(np.max(np.diff(schedule.t))), 1e-12)


def _solve_dephased(schedule, bath, kd, n0, B0, kind, rtol, atol):
    if schedule.is_constant_mu():
        return _solve_dephased_magnus(schedule, bath, kd, n0, B0, kind)
    t = schedule.t
    D = np.diag([0.0, 1.0, 1.0])

    def rhs(s, y):
        Om = schedule.at("Omega", s)
        U = y[:9].reshape(3, 3)
        X = y[9:].reshape(3, 4)
        Mfree = Om * generator(schedule.at("mu", s))
        gen = Mfree - kd * Om * Om * D
        src = np.zeros(3)
        if bath is not None:
            g, dl = _name_gamma_delta(schedule, s, bath)
            n = U @ n0
            gen = gen - 0.5 * g * (np.eye(3) + np.outer(n, n))
            src = -0.5 * dl * n
        dX = gen @ X
        dX[:, 3] += src
        return np.concatenate([(Mfree @ U).ravel(), dX.ravel()])

    y0 = np.concatenate([np.eye(3).ravel(), np.hstack([np.eye(3), np.zeros((3, 1))]).ravel()])
    sol = solve_ivp(rhs, (t[0], t[-1]), y0, t_eval=t, method="DOP853",
                    rtol=rtol, atol=atol, max_step=_max_step(schedule))
    if not sol.success:
        raise IntegrationError(sol.message)
    Y = sol.y.T
    U = Y[:, :9].reshape(-1, 3, 3)
    X = Y[:, 9:].reshape(-1, 3, 4)
    Gam, dlt = (None, None) if bath is None else _grid_gamma_delta(schedule, bath)
    return StrokeSolution(schedule, X[:, :, :3], X[:, :, 3], U @ n0, U @ B0,
                          Gam, dlt, kind, bath, kd)


def _solve_dephased_magnus(schedule, bath, kd, n0, B0, kind):
    """Constant mu keeps the chi axis fixed, so the augmented generator is local in time."""
    mu = float(schedule.mu[0])
    P = np.eye(3) + np.outer(n0, n0)
    D = np.diag([0.0, 1.0, 1.0])

    def gen(s):
        Om = schedule.at("Omega", s)
        out = np.zeros((s.size, 4, 4))
        out[:, :3, :3] = Om[:, None, None] * generator(mu) - (kd * Om * Om)[:, None, None] * D
        if bath is not None:
            g, dl = _name_gamma_delta(schedule, s, bath)
            out[:, :3, :3] -= 0.5 * g[:, None, None] * P
            out[:, :3, 3] = -0.5 * dl[:, None] * n0
        return out

    X = magnus_path(schedule.t, gen, expm, 4)
    U = const_mu_matrix(mu, schedule.theta)
    Gam, dlt = (None, None) if bath is None else _grid_gamma_delta(schedule, bath)
    n = np.broadcast_to(n0, (schedule.t.size, 3)).copy()
    return StrokeSolution(schedule, X[:, :3, :3], X[:, :3, 3], n, U @ B0, Gam, dlt, kind, bath, kd)


# energetics --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class OpenStrokeResult:
    """Trajectory with power and heat-flow integrands.

    ``power`` is d<H>/dt from the control and ``heat_rate`` the bath part;
    ``work`` and ``heat`` are their Simpson integrals, signed as energy
    received by the qubit.
    """

    trajectory: Trajectory
    power: np.ndarray
    heat_rate: np.ndarray
    propagator: StrokePropagator

    @property
    def work(self):
        return _integrate(self.power, self.trajectory.t)

    @property
    def heat(self):
        return _integrate(self.heat_rate, self.trajectory.t)

    @property
    def cumulative_work(self):
        return _cumulate(self.power, self.trajectory.t)

    @property
    def cumulative_heat(self):
        return _cumulate(self.heat_rate, self.trajectory.t)

    @property
    def energy_change(self):
        e = self.trajectory.energy
        return e[-1] - e[0]


def _integrate(y, t):
    if t.size < 2:
        return 0.0
    return float(simpson(y, x=t)) if t.size > 2 else float(np.trapezoid(y, t))


def _cumulate(y, t):
    if t.size < 3:
        return np.concatenate([[0.0], np.cumsum(np.diff(t) * 0.5 * (y[1:] + y[:-1]))])
    return cumulative_simpson(y, x=t, initial=0.0)


def energetics(traj):
    """Power and heat-rate integrands for a sampled trajectory."""
    u = traj.u
    Om = traj.Omega
    power = traj.Omegadot * u[:, 0] + Om * Om * traj.mu * u[:, 1]
    if traj.Gamma is None or traj.chi_axis is None:
        return power, np.zeros_like(power)
    n = traj.chi_axis
    proj = np.sum(n * u, axis=1)
    heat = Om * (-0.5 * traj.Gamma * (u[:, 0] + n[:, 0] * proj) - 0.5 * traj.delta * n[:, 0])
    return power, heat


def _result(sol, v0, label=""):
    traj = sol.trajectory(v0, label)
    power, heat = energetics(traj)
    return OpenStrokeResult(traj, power, heat, sol.propagator)


def evolve_open(state, schedule, bath, dephasing=0.0, inertial_tol=0.1, strict=False, label=""):
    """Dissipative stroke with the dressed-frequency rates; returns an :class:`OpenStrokeResult`."""
    sol = solve_stroke(schedule, bath, dephasing, inertial_tol, strict)
    v0 = _as_v(state, schedule.Omega[0], schedule.phi[0], schedule.mu[0])
    return _result(sol, v0, label)


def evolve_elementary(state, schedule, bath, label=""):
    """Bath contact with an energy-diagonal coupling; requires epsilon = 0."""
    if np.any(np.abs(schedule.epsilon) > 1e-12 * np.max(schedule.Omega)):
        raise DomainError("elementary dynamics needs epsilon = 0; use evolve_name")
    return evolve_open(state, schedule, bath, label=label)


def evolve_name(init, schedule, bath, inertial_tol=0.1, strict=False):
    """Propagate eigen-frame coefficients through a driven bath contact.

    ``init`` is read on the basis of the first sample (its ``mu`` field is
    replaced by the schedule's). Coefficients are reported on the basis
    transported by the free dynamics.
    """
    sol = solve_stroke(schedule, bath, 0.0, inertial_tol, strict)
    g0 = np.array([init.c_chi, init.c_sx, init.c_sy])
    u0 = sol.frame[0] @ g0 / SQRT2
    traj = sol.trajectory(schedule.Omega[0] * u0)
    coeffs = SQRT2 * np.einsum("nji,nj->ni", sol.frame, traj.u)
    return EigenTrajectory(schedule.t, coeffs[:, 0], coeffs[:, 1], coeffs[:, 2], traj)


def evolve_with_dephasing(state, schedule, bath=None, meas=MeasurementSpec(), label=""):
    """Stroke with an added energy-basis dephasing of strength ``meas.k_d``."""
    sol = solve_stroke(schedule, bath, meas.k_d)
    v0 = _as_v(state, schedule.Omega[0], schedule.phi[0], schedule.mu[0])
    return _result(sol, v0, label)
