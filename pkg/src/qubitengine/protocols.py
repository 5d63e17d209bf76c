"""Control schedules: phi profiles, constant-mu ramps and shortcuts to equilibrium."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InfeasibleProtocolError, ValidityWarning
from .open_dynamics import BathSpec
from .schedule import DEFAULT_STEP, Schedule, time_grid
from .su2 import SQRT2

PROFILES = ("smoothstep", "quadratic")
BALANCE_TOL = 1e-10


def phi_smoothstep(Phi, tau, t=None):
    """phi(t) = Phi (3 s^2 - 2 s^3) with s = t / tau; returns (phi, phidot).

    With ``t=None`` the default grid of :func:`time_grid` is used and returned
    as a third element.
    """
    if tau <= 0:
        raise DomainError("tau must be positive")
    grid = t is None
    t = time_grid(tau) if grid else np.asarray(t, dtype=float)
    s = t / tau
    phi = Phi * s * s * (3.0 - 2.0 * s)
    phidot = 6.0 * Phi * s * (1.0 - s) / tau
    return (phi, phidot, t) if grid else (phi, phidot)


def phi_quadratic_legacy(a, tau, t=None):
    """phi(t) = a (t - 2 t^2 / (3 tau)); note phidot(0) = a is not zero."""
    if tau <= 0:
        raise DomainError("tau must be positive")
    grid = t is None
    t = time_grid(tau) if grid else np.asarray(t, dtype=float)
    phi = a * (t - 2.0 * t * t / (3.0 * tau))
    phidot = a * (1.0 - 4.0 * t / (3.0 * tau))
    return (phi, phidot, t) if grid else (phi, phidot)


def linear_ramp_schedule(Omega_i, Omega_f, tau, phi=0.0, dt=DEFAULT_STEP, kind="unitary"):
    """Omega ramped linearly at fixed angle (commuting protocol)."""
    t = time_grid(tau, dt)
    Om = Omega_i + (Omega_f - Omega_i) * t / tau
    return Schedule(t, Om, np.full_like(t, phi), np.zeros_like(t), kind=kind)


def const_mu_schedule(Omega_i, Omega_f, phi_i, phi_f, tau, dt=DEFAULT_STEP, kind="unitary"):
    """Linear Omega ramp with phi(t) = phi_i - mu theta(t) so mu stays constant.

    mu = -2 Phi / (tau (Omega_i + Omega_f)) with Phi = phi_f - phi_i.
    """
    if min(Omega_i, Omega_f) <= 0 or tau <= 0:
        raise DomainError("frequencies and tau must be positive")
    t = time_grid(tau, dt)
    Om = Omega_i + (Omega_f - Omega_i) * t / tau
    theta = Omega_i * t + 0.5 * (Omega_f - Omega_i) * t * t / tau
    mu = -2.0 * (phi_f - phi_i) / (tau * (Omega_i + Omega_f))
    return Schedule(t, Om, phi_i - mu * theta, -mu * Om, kind=kind)


# shortcut to equilibrium ----------------------------------------------------


@dataclass(frozen=True)
class STERequest:
    """Inputs of a shortcut-to-equilibrium open stroke.

    Parameters
    ----------
    Omega_i, Omega_f : float
        Endpoint frequencies; both endpoints are Gibbs states of ``bath``.
    tau : float
        Stroke duration.
    bath : BathSpec
    profile : {'smoothstep', 'quadratic'}
    Phi : float
        Total angle for the smoothstep profile.
    a : float, optional
        Quadratic-profile slope, default 1 / tau^2.
    """

    Omega_i: float
    Omega_f: float
    tau: float
    bath: BathSpec = field(default_factory=lambda: BathSpec(10.0))
    profile: str = "smoothstep"
    Phi: float = np.pi / 2
    a: float | None = None
    phi0: float = 0.0
    dt: float = DEFAULT_STEP

    def __post_init__(self):
        if min(self.Omega_i, self.Omega_f, self.tau) <= 0:
            raise DomainError("Omega_i, Omega_f and tau must be positive")
        if self.profile not in PROFILES:
            raise DomainError(f"unknown profile {self.profile!r}")

    @property
    def T(self):
        return self.bath.T


def target_c_chi(Omega, T):
    """Gibbs value of the chi coefficient, -tanh(Omega / 2T) / sqrt2."""
    return -np.tanh(np.asarray(Omega, dtype=float) / (2.0 * T)) / SQRT2


def ste_polynomial(c0, c1, s):
    """c(s) = c0 + 3 D s^2 - 2 D s^3 and its s-derivative."""
    D = c1 - c0
    return c0 + D * s * s * (3.0 - 2.0 * s), 6.0 * D * s * (1.0 - s)


def _balance(Om, c, cdot, phidot, bath):
    """Residual F(Omega) - cdot and dF/dOmega of the chi balance."""
    alpha = np.sqrt(Om * Om + phidot * phidot)
    x = alpha / (2.0 * bath.T)
    coth = 1.0 / np.tanh(x)
    pre = 2.0 * bath.A * Om**bath.n
    br = coth * c + 1.0 / SQRT2
    F = -pre * br
    dcoth = -1.0 / np.sinh(x) ** 2 * (Om / alpha) / (2.0 * bath.T)
    dF = -2.0 * bath.A * (bath.n * Om ** (bath.n - 1.0) * br + Om**bath.n * c * dcoth)
    return F - cdot, dF


def solve_balance(c, cdot, phidot, bath, upper, lower=1e-6, n_scan=256):
    """Largest Omega solving cdot = -2 A Omega [coth(alpha/2T) c + 1/sqrt2] per sample.

    Returns Omega and the residual; samples without a root are NaN.
    """
    c, cdot, phidot = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (c, cdot, phidot)))
    out = np.full(c.shape, np.nan)
    grid = np.geomspace(lower, upper, n_scan)
    chunk = max(1, 200_000 // n_scan)
    for i in range(0, c.size, chunk):
        sl = slice(i, i + chunk)
        cc, cd, pd = c.flat[sl], cdot.flat[sl], phidot.flat[sl]
        R, _ = _balance(grid[None, :], cc[:, None], cd[:, None], pd[:, None], bath)
        peak = np.argmax(R, axis=1)
        lo = grid[peak]
        hi = np.full_like(lo, upper)
        ok = (R[np.arange(cc.size), peak] >= 0.0) & (R[:, -1] <= 0.0)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            r, _ = _balance(mid, cc, cd, pd, bath)
            pos = r > 0
            lo = np.where(pos, mid, lo)
            hi = np.where(pos, hi, mid)
        x = 0.5 * (lo + hi)
        for _ in range(3):
            r, dr = _balance(x, cc, cd, pd, bath)
            step = np.where(dr != 0, r / np.where(dr != 0, dr, 1.0), 0.0)
            x = np.where(np.abs(step) < (hi - lo) + 1e-12 * x, x - step, x)
        out.flat[sl] = np.where(ok, x, np.nan)
    res, _ = _balance(np.nan_to_num(out, nan=1.0), c, cdot, phidot, bath)
    return out, np.where(np.isnan(out), np.nan, res)


def synthesize_ste(req):
    """Schedule transferring Gibbs(Omega_i) to Gibbs(Omega_f) along the chi polynomial.

    Raises
    ------
    InfeasibleProtocolError
        When no positive Omega satisfies the balance at some sample; this
        happens for short heating strokes. ``err.t`` holds the first such time.
    """
    t = time_grid(req.tau, req.dt)
    if req.profile == "smoothstep":
        phi, phidot = phi_smoothstep(req.Phi, req.tau, t)
    else:
        a = 1.0 / req.tau**2 if req.a is None else req.a
        warnings.warn("quadratic phi profile is not stationary at t = 0", ValidityWarning, stacklevel=2)
        phi, phidot = phi_quadratic_legacy(a, req.tau, t)
    c0, c1 = target_c_chi([req.Omega_i, req.Omega_f], req.T)
    c, dcds = ste_polynomial(c0, c1, t / req.tau)
    cdot = dcds / req.tau
    upper = 10.0 * max(req.Omega_i, req.Omega_f)
    Om, res = solve_balance(c, cdot, phidot, req.bath, upper)
    bad = np.isnan(Om)
    if np.any(bad):
        t_bad = float(t[np.argmax(bad)])
        raise InfeasibleProtocolError(f"no positive Omega balances the chi equation at t = {t_bad:.6g}", t_bad)
    if np.max(np.abs(res)) > BALANCE_TOL * max(1.0, np.max(np.abs(cdot))):
        raise InfeasibleProtocolError(f"balance residual {np.max(np.abs(res)):.3g} above tolerance")
    return Schedule(t, Om, req.phi0 + phi, phidot, kind="open")
