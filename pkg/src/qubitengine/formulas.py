"""Registry of closed-form cycle results, callable by name."""

from __future__ import annotations

import inspect
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, SingularOperatingPointError
from .su2 import thermal_polarization


def _positive(**kw):
    for k, v in kw.items():
        if not np.all(np.asarray(v) > 0):
            raise DomainError(f"{k} must be positive")


def _temps(T_h, T_c):
    _positive(T_h=T_h, T_c=T_c)
    if not T_h > T_c:
        raise DomainError("need T_h > T_c")


def eta_carnot(T_h, T_c):
    _temps(T_h, T_c)
    return 1.0 - T_c / T_h


def work_carnot(T_h, T_c, dS_vn):
    """Reversible work per cycle, (T_h - T_c) dS_vn."""
    _temps(T_h, T_c)
    return (T_h - T_c) * dS_vn


def work_carnot_max(T_h, T_c):
    """Largest reversible work, reached for a full entropy swing of ln 2."""
    return work_carnot(T_h, T_c, np.log(2.0))


def work_carnot_high_T(T_h, T_c, S1, S2):
    """High-temperature reversible work (T_h - T_c) 2 (S2^2 - S1^2)."""
    _temps(T_h, T_c)
    return (T_h - T_c) * 2.0 * (S2**2 - S1**2)


def eta_curzon_ahlborn(T_h, T_c):
    _temps(T_h, T_c)
    return 1.0 - np.sqrt(T_c / T_h)


def power_endoreversible(T_h, T_c, S1, S2, Gamma):
    """Optimal endoreversible power at high temperature."""
    _temps(T_h, T_c)
    _positive(Gamma=Gamma)
    return Gamma * (np.sqrt(T_h) - np.sqrt(T_c)) ** 2 * 2.0 * (S2**2 - S1**2) / np.log(S2 / S1)


def sigma_rate_endoreversible(T_h, T_c, S1, S2, Gamma):
    """Entropy production per unit time at optimal endoreversible power."""
    _temps(T_h, T_c)
    _positive(Gamma=Gamma)
    return Gamma * (T_h - T_c) / np.sqrt(T_h * T_c) * 2.0 * (S2**2 - S1**2) / np.log(S2 / S1)


def work_otto(Omega_h, Omega_c, S_h, S_c):
    """Extracted work (Omega_h - Omega_c)(S_h - S_c) with signed polarizations."""
    _positive(Omega_h=Omega_h, Omega_c=Omega_c)
    return (Omega_h - Omega_c) * (S_h - S_c)


def eta_otto(Omega_h, Omega_c):
    _positive(Omega_h=Omega_h, Omega_c=Omega_c)
    return 1.0 - Omega_c / Omega_h


def sigma_otto(Omega_h, Omega_c, T_h, T_c, S_h, S_c):
    """Bath entropy produced per cycle, (Omega_c/T_c - Omega_h/T_h)(S_h - S_c)."""
    _temps(T_h, T_c)
    return (Omega_c / T_c - Omega_h / T_h) * (S_h - S_c)


def work_otto_max_high_T(Omega_4, T_h, T_c):
    """Maximal Otto work at high temperature, Omega_4^2 / T_h (1 - (T_c/T_h)^2)."""
    _temps(T_h, T_c)
    return Omega_4**2 / T_h * (1.0 - (T_c / T_h) ** 2)


def eta_otto_max_work(T_h, T_c):
    _temps(T_h, T_c)
    return 1.0 - 2.0 * T_c / (T_h + T_c)


def power_otto_bang_bang(Gamma, Omega_h, Omega_c, dS):
    """Sudden-limit Otto power Gamma dOmega dS / 4."""
    return 0.25 * Gamma * (Omega_h - Omega_c) * dS


def partial_thermalization(x, y):
    """Polarization swing factor F(x, y) = (1-x)(1-y)/(1-xy)."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if np.any((x < 0) | (x >= 1) | (y < 0) | (y >= 1)):
        raise DomainError("x and y must lie in [0, 1)")
    return (1.0 - x) * (1.0 - y) / (1.0 - x * y)


def sinh_condition(gamma_tau_adi):
    """Root x > 0 of x + gamma_tau_adi = sinh(x)."""
    a = float(gamma_tau_adi)
    if a <= 0:
        raise DomainError("gamma_tau_adi must be positive")
    hi = max(1.0, np.arcsinh(a) + 1.0)
    while np.sinh(hi) - hi - a < 0:
        hi *= 2.0
    return brentq(lambda x: np.sinh(x) - x - a, 1e-300, hi, xtol=1e-15, rtol=1e-15)


def local_otto_tau_small_x(Gamma, tau_adi):
    """Small-x optimal thermalization time (1/Gamma)(Gamma tau_adi / 3)^(1/3)."""
    _positive(Gamma=Gamma, tau_adi=tau_adi)
    return (Gamma * tau_adi / 3.0) ** (1.0 / 3.0) / Gamma


def power_local_otto(Gamma, tau_adi, Omega_h, Omega_c, dS):
    """Optimal local Otto power as the bang-bang value over (Gamma tau_adi/3)^(1/3)."""
    _positive(Gamma=Gamma, tau_adi=tau_adi)
    return power_otto_bang_bang(Gamma, Omega_h, Omega_c, dS) / (Gamma * tau_adi / 3.0) ** (1.0 / 3.0)


def _sudden_terms(Phi, Omega_h, Omega_c, T_h, T_c):
    _temps(T_h, T_c)
    Sh = float(thermal_polarization(Omega_h, T_h))
    Sc = float(thermal_polarization(Omega_c, T_c))
    c1, c2 = np.cos(Phi), np.cos(2.0 * Phi)
    return Sh, Sc, c1, c2


def sudden_otto_efficiency(Phi, Omega_h, Omega_c, T_h, T_c):
    """Efficiency of the sudden Otto cycle without precession coupling."""
    Sh, Sc, c1, c2 = _sudden_terms(Phi, Omega_h, Omega_c, T_h, T_c)
    num = 8 * c1 * Omega_h * Omega_c * (Sc * Omega_h + Sh * Omega_c) \
        - Omega_c * Omega_h * (Omega_h * Sh + Omega_c * Sc) * (c2 + 7)
    G = Omega_h * (8 * Sc * Omega_c * Omega_h * c1 - Sh * Omega_h * Omega_c * (c2 + 7))
    if G == 0:
        raise SingularOperatingPointError("vanishing denominator G")
    return num / G


def sudden_otto_power(Phi, Omega_h, Omega_c, T_h, T_c, Gamma):
    """Extracted power of the sudden Otto cycle with four equal stroke durations."""
    Sh, Sc, c1, c2 = _sudden_terms(Phi, Omega_h, Omega_c, T_h, T_c)
    return Gamma * (8 * c1 * (Sc * Omega_h + Sh * Omega_c)
                    - (Omega_c * Sc + Omega_h * Sh) * (c2 + 7)) / (4 * (c2 - 17))


@dataclass(frozen=True)
class Formula:
    name: str
    func: Callable
    summary: str

    @property
    def params(self):
        return list(inspect.signature(self.func).parameters)

    def __call__(self, **kwargs):
        missing = [p for p in self.params if p not in kwargs
                   and inspect.signature(self.func).parameters[p].default is inspect._empty]
        if missing:
            raise DomainError(f"{self.name}: missing arguments {missing}")
        return self.func(**kwargs)


REGISTRY = {f.name: f for f in (
    Formula("eta_carnot", eta_carnot, "Carnot efficiency 1 - T_c/T_h"),
    Formula("work_carnot", work_carnot, "reversible Carnot work (T_h-T_c) dS"),
    Formula("work_carnot_max", work_carnot_max, "(T_h-T_c) ln 2"),
    Formula("work_carnot_high_T", work_carnot_high_T, "high-temperature reversible work"),
    Formula("eta_curzon_ahlborn", eta_curzon_ahlborn, "1 - sqrt(T_c/T_h)"),
    Formula("power_endoreversible", power_endoreversible, "optimal endoreversible power, high T"),
    Formula("sigma_rate_endoreversible", sigma_rate_endoreversible, "entropy production rate at optimal power"),
    Formula("work_otto", work_otto, "Otto work dOmega dS"),
    Formula("eta_otto", eta_otto, "Otto efficiency 1 - Omega_c/Omega_h"),
    Formula("sigma_otto", sigma_otto, "Otto entropy production per cycle"),
    Formula("work_otto_max_high_T", work_otto_max_high_T, "maximal Otto work at high T"),
    Formula("eta_otto_max_work", eta_otto_max_work, "efficiency at maximal Otto work"),
    Formula("power_otto_bang_bang", power_otto_bang_bang, "sudden-limit Otto power"),
    Formula("partial_thermalization", partial_thermalization, "F(x, y)"),
    Formula("sinh_condition", sinh_condition, "root of x + Gamma tau_adi = sinh x"),
    Formula("local_otto_tau_small_x", local_otto_tau_small_x, "small-x optimal thermalization time"),
    Formula("power_local_otto", power_local_otto, "optimal local Otto power"),
    Formula("sudden_otto_efficiency", sudden_otto_efficiency, "sudden Otto efficiency vs Phi"),
    Formula("sudden_otto_power", sudden_otto_power, "sudden Otto power vs Phi"),
)}


def evaluate(name, **kwargs):
    """Evaluate registry entry ``name`` with keyword arguments."""
    try:
        f = REGISTRY[name]
    except KeyError:
        raise DomainError(f"unknown formula {name!r}") from None
    return f(**kwargs)
