"""Four-stroke cycles, their limit cycles and cycle-time sweeps."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
from scipy.integrate import solve_ivp

from . import formulas
from .errors import (ConvergenceError, DomainError, InfeasibleProtocolError, NonContractiveError,
                     QubitEngineError)
from .open_dynamics import BathSpec, _result, rates_elementary, solve_stroke, sudden_isochore_propagator
from .propagator import StrokePropagator
from .protocols import STERequest, const_mu_schedule, linear_ramp_schedule, synthesize_ste
from .schedule import DEFAULT_STEP, Schedule, time_grid
from .su2 import thermal_polarization
from .thermo import ThermoLedger, ledger_from_jump, ledger_from_result
from .unitary import sta_duration, sudden_propagator

CYCLE_KINDS = ("elementary-carnot", "elementary-otto", "local-otto", "local-carnot",
               "global-carnot", "global-otto", "sudden-otto")

DEFAULT_OMEGAS = {
    "local-carnot": (12.0, 8.0, 4.0, 6.0),
    "global-carnot": (10.0, 9.0, 6.0, 20.0 / 3.0),
    "local-otto": (8.0, 8.0, 6.0, 6.0),
    "global-otto": (9.0, 9.0, 20.0 / 3.0, 20.0 / 3.0),
    "sudden-otto": (8.0, 8.0, 6.0, 6.0),
    "elementary-otto": (8.0, 8.0, 6.0, 6.0),
    "elementary-carnot": (10.0, 9.0, 6.0, 20.0 / 3.0),
}


# configuration -------------------------------------------------------------


@dataclass(frozen=True)
class CycleSpec:
    """Parameters of one four-stroke cycle.

    Corners are numbered 1..4 with the hot contact 1 -> 2, the expansion
    2 -> 3, the cold contact 3 -> 4 and the compression 4 -> 1. Only the
    fields relevant to ``kind`` are read.

    Parameters
    ----------
    kind : str
        One of :data:`CYCLE_KINDS`.
    omegas : tuple of 4 floats, optional
        Corner frequencies; defaults per kind.
    tau_cyc : float, optional
        Cycle time (not used by elementary-carnot, whose stroke times follow
        from ``dT``).
    A, A_h, A_c : float
        Coupling constants; per-bath values override ``A``.
    Phi : float
        Hamiltonian rotation angle of the driven strokes.
    l : int
        Loop number of the constant-mu shortcut strokes in local cycles.
    mu : float, optional
        Global cycles: fixes |mu| and hence tau_cyc.
    split : str
        Global cycles: 'constant-mu' or 'equal' stroke durations.
    tau_h, tau_c, tau_adi : float, optional
        Explicit stroke durations for Otto cycles.
    gamma, gamma_tau : float
        Sudden Otto: relaxation rate and Gamma*tau per stroke.
    coupling : bool
        Sudden Otto: keep the precession entries in the isochore map.
    convention : str
        Sudden jump matrix convention.
    k_d : float
        Dephasing rate constant applied to driven strokes.
    dT : float
        Elementary Carnot: bath-to-medium temperature gap on both isotherms.
    """

    kind: str
    T_h: float = 10.0
    T_c: float = 5.0
    omegas: tuple | None = None
    tau_cyc: float | None = None
    A: float = 0.01
    A_h: float | None = None
    A_c: float | None = None
    Phi: float = np.pi / 2
    l: int = 1
    mu: float | None = None
    split: str | None = None
    profile: str = "smoothstep"
    tau_h: float | None = None
    tau_c: float | None = None
    tau_adi: float | None = None
    gamma: float = 100.0
    gamma_tau: float = 0.01
    coupling: bool = True
    convention: str = "rotation"
    k_d: float = 0.0
    dT: float = 1.0
    dt: float = DEFAULT_STEP
    strict: bool = False

    def __post_init__(self):
        if self.kind not in CYCLE_KINDS:
            raise DomainError(f"unknown cycle kind {self.kind!r}")
        if not (self.T_h > self.T_c > 0):
            raise DomainError("need T_h > T_c > 0")
        om = DEFAULT_OMEGAS[self.kind] if self.omegas is None else tuple(float(x) for x in self.omegas)
        if len(om) != 4 or min(om) <= 0:
            raise DomainError("four positive corner frequencies required")
        object.__setattr__(self, "omegas", om)
        if self.kind == "local-carnot":
            O1, O2, O3, O4 = om
            if not (np.isclose(O4 * self.T_h, O1 * self.T_c) and np.isclose(O2 * self.T_c, O3 * self.T_h)):
                raise DomainError("local-carnot corners must satisfy O4 T_h = O1 T_c and O2 T_c = O3 T_h")
        if self.tau_cyc is not None and self.tau_cyc <= 0:
            raise DomainError("tau_cyc must be positive")
        if self.split not in (None, "constant-mu", "equal"):
            raise DomainError(f"unknown split {self.split!r}")

    @classmethod
    def local_carnot(cls, T_h=10.0, T_c=5.0, Omega_min=4.0, compression=3.0, **kw):
        """Corners from the minimum frequency and the compression ratio."""
        O3 = Omega_min
        O1 = compression * O3
        return cls("local-carnot", T_h, T_c, (O1, O3 * T_h / T_c, O3, O1 * T_c / T_h), **kw)

    @property
    def hot(self):
        return BathSpec(self.T_h, self.A if self.A_h is None else self.A_h, tag="hot")

    @property
    def cold(self):
        return BathSpec(self.T_c, self.A if self.A_c is None else self.A_c, tag="cold")

    @property
    def Omega_min(self):
        return min(self.omegas)

    @property
    def time_unit(self):
        """2 pi / Omega_min, the unit used to quote cycle times."""
        return 2.0 * np.pi / self.Omega_min

    @property
    def eta_carnot(self):
        return 1.0 - self.T_c / self.T_h


# strokes -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Stroke:
    """One stroke: a sampled schedule, a sudden jump or a first-order isochore."""

    label: str
    kind: str
    Omega_i: float
    Omega_f: float
    duration: float
    schedule: Schedule | None = None
    bath: BathSpec | None = None
    Phi: float = 0.0
    convention: str = "rotation"
    coupling: bool = True
    gamma: float | None = None
    dephasing: float = 0.0

    def solve(self, strict=False):
        return StrokeMap(self, strict)


class StrokeMap:
    """Affine map of a stroke plus the machinery to replay it from a state."""

    def __init__(self, stroke, strict=False):
        self.stroke = stroke
        st = stroke
        self._sol = None
        if st.kind == "schedule":
            self._sol = solve_stroke(st.schedule, st.bath, st.dephasing, strict=strict)
            self.propagator = self._sol.propagator
        elif st.kind == "sudden":
            self.propagator = sudden_propagator(st.Omega_i, st.Omega_f, st.Phi, st.convention)
        elif st.kind == "sudden-isochore":
            self.propagator = sudden_isochore_propagator(st.Omega_i, st.bath, st.duration, st.coupling,
                                                         st.gamma, strict=strict)
        else:
            raise DomainError(f"unknown stroke kind {st.kind!r}")

    def run(self, v0):
        """Replay from ``v0``; returns (v_end, StrokeLedger, trajectory or None)."""
        st = self.stroke
        v0 = np.asarray(v0, dtype=float)
        if self._sol is not None:
            res = _result(self._sol, v0, st.label)
            return res.trajectory.v[-1].copy(), ledger_from_result(res), res
        v1 = self.propagator.apply(v0)
        dE = v1[0] - v0[0]
        tag = None if st.bath is None else st.bath.tag
        W, Q = (dE, 0.0) if st.kind == "sudden" else (0.0, dE)
        return v1, ledger_from_jump(st.label, st.kind, v0, v1, st.Omega_i, st.Omega_f, W, Q,
                                    st.duration, tag), None


def _sched_stroke(label, schedule, bath=None, dephasing=0.0):
    return Stroke(label, "schedule", float(schedule.Omega[0]), float(schedule.Omega[-1]),
                  float(schedule.duration), schedule, bath, dephasing=dephasing)


@dataclass(frozen=True, eq=False)
class Cycle:
    spec: CycleSpec
    strokes: tuple

    @property
    def tau_cyc(self):
        return float(sum(s.duration for s in self.strokes))


def _open_split(spec, used):
    if spec.tau_h is not None:
        return spec.tau_h, spec.tau_c if spec.tau_c is not None else spec.tau_h
    if spec.tau_cyc is None:
        raise DomainError("tau_cyc or tau_h is required")
    rest = spec.tau_cyc - used
    if rest <= 0:
        raise InfeasibleProtocolError(f"tau_cyc = {spec.tau_cyc:.6g} leaves no time for the bath strokes")
    return 0.5 * rest, 0.5 * rest


def _sta(label, Oi, Of, phi_i, Phi, spec):
    tau = sta_duration(Oi, Of, Phi, spec.l)
    return _sched_stroke(label, const_mu_schedule(Oi, Of, phi_i, phi_i + Phi, tau, spec.dt))


def _build_local_carnot(spec):
    O1, O2, O3, O4 = spec.omegas
    P = spec.Phi
    tu = sta_duration(O2, O3, P, spec.l) + sta_duration(O4, O1, P, spec.l)
    th, tc = _open_split(spec, tu)
    hot = synthesize_ste(STERequest(O1, O2, th, spec.hot, spec.profile, P, dt=spec.dt, phi0=0.0))
    cold = synthesize_ste(STERequest(O3, O4, tc, spec.cold, spec.profile, -P, dt=spec.dt, phi0=0.0))
    return (
        _sched_stroke("hot", hot, spec.hot),
        _sta("expansion", O2, O3, P, -P, spec),
        _sched_stroke("cold", cold, spec.cold),
        _sta("compression", O4, O1, -P, P, spec),
    )


def _build_local_otto(spec):
    O1, O2, O3, O4 = spec.omegas
    if not (np.isclose(O1, O2) and np.isclose(O3, O4)):
        raise DomainError("Otto cycles need O1 = O2 and O3 = O4")
    P = spec.Phi
    if P != 0:
        tu = sta_duration(O2, O3, P, spec.l) + sta_duration(O4, O1, P, spec.l)
        exp = _sta("expansion", O2, O3, 0.0, P, spec)
        comp = _sta("compression", O4, O1, P, -P, spec)
    else:
        exp, comp, tu = _commuting_unitaries(spec, O2, O3, O4, O1)
    th, tc = _open_split(spec, tu)
    return (
        _sched_stroke("hot", Schedule.constant(O1, th, spec.dt, 0.0, "isochore"), spec.hot),
        exp,
        _sched_stroke("cold", Schedule.constant(O3, tc, spec.dt, P, "isochore"), spec.cold),
        comp,
    )


def _commuting_unitaries(spec, O2, O3, O4, O1):
    ta = spec.tau_adi or 0.0
    if ta > 0:
        return (_sched_stroke("expansion", linear_ramp_schedule(O2, O3, ta, 0.0, spec.dt)),
                _sched_stroke("compression", linear_ramp_schedule(O4, O1, ta, 0.0, spec.dt)), 2 * ta)
    return (Stroke("expansion", "sudden", O2, O3, 0.0), Stroke("compression", "sudden", O4, O1, 0.0), 0.0)


def _build_elementary_otto(spec):
    O1, O2, O3, O4 = spec.omegas
    if not (np.isclose(O1, O2) and np.isclose(O3, O4)):
        raise DomainError("Otto cycles need O1 = O2 and O3 = O4")
    exp, comp, tu = _commuting_unitaries(spec, O2, O3, O4, O1)
    th, tc = _open_split(spec, tu)
    return (
        _sched_stroke("hot", Schedule.constant(O1, th, spec.dt, 0.0, "isochore"), spec.hot),
        exp,
        _sched_stroke("cold", Schedule.constant(O3, tc, spec.dt, 0.0, "isochore"), spec.cold),
        comp,
    )


def _global_durations(spec, pairs, Phis):
    weights = np.array([2.0 * abs(P) / (a + b) for (a, b), P in zip(pairs, Phis)])
    split = spec.split or ("equal" if spec.kind == "global-otto" else "constant-mu")
    if split == "constant-mu":
        if spec.mu is not None:
            return weights / abs(spec.mu)
        if spec.tau_cyc is None:
            raise DomainError("global cycles need tau_cyc or mu")
        return weights * spec.tau_cyc / weights.sum()
    if spec.tau_cyc is None:
        raise DomainError("equal split needs tau_cyc")
    return np.full(4, spec.tau_cyc / 4.0)


def _build_global(spec):
    O1, O2, O3, O4 = spec.omegas
    P = spec.Phi
    pairs = [(O1, O2), (O2, O3), (O3, O4), (O4, O1)]
    Phis = [P, P, -P, -P]
    taus = _global_durations(spec, pairs, Phis)
    phis = np.concatenate([[0.0], np.cumsum(Phis)])
    baths = [spec.hot, None, spec.cold, None]
    labels = ["hot", "expansion", "cold", "compression"]
    out = []
    for k in range(4):
        kind = "open" if baths[k] is not None else "unitary"
        sch = const_mu_schedule(*pairs[k], phis[k], phis[k + 1], taus[k], spec.dt, kind)
        out.append(_sched_stroke(labels[k], sch, baths[k], spec.k_d))
    return tuple(out)


def _build_sudden_otto(spec):
    O_h, _, O_c, _ = spec.omegas
    tau = spec.gamma_tau / spec.gamma
    return (
        Stroke("hot", "sudden-isochore", O_h, O_h, tau, bath=spec.hot, coupling=spec.coupling, gamma=spec.gamma),
        Stroke("expansion", "sudden", O_h, O_c, tau, Phi=spec.Phi, convention=spec.convention),
        Stroke("cold", "sudden-isochore", O_c, O_c, tau, bath=spec.cold, coupling=spec.coupling, gamma=spec.gamma),
        Stroke("compression", "sudden", O_c, O_h, tau, Phi=-spec.Phi, convention=spec.convention),
    )


def isotherm_schedule(Omega_i, Omega_f, bath, T_inner, dt=DEFAULT_STEP):
    """Frequency ramp keeping an elementary qubit thermal at ``T_inner``.

    Solves dOmega/dt = -Gamma (S(Omega/T') - S_eq) / S'(Omega) until Omega_f.
    """
    sign = np.sign(Omega_f - Omega_i)

    def rhs(t, y):
        Om = y[0]
        S = -0.5 * np.tanh(Om / (2 * T_inner))
        dS = -0.25 / T_inner / np.cosh(Om / (2 * T_inner)) ** 2
        r = rates_elementary(Om, bath)
        return [-r.Gamma * (S - r.S_eq) / dS]

    if np.sign(rhs(0, [Omega_i])[0]) != sign:
        raise InfeasibleProtocolError("inner temperature on the wrong side of the bath temperature")

    def hit(t, y):
        return y[0] - Omega_f
    hit.terminal = True

    sol = solve_ivp(rhs, (0.0, 1e7), [Omega_i], events=hit, dense_output=True, rtol=1e-11, atol=1e-12)
    if sol.status != 1:
        raise InfeasibleProtocolError("isotherm did not reach the target frequency")
    tau = float(sol.t_events[0][0])
    t = time_grid(tau, dt)
    Om = sol.sol(t)[0]
    Om[-1] = Omega_f
    return Schedule(t, Om, np.zeros_like(t), np.zeros_like(t), kind="open")


def _build_elementary_carnot(spec):
    O1, O2, _, _ = spec.omegas
    Th, Tc = spec.T_h - spec.dT, spec.T_c + spec.dT
    if not Th > Tc:
        raise DomainError("dT too large for the bath temperatures")
    O3, O4 = O2 * Tc / Th, O1 * Tc / Th
    hot = isotherm_schedule(O1, O2, spec.hot, Th, spec.dt)
    cold = isotherm_schedule(O3, O4, spec.cold, Tc, spec.dt)
    return (
        _sched_stroke("hot", hot, spec.hot),
        Stroke("expansion", "sudden", O2, O3, 0.0),
        _sched_stroke("cold", cold, spec.cold),
        Stroke("compression", "sudden", O4, O1, 0.0),
    )


_BUILDERS = {
    "local-carnot": _build_local_carnot,
    "local-otto": _build_local_otto,
    "elementary-otto": _build_elementary_otto,
    "elementary-carnot": _build_elementary_carnot,
    "global-carnot": _build_global,
    "global-otto": _build_global,
    "sudden-otto": _build_sudden_otto,
}


def build_cycle(spec, **params):
    """Attach stroke schedules to a cycle.

    ``spec`` may be a :class:`CycleSpec` or a kind name with keyword parameters.
    """
    if isinstance(spec, str):
        spec = CycleSpec(spec, **params)
    elif params:
        spec = replace(spec, **params)
    return Cycle(spec, _BUILDERS[spec.kind](spec))


# limit cycle ---------------------------------------------------------------


@dataclass(frozen=True)
class AffineCycleMap:
    """v -> M v + b on (<H>, <L>, <C>) at corner 1."""

    M: np.ndarray
    b: np.ndarray

    @property
    def spectral_radius(self):
        return float(np.max(np.abs(np.linalg.eigvals(self.M))))

    @classmethod
    def from_propagator(cls, p: StrokePropagator):
        return cls(np.array(p.matrix), np.array(p.offset))


def fixed_point_affine(cmap, rcond=1e-12):
    """Solve (I - M) v = b; a non-contractive map raises :class:`NonContractiveError`."""
    I = np.eye(3)
    if np.linalg.cond(I - cmap.M) > 1.0 / rcond or cmap.spectral_radius >= 1.0 - 1e-14:
        raise NonContractiveError("cycle map has no unique attracting fixed point")
    return np.linalg.solve(I - cmap.M, cmap.b)


def compose(maps):
    total = StrokePropagator.identity()
    for m in maps:
        total = m.propagator @ total
    return total


@dataclass(frozen=True, eq=False)
class LimitCycle:
    """Converged cycle: fixed point, per-stroke replays and bookkeeping."""

    cycle: Cycle
    cmap: AffineCycleMap
    fixed_point: np.ndarray
    iterated_point: np.ndarray
    history: np.ndarray
    corners: np.ndarray
    results: tuple
    ledger: ThermoLedger
    W_ideal: float

    @property
    def spec(self):
        return self.cycle.spec

    @property
    def tau_cyc(self):
        return self.ledger.tau_cycle

    @property
    def efficiency(self):
        return self.ledger.efficiency

    @property
    def power(self):
        return self.ledger.power

    @property
    def mode(self):
        return self.ledger.mode

    @property
    def sigma_cycle(self):
        return self.ledger.sigma_cycle

    @property
    def dissipated_power(self):
        """P - |W_ideal| / tau_cyc."""
        return self.power - abs(self.W_ideal) / self.tau_cyc

    @property
    def trajectories(self):
        return tuple(r.trajectory if r is not None else None for r in self.results)


def _free_energy(Omega, T):
    return -T * np.log(2.0 * np.cosh(Omega / (2.0 * T)))


def quasi_static_work(cycle):
    """Work received in the infinitely slow limit of the same stroke sequence.

    Bath strokes follow the isotherm of their bath (work = Delta F); bath-free
    strokes keep the polarization of the preceding corner.
    """
    S = float(thermal_polarization(cycle.strokes[0].Omega_i, cycle.spec.T_h))
    W = 0.0
    for sweep in range(2):
        W = 0.0
        for st in cycle.strokes:
            if st.bath is not None:
                T = st.bath.T
                W += _free_energy(st.Omega_f, T) - _free_energy(st.Omega_i, T)
                S = float(thermal_polarization(st.Omega_f, T))
            else:
                W += S * (st.Omega_f - st.Omega_i)
    return W


def run_cycle(spec_or_cycle, max_iters=200_000, tol=1e-9, check_monotone=True):
    """Limit cycle of a four-stroke cycle.

    Iterates the composed cycle map from the hot thermal state until the
    estimated distance to the fixed point, d rho / (1 - rho) with rho the
    spectral radius, drops below ``tol / 10`` (in polarization units), then
    cross-checks against the direct linear solve and replays every stroke
    from the fixed point to build the ledger.
    """
    cycle = spec_or_cycle if isinstance(spec_or_cycle, Cycle) else build_cycle(spec_or_cycle)
    spec = cycle.spec
    maps = [s.solve(spec.strict) for s in cycle.strokes]
    cmap = AffineCycleMap.from_propagator(compose(maps))
    O1 = cycle.strokes[0].Omega_i
    rho = cmap.spectral_radius
    v_star = fixed_point_affine(cmap)
    v = np.array([O1 * float(thermal_polarization(O1, spec.T_h)), 0.0, 0.0])
    hist = []
    gap = max(1.0 - rho, 1e-300)
    for _ in range(max_iters):
        v_new = cmap.M @ v + cmap.b
        d = float(np.linalg.norm(v_new - v)) / O1
        if check_monotone and hist and d > hist[-1] * (1.0 + 1e-9) + 1e-15:
            raise NonContractiveError(f"cycle distance grew from {hist[-1]:.3g} to {d:.3g}")
        hist.append(d)
        v = v_new
        if d * rho / gap < 0.1 * tol or d == 0.0:
            break
    else:
        raise ConvergenceError(f"no convergence in {max_iters} iterations", hist[-1])
    corners = [v_star]
    results, ledgers = [], []
    for m in maps:
        v_end, led, res = m.run(corners[-1])
        corners.append(v_end)
        results.append(res)
        ledgers.append(led)
    ledger = ThermoLedger(tuple(ledgers), spec.T_h, spec.T_c)
    return LimitCycle(cycle, cmap, v_star, v, np.array(hist), np.array(corners), tuple(results),
                      ledger, quasi_static_work(cycle))


def sudden_otto_closed_forms(Phi, Omega_h, Omega_c, T_h, T_c, Gamma):
    """(efficiency, power) of the sudden Otto cycle from the closed forms."""
    return (formulas.sudden_otto_efficiency(Phi, Omega_h, Omega_c, T_h, T_c),
            formulas.sudden_otto_power(Phi, Omega_h, Omega_c, T_h, T_c, Gamma))


# sweeps -----------------------------------------------------------------


SWEEP_COLUMNS = ("tau_cyc", "eta", "eta_over_etaC", "P", "P_diss", "sigma_cyc", "mode")


@dataclass(frozen=True)
class SweepRow:
    value: float
    tau_cyc: float
    eta: float
    eta_over_etaC: float
    P: float
    P_diss: float
    sigma_cyc: float
    mode: str
    W: float = float("nan")
    Q_h: float = float("nan")
    Q_c: float = float("nan")
    first_law: float = float("nan")
    error: str = ""

    @property
    def ok(self):
        return not self.error


def _sweep_point(args):
    spec, name, value, tol = args
    nan = float("nan")
    try:
        lc = run_cycle(replace(spec, **{name: value}), tol=tol)
    except QubitEngineError as exc:
        tau = value if name == "tau_cyc" else nan
        return SweepRow(value, tau, nan, nan, nan, nan, nan, "failed", error=f"{type(exc).__name__}: {exc}")
    led = lc.ledger
    return SweepRow(value, lc.tau_cyc, led.efficiency, led.efficiency / spec.eta_carnot, led.power,
                    lc.dissipated_power, led.sigma_cycle, led.mode, led.W, led.Q_h, led.Q_c,
                    led.max_first_law_residual)


def sweep(spec, name, values, workers=None, tol=1e-9):
    """Run the cycle for each value of field ``name``; rows keep the input order."""
    values = [float(v) for v in values]
    if not values:
        raise DomainError("empty sweep")
    jobs = [(spec, name, v, tol) for v in values]
    workers = os.cpu_count() if workers is None else int(workers)
    if workers <= 1 or len(jobs) == 1:
        return [_sweep_point(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        return list(pool.map(_sweep_point, jobs))


def sweep_cycle_time(spec, taus, workers=None, tol=1e-9):
    """Rows of (tau_cyc, eta, eta/eta_C, P, P_diss, sigma_cyc, mode) for ascending ``taus``."""
    taus = np.asarray(taus, dtype=float)
    if taus.size == 0 or np.any(taus <= 0) or np.any(np.diff(taus) <= 0):
        raise DomainError("cycle times must be positive and ascending")
    return sweep(spec, "tau_cyc", taus, workers, tol)
