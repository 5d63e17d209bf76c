"""Time-sampled control records for a single stroke.

The Hamiltonian is H = omega Sz + epsilon Sx (+ upsilon Sy), parameterized by
Omega = sqrt(omega^2 + epsilon^2) and the angle phi, so that
omega = Omega cos(phi) and epsilon = Omega sin(phi).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError

DEFAULT_STEP = 1e-3
KINDS = ("unitary", "open", "isochore")
CSV_COLUMNS = ("t", "omega", "epsilon", "Omega", "phi", "mu", "alpha")


def time_grid(tau, dt=DEFAULT_STEP, min_points=3):
    """Uniform grid on [0, tau] with spacing as close to ``dt`` as fits."""
    if tau < 0:
        raise DomainError("duration must be non-negative")
    n = max(min_points - 1, int(round(tau / dt)))
    return np.linspace(0.0, tau, n + 1)


@dataclass(frozen=True, eq=False)
class Schedule:
    """Controls sampled on a grid ``t`` spanning one stroke.

    Parameters
    ----------
    t : array
        Sample times starting at 0.
    Omega, phi, phidot : array
        Rabi frequency, Hamiltonian angle and its time derivative.
    kind : str
        ``unitary``, ``open`` or ``isochore``.
    upsilon : array, optional
        Counter-diabatic Sy coefficient.
    piecewise : bool
        Treat controls as held constant between samples (bang-bang records).
    """

    t: np.ndarray
    Omega: np.ndarray
    phi: np.ndarray
    phidot: np.ndarray
    kind: str = "unitary"
    upsilon: np.ndarray | None = None
    piecewise: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown stroke kind {self.kind!r}")
        t = np.asarray(self.t, dtype=float)
        n = t.size
        arrays = {}
        for name in ("Omega", "phi", "phidot", "upsilon"):
            val = getattr(self, name)
            if val is None:
                continue
            a = np.broadcast_to(np.asarray(val, dtype=float), (n,)).copy()
            a.flags.writeable = False
            arrays[name] = a
        if n < 2 or np.any(np.diff(t) <= 0):
            raise DomainError("time grid must be increasing with at least two samples")
        if np.any(arrays["Omega"] <= 0):
            raise DomainError("Omega must stay positive")
        t.flags.writeable = False
        object.__setattr__(self, "t", t)
        for k, a in arrays.items():
            object.__setattr__(self, k, a)

    # constructors -----------------------------------------------------

    @classmethod
    def from_controls(cls, t, omega, epsilon, upsilon=None, kind="unitary", piecewise=False):
        t = np.asarray(t, dtype=float)
        omega = np.broadcast_to(np.asarray(omega, dtype=float), t.shape)
        epsilon = np.broadcast_to(np.asarray(epsilon, dtype=float), t.shape)
        Omega = np.hypot(omega, epsilon)
        phi = np.unwrap(np.arctan2(epsilon, omega))
        if piecewise:
            phidot = np.zeros_like(t)
        else:
            phidot = CubicSpline(t, phi).derivative()(t)
        return cls(t, Omega, phi, phidot, kind, upsilon, piecewise)

    @classmethod
    def constant(cls, Omega, tau, dt=DEFAULT_STEP, phi=0.0, kind="isochore"):
        t = time_grid(tau, dt)
        return cls(t, np.full(t.size, Omega), np.full(t.size, phi), np.zeros(t.size), kind)

    # derived quantities -----------------------------------------------

    @property
    def duration(self):
        return float(self.t[-1] - self.t[0])

    @property
    def omega(self):
        return self.Omega * np.cos(self.phi)

    @property
    def epsilon(self):
        return self.Omega * np.sin(self.phi)

    @property
    def mu(self):
        return -self.phidot / self.Omega

    @property
    def kappa(self):
        return np.sqrt(1.0 + self.mu**2)

    @property
    def alpha(self):
        return np.sqrt(self.Omega**2 + self.phidot**2)

    @cached_property
    def _splines(self):
        sp = {
            "Omega": CubicSpline(self.t, self.Omega),
            "phi": CubicSpline(self.t, self.phi),
            "phidot": CubicSpline(self.t, self.phidot),
        }
        if self.upsilon is not None:
            sp["upsilon"] = CubicSpline(self.t, self.upsilon)
        return sp

    @property
    def Omegadot(self):
        if self.piecewise:
            return np.zeros_like(self.t)
        return self._splines["Omega"].derivative()(self.t)

    @cached_property
    def theta(self):
        """Accumulated phase int_0^t Omega dt' on the grid."""
        if self.piecewise:
            return np.concatenate([[0.0], np.cumsum(self.Omega[:-1] * np.diff(self.t))])
        return self._splines["Omega"].antiderivative()(self.t)

    def at(self, name, t):
        """Control ``name`` evaluated at arbitrary times inside the stroke."""
        if self.piecewise:
            idx = np.clip(np.searchsorted(self.t, t, side="right") - 1, 0, self.t.size - 1)
            src = getattr(self, name)
            return np.zeros_like(np.asarray(t, dtype=float)) if src is None else src[idx]
        if name == "upsilon" and self.upsilon is None:
            return np.zeros_like(np.asarray(t, dtype=float))
        if name == "mu":
            return -self.at("phidot", t) / self.at("Omega", t)
        if name == "Omegadot":
            return self._splines["Omega"].derivative()(t)
        return self._splines[name](t)

    def is_constant_mu(self, tol=1e-10):
        mu = self.mu
        return bool(np.ptp(mu) <= tol * max(1.0, np.max(np.abs(mu))))

    def replace(self, **changes):
        fields = dict(t=self.t, Omega=self.Omega, phi=self.phi, phidot=self.phidot,
                      kind=self.kind, upsilon=self.upsilon, piecewise=self.piecewise)
        fields.update(changes)
        return Schedule(**fields)


# tabular export --------------------------------------------------------


def _fmt(x, digits=None):
    return repr(float(x)) if digits is None else format(float(x), f".{digits}g")


def schedule_rows(schedule, digits=None):
    cols = np.column_stack([schedule.t, schedule.omega, schedule.epsilon, schedule.Omega,
                            schedule.phi, schedule.mu, schedule.alpha])
    return [[_fmt(x, digits) for x in row] for row in cols]


def schedule_export(schedule, target=None, metadata=None, digits=None):
    """Write the schedule as CSV text and return the text.

    Values are written with ``digits`` significant digits, or in the shortest
    form that reads back bit-identically when ``digits`` is None. A trailing
    ``# key=value`` block (sorted by key) records the stroke kind plus any
    caller metadata.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    w.writerows(schedule_rows(schedule, digits))
    meta = {"kind": schedule.kind, "piecewise": int(schedule.piecewise)}
    meta.update(metadata or {})
    for k in sorted(meta):
        buf.write(f"# {k}={meta[k]}\n")
    text = buf.getvalue()
    if target is not None:
        Path(target).write_text(text)
    return text


def schedule_import(source):
    """Read a schedule written by :func:`schedule_export` (path or text)."""
    if isinstance(source, (str, Path)) and "\n" not in str(source):
        text = Path(source).read_text()
    else:
        text = str(source)
    meta = {}
    data_lines = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            meta[key.strip()] = val.strip()
        elif line.strip():
            data_lines.append(line)
    rows = list(csv.reader(data_lines))
    if tuple(rows[0]) != CSV_COLUMNS:
        raise DomainError(f"unexpected header {rows[0]}")
    a = np.array(rows[1:], dtype=float)
    t, _, _, Omega, phi, mu = (a[:, i] for i in range(6))
    return Schedule(t, Omega, phi, -mu * Omega, meta.get("kind", "unitary"),
                    piecewise=bool(int(meta.get("piecewise", "0"))))
