"""Sampled stroke trajectories in the v frame."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .su2 import SQRT2, BlochState


@dataclass(frozen=True, eq=False)
class Trajectory:
    """State samples along one stroke plus the controls that produced them.

    ``v`` holds (<H>, <L>, <C>) per sample. For dissipative strokes
    ``chi_axis`` is the unit chi direction (in v/Omega coordinates) that the
    dissipator relaxes along, and ``Gamma`` / ``delta`` are k_down + k_up and
    k_down - k_up at each sample.
    """

    t: np.ndarray
    v: np.ndarray
    Omega: np.ndarray
    phi: np.ndarray
    mu: np.ndarray
    Omegadot: np.ndarray
    kind: str = "unitary"
    chi_axis: np.ndarray | None = None
    Gamma: np.ndarray | None = None
    delta: np.ndarray | None = None
    alpha: np.ndarray | None = None
    T: float | None = None
    dephasing: float = 0.0
    label: str = ""
    bath_tag: str | None = None

    @property
    def u(self):
        return self.v / self.Omega[:, None]

    @property
    def energy(self):
        return self.v[:, 0]

    @property
    def polarization(self):
        return np.linalg.norm(self.u, axis=1)

    @property
    def coherence(self):
        return np.hypot(self.v[:, 1], self.v[:, 2]) / self.Omega

    @property
    def casimir(self):
        return np.sum(self.u**2, axis=1)

    def state(self, i):
        return BlochState(self.v[i], "v", float(self.Omega[i]))

    @property
    def final(self):
        return self.state(-1)

    def eigen_coefficients(self):
        """Interaction-picture (c_chi, |c_sigma| sqrt2 split) per sample.

        Returns an (N, 3) array (c_chi, c_perp, 0) where c_perp is the norm of
        the sigma part; the dissipator is isotropic in the sigma plane so the
        phase is irrelevant for rates and entropy production.
        """
        if self.chi_axis is None:
            raise ValueError("trajectory has no dissipator axis")
        u = self.u
        par = np.sum(u * self.chi_axis, axis=1)
        perp = np.linalg.norm(u - par[:, None] * self.chi_axis, axis=1)
        return np.column_stack([SQRT2 * par, SQRT2 * perp, np.zeros_like(par)])
