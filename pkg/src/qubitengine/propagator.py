"""Affine maps on the (<H>, <L>, <C>) expectation values."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class StrokePropagator:
    """``v_out = matrix @ v_in + offset`` for one stroke.

    Composition follows application order: ``(b @ a)`` applies ``a`` first.
    """

    matrix: np.ndarray
    offset: np.ndarray = None

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float).reshape(3, 3)
        b = np.zeros(3) if self.offset is None else np.array(self.offset, dtype=float).reshape(3)
        m.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "offset", b)

    @classmethod
    def identity(cls):
        return cls(np.eye(3))

    @classmethod
    def from_augmented(cls, m4):
        m4 = np.asarray(m4, dtype=float)
        return cls(m4[:3, :3], m4[:3, 3])

    def augmented(self):
        m4 = np.eye(4)
        m4[:3, :3] = self.matrix
        m4[:3, 3] = self.offset
        return m4

    def apply(self, v):
        return self.matrix @ np.asarray(v, dtype=float) + self.offset

    def __matmul__(self, other):
        return StrokePropagator(self.matrix @ other.matrix, self.matrix @ other.offset + self.offset)
