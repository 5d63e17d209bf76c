"""Fourth-order Magnus propagators for linear ODEs with time-dependent generators."""

from __future__ import annotations

import numpy as np


def skew_exp(W):
    """Batched exponential of 3x3 skew matrices (Rodrigues)."""
    w = np.stack([W[:, 2, 1], W[:, 0, 2], W[:, 1, 0]], axis=1)
    th = np.linalg.norm(w, axis=1)
    small = th < 1e-8
    ths = np.where(small, 1.0, th)
    a = np.where(small, 1.0 - th**2 / 6.0, np.sin(ths) / ths)
    b = np.where(small, 0.5 - th**2 / 24.0, (1.0 - np.cos(ths)) / ths**2)
    W2 = W @ W
    return np.eye(3) + a[:, None, None] * W + b[:, None, None] * W2


def prefix_products(E):
    """P[k] = E[k-1] ... E[0] with P[0] = I (Hillis-Steele scan)."""
    n, d, _ = E.shape
    out = np.empty((n + 1, d, d))
    out[0] = np.eye(d)
    acc = E.copy()
    shift = 1
    while shift < n:
        acc[shift:] = acc[shift:] @ acc[:-shift]
        shift *= 2
    out[1:] = acc
    return out


_CHUNK = 20_000


def _magnus4_steps(t, generator_at):
    """Fourth-order Magnus exponents on every interval of the grid ``t``."""
    h = np.diff(t)
    mid = 0.5 * (t[1:] + t[:-1])
    off = h / (2.0 * np.sqrt(3.0))
    A1 = generator_at(mid - off)
    A2 = generator_at(mid + off)
    comm = A2 @ A1 - A1 @ A2
    return 0.5 * h[:, None, None] * (A1 + A2) + (np.sqrt(3.0) / 12.0) * (h * h)[:, None, None] * comm


def magnus_path(t, generator_at, exp, dim):
    """Propagators from t[0] to every t[k], built chunk by chunk to bound memory."""
    out = np.empty((t.size, dim, dim))
    out[0] = np.eye(dim)
    for i0 in range(0, t.size - 1, _CHUNK):
        i1 = min(i0 + _CHUNK, t.size - 1)
        P = prefix_products(exp(_magnus4_steps(t[i0:i1 + 1], generator_at)))
        out[i0 + 1:i1 + 1] = P[1:] @ out[i0]
    return out
