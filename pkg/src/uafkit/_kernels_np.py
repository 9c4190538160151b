"""Pure-NumPy kernels for elementwise UAF evaluation and gradients.

This module and ``_kernels_cy`` expose the same two functions with identical
signatures; ``_backend`` picks one at import time. Everything here operates on
contiguous float64 arrays and returns freshly allocated arrays.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "numpy"


def _softplus(z: np.ndarray) -> np.ndarray:
    """Overflow-safe softplus: max(z, 0) + log1p(e^{-|z|})."""
    return np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))


def _logistic(z: np.ndarray) -> np.ndarray:
    """Overflow-safe logistic sigma(z) = 1 / (1 + e^{-z})."""
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def uaf_eval(
    xs: np.ndarray, A: float, B: float, C: float, D: float, E: float
) -> np.ndarray:
    """Stable elementwise f(x) = softplus(A(x+B)+Cx^2) - softplus(D(x-B)) + E."""
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    z1 = A * (xs + B) + C * xs * xs
    z2 = D * (xs - B)
    return _softplus(z1) - _softplus(z2) + E


def uaf_grad(
    xs: np.ndarray, A: float, B: float, C: float, D: float, E: float
) -> np.ndarray:
    """Elementwise first derivatives of the UAF.

    Returns an (n, 6) array with columns (df/dx, df/dA, df/dB, df/dC, df/dD,
    df/dE), where with z1 = A(x+B)+Cx^2, z2 = D(x-B), s = logistic:

        df/dx = s(z1)(A + 2Cx) - s(z2)D
        df/dA = s(z1)(x + B)
        df/dB = s(z1)A + s(z2)D
        df/dC = s(z1)x^2
        df/dD = -s(z2)(x - B)
        df/dE = 1
    """
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    z1 = A * (xs + B) + C * xs * xs
    z2 = D * (xs - B)
    s1 = _logistic(z1)
    s2 = _logistic(z2)
    out = np.empty((xs.shape[0], 6), dtype=np.float64)
    out[:, 0] = s1 * (A + 2.0 * C * xs) - s2 * D
    out[:, 1] = s1 * (xs + B)
    out[:, 2] = s1 * A + s2 * D
    out[:, 3] = s1 * xs * xs
    out[:, 4] = -s2 * (xs - B)
    out[:, 5] = 1.0
    return out
