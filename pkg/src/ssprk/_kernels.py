"""Hot spatial kernels for the conservation-law experiment.

The flux evaluation dominates the step-size sweeps, so it is JIT-compiled
when numba is importable.  Set ``SSPRK_PURE_NUMPY=1`` to force the vectorized
numpy implementations (also used automatically when numba is missing).
``benchmarks/bench_kernels.py`` times the two paths against each other.
"""

from __future__ import annotations

import math
import os

import numpy as np

_FORCE_NUMPY = os.environ.get("SSPRK_PURE_NUMPY", "").strip() not in ("", "0")


def _bl_rhs_numpy(u: np.ndarray, dx: float, eps: float) -> np.ndarray:
    up = np.roll(u, -1)
    d = up - u
    theta = (u - np.roll(u, 1)) / (d + np.copysign(eps, d))
    phi = np.maximum(0.0, np.minimum(np.minimum(2.0, 2.0 / 3.0 + theta / 3.0),
                                     2.0 * theta))
    face = u + 0.5 * phi * d
    flux = face * face / (face * face + (1.0 - face) ** 2 / 3.0)
    return (np.roll(flux, 1) - flux) / dx


def _tv_numpy(u: np.ndarray) -> float:
    return float(np.abs(np.roll(u, -1) - u).sum())


def _bl_rhs_loop(u: np.ndarray, dx: float, eps: float) -> np.ndarray:
    n = u.shape[0]
    flux = np.empty(n)
    for j in range(n):
        um = u[j - 1] if j > 0 else u[n - 1]
        uc = u[j]
        up = u[j + 1] if j < n - 1 else u[0]
        d = up - uc
        theta = (uc - um) / (d + math.copysign(eps, d))
        phi = max(0.0, min(2.0, 2.0 / 3.0 + theta / 3.0, 2.0 * theta))
        face = uc + 0.5 * phi * d
        flux[j] = face * face / (face * face + (1.0 - face) ** 2 / 3.0)
    out = np.empty(n)
    for j in range(n):
        out[j] = (flux[j - 1 if j > 0 else n - 1] - flux[j]) / dx
    return out


def _tv_loop(u: np.ndarray) -> float:
    n = u.shape[0]
    total = 0.0
    for j in range(n):
        nxt = u[j + 1] if j < n - 1 else u[0]
        total += abs(nxt - u[j])
    return total


USING_NUMBA = False
bl_rhs_kernel = _bl_rhs_numpy
tv_kernel = _tv_numpy

if not _FORCE_NUMPY:
    try:
        from numba import njit
    except ImportError:
        pass
    else:
        bl_rhs_kernel = njit(cache=True)(_bl_rhs_loop)
        tv_kernel = njit(cache=True)(_tv_loop)
        USING_NUMBA = True
