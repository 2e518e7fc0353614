"""Finite-difference Wirtinger calculus on complex chart coordinates.

Write z^k = x^k + i y^k.  Then

    d/dz^k    = (d/dx^k - i d/dy^k) / 2,
    d/dzbar^k = (d/dx^k + i d/dy^k) / 2.

All real partials use 4th-order central stencils with relative step
``rel * (1 + |z_k|)``; higher derivatives nest the stencil.  Functions may be
scalar- or array-valued (anything numpy can add and scale).
"""

from __future__ import annotations

import numpy as np

DEFAULT_REL_STEP = 1e-3


def _shifted(z: np.ndarray, k: int, part: int, delta: float) -> np.ndarray:
    w = np.array(z, dtype=complex)
    w[k] = w[k] + (delta if part == 0 else 1j * delta)
    return w


def step_for(z: np.ndarray, k: int, rel: float) -> float:
    return rel * (1.0 + abs(z[k]))


def real_partial(fun, z, k, part, h):
    """4th-order central d/dx^k (part=0) or d/dy^k (part=1) of fun at z."""
    return (
        fun(_shifted(z, k, part, -2 * h))
        - 8.0 * fun(_shifted(z, k, part, -h))
        + 8.0 * fun(_shifted(z, k, part, h))
        - fun(_shifted(z, k, part, 2 * h))
    ) / (12.0 * h)


def d_hol(fun, z, k, rel=DEFAULT_REL_STEP):
    """d fun / dz^k at z."""
    h = step_for(z, k, rel)
    return 0.5 * (real_partial(fun, z, k, 0, h) - 1j * real_partial(fun, z, k, 1, h))


def d_antihol(fun, z, k, rel=DEFAULT_REL_STEP):
    """d fun / dzbar^k at z."""
    h = step_for(z, k, rel)
    return 0.5 * (real_partial(fun, z, k, 0, h) + 1j * real_partial(fun, z, k, 1, h))


def d2_mixed(fun, z, k, l, rel=DEFAULT_REL_STEP):
    """d^2 fun / dz^k dzbar^l by nested stencils."""
    return d_hol(lambda w: d_antihol(fun, w, l, rel), z, k, rel)


def d2_hol(fun, z, k, l, rel=DEFAULT_REL_STEP):
    """d^2 fun / dz^k dz^l by nested stencils."""
    return d_hol(lambda w: d_hol(fun, w, l, rel), z, k, rel)


def d3_hhm(fun, z, i, j, k, rel=DEFAULT_REL_STEP):
    """d^3 fun / dz^i dz^j dzbar^k by nested stencils."""
    return d_hol(lambda w: d2_mixed(fun, w, j, k, rel), z, i, rel)


def stencil_radius(z: np.ndarray, rel: float, order: int) -> float:
    """Worst-case real-coordinate excursion of the nested stencil at z."""
    h = rel * (1.0 + float(np.max(np.abs(z)))) if len(z) else rel
    return 2.0 * order * h
