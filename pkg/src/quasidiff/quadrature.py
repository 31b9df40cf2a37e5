"""Composite Gauss--Legendre quadrature on a panel grid.

Panels are the integrator steps, on which dense output is a polynomial, so a
handful of nodes per panel is already exact up to rounding for products of
two interpolants.
"""

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def _gauss(nodes):
    return np.polynomial.legendre.leggauss(nodes)


def panel_quadrature(func, grid, nodes=8):
    """Composite Gauss--Legendre sum of ``func`` over the panels of ``grid``."""
    grid = np.asarray(grid, dtype=float)
    x, w = _gauss(nodes)
    lo, hi = grid[:-1], grid[1:]
    half = 0.5 * (hi - lo)
    t = (0.5 * (hi + lo))[:, None] + half[:, None] * x[None, :]
    vals = np.asarray(func(t.ravel())).reshape(t.shape)
    return complex(np.sum(vals * w[None, :] * half[:, None]))


def integrate_doubling(func, grid, nodes=8, rtol=1e-12, max_doublings=3):
    """Panel quadrature with node doubling until two values agree to ``rtol``.

    Returns ``(value, converged)``.
    """
    prev = panel_quadrature(func, grid, nodes)
    for _ in range(max_doublings):
        nodes *= 2
        cur = panel_quadrature(func, grid, nodes)
        if abs(cur - prev) <= rtol * max(abs(cur), 1e-300) or abs(cur - prev) < 1e-15:
            return cur, True
        prev = cur
    return prev, False


def l2_norm_on(func, grid):
    """``sqrt(integral |func|**2)`` on a panel grid (``func`` may return rows of vectors)."""

    def sq(t):
        v = np.abs(np.asarray(func(t))) ** 2
        return v.reshape(len(t), -1).sum(axis=1)

    val, _ = integrate_doubling(sq, grid)
    return float(np.sqrt(abs(val)))
