"""Periodic 1-D minimization: dense grid followed by golden-section refinement."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
TWO_PI = 2.0 * math.pi


def golden_section(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10,
                   max_iter: int = 200) -> tuple[float, float]:
    """Minimize a unimodal ``f`` on ``[a, b]`` to an absolute tolerance in x.

    Returns ``(x, f(x))`` for the best point evaluated.
    """
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    best = (c, fc) if fc <= fd else (d, fd)
    it = 0
    while abs(b - a) > tol and it < max_iter:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
            if fc < best[1]:
                best = (c, fc)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
            if fd < best[1]:
                best = (d, fd)
        it += 1
    return best


def minimize_periodic(f: Callable[[float], float], f_grid: Callable[[np.ndarray], np.ndarray] | None = None,
                      n_grid: int = 720, period: float = TWO_PI, tol: float = 1e-10) -> tuple[float, float]:
    """Global minimum of a ``period``-periodic function of one angle.

    The function is sampled on ``n_grid`` equispaced points (vectorized through
    ``f_grid`` when given); the best sample's neighbours bracket a
    golden-section refinement. Returns ``(argmin in [0, period), min)``.
    """
    grid = np.arange(n_grid) * (period / n_grid)
    if f_grid is not None:
        vals = np.asarray(f_grid(grid), dtype=float)
    else:
        vals = np.array([f(x) for x in grid])
    k = int(np.argmin(vals))
    step = period / n_grid
    x, fx = golden_section(f, grid[k] - step, grid[k] + step, tol=tol)
    if vals[k] < fx:
        x, fx = grid[k], float(vals[k])
    return float(x % period), float(fx)


def maximize_periodic(f, f_grid=None, n_grid: int = 720, period: float = TWO_PI,
                      tol: float = 1e-10) -> tuple[float, float]:
    g = (lambda x: -f(x))
    gg = None if f_grid is None else (lambda xs: -np.asarray(f_grid(xs)))
    x, v = minimize_periodic(g, gg, n_grid=n_grid, period=period, tol=tol)
    return x, -v
