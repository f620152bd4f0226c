"""Numerical backbone: adaptive Runge-Kutta, quadrature, sampled derivatives."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import RK45, quad

DEFAULT_RTOL = 1e-9
DEFAULT_ATOL = 1e-12


class IntegrationError(RuntimeError):
    """Raised when an integration cannot continue.

    ``last_good_time`` is the last time at which the state was accepted.
    """

    def __init__(self, message: str, last_good_time: float):
        super().__init__(f"{message} (last good time t={last_good_time:.17g})")
        self.last_good_time = last_good_time


class _NonFinite(Exception):
    def __init__(self, t):
        self.t = t


@dataclass
class IvpProblem:
    """First-order initial value problem y' = rhs(t, y) on [t0, t1]."""

    rhs: Callable[[float, np.ndarray], np.ndarray]
    t0: float
    t1: float
    y0: np.ndarray
    rel_tol: float = DEFAULT_RTOL
    abs_tol: float = DEFAULT_ATOL

    def __post_init__(self):
        self.y0 = np.atleast_1d(np.asarray(self.y0, dtype=float))
        if not self.t1 > self.t0:
            raise ValueError(f"need t1 > t0, got t0={self.t0}, t1={self.t1}")
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")

    @property
    def dimension(self) -> int:
        return self.y0.size


@dataclass
class SampledCurve:
    """Vector-valued samples on a strictly increasing time grid."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.grid.ndim != 1 or self.grid.size == 0:
            raise ValueError("grid must be a non-empty 1-d array")
        if len(self.values) != self.grid.size:
            raise ValueError(
                f"grid has {self.grid.size} points but values has {len(self.values)}"
            )
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")

    @property
    def span(self) -> tuple[float, float]:
        return float(self.grid[0]), float(self.grid[-1])


def integrate(problem: IvpProblem, output_grid) -> SampledCurve:
    """Integrate ``problem`` with the Dormand-Prince 5(4) pair.

    Values on ``output_grid`` come from the pair's dense output. Every grid
    point must lie in [t0, t1].
    """
    grid = np.asarray(output_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("output grid must be a non-empty 1-d array")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("output grid must be strictly increasing")
    if grid[0] < problem.t0 or grid[-1] > problem.t1:
        raise ValueError(
            f"output grid [{grid[0]}, {grid[-1]}] leaves [{problem.t0}, {problem.t1}]"
        )

    def fun(t, y):
        dy = np.asarray(problem.rhs(t, y), dtype=float)
        if not np.all(np.isfinite(dy)):
            raise _NonFinite(t)
        return dy

    out = np.empty((grid.size, problem.dimension))
    k = 0
    while k < grid.size and grid[k] == problem.t0:
        out[k] = problem.y0
        k += 1

    last_good = problem.t0
    try:
        solver = RK45(fun, problem.t0, problem.y0, problem.t1,
                      rtol=problem.rel_tol, atol=problem.abs_tol)
        while k < grid.size:
            message = solver.step()
            if solver.status == "failed":
                raise IntegrationError(f"step size underflow: {message}", last_good)
            if not np.all(np.isfinite(solver.y)):
                raise IntegrationError("state became non-finite", last_good)
            last_good = solver.t
            j = k
            while j < grid.size and grid[j] <= solver.t:
                j += 1
            if j > k:
                dense = solver.dense_output()
                for i in range(k, j):
                    out[i] = solver.y if grid[i] == solver.t else dense(grid[i])
                k = j
    except _NonFinite as exc:
        raise IntegrationError(
            f"right-hand side returned a non-finite value at t={exc.t:.17g}", last_good
        ) from None
    return SampledCurve(grid, out)


def quadrature(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10) -> float:
    """Adaptive Gauss-Kronrod estimate of the integral of f over [a, b]."""
    if a == b:
        return 0.0

    def checked(t):
        v = f(t)
        if not math.isfinite(v):
            raise ValueError(f"integrand is non-finite at t={t:.17g}")
        return v

    value, err = quad(checked, a, b, epsabs=tol, epsrel=0.0, limit=200)
    return float(value)


def sampled_derivative(curve: SampledCurve, t):
    """Finite-difference derivative of a sampled curve at time(s) ``t``.

    Node derivatives use the three-point stencil on the local (possibly
    non-uniform) spacing, one-sided second order at both ends; off-node
    times are linearly interpolated between neighbouring nodes.
    """
    if curve.grid.size < 3:
        raise ValueError("need at least three samples for a second-order stencil")
    t_arr = np.asarray(t, dtype=float)
    lo, hi = curve.span
    if np.any(t_arr < lo) or np.any(t_arr > hi):
        raise ValueError(f"t={t} lies outside the sampled span [{lo}, {hi}]")
    d = np.gradient(curve.values, curve.grid, axis=0, edge_order=2)
    if d.ndim == 1:
        return np.interp(t_arr, curve.grid, d)
    cols = [np.interp(t_arr, curve.grid, d[:, i]) for i in range(d.shape[1])]
    return np.stack(cols, axis=-1)
