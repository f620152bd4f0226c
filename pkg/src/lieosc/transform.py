"""Curves in SL(2, R) acting on coefficient curves and trajectories.

A curve Abar(t) sends a solution xi of system b to Abar xi, which solves the
system b' with M' = Abar M Abar^{-1} + Abar' Abar^{-1}. The curves connecting
two given systems solve the linear matrix Riccati equation
Abar' = M' Abar - Abar M.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .ode import IvpProblem, integrate
from .sl2 import GroupElement
from .system import CoefficientCurve, Trajectory, _matrix_array, integrate_group

GAUGE_DET_TOL = 1e-8
CONNECT_RTOL = 1e-11
CONNECT_ATOL = 1e-14


@dataclass
class TransformCurve:
    """Matrix-valued curve t -> Abar(t) with access to Abar'(t).

    ``value`` and ``deriv`` take a scalar time and return 2x2 arrays.
    """

    value: Callable[[float], np.ndarray]
    deriv: Callable[[float], np.ndarray]
    grid: Optional[np.ndarray] = None

    def __call__(self, t: float) -> np.ndarray:
        return np.asarray(self.value(t), dtype=float)

    def derivative(self, t: float) -> np.ndarray:
        return np.asarray(self.deriv(t), dtype=float)

    def det(self, t: float) -> float:
        return float(np.linalg.det(self(t)))

    def element(self, t: float) -> GroupElement:
        return GroupElement.from_array(self(t))

    @classmethod
    def identity(cls) -> "TransformCurve":
        return cls.constant(np.eye(2))

    @classmethod
    def constant(cls, m) -> "TransformCurve":
        m = np.array(m, dtype=float)
        z = np.zeros((2, 2))
        return cls(lambda t: m, lambda t: z)

    @classmethod
    def from_entries(cls, a, b, c, d, da, db, dc, dd) -> "TransformCurve":
        """Build from scalar entry functions and their derivatives."""
        return cls(
            lambda t: np.array([[a(t), b(t)], [c(t), d(t)]], dtype=float),
            lambda t: np.array([[da(t), db(t)], [dc(t), dd(t)]], dtype=float),
        )

    def inverse(self) -> "TransformCurve":
        """Pointwise inverse; (A^{-1})' = -A^{-1} A' A^{-1}."""

        def inv(t):
            return np.linalg.inv(self(t))

        return TransformCurve(inv, lambda t: -inv(t) @ self.derivative(t) @ inv(t), self.grid)

    def normalized(self) -> "TransformCurve":
        """Rescale by det^{-1/2} so the curve is unimodular.

        For curves whose determinant is a constant of the motion the
        derivative is rescaled by the same factor.
        """

        def scale(t):
            return 1.0 / np.sqrt(self.det(t))

        return TransformCurve(lambda t: scale(t) * self(t),
                              lambda t: scale(t) * self.derivative(t), self.grid)


def _check_unimodular(abar: TransformCurve, t: float) -> None:
    d = abar.det(t)
    if abs(d - 1.0) > GAUGE_DET_TOL:
        raise ValueError(f"gauge curve is not unimodular at t={t:.6g}: det = {d!r}")


def _gauge_at(b: CoefficientCurve, abar: TransformCurve, t: float) -> np.ndarray:
    # M' = Abar M Abar^{-1} + Abar' Abar^{-1}, written out entrywise for det Abar = 1
    _check_unimodular(abar, t)
    b0, b1, b2 = (float(v) for v in b(t))
    (a, bb), (c, d) = abar(t)
    (da, dbb), (dc, dd) = abar.derivative(t)
    new2 = d * d * b2 - d * c * b1 + c * c * b0 + c * dd - d * dc
    new1 = (-2.0 * bb * d * b2 + (a * d + bb * c) * b1 - 2.0 * a * c * b0
            + d * da - a * dd + bb * dc - c * dbb)
    new0 = bb * bb * b2 - a * bb * b1 + a * a * b0 + a * dbb - bb * da
    return np.array([new0, new1, new2])


def gauge_transform_coeffs(b: CoefficientCurve, abar: TransformCurve) -> CoefficientCurve:
    """Coefficients of the system obeyed by Abar xi when xi solves ``b``.

    The returned curve evaluates lazily; every evaluation checks that Abar is
    unimodular at that time. It carries no derivatives.
    """

    def triple(t):
        t_arr = np.asarray(t, dtype=float)
        if t_arr.ndim == 0:
            return _gauge_at(b, abar, float(t_arr))
        return np.stack([_gauge_at(b, abar, float(s)) for s in t_arr.ravel()]).reshape(t_arr.shape + (3,))

    def entry(i):
        return lambda t: triple(t)[..., i]

    return CoefficientCurve(entry(0), entry(1), entry(2), name=f"gauge({b.name})",
                            blowup_time=b.blowup_time, span=b.span, triple=triple)


def transform_trajectory(abar: TransformCurve, traj: Trajectory) -> Trajectory:
    """Pointwise action xi'(t) = Abar(t) xi(t)."""
    states = np.array([abar(t) @ s for t, s in zip(traj.grid, traj.states)])
    return Trajectory(traj.grid.copy(), states)


def compose_action(a2: TransformCurve, a1: TransformCurve) -> TransformCurve:
    """The curve t -> A2(t) A1(t); acting with it equals acting with A1 then A2."""
    return TransformCurve(
        lambda t: a2(t) @ a1(t),
        lambda t: a2.derivative(t) @ a1(t) + a2(t) @ a1.derivative(t),
        a1.grid if a1.grid is not None else a2.grid,
    )


def riccati_rhs_matrix(b: CoefficientCurve, bprime: CoefficientCurve, t: float) -> np.ndarray:
    """4x4 matrix of the connecting equation acting on (alpha, beta, gamma, delta)."""
    b0, b1, b2 = (float(v) for v in b(t))
    q0, q1, q2 = (float(v) for v in bprime(t))
    return np.array([
        [0.5 * (q1 - b1), b2, q0, 0.0],
        [-b0, 0.5 * (q1 + b1), 0.0, q0],
        [-q2, 0.0, -0.5 * (q1 + b1), b2],
        [0.0, -q2, -b0, -0.5 * (q1 - b1)],
    ])


def integrate_connecting(b: CoefficientCurve, bprime: CoefficientCurve, a0, grid,
                         rel_tol: float = CONNECT_RTOL, abs_tol: float = CONNECT_ATOL,
                         method: str = "group") -> np.ndarray:
    """Solutions of the connecting equation from ``a0``, shape (n, 2, 2).

    Any initial matrix is accepted; det is a first integral of the flow.
    ``method="group"`` (default) uses Abar(t) = A'(t) a0 A(t)^{-1} with the
    unimodular group solutions A of ``b`` and A' of ``bprime``, which keeps
    det(Abar) = det(a0) to rounding even when the solution grows.
    ``method="direct"`` integrates the linear 4-dimensional system.
    """
    grid = np.asarray(grid, dtype=float)
    b.check_span(grid[0], grid[-1])
    bprime.check_span(grid[0], grid[-1])
    y0 = np.asarray(a0.to_array() if isinstance(a0, GroupElement) else a0, dtype=float)
    if y0.shape != (2, 2):
        raise ValueError(f"initial matrix must be 2x2, got shape {y0.shape}")
    if grid.size == 1:
        return y0[None].copy()
    if method == "group":
        A = integrate_group(b, grid, rel_tol=rel_tol, abs_tol=abs_tol).matrices
        Ap = integrate_group(bprime, grid, rel_tol=rel_tol, abs_tol=abs_tol).matrices
        # inverse of a unimodular matrix is its adjugate
        Ainv = np.empty_like(A)
        Ainv[:, 0, 0], Ainv[:, 1, 1] = A[:, 1, 1], A[:, 0, 0]
        Ainv[:, 0, 1], Ainv[:, 1, 0] = -A[:, 0, 1], -A[:, 1, 0]
        return Ap @ y0 @ Ainv
    if method != "direct":
        raise ValueError(f"unknown method {method!r}; expected 'group' or 'direct'")

    def rhs(t, y):
        return riccati_rhs_matrix(b, bprime, t) @ y

    sol = integrate(IvpProblem(rhs, grid[0], grid[-1], y0.ravel(), rel_tol, abs_tol), grid)
    return sol.values.reshape(-1, 2, 2)


def solve_connecting_curve(b: CoefficientCurve, bprime: CoefficientCurve, abar0: GroupElement,
                           grid, rel_tol: float = CONNECT_RTOL, abs_tol: float = CONNECT_ATOL,
                           method: str = "group") -> TransformCurve:
    """Curve in SL(2, R) from ``abar0`` carrying system ``b`` onto ``bprime``.

    Between grid nodes the entries are spline-interpolated; the derivative is
    taken from the equation itself, Abar' = M' Abar - Abar M.
    """
    if not abar0.is_unimodular():
        raise ValueError(f"initial transformation must have det 1, got {abar0.det()!r}")
    grid = np.asarray(grid, dtype=float)
    mats = integrate_connecting(b, bprime, abar0, grid, rel_tol, abs_tol, method)
    spline = CubicSpline(grid, mats.reshape(-1, 4)) if grid.size > 1 else None

    def value(t):
        i = np.searchsorted(grid, t)
        if i < grid.size and grid[i] == t:
            return mats[i]
        return spline(t).reshape(2, 2)

    def deriv(t):
        a = value(t)
        return _matrix_array(bprime, t) @ a - a @ _matrix_array(b, t)

    return TransformCurve(value, deriv, grid)
