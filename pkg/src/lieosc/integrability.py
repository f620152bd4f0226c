"""Integrability detection for SL(2, R) Lie systems.

Two reductions to a constant system up to a time change D(t) are detected:

* ``kcond``: a diagonal transformation diag(a, 1/a) exists, which happens
  iff [b1 + (b2'/b2 - b0'/b0)/2] / sqrt(b0 b2) is constant;
* ``quartic``: for unit-mass oscillators with F proportional to
  (u1 t + u0)^-4, the transformation [[1/V, 0], [-u1, V]], V = u1 t + u0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .system import CoefficientCurve, DerivativeUnavailable, _const
from .transform import TransformCurve

ANALYTIC_TOL = 1e-6
SAMPLED_TOL = 1e-3
ZERO_SLOPE = 1e-10


@dataclass
class IntegrabilityReport:
    family: str  # "kcond", "quartic" or "none"
    constants: dict
    residual: float
    span: tuple
    dfun: Optional[Callable] = None
    reducing_transform: Optional[TransformCurve] = None
    flags: list = field(default_factory=list)

    @property
    def integrable(self) -> bool:
        return self.family != "none"

    def reduced_coefficients(self) -> tuple[float, float, float]:
        """(c0, c1, c2) of the target system D(t) (c0 X0 + c1 X1 + c2 X2)."""
        c = self.constants
        if self.family == "kcond":
            return c["c0"], c["c1"], c["c2"]
        if self.family == "quartic":
            return 1.0, 0.0, c["c2"]
        raise ValueError("no reduced system for a non-integrable curve")

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "constants": dict(self.constants),
            "residual": self.residual,
            "span": list(self.span),
            "flags": list(self.flags),
        }


def _log_derivatives(b: CoefficientCurve, t):
    if b.db0 is None or b.db2 is None:
        raise DerivativeUnavailable(f"curve {b.name!r} lacks the derivatives of b0 and b2")
    return np.asarray(b.db0(t), dtype=float), np.asarray(b.db2(t), dtype=float)


def kcond_ratio(b: CoefficientCurve, t, c0c2: float = 1.0):
    """r(t) = [b1 + (b2'/b2 - b0'/b0)/2] sqrt(c0 c2 / (b0 b2)).

    With the default ``c0c2 = 1`` this requires b0 b2 > 0; pass ``c0c2 = -1``
    for curves with b0 b2 < 0.
    """
    bb = b(t)
    b0, b1, b2 = bb[..., 0], bb[..., 1], bb[..., 2]
    prod = b0 * b2 * c0c2
    if np.any(prod <= 0):
        raise ValueError(f"b0*b2 must be nonzero with the sign of c0*c2 = {c0c2:g}")
    db0, db2 = _log_derivatives(b, t)
    return (b1 + 0.5 * (db2 / b2 - db0 / b0)) * np.sqrt(c0c2 / (b0 * b2))


def _diagonal_reduction(b: CoefficientCurve, c0: float, c2: float) -> TransformCurve:
    # a(t) = (b2 c0 / (b0 c2))^{1/4} > 0
    def a(t):
        b0, _, b2 = b(t)
        return (b2 * c0 / (b0 * c2)) ** 0.25

    def da(t):
        b0, _, b2 = b(t)
        db0, db2 = _log_derivatives(b, t)
        return 0.25 * a(t) * (db2 / b2 - db0 / b0)

    return TransformCurve.from_entries(
        a, _const(0.0), _const(0.0), lambda t: 1.0 / a(t),
        da, _const(0.0), _const(0.0), lambda t: -da(t) / a(t) ** 2,
    )


def detect_kcond(b: CoefficientCurve, grid, tol: Optional[float] = None) -> IntegrabilityReport:
    """Test whether ``b`` reduces to a constant system by a diagonal transformation.

    The constants are normalised to c0 = 1 and c2 = sign(b0 b2); the
    negative-sign case is reported with the flag ``"negative_branch"``.
    The default tolerance is 1e-6 for analytic curves and 1e-3 for sampled
    ones.
    """
    grid = np.asarray(grid, dtype=float)
    if tol is None:
        tol = SAMPLED_TOL if b.name == "sampled" else ANALYTIC_TOL
    bb = b(grid)
    prod = bb[:, 0] * bb[:, 2]
    if np.all(prod > 0):
        c2, flags = 1.0, []
    elif np.all(prod < 0):
        c2, flags = -1.0, ["negative_branch"]
    else:
        raise ValueError("b0*b2 must be nonzero with constant sign on the grid")
    r = kcond_ratio(b, grid, c0c2=c2)
    c1 = float(np.mean(r))
    residual = float(np.max(np.abs(r - c1)))
    span = (float(grid[0]), float(grid[-1]))
    if residual > tol:
        return IntegrabilityReport("none", {}, residual, span)

    def dfun(t):
        v = b(t)
        return np.sqrt(v[..., 0] * v[..., 2] / c2)

    return IntegrabilityReport(
        "kcond", {"c0": 1.0, "c1": c1, "c2": c2}, residual, span,
        dfun=dfun, reducing_transform=_diagonal_reduction(b, 1.0, c2), flags=flags,
    )


def quartic_transform(u0: float, u1: float) -> TransformCurve:
    """[[1/V, 0], [-u1, V]] with V = u1 t + u0; unimodular by construction."""

    def V(t):
        return u1 * t + u0

    return TransformCurve(
        lambda t: np.array([[1.0 / V(t), 0.0], [-u1, V(t)]]),
        lambda t: np.array([[-u1 / V(t) ** 2, 0.0], [0.0, u1]]),
    )


def detect_quartic(F: Callable, omega: float, grid, tol: float = ANALYTIC_TOL) -> IntegrabilityReport:
    """Test whether F(t) = k/(u1 t + u0)^4 on the grid (unit-mass oscillator).

    F^{-1/4} is fitted by a straight line in t. The constant k is absorbed
    into (u0, u1), so the report carries k = 1 and c2 = omega^2.
    """
    grid = np.asarray(grid, dtype=float)
    f = np.asarray(F(grid), dtype=float) * np.ones_like(grid)
    if np.any(~(f > 0)):
        raise ValueError("detect_quartic needs F > 0 on the grid")
    y = f ** -0.25
    u1, u0 = np.polyfit(grid, y, 1)
    if abs(u1) < ZERO_SLOPE:
        u1 = 0.0
        u0 = float(np.mean(y))
    u0, u1 = float(u0), float(u1)
    residual = float(np.max(np.abs((u1 * grid + u0 - y) / y)))
    span = (float(grid[0]), float(grid[-1]))
    if residual > tol:
        return IntegrabilityReport("none", {}, residual, span)
    return IntegrabilityReport(
        "quartic", {"u0": u0, "u1": u1, "k": 1.0, "c2": omega ** 2}, residual, span,
        dfun=lambda t: 1.0 / (u1 * np.asarray(t, dtype=float) + u0) ** 2,
        reducing_transform=quartic_transform(u0, u1),
    )


def generate_family_c2tu(b0: Callable, dfun: Callable, c0: float, c1: float, c2: float, *,
                         db0: Optional[Callable] = None, ddfun: Optional[Callable] = None,
                         ddb0: Optional[Callable] = None, dddfun: Optional[Callable] = None
                         ) -> CoefficientCurve:
    """Coefficient curves reducible to D(t)(c0, c1, c2) by a diagonal transformation.

    Returns (b0, b0'/b0 - D'/D + c1 D, D^2 c0 c2 / b0). First derivatives of
    b0 and D are required; with second derivatives as well the result
    also carries b1'.
    """
    if db0 is None or ddfun is None:
        raise ValueError("generate_family_c2tu needs the derivatives db0 and ddfun")
    k = c0 * c2

    def as_f(v):
        return np.asarray(v, dtype=float)

    def b1(t):
        return as_f(db0(t)) / as_f(b0(t)) - as_f(ddfun(t)) / as_f(dfun(t)) + c1 * as_f(dfun(t))

    def b2(t):
        return as_f(dfun(t)) ** 2 * k / as_f(b0(t))

    def db2(t):
        D, B = as_f(dfun(t)), as_f(b0(t))
        return k * (2.0 * D * as_f(ddfun(t)) / B - D ** 2 * as_f(db0(t)) / B ** 2)

    db1 = None
    if ddb0 is not None and dddfun is not None:
        def db1(t):
            B, dB, D, dD = as_f(b0(t)), as_f(db0(t)), as_f(dfun(t)), as_f(ddfun(t))
            return (as_f(ddb0(t)) / B - (dB / B) ** 2
                    - as_f(dddfun(t)) / D + (dD / D) ** 2 + c1 * dD)

    return CoefficientCurve(b0, b1, b2, db0, db1, db2, name="c2tu",
                            params=dict(c0=c0, c1=c1, c2=c2))
