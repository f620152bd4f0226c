"""Small-matrix algebra for sl(2, R) and SL(2, R).

Elements are stored as plain scalars. Traceless matrices keep three
independent entries, group elements keep four.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DET_TOL = 1e-9
# Below this |det X| the exponential switches to its power-series form.
PARABOLIC_GUARD = 1e-12


@dataclass(frozen=True)
class Traceless:
    """Traceless 2x2 matrix [[m11, m12], [m21, -m11]]."""

    m11: float
    m12: float
    m21: float

    @property
    def m22(self) -> float:
        return -self.m11

    @classmethod
    def from_array(cls, a) -> "Traceless":
        a = np.asarray(a, dtype=float)
        if a.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {a.shape}")
        # the trace part is projected out
        h = 0.5 * (a[0, 0] - a[1, 1])
        return cls(float(h), float(a[0, 1]), float(a[1, 0]))

    def to_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, -self.m11]])

    def det(self) -> float:
        return -self.m11 * self.m11 - self.m12 * self.m21

    def __add__(self, other: "Traceless") -> "Traceless":
        return Traceless(self.m11 + other.m11, self.m12 + other.m12, self.m21 + other.m21)

    def __sub__(self, other: "Traceless") -> "Traceless":
        return Traceless(self.m11 - other.m11, self.m12 - other.m12, self.m21 - other.m21)

    def __neg__(self) -> "Traceless":
        return Traceless(-self.m11, -self.m12, -self.m21)

    def __mul__(self, s: float) -> "Traceless":
        return Traceless(s * self.m11, s * self.m12, s * self.m21)

    __rmul__ = __mul__


@dataclass(frozen=True)
class GroupElement:
    """Real 2x2 matrix [[alpha, beta], [gamma, delta]]."""

    alpha: float
    beta: float
    gamma: float
    delta: float

    @classmethod
    def identity(cls) -> "GroupElement":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def from_array(cls, a) -> "GroupElement":
        a = np.asarray(a, dtype=float)
        if a.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {a.shape}")
        return cls(float(a[0, 0]), float(a[0, 1]), float(a[1, 0]), float(a[1, 1]))

    def to_array(self) -> np.ndarray:
        return np.array([[self.alpha, self.beta], [self.gamma, self.delta]])

    def det(self) -> float:
        return self.alpha * self.delta - self.beta * self.gamma

    def is_unimodular(self, tol: float = DET_TOL) -> bool:
        return abs(self.det() - 1.0) <= tol

    def inverse(self) -> "GroupElement":
        d = self.det()
        if d == 0.0:
            raise ZeroDivisionError("singular matrix has no inverse")
        return GroupElement(self.delta / d, -self.beta / d, -self.gamma / d, self.alpha / d)

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        a, b, c, d = self.alpha, self.beta, self.gamma, self.delta
        e, f, g, h = other.alpha, other.beta, other.gamma, other.delta
        return GroupElement(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def act(self, x: float, p: float) -> tuple[float, float]:
        """Linear action on a phase-space point."""
        return self.alpha * x + self.beta * p, self.gamma * x + self.delta * p


_BASIS = (
    Traceless(0.0, -1.0, 0.0),
    Traceless(-0.5, 0.0, 0.0),
    Traceless(0.0, 0.0, 1.0),
)


def basis_matrix(index: int) -> Traceless:
    """Return the basis element M_index of sl(2, R).

    The basis is chosen so that M_0, M_1, M_2 correspond to the phase-space
    fields p d/dx, (x d/dx - p d/dp)/2 and -x d/dp.
    """
    if index not in (0, 1, 2):
        raise ValueError(f"basis index must be 0, 1 or 2, got {index!r}")
    return _BASIS[index]


def bracket(X: Traceless, Y: Traceless) -> Traceless:
    """Commutator XY - YX."""
    # [[a, b], [c, -a]] and [[e, f], [g, -e]]
    a, b, c = X.m11, X.m12, X.m21
    e, f, g = Y.m11, Y.m12, Y.m21
    return Traceless(b * g - c * f, 2.0 * (a * f - b * e), 2.0 * (c * e - a * g))


def _cos_sinc(delta: float) -> tuple[float, float]:
    """(C, S) with exp(X) = C I + S X for a traceless X of determinant delta."""
    if abs(delta) < PARABOLIC_GUARD:
        # C = sum (-delta)^k/(2k)!, S = sum (-delta)^k/(2k+1)!
        return 1.0 - 0.5 * delta, 1.0 - delta / 6.0
    if delta > 0.0:
        theta = math.sqrt(delta)
        return math.cos(theta), math.sin(theta) / theta
    theta = math.sqrt(-delta)
    return math.cosh(theta), math.sinh(theta) / theta


def exp_traceless(X: Traceless) -> GroupElement:
    """Closed-form exponential of a traceless 2x2 matrix.

    Uses X^2 = -det(X) I, so exp(X) = C I + S X with trigonometric,
    hyperbolic or series coefficients depending on the sign of det(X).
    """
    if not all(math.isfinite(v) for v in (X.m11, X.m12, X.m21)):
        raise ValueError(f"non-finite matrix entries: {X}")
    c, s = _cos_sinc(X.det())
    return GroupElement(c + s * X.m11, s * X.m12, s * X.m21, c - s * X.m11)
