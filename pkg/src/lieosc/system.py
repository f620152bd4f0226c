"""Lie systems on SL(2, R): coefficient curves, the group equation and its actions.

A coefficient curve (b0, b1, b2) defines the phase-space system

    x' =  b1/2 x + b0 p
    p' = -b2 x  - b1/2 p

whose matrix M(t) = -sum_a b_a(t) M_a drives the group equation A' = M A,
A(0) = I. The group solution moves phase-space points linearly and Riccati
values by Moebius maps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .ode import IvpProblem, SampledCurve, integrate, sampled_derivative, DEFAULT_ATOL, DEFAULT_RTOL
from .sl2 import GroupElement, Traceless

# the raw determinant drift must stay well below 1e-9 on bounded curves
GROUP_RTOL = 1e-11
GROUP_ATOL = 1e-14

CATALOG = ("constant", "caldirola-kanai", "powerlaw2", "quartic", "sampled")


class BlowUpError(ValueError):
    """A coefficient curve diverges inside the requested time span."""

    def __init__(self, message: str, blowup_time: float):
        super().__init__(message)
        self.blowup_time = blowup_time


class DerivativeUnavailable(ValueError):
    pass


def _const(v):
    return lambda t: np.full_like(np.asarray(t, dtype=float), v, dtype=float) + 0.0


@dataclass
class CoefficientCurve:
    """Coefficient triple (b0, b1, b2) as functions of time.

    Derivative callables are optional; without them :meth:`derivative`
    raises. ``blowup_time`` marks the first time at which a closed-form
    coefficient diverges (``inf`` if none), ``span`` restricts sampled
    curves to the interval they were sampled on.
    """

    b0: Callable
    b1: Callable
    b2: Callable
    db0: Optional[Callable] = None
    db1: Optional[Callable] = None
    db2: Optional[Callable] = None
    name: str = "custom"
    params: dict = field(default_factory=dict)
    blowup_time: float = math.inf
    span: tuple = (-math.inf, math.inf)
    triple: Optional[Callable] = None

    def __call__(self, t):
        """Return (b0, b1, b2) at ``t`` stacked along the last axis."""
        if self.triple is not None:
            return self.triple(t)
        return np.stack([np.asarray(f(t), dtype=float) for f in (self.b0, self.b1, self.b2)], axis=-1)

    @property
    def has_derivative(self) -> bool:
        return None not in (self.db0, self.db1, self.db2)

    def derivative(self, t):
        if not self.has_derivative:
            raise DerivativeUnavailable(f"curve {self.name!r} carries no derivative")
        return np.stack([np.asarray(f(t), dtype=float) for f in (self.db0, self.db1, self.db2)], axis=-1)

    def check_span(self, t0: float, t1: float) -> None:
        """Raise unless the curve is defined on all of [t0, t1]."""
        if t0 < self.span[0] or t1 > self.span[1]:
            raise ValueError(
                f"[{t0}, {t1}] leaves the span [{self.span[0]}, {self.span[1]}] of curve {self.name!r}"
            )
        if t0 <= self.blowup_time <= t1:
            raise BlowUpError(
                f"coefficients of {self.name!r} blow up at t={self.blowup_time:.17g} "
                f"inside [{t0}, {t1}]",
                self.blowup_time,
            )


@dataclass
class TdfhoSpec:
    """Oscillator with Hamiltonian p^2/(2 m(t)) + F(t) omega^2 x^2 / 2."""

    mass: Callable
    frequency_factor: Callable
    omega: float
    dmass: Optional[Callable] = None
    dfrequency_factor: Optional[Callable] = None

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")


@dataclass(frozen=True)
class PhaseState:
    x: float
    p: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.p)):
            raise ValueError(f"non-finite phase state ({self.x}, {self.p})")

    def to_array(self) -> np.ndarray:
        return np.array([self.x, self.p])


@dataclass
class Trajectory:
    grid: np.ndarray
    states: np.ndarray  # shape (n, 2): columns x, p

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.states = np.asarray(self.states, dtype=float)
        if self.states.shape != (self.grid.size, 2):
            raise ValueError(f"states must have shape ({self.grid.size}, 2), got {self.states.shape}")
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("trajectory grid must be increasing")

    @property
    def x(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def p(self) -> np.ndarray:
        return self.states[:, 1]

    def state(self, i: int) -> PhaseState:
        return PhaseState(float(self.states[i, 0]), float(self.states[i, 1]))


@dataclass
class GroupPath:
    grid: np.ndarray
    matrices: np.ndarray  # shape (n, 2, 2)

    def __len__(self):
        return self.grid.size

    def element(self, i: int) -> GroupElement:
        return GroupElement.from_array(self.matrices[i])

    def det(self) -> np.ndarray:
        return np.linalg.det(self.matrices)


# --- catalog -----------------------------------------------------------------

def coeffs_from_spec(spec: TdfhoSpec, span=(0.0, 1.0), n_check: int = 201) -> CoefficientCurve:
    """b0 = 1/m, b1 = 0, b2 = F omega^2.

    The mass is sampled on ``span`` and must be positive at every sample.
    """
    ts = np.linspace(span[0], span[1], n_check)
    m = np.asarray(spec.mass(ts), dtype=float) * np.ones_like(ts)
    if np.any(~np.isfinite(m)) or np.any(m <= 0):
        bad = ts[np.argmax(~(m > 0))]
        raise ValueError(f"mass must be positive on the span; m({bad:.6g}) = {spec.mass(bad)}")
    w2 = spec.omega ** 2
    mass, F = spec.mass, spec.frequency_factor

    db0 = db2 = None
    if spec.dmass is not None:
        dm = spec.dmass
        db0 = lambda t: -np.asarray(dm(t)) / np.asarray(mass(t)) ** 2
    if spec.dfrequency_factor is not None:
        dF = spec.dfrequency_factor
        db2 = lambda t: w2 * np.asarray(dF(t), dtype=float)
    return CoefficientCurve(
        b0=lambda t: 1.0 / np.asarray(mass(t), dtype=float),
        b1=_const(0.0),
        b2=lambda t: w2 * np.asarray(F(t), dtype=float),
        db0=db0,
        db1=_const(0.0),
        db2=db2,
    )


def constant_curve(b0: float, b1: float, b2: float) -> CoefficientCurve:
    z = _const(0.0)
    return CoefficientCurve(_const(b0), _const(b1), _const(b2), z, z, z,
                            name="constant", params=dict(b0=b0, b1=b1, b2=b2))


def caldirola_kanai(m0: float, mu: float, omega: float) -> CoefficientCurve:
    """Damped oscillator with mass m0 exp(mu t): b = (e^{-mu t}/m0, 0, m0 omega^2 e^{mu t})."""
    if not m0 > 0:
        raise ValueError(f"m0 must be positive, got {m0}")
    spec = TdfhoSpec(
        mass=lambda t: m0 * np.exp(mu * np.asarray(t, dtype=float)),
        frequency_factor=lambda t: m0 * np.exp(mu * np.asarray(t, dtype=float)),
        omega=omega,
        dmass=lambda t: mu * m0 * np.exp(mu * np.asarray(t, dtype=float)),
        dfrequency_factor=lambda t: mu * m0 * np.exp(mu * np.asarray(t, dtype=float)),
    )
    curve = coeffs_from_spec(spec, span=(0.0, 0.0), n_check=1)
    curve.name = "caldirola-kanai"
    curve.params = dict(m0=m0, mu=mu, omega=omega)
    return curve


def powerlaw2(L: float, c1: float, omega: float) -> CoefficientCurve:
    """Unit mass, F(t) = 1/(L - c1 omega t)^2."""
    if not (L > 0 and omega > 0):
        raise ValueError("powerlaw2 needs L > 0 and omega > 0")
    w2 = omega ** 2

    def W(t):
        return L - c1 * omega * np.asarray(t, dtype=float)

    z = _const(0.0)
    return CoefficientCurve(
        b0=_const(1.0), b1=z, b2=lambda t: w2 / W(t) ** 2,
        db0=z, db1=z, db2=lambda t: 2.0 * c1 * omega * w2 / W(t) ** 3,
        name="powerlaw2", params=dict(L=L, c1=c1, omega=omega),
        blowup_time=L / (c1 * omega) if c1 > 0 else math.inf,
    )


def quartic(u0: float, u1: float, omega: float, k: float = 1.0) -> CoefficientCurve:
    """Unit mass, F(t) = k/(u1 t + u0)^4."""
    if not (u0 > 0 and omega > 0):
        raise ValueError("quartic needs u0 > 0 and omega > 0")
    kw2 = k * omega ** 2

    def V(t):
        return u1 * np.asarray(t, dtype=float) + u0

    z = _const(0.0)
    return CoefficientCurve(
        b0=_const(1.0), b1=z, b2=lambda t: kw2 / V(t) ** 4,
        db0=z, db1=z, db2=lambda t: -4.0 * u1 * kw2 / V(t) ** 5,
        name="quartic", params=dict(u0=u0, u1=u1, omega=omega, k=k),
        blowup_time=-u0 / u1 if u1 < 0 else math.inf,
    )


def sampled_coefficients(grid, values) -> CoefficientCurve:
    """Coefficient curve backed by samples of shape (n, 3).

    Values between nodes come from a cubic spline, derivatives from the
    finite-difference stencils of :func:`lieosc.ode.sampled_derivative`.
    """
    samples = SampledCurve(grid, values)
    if samples.values.shape != (samples.grid.size, 3):
        raise ValueError("sampled coefficients need values of shape (n, 3)")
    splines = [CubicSpline(samples.grid, samples.values[:, i]) for i in range(3)]

    def deriv(i):
        return lambda t: sampled_derivative(samples, t)[..., i]

    return CoefficientCurve(
        b0=splines[0], b1=splines[1], b2=splines[2],
        db0=deriv(0), db1=deriv(1), db2=deriv(2),
        name="sampled", span=samples.span,
    )


def from_frequency(F: Callable, omega: float = 1.0, dF: Optional[Callable] = None,
                   name: str = "custom") -> CoefficientCurve:
    """Unit-mass oscillator b = (1, 0, omega^2 F(t))."""
    spec = TdfhoSpec(mass=_const(1.0), frequency_factor=F, omega=omega,
                     dmass=_const(0.0), dfrequency_factor=dF)
    curve = coeffs_from_spec(spec, span=(0.0, 0.0), n_check=1)
    curve.name = name
    return curve


# --- group equation ----------------------------------------------------------

def system_matrix(b: CoefficientCurve, t: float) -> Traceless:
    """M(t) = -sum_a b_a(t) M_a = [[b1/2, b0], [-b2, -b1/2]]."""
    b0, b1, b2 = (float(v) for v in b(t))
    return Traceless(0.5 * b1, b0, -b2)


def _matrix_array(b: CoefficientCurve, t: float) -> np.ndarray:
    b0, b1, b2 = b(t)
    return np.array([[0.5 * b1, b0], [-b2, -0.5 * b1]])


def integrate_group(b: CoefficientCurve, grid, a0: Optional[GroupElement] = None,
                    rel_tol: float = GROUP_RTOL, abs_tol: float = GROUP_ATOL,
                    project: bool = True) -> GroupPath:
    """Solve A' = M(t) A from ``a0`` (identity by default) at grid[0].

    With ``project`` each output matrix is rescaled by det^{-1/2}, removing
    the residual determinant drift of the integrator.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size < 1:
        raise ValueError("empty grid")
    b.check_span(grid[0], grid[-1])
    start = np.eye(2) if a0 is None else a0.to_array()
    if abs(np.linalg.det(start) - 1.0) > 1e-9:
        raise ValueError("initial group element must be unimodular")
    if grid.size == 1:
        return GroupPath(grid, start[None].copy())

    def rhs(t, y):
        return (_matrix_array(b, t) @ y.reshape(2, 2)).ravel()

    sol = integrate(IvpProblem(rhs, grid[0], grid[-1], start.ravel(), rel_tol, abs_tol), grid)
    mats = sol.values.reshape(-1, 2, 2)
    if not project:
        return GroupPath(grid, mats)
    det = np.linalg.det(mats)
    if np.any(det <= 0):
        raise ValueError("group path left the identity component")
    return GroupPath(grid, mats / np.sqrt(det)[:, None, None])


def flow_state(path: GroupPath, xi0: PhaseState) -> Trajectory:
    """Move ``xi0`` along the group path: xi(t) = A(t) xi0."""
    states = path.matrices @ xi0.to_array()
    return Trajectory(path.grid.copy(), states)


def integrate_trajectory(b: CoefficientCurve, grid, xi0: PhaseState,
                         rel_tol: float = DEFAULT_RTOL, abs_tol: float = DEFAULT_ATOL) -> Trajectory:
    """Direct Runge-Kutta solution of the phase-space system (no group detour)."""
    grid = np.asarray(grid, dtype=float)
    b.check_span(grid[0], grid[-1])

    def rhs(t, y):
        b0, b1, b2 = b(t)
        return np.array([0.5 * b1 * y[0] + b0 * y[1], -b2 * y[0] - 0.5 * b1 * y[1]])

    sol = integrate(IvpProblem(rhs, grid[0], grid[-1], xi0.to_array(), rel_tol, abs_tol), grid)
    return Trajectory(grid, sol.values)


def riccati_project(path: GroupPath, w0: float) -> np.ndarray:
    """Moebius image w(t) = (alpha w0 + beta)/(gamma w0 + delta) of ``w0``.

    ``w0`` may be ``inf``; poles come back as ``inf``. The result solves
    w' = b0 + b1 w + b2 w^2.
    """
    m = path.matrices
    if math.isinf(w0):
        num, den = m[:, 0, 0], m[:, 1, 0]
    else:
        num = m[:, 0, 0] * w0 + m[:, 0, 1]
        den = m[:, 1, 0] * w0 + m[:, 1, 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        w = num / den
    w[den == 0.0] = np.inf
    return w


def catalog_curve(name: str, **params) -> CoefficientCurve:
    """Build a catalog curve by name (everything except ``sampled``)."""
    if name == "constant":
        if {"b0", "b1", "b2"} & params.keys():
            return constant_curve(params.get("b0", 1.0), params.get("b1", 0.0), params.get("b2", 1.0))
        m0 = params.get("m0", 1.0)
        return constant_curve(1.0 / m0, 0.0, params["omega"] ** 2)
    if name == "caldirola-kanai":
        return caldirola_kanai(params.get("m0", 1.0), params["mu"], params["omega"])
    if name == "powerlaw2":
        return powerlaw2(params["L"], params["c1"], params["omega"])
    if name == "quartic":
        return quartic(params["u0"], params["u1"], params["omega"], params.get("k", 1.0))
    if name == "sampled":
        raise ValueError("sampled curves are built from data, see sampled_coefficients")
    raise ValueError(f"unknown family {name!r}; expected one of {', '.join(CATALOG)}")
