"""Conserved quantities of time-dependent oscillators.

* the Lewis invariant built from a solution of the Milne-Pinney equation
  rho'' + F rho = 1/rho^3;
* first integrals of the two reducible families (F ~ V^-2 and F ~ V^-4,
  V = u1 t + u0), obtained from the reduced constant-coefficient system;
* a drift measure for checking conservation along a trajectory.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .ode import IntegrationError, IvpProblem, SampledCurve, integrate
from .system import PhaseState, Trajectory

RHO_COLLAPSE = 1e-6
ARCSIN_CLAMP = 1e-12


@dataclass(frozen=True)
class MilnePinneyState:
    rho: float
    rhodot: float

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError(f"rho must be positive, got {self.rho}")


class _Collapse(Exception):
    def __init__(self, t):
        self.t = t


def milne_pinney_integrate(F: Callable[[float], float], init: MilnePinneyState, grid) -> SampledCurve:
    """Solve rho'' = -F(t) rho + rho^-3; values are (rho, rho') per grid point."""
    grid = np.asarray(grid, dtype=float)

    def rhs(t, y):
        if abs(y[0]) < RHO_COLLAPSE:
            raise _Collapse(t)
        return np.array([y[1], -F(t) * y[0] + y[0] ** -3])

    try:
        return integrate(IvpProblem(rhs, grid[0], grid[-1], [init.rho, init.rhodot]), grid)
    except _Collapse as exc:
        raise IntegrationError(f"Milne-Pinney solution collapsed (rho < {RHO_COLLAPSE:g}) "
                               f"at t={exc.t:.17g}", exc.t) from None


def freq_from_rho(rho: Callable[[float], float], t: float,
                  rho_ddot: Optional[Callable[[float], float]] = None) -> float:
    """F = (1/rho) (1/rho^3 - rho''): the frequency for which rho solves Milne-Pinney.

    Without ``rho_ddot`` the second derivative is estimated by a
    Richardson-extrapolated central difference.
    """
    r = float(rho(t))
    if not r > 0:
        raise ValueError(f"rho must be positive, got rho({t}) = {r}")
    if rho_ddot is not None:
        rdd = float(rho_ddot(t))
    else:
        def d2(h):
            return (rho(t + h) - 2.0 * r + rho(t - h)) / (h * h)

        h = 1e-2 * max(1.0, abs(t))
        rdd = (4.0 * d2(h / 2) - d2(h)) / 3.0
    return (r ** -3 - rdd) / r


def lewis_invariant(state: MilnePinneyState, xi: PhaseState) -> float:
    """I = ((rho p - rho' x)^2 + (x/rho)^2) / 2."""
    return 0.5 * ((state.rho * xi.p - state.rhodot * xi.x) ** 2 + (xi.x / state.rho) ** 2)


def lewis_cointegrate(F: Callable[[float], float], init: MilnePinneyState, xi0: PhaseState,
                      grid) -> tuple[SampledCurve, Trajectory]:
    """Integrate rho and the oscillator x' = p, p' = -F x side by side."""
    grid = np.asarray(grid, dtype=float)

    def rhs(t, y):
        if abs(y[0]) < RHO_COLLAPSE:
            raise _Collapse(t)
        f = F(t)
        return np.array([y[1], -f * y[0] + y[0] ** -3, y[3], -f * y[2]])

    y0 = [init.rho, init.rhodot, xi0.x, xi0.p]
    try:
        sol = integrate(IvpProblem(rhs, grid[0], grid[-1], y0), grid)
    except _Collapse as exc:
        raise IntegrationError(f"Milne-Pinney solution collapsed at t={exc.t:.17g}", exc.t) from None
    return SampledCurve(grid, sol.values[:, :2]), Trajectory(grid, sol.values[:, 2:])


def lewis_series(mp: SampledCurve, traj: Trajectory) -> np.ndarray:
    rho, rhod = mp.values[:, 0], mp.values[:, 1]
    x, p = traj.x, traj.p
    return 0.5 * ((rho * p - rhod * x) ** 2 + (x / rho) ** 2)


# --- reducible families --------------------------------------------------------

def kcond_first_integral(c0: float, c1: float, c2: float, xiprime: PhaseState) -> float:
    """Quadratic integral c2 x'^2 + c1 x' p' + c0 p'^2 of xi' = D C xi'."""
    x, p = xiprime.x, xiprime.p
    return c2 * x * x + c1 * x * p + c0 * p * p


def powerlaw2_reduce(xi: PhaseState, t: float, u0: float, u1: float, omega: float) -> PhaseState:
    """Reduced variables x' = sqrt(w/V) x, p' = sqrt(V/w) p for F = V^-2."""
    V = u1 * t + u0
    if not V > 0:
        raise ValueError(f"V(t) = {V} must be positive")
    s = math.sqrt(omega / V)
    return PhaseState(s * xi.x, xi.p / s)


def powerlaw2_I1(xiprime: PhaseState, u1: float, omega: float) -> float:
    """I1 = -(u1/w) p' x' + x'^2 + p'^2 in the reduced variables."""
    x, p = xiprime.x, xiprime.p
    return -(u1 / omega) * p * x + x * x + p * p


def powerlaw2_I2(xiprime: PhaseState, t: float, u0: float, u1: float, omega: float) -> float:
    """Second first integral for F(t) = (u1 t + u0)^-2, reduced variables.

    The form depends on the sign of wbar^2 = u1^2/(4 w^2) - 1. For
    wbar^2 > 0, I2 = V^{w/u1} z^{1/wbar} with the eigen-combination
    z = (u1/w) x' - 2 p' + 2 wbar x', which must be positive. For wbar^2 < 0,
    with nu = sqrt(-wbar^2), I2 = arg(x' - (u1/(2w)) p' - i nu p') - nu tau(t),
    tau(t) = (w/u1) ln(V/u0); this is an angle, conserved modulo 2 pi.
    """
    x, p = xiprime.x, xiprime.p
    V = u1 * t + u0
    if not V > 0:
        raise ValueError(f"V(t) = {V} must be positive")
    c1 = -u1 / omega
    wbar2 = 0.25 * c1 * c1 - 1.0
    if wbar2 > 0:
        wbar = math.sqrt(wbar2)
        z = (u1 / omega) * x - 2.0 * p + 2.0 * wbar * x
        if not z > 0:
            raise ValueError("I2 is undefined where (u1/w) x' - 2 p' + 2 wbar x' <= 0")
        return V ** (omega / u1) * z ** (1.0 / wbar)
    if wbar2 < 0:
        nu = math.sqrt(-wbar2)
        tau = omega * t / u0 if u1 == 0 else (omega / u1) * math.log(V / u0)
        return math.atan2(-nu * p, x + 0.5 * c1 * p) - nu * tau
    raise ValueError("I2 is undefined on the parabolic boundary u1^2 = 4 w^2")


def invariants_powerlaw2(xiprime: PhaseState, t: float, u0: float, u1: float,
                         omega: float) -> tuple[float, float]:
    """(I1, I2) for F(t) = (u1 t + u0)^-2; see :func:`powerlaw2_I2`."""
    return powerlaw2_I1(xiprime, u1, omega), powerlaw2_I2(xiprime, t, u0, u1, omega)


def quartic_I1(xi: PhaseState, t: float, u0: float, u1: float, omega: float) -> float:
    """I1 = (x w / V)^2 + (V p - u1 x)^2."""
    V = u1 * t + u0
    if not V > 0:
        raise ValueError(f"V(t) = {V} must be positive")
    return (xi.x * omega / V) ** 2 + (V * xi.p - u1 * xi.x) ** 2


def invariants_quartic(xi: PhaseState, t: float, u0: float, u1: float,
                       omega: float) -> tuple[float, float]:
    """First integrals for F(t) = (u1 t + u0)^-4 in the original variables.

    I1 as in :func:`quartic_I1` and
    I2 = arcsin(x w / (V sqrt(I1))) + w / (u1 V), on the principal branch.
    """
    I1 = quartic_I1(xi, t, u0, u1, omega)
    if u1 == 0.0:
        raise ValueError("I2 needs u1 != 0")
    if not I1 > 0:
        raise ValueError("I2 needs I1 > 0")
    V = u1 * t + u0
    s = xi.x * omega / (V * math.sqrt(I1))
    if abs(s) > 1.0:
        if abs(s) - 1.0 > ARCSIN_CLAMP:
            raise ValueError(f"arcsin argument {s!r} is outside [-1, 1]")
        s = math.copysign(1.0, s)
    return I1, math.asin(s) + omega / (u1 * V)


def quartic_phase(xi: PhaseState, t: float, u0: float, u1: float, omega: float) -> float:
    """I2 of the quartic family lifted off the arcsin branch.

    Equals :func:`invariants_quartic`'s I2 wherever V p - u1 x >= 0 and
    continues it through the turning points; conserved modulo 2 pi.
    """
    V = u1 * t + u0
    if not V > 0:
        raise ValueError(f"V(t) = {V} must be positive")
    if u1 == 0.0:
        raise ValueError("I2 needs u1 != 0")
    return math.atan2(xi.x * omega / V, V * xi.p - u1 * xi.x) + omega / (u1 * V)


def conservation_drift(invariant: Callable[[float, PhaseState], float], traj: Trajectory,
                       unwrap: bool = False, floor: float = 1e-30) -> float:
    """max_t |I(t) - I(0)| / max(|I(0)|, floor) along ``traj``.

    With ``unwrap`` the series is treated as an angle and 2 pi jumps are
    removed first; angles that may start near zero want ``floor=1``.
    """
    values = np.empty(traj.grid.size)
    for i, t in enumerate(traj.grid):
        try:
            values[i] = invariant(float(t), traj.state(i))
        except (ValueError, ArithmeticError) as exc:
            raise type(exc)(f"invariant failed at t={t:.17g}: {exc}") from exc
    if unwrap:
        values = np.unwrap(values)
    return float(np.max(np.abs(values - values[0])) / max(abs(values[0]), floor))
