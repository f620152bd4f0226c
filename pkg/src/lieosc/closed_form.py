"""Explicit solutions of the reduced constant systems and the worked families."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .ode import quadrature
from .sl2 import GroupElement, Traceless, exp_traceless
from .system import BlowUpError, PhaseState


@dataclass
class ReducedSystem:
    """xi' = D(t) C xi with C = [[c1/2, c0], [-c2, -c1/2]].

    ``tau`` is the time change int_0^t D; when omitted it is computed by
    quadrature.
    """

    c0: float
    c1: float
    c2: float
    dfun: Callable[[float], float]
    tau: Optional[Callable[[float], float]] = None

    @property
    def generator(self) -> Traceless:
        return Traceless(0.5 * self.c1, self.c0, -self.c2)

    def reparametrised_time(self, t: float) -> float:
        if self.tau is not None:
            return float(self.tau(t))
        return quadrature(lambda s: float(self.dfun(s)), 0.0, t, tol=1e-12)


def fundamental_matrix(sys: ReducedSystem, t: float) -> GroupElement:
    """exp(tau(t) C), the propagator of the reduced system from time 0."""
    return exp_traceless(sys.reparametrised_time(t) * sys.generator)


def _vectorize(fn):
    def wrapper(*args):
        t = args[-1]
        if np.ndim(t) == 0:
            return fn(*args[:-1], float(t))
        return np.array([fn(*args[:-1], float(s)) for s in np.ravel(t)]).reshape(np.shape(t))

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_vectorize
def ck_solution(m0: float, mu: float, omega: float, xi0: PhaseState, t: float) -> float:
    """Position of the Caldirola-Kanai oscillator with mass m0 exp(mu t).

    The reduced variables x' = sqrt(m0 w) e^{mu t/2} x, p' = e^{-mu t/2} p / sqrt(m0 w)
    rotate (or boost) with exp(t [[mu/2, w], [-w, -mu/2]]).
    """
    if not (m0 > 0 and omega > 0):
        raise ValueError("ck_solution needs m0 > 0 and omega > 0")
    s = math.sqrt(m0 * omega)
    E = exp_traceless(t * Traceless(0.5 * mu, omega, -omega))
    return math.exp(-0.5 * mu * t) / s * (E.alpha * s * xi0.x + E.beta * xi0.p / s)


@_vectorize
def powerlaw2_solution(L: float, c1: float, omega: float, xi0: PhaseState, t: float) -> float:
    """Position of the unit-mass oscillator with F(t) = 1/(L - c1 w t)^2."""
    W = L - c1 * omega * t
    if not W > 0 or not L > 0:
        raise BlowUpError(
            f"powerlaw2 frequency diverges at t={L / (c1 * omega):.17g}; "
            f"t={t:.17g} is outside the domain", L / (c1 * omega) if c1 else math.inf)
    if c1 == 0.0:
        tau = omega * t / L
    else:
        tau = -math.log1p(-c1 * omega * t / L) / c1
    E = exp_traceless(tau * Traceless(0.5 * c1, 1.0, -1.0))
    x0p = math.sqrt(omega / L) * xi0.x
    p0p = math.sqrt(L / omega) * xi0.p
    return math.sqrt(W / omega) * (E.alpha * x0p + E.beta * p0p)


@_vectorize
def quartic_solution(u0: float, u1: float, omega: float, xi0: PhaseState, t: float) -> float:
    """Position of the unit-mass oscillator with F(t) = 1/(u1 t + u0)^4."""
    V = u1 * t + u0
    if not (V > 0 and u0 > 0):
        blow = -u0 / u1 if u1 else math.inf
        raise BlowUpError(
            f"quartic frequency diverges at t={blow:.17g}; t={t:.17g} is outside the domain", blow)
    # int_0^t ds / V(s)^2, also valid for u1 = 0
    tau = t / (u0 * V)
    wt = omega * tau
    return V * (math.cos(wt) * xi0.x / u0 + math.sin(wt) / omega * (-u1 * xi0.x + u0 * xi0.p))
