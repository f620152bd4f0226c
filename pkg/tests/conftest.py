"""Shared generators of random smooth coefficient and transformation curves."""
import numpy as np
import pytest

from lieosc.system import CoefficientCurve
from lieosc.transform import TransformCurve


def trig_curve(rng, scale=1.0, offset=0.0):
    """f(t) = offset + sum a_k sin(w_k t + phi_k), with its derivative."""
    a = scale * rng.uniform(-1, 1, 3)
    w = rng.uniform(0.2, 2.0, 3)
    ph = rng.uniform(0, 2 * np.pi, 3)

    def f(t):
        t = np.asarray(t, dtype=float)
        return offset + sum(a[k] * np.sin(w[k] * t + ph[k]) for k in range(3))

    def df(t):
        t = np.asarray(t, dtype=float)
        return sum(a[k] * w[k] * np.cos(w[k] * t + ph[k]) for k in range(3))

    return f, df


def random_curve(rng, positive=False):
    """Bounded smooth coefficient curve; with ``positive`` b0 and b2 stay > 0."""
    if positive:
        (b0, d0), (b2, d2) = trig_curve(rng, 0.3, 1.5), trig_curve(rng, 0.3, 1.5)
    else:
        (b0, d0), (b2, d2) = trig_curve(rng), trig_curve(rng)
    b1, d1 = trig_curve(rng, 0.5)
    return CoefficientCurve(b0, b1, b2, d0, d1, d2, name="random")


def random_transform(rng, scale=0.4):
    """Unimodular curve exp-free: [[a, b], [c, (1 + b c)/a]] with a > 0."""
    fa, dfa = trig_curve(rng, scale * 0.5, 1.0)
    fb, dfb = trig_curve(rng, scale)
    fc, dfc = trig_curve(rng, scale)

    def value(t):
        a, b, c = float(fa(t)), float(fb(t)), float(fc(t))
        return np.array([[a, b], [c, (1.0 + b * c) / a]])

    def deriv(t):
        a, b, c = float(fa(t)), float(fb(t)), float(fc(t))
        da, db, dc = float(dfa(t)), float(dfb(t)), float(dfc(t))
        dd = ((db * c + b * dc) * a - (1.0 + b * c) * da) / a ** 2
        return np.array([[da, db], [dc, dd]])

    return TransformCurve(value, deriv)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
