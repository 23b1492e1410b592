"""
Numerically stable kernels shared by the quantum and classical evolutions.

Both the Heisenberg coefficients and the classical energy transfer depend on
the frequency only through

    S(w2, t) = sin(w t) / w          and          V(w2, t) = (1 - cos(w t)) / w2

with w2 = w**2 allowed to be negative (hyperbolic regime, cos(ix) = cosh(x))
or zero (polynomial limit). The versine is evaluated as 2 sin^2(wt/2) so
there is no cancellation close to the branch point.
"""

import numpy as np

# Below this |w| t the Taylor limits are used instead of the closed forms.
SERIES_THRESHOLD = 1e-6


def _sinc(y):
    """sin(y)/y for y >= 0"""
    return np.sinc(y / np.pi)


def _sinhc(y):
    """sinh(y)/y for y >= 0"""
    y = np.asarray(y, dtype=float)
    small = y < SERIES_THRESHOLD
    safe = np.where(small, 1.0, y)
    return np.where(small, 1.0 + y * y / 6.0, np.sinh(safe) / safe)


def _scalar_or_array(value):
    value = np.asarray(value)
    if value.ndim == 0:
        return float(value)
    return value


def sin_kernel(w2, t):
    """S(w2, t): sin(wt)/w, sinh(|w|t)/|w| for w2 < 0, t at w2 = 0"""
    w2 = np.asarray(w2, dtype=float)
    t = np.asarray(t, dtype=float)
    y = np.sqrt(np.abs(w2)) * np.abs(t)
    ratio = np.where(w2 >= 0, _sinc(y), _sinhc(y))
    return _scalar_or_array(t * ratio)


def versine_kernel(w2, t):
    """V(w2, t): (1 - cos wt)/w2 with the hyperbolic and t^2/2 limits"""
    w2 = np.asarray(w2, dtype=float)
    t = np.asarray(t, dtype=float)
    half = 0.5 * np.sqrt(np.abs(w2)) * np.abs(t)
    ratio = np.where(w2 >= 0, _sinc(half), _sinhc(half))
    return _scalar_or_array(0.5 * t * t * ratio * ratio)


def cos_kernel(w2, t):
    """cos(wt) written as 1 - w2 V(w2, t), i.e. cosh(|w|t) when w2 < 0"""
    w2 = np.asarray(w2, dtype=float)
    return _scalar_or_array(1.0 - w2 * versine_kernel(w2, t))
