"""Pure numpy kernel for the Lobachevsky function (fallback backend)."""

import numpy as np

from ._series import TERM_TOL, series_coefficients

_COEF = np.asarray(series_coefficients())
_HALF_PI = 0.5 * np.pi


def lob_array(x):
    """Vectorized Lobachevsky function over a float64 array.

    Arguments are reduced to [-pi/2, pi/2] by pi-periodicity; exact float
    multiples of pi/2 map to exactly 0.0 so the classical identities hold
    bit-for-bit at those points.
    """
    x = np.asarray(x, dtype=np.float64)
    theta = x - np.rint(x / np.pi) * np.pi
    live = (theta != 0.0) & (np.abs(theta) != _HALF_PI)

    out = np.zeros_like(theta)
    if not np.any(live):
        return out

    t = theta[live]
    u = t * t
    # Kahan-compensated accumulation: main term first, then the series.
    s = t - t * np.log(2.0 * np.abs(t))
    c = np.zeros_like(t)
    p = t * u
    for coef in _COEF:
        term = coef * p
        y = term - c
        hi = s + y
        c = (hi - s) - y
        s = hi
        if np.max(np.abs(term)) < TERM_TOL:
            break
        p = p * u
    out[live] = s
    return out
