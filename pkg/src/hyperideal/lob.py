"""Milnor's Lobachevsky function and its derivatives.

The function is pi-periodic, odd, and smooth away from integer multiples of
pi, where the graph has a vertical tangent.  ``lob`` is the hot kernel of the
whole package; a compiled Cython implementation is used when available and a
numpy implementation otherwise.  Set ``HYPERIDEAL_NO_EXT=1`` to force the
fallback.
"""

import math
import os

import numpy as np

from . import _lob_np
from .errors import SingularityError

_BACKEND_NAME = "numpy"
_lob_array = _lob_np.lob_array

if not os.environ.get("HYPERIDEAL_NO_EXT"):
    try:
        from . import _lob_cy

        _lob_array = _lob_cy.lob_array
        _BACKEND_NAME = "cython"
    except ImportError:
        pass


def backend() -> str:
    """Name of the kernel backend in use: ``"cython"`` or ``"numpy"``."""
    return _BACKEND_NAME


def lob(x):
    """Lobachevsky function at ``x`` (radians); scalar or elementwise on arrays.

    Exact float multiples of pi/2 return exactly 0.0.  Absolute accuracy is
    better than 1e-13 everywhere.
    """
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError("lob: argument must be finite")
    out = np.asarray(_lob_array(arr)).reshape(arr.shape)
    if np.isscalar(x) or arr.ndim == 0:
        return float(out)
    return out


def _check_pi_multiple(arr, name):
    reduced = arr - np.rint(arr / np.pi) * np.pi
    if np.any(reduced == 0.0):
        raise SingularityError(f"{name}: argument is a multiple of pi")


def lob_deriv(x):
    """Derivative -log|2 sin x|; singular at integer multiples of pi."""
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError("lob_deriv: argument must be finite")
    _check_pi_multiple(arr, "lob_deriv")
    out = -np.log(2.0 * np.abs(np.sin(arr)))
    if np.isscalar(x) or arr.ndim == 0:
        return float(out)
    return out


def lob_second(x):
    """Second derivative -cot x; singular at integer multiples of pi."""
    arr = np.asarray(x, dtype=np.float64)
    _check_pi_multiple(arr, "lob_second")
    out = -np.cos(arr) / np.sin(arr)
    if np.isscalar(x) or arr.ndim == 0:
        return float(out)
    return out


# Frozen high-precision references (25-digit arithmetic), used by the self test.
LOB_PI_6 = 0.5074708032048268
LOB_PI_3 = 0.3383138688032179
LOB_PI_4 = 0.4579827970886095

assert math.isclose(3 * LOB_PI_3, 1.0149416064096536, rel_tol=0, abs_tol=1e-15)
