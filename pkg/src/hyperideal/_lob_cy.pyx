# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel for the Lobachevsky function.

Same reduction and series as the numpy fallback in ``_lob_np``; kept in
lockstep via the shared coefficient table in ``_series``.
"""

from libc.math cimport fabs, log, rint, M_PI

import numpy as np

from ._series import TERM_TOL, series_coefficients

cdef double _COEF[40]
cdef int _NCOEF
cdef double _TERM_TOL = TERM_TOL

_py_coefs = series_coefficients()
_NCOEF = len(_py_coefs)
for _i, _c in enumerate(_py_coefs):
    _COEF[_i] = _c


cdef double _lob1(double x) noexcept nogil:
    cdef double theta = x - rint(x / M_PI) * M_PI
    cdef double half_pi = 0.5 * M_PI
    if theta == 0.0 or fabs(theta) == half_pi:
        return 0.0
    cdef double u = theta * theta
    cdef double s = theta - theta * log(2.0 * fabs(theta))
    cdef double c = 0.0
    cdef double p = theta * u
    cdef double term, y, hi
    cdef int n
    for n in range(_NCOEF):
        term = _COEF[n] * p
        y = term - c
        hi = s + y
        c = (hi - s) - y
        s = hi
        if fabs(term) < _TERM_TOL:
            break
        p = p * u
    return s


def lob_array(x):
    """Vectorized Lobachevsky function over a float64 array."""
    arr = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] flat = arr.reshape(-1)
    out = np.empty(arr.shape, dtype=np.float64)
    cdef double[::1] oflat = out.reshape(-1)
    cdef Py_ssize_t i, n = flat.shape[0]
    with nogil:
        for i in range(n):
            oflat[i] = _lob1(flat[i])
    return out
