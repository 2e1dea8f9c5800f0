# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled weight kernel for the hot per-step path.

Semantics match softadapt._kernel_py.weights_from_window; descent loops
call this once per iteration, so the slope estimate, softmax, and loss
re-weighting run as straight C loops.
"""

from libc.math cimport exp, fabs

import numpy as np

from .finite_diff import _COEFFICIENTS, MAX_ORDER

cdef int _MAX_ORDER = MAX_ORDER

# Stencil table shared with the pure path; row p holds the p + 1
# coefficients of the order-p stencil, newest sample first.
_table = np.zeros((_MAX_ORDER + 1, _MAX_ORDER + 2), dtype=np.float64)
for _order, _coeffs in _COEFFICIENTS.items():
    _table[_order, : _order + 1] = _coeffs
cdef double[:, ::1] COEFFS = _table


def weights_from_window(double[:, ::1] window, double beta, double epsilon,
                        int fd_order, bint normalized, bint loss_weighted):
    """Weight vector from a loss-history window.

    `window` has one row per loss component, columns ordered oldest to
    newest (C-contiguous float64), and must hold at least two columns.
    """
    cdef Py_ssize_t m = window.shape[0]
    cdef Py_ssize_t k = window.shape[1]
    cdef Py_ssize_t i, j
    cdef int order
    cdef double acc, mx, z, den, total_abs

    if k < 2:
        raise ValueError("window must hold at least 2 entries per component")
    if fd_order < 1:
        raise ValueError(f"fd_order must be >= 1, got {fd_order}")

    order = fd_order
    if order > <int> (k - 1):
        order = <int> (k - 1)
    if order > _MAX_ORDER:
        order = _MAX_ORDER

    slopes_arr = np.empty(m, dtype=np.float64)
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] slopes = slopes_arr
    cdef double[::1] alphas = out

    for i in range(m):
        acc = 0.0
        for j in range(order + 1):
            acc += COEFFS[order, j] * window[i, k - 1 - j]
        slopes[i] = acc

    if beta == 0.0:
        # Softmax of a zero-scaled vector is exactly uniform; skipping the
        # epsilon guard here keeps the equal-weights limit exact.
        for i in range(m):
            alphas[i] = 1.0 / m
    else:
        if normalized:
            total_abs = 0.0
            for i in range(m):
                total_abs += fabs(slopes[i])
            den = total_abs + epsilon
            for i in range(m):
                slopes[i] = slopes[i] / den
        # Shift so every exponent is nonpositive: by the max for positive
        # beta, by the min for negative beta (the max shift overflows there).
        mx = slopes[0]
        if beta > 0.0:
            for i in range(1, m):
                if slopes[i] > mx:
                    mx = slopes[i]
        else:
            for i in range(1, m):
                if slopes[i] < mx:
                    mx = slopes[i]
        z = 0.0
        for i in range(m):
            alphas[i] = exp(beta * (slopes[i] - mx))
            z += alphas[i]
        z += epsilon
        for i in range(m):
            alphas[i] /= z

    if loss_weighted:
        den = 0.0
        for i in range(m):
            acc = 0.0
            for j in range(k):
                acc += window[i, j]
            acc /= k
            if acc < 0.0:
                raise ValueError(
                    "loss-weighted variant requires nonnegative averaged losses; "
                    f"component {i} averaged to {acc}"
                )
            alphas[i] *= acc
            den += alphas[i]
        den += epsilon
        for i in range(m):
            alphas[i] /= den

    return out
