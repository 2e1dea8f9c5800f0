"""Pure-Python weight kernel, the fallback when the extension is not built.

Mirrors softadapt._kernel operation for operation (same summation order,
same guards) so the two backends agree to near machine precision on the
same window.
"""

from __future__ import annotations

import math

import numpy as np

from .finite_diff import _COEFFICIENTS, MAX_ORDER


def weights_from_window(
    window: np.ndarray,
    beta: float,
    epsilon: float,
    fd_order: int,
    normalized: bool,
    loss_weighted: bool,
) -> np.ndarray:
    """Weight vector from a loss-history window.

    `window` has one row per loss component, columns ordered oldest to
    newest, and must hold at least two columns.  Slopes are estimated by
    backward differences of order min(fd_order, columns - 1, 5), passed
    through a max-stabilized softmax scaled by `beta`, then optionally
    normalized first and re-weighted by the per-row averages.
    """
    win = np.ascontiguousarray(window, dtype=np.float64)
    if win.ndim != 2:
        raise ValueError(f"window must be two-dimensional, got shape {win.shape}")
    m, k = win.shape
    if k < 2:
        raise ValueError("window must hold at least 2 entries per component")
    if fd_order < 1:
        raise ValueError(f"fd_order must be >= 1, got {fd_order}")

    order = min(fd_order, k - 1, MAX_ORDER)
    coeffs = _COEFFICIENTS[order]
    rows = win.tolist()

    slopes = [0.0] * m
    for i in range(m):
        row = rows[i]
        acc = 0.0
        for j in range(order + 1):
            acc += coeffs[j] * row[k - 1 - j]
        slopes[i] = acc

    alphas = [0.0] * m
    if beta == 0.0:
        # Softmax of a zero-scaled vector is exactly uniform; skipping the
        # epsilon guard here keeps the equal-weights limit exact.
        for i in range(m):
            alphas[i] = 1.0 / m
    else:
        if normalized:
            total_abs = 0.0
            for i in range(m):
                total_abs += abs(slopes[i])
            den = total_abs + epsilon
            for i in range(m):
                slopes[i] = slopes[i] / den
        # Shift so every exponent is nonpositive: by the max for positive
        # beta, by the min for negative beta (the max shift overflows there).
        shift = slopes[0]
        if beta > 0.0:
            for i in range(1, m):
                if slopes[i] > shift:
                    shift = slopes[i]
        else:
            for i in range(1, m):
                if slopes[i] < shift:
                    shift = slopes[i]
        z = 0.0
        for i in range(m):
            alphas[i] = math.exp(beta * (slopes[i] - shift))
            z += alphas[i]
        z += epsilon
        for i in range(m):
            alphas[i] /= z

    if loss_weighted:
        den = 0.0
        for i in range(m):
            acc = 0.0
            row = rows[i]
            for j in range(k):
                acc += row[j]
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

    return np.array(alphas)
