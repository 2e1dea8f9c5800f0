"""Backward finite differences over short, unit-spaced histories.

The weighting scheme needs the rate of change of each loss series at its
newest sample.  Histories are a handful of optimizer steps long and one
step apart, so first derivatives are taken with tabulated backward
stencils; order p is exact on polynomials of degree p.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

MAX_ORDER = 5

# First-derivative stencils on the points {0, -1, ..., -p}, unit spacing,
# coefficients ordered newest sample first.  Hard-coded from the Taylor
# system for each stencil; the test suite re-derives them independently.
_COEFFICIENTS: dict[int, tuple[float, ...]] = {
    1: (1.0, -1.0),
    2: (3.0 / 2.0, -2.0, 1.0 / 2.0),
    3: (11.0 / 6.0, -3.0, 3.0 / 2.0, -1.0 / 3.0),
    4: (25.0 / 12.0, -4.0, 3.0, -4.0 / 3.0, 1.0 / 4.0),
    5: (137.0 / 60.0, -5.0, 5.0, -10.0 / 3.0, 5.0 / 4.0, -1.0 / 5.0),
}


class InsufficientHistoryError(ValueError):
    """A series is too short for the requested estimate."""


def backward_coefficients(order: int) -> np.ndarray:
    """Coefficients of the backward first-derivative stencil of accuracy `order`.

    Returns order + 1 coefficients, newest sample first, for unit spacing.
    Raises ValueError outside the supported range [1, 5].
    """
    if not 1 <= order <= MAX_ORDER:
        raise ValueError(f"order must be in [1, {MAX_ORDER}], got {order}")
    return np.array(_COEFFICIENTS[order])


def estimate_slope(samples: Sequence[float] | np.ndarray, order: int) -> float:
    """Estimate the derivative at the newest of unit-spaced samples.

    `samples` is ordered oldest first.  The requested order is clamped to
    what the history supports, min(order, len(samples) - 1, 5), so short
    histories degrade gracefully instead of failing.

    Raises InsufficientHistoryError for fewer than 2 samples.
    """
    values = np.asarray(samples, dtype=float)
    if values.ndim != 1:
        raise ValueError(f"samples must be one-dimensional, got shape {values.shape}")
    if values.size < 2:
        raise InsufficientHistoryError(
            f"need at least 2 samples to estimate a slope, got {values.size}"
        )
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    p = min(order, values.size - 1, MAX_ORDER)
    coeffs = _COEFFICIENTS[p]
    newest_first = values[::-1]
    return float(np.dot(coeffs, newest_first[: p + 1]))
