"""Two-dimensional test problems with analytic per-component gradients."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .optimize import ComponentProblem


@dataclass(frozen=True)
class BenchmarkSpec:
    """A named problem with its known minimum and a default start."""

    name: str
    problem: ComponentProblem
    known_minimum: np.ndarray
    minimum_value: float
    default_x0: np.ndarray


def _rosenbrock_eval(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    r1 = 1.0 - x[0]
    r2 = x[1] - x[0] * x[0]
    losses = np.array([r1 * r1, 100.0 * r2 * r2])
    grads = np.array(
        [
            [-2.0 * r1, 0.0],
            [-400.0 * x[0] * r2, 200.0 * r2],
        ]
    )
    return losses, grads


def rosenbrock() -> BenchmarkSpec:
    """The banana-valley function split into its two squared terms.

    f1 = (1 - x)^2 and f2 = 100 (y - x^2)^2; both vanish at the single
    global minimum (1, 1), so the components share their minimum.
    """
    return BenchmarkSpec(
        name="rosenbrock",
        problem=ComponentProblem(dim=2, n_components=2, eval=_rosenbrock_eval),
        known_minimum=np.array([1.0, 1.0]),
        minimum_value=0.0,
        default_x0=np.array([-1.0, -1.0]),
    )


def _beale_eval(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    xx, y = x[0], x[1]
    r1 = 1.5 - xx + xx * y
    r2 = 2.25 - xx + xx * y * y
    r3 = 2.625 - xx + xx * y * y * y
    losses = np.array([r1 * r1, r2 * r2, r3 * r3])
    grads = np.array(
        [
            [2.0 * r1 * (y - 1.0), 2.0 * r1 * xx],
            [2.0 * r2 * (y * y - 1.0), 2.0 * r2 * 2.0 * xx * y],
            [2.0 * r3 * (y * y * y - 1.0), 2.0 * r3 * 3.0 * xx * y * y],
        ]
    )
    return losses, grads


def beale() -> BenchmarkSpec:
    """Beale's function split into its three squared terms.

    All three components vanish at (3, 0.5), the global minimum, on the
    standard evaluation domain [-4.5, 4.5]^2.
    """
    return BenchmarkSpec(
        name="beale",
        problem=ComponentProblem(dim=2, n_components=3, eval=_beale_eval),
        known_minimum=np.array([3.0, 0.5]),
        minimum_value=0.0,
        default_x0=np.array([1.0, 1.0]),
    )


BENCHMARKS = {"rosenbrock": rosenbrock, "beale": beale}


def check_gradient(problem: ComponentProblem, x: np.ndarray, h: float = 1e-6) -> float:
    """Worst relative error of the analytic gradients vs central differences.

    Per component and coordinate, the error is |fd - analytic| scaled by
    max(1, |analytic|), so near-zero entries are judged absolutely.
    """
    if h <= 0:
        raise ValueError(f"h must be positive, got {h}")
    x = np.asarray(x, dtype=float)
    _, analytic = problem.eval(x)
    analytic = np.asarray(analytic, dtype=float)
    worst = 0.0
    for j in range(problem.dim):
        step = np.zeros(problem.dim)
        step[j] = h
        plus, _ = problem.eval(x + step)
        minus, _ = problem.eval(x - step)
        fd = (np.asarray(plus, float) - np.asarray(minus, float)) / (2.0 * h)
        err = np.abs(fd - analytic[:, j]) / np.maximum(1.0, np.abs(analytic[:, j]))
        worst = max(worst, float(err.max()))
    return worst
