"""Weighted gradient descent over multi-component objectives.

Per-component gradients are combined into the step direction
h = sum(alpha_k * grad f_k), with the weights refreshed from the loss
history every iteration, under a fixed or Barzilai-Borwein step-size
rule.  Convergence is always judged on the unweighted true loss (or the
full gradient norm), never on the weighted loss the direction encodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._backend import get_kernel
from .core import LossHistory, SoftAdaptConfig, WeightVector

ProblemEval = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]

TERM_CONVERGED = "converged"
TERM_MAX_ITERS = "max_iters"
TERM_DIVERGED = "diverged"


@dataclass
class ComponentProblem:
    """A multi-part objective over a shared parameter vector.

    `eval` maps x of shape (dim,) to (losses, gradients) with losses of
    shape (n_components,) and gradients of shape (n_components, dim).
    """

    dim: int
    n_components: int
    eval: ProblemEval


@dataclass
class StepRule:
    """Step-size policy: a fixed rate or the Barzilai-Borwein scheme.

    The adaptive scheme clamps to [eta_min, eta_max] and falls back to
    eta_min whenever the curvature estimate is non-positive or non-finite.
    `bb_variant` picks the long form (dx.dx / dx.dg, the default) or the
    short form (dx.dg / dg.dg).
    """

    kind: str = "fixed"
    eta: float = 1e-3
    eta_min: float = 1e-4
    eta_max: float = 1e-1
    bb_variant: str = "long"

    def __post_init__(self) -> None:
        if self.kind not in ("fixed", "barzilai_borwein"):
            raise ValueError(f"kind must be 'fixed' or 'barzilai_borwein', got {self.kind!r}")
        if self.bb_variant not in ("long", "short"):
            raise ValueError(f"bb_variant must be 'long' or 'short', got {self.bb_variant!r}")
        if not 0 < self.eta_min <= self.eta_max:
            raise ValueError(
                f"need 0 < eta_min <= eta_max, got {self.eta_min} and {self.eta_max}"
            )
        if self.kind == "fixed" and self.eta <= 0:
            raise ValueError(f"fixed step size must be positive, got {self.eta}")

    @classmethod
    def fixed(cls, eta: float = 1e-3) -> "StepRule":
        return cls(kind="fixed", eta=eta)

    @classmethod
    def barzilai_borwein(
        cls, eta_min: float = 1e-4, eta_max: float = 1e-1, variant: str = "long"
    ) -> "StepRule":
        return cls(kind="barzilai_borwein", eta_min=eta_min, eta_max=eta_max, bb_variant=variant)


@dataclass
class DescentTrace:
    """Per-iteration record of a descent run.

    Row 0 is the initial state; row i (i >= 1) is the iterate after step
    i.  `etas[i]` is the step size that produced row i; `etas[0]` repeats
    the initial step-size state (the fixed rate, or eta_min for the
    adaptive rule) so every row is complete.
    """

    xs: np.ndarray
    losses: np.ndarray
    alphas: np.ndarray
    etas: np.ndarray
    tloss: np.ndarray
    wloss: np.ndarray
    dir_norms: np.ndarray
    termination: str
    iterations: int

    @property
    def n_records(self) -> int:
        return self.xs.shape[0]

    @property
    def final_x(self) -> np.ndarray:
        return self.xs[-1]

    @property
    def final_tloss(self) -> float:
        return float(self.tloss[-1])


class DivergenceError(RuntimeError):
    """An iterate or loss became non-finite; carries the trace so far."""

    def __init__(self, message: str, trace: DescentTrace):
        super().__init__(message)
        self.trace = trace


def combined_direction(
    weights: WeightVector | Sequence[float] | np.ndarray, gradients: np.ndarray
) -> np.ndarray:
    """The weighted step direction sum(alpha_k * grad f_k)."""
    alphas = weights.alphas if isinstance(weights, WeightVector) else np.asarray(weights, float)
    grads = np.asarray(gradients, dtype=float)
    if grads.ndim != 2 or grads.shape[0] != alphas.shape[0]:
        raise ValueError(
            f"gradients must have shape (n_components, dim) matching {alphas.shape[0]} "
            f"weights, got {grads.shape}"
        )
    return alphas @ grads


def bb_step_size(dx: np.ndarray, dg: np.ndarray, rule: StepRule) -> float:
    """Barzilai-Borwein step from iterate and direction differences.

    Returns eta_min whenever dx.dg is non-positive or the quotient is
    non-finite, otherwise the clamped quotient.
    """
    dx = np.asarray(dx, dtype=float)
    dg = np.asarray(dg, dtype=float)
    curvature = float(np.dot(dx, dg))
    if not math.isfinite(curvature) or curvature <= 0.0:
        return rule.eta_min
    if rule.bb_variant == "long":
        ratio = float(np.dot(dx, dx)) / curvature
    else:
        denom = float(np.dot(dg, dg))
        if denom <= 0.0 or not math.isfinite(denom):
            return rule.eta_min
        ratio = curvature / denom
    if not math.isfinite(ratio):
        return rule.eta_min
    return min(max(ratio, rule.eta_min), rule.eta_max)


def descend(
    problem: ComponentProblem,
    sa_config: SoftAdaptConfig,
    rule: StepRule,
    x0: Sequence[float] | np.ndarray,
    *,
    max_iters: int = 200_000,
    tol: float = 1e-4,
    criterion: str = "tloss",
    backend: str = "auto",
) -> DescentTrace:
    """Run weighted gradient descent and record a full trace.

    Terminates when the true loss (criterion "tloss") or the norm of the
    full gradient (criterion "grad_norm") drops below `tol`, or after
    `max_iters` steps.  A non-finite iterate or loss raises
    DivergenceError carrying the valid prefix of the trace.
    """
    x = np.asarray(x0, dtype=float).copy()
    if x.shape != (problem.dim,):
        raise ValueError(f"x0 must have shape ({problem.dim},), got {x.shape}")
    if max_iters < 1:
        raise ValueError(f"max_iters must be >= 1, got {max_iters}")
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if criterion not in ("tloss", "grad_norm"):
        raise ValueError(f"criterion must be 'tloss' or 'grad_norm', got {criterion!r}")

    kernel = get_kernel(backend)
    m = problem.n_components
    history = LossHistory(m, sa_config.history_len)
    uniform = np.full(m, 1.0 / m)

    xs: list[np.ndarray] = []
    loss_rows: list[np.ndarray] = []
    alpha_rows: list[np.ndarray] = []
    etas: list[float] = []
    dir_norms: list[float] = []

    warm = sa_config.history_len if sa_config.wait_for_full_history else 2
    eta0 = rule.eta if rule.kind == "fixed" else rule.eta_min

    def build_trace(termination: str, iterations: int) -> DescentTrace:
        count = len(xs)
        x_arr = np.array(xs).reshape(count, problem.dim)
        loss_arr = np.array(loss_rows).reshape(count, m)
        alpha_arr = np.array(alpha_rows).reshape(count, m)
        return DescentTrace(
            xs=x_arr,
            losses=loss_arr,
            alphas=alpha_arr,
            etas=np.array(etas),
            tloss=loss_arr.sum(axis=1),
            wloss=(alpha_arr * loss_arr).sum(axis=1),
            dir_norms=np.array(dir_norms),
            termination=termination,
            iterations=iterations,
        )

    losses, grads = problem.eval(x)
    losses = np.asarray(losses, dtype=float)
    grads = np.asarray(grads, dtype=float)
    if losses.shape != (m,) or grads.shape != (m, problem.dim):
        raise ValueError(
            f"problem.eval must return shapes ({m},) and ({m}, {problem.dim}), "
            f"got {losses.shape} and {grads.shape}"
        )
    if not np.isfinite(losses).all():
        raise DivergenceError(
            "non-finite loss at the starting point", build_trace(TERM_DIVERGED, 0)
        )

    history.record(losses)
    alphas = uniform
    xs.append(x.copy())
    loss_rows.append(losses)
    alpha_rows.append(alphas)
    etas.append(eta0)
    dir_norms.append(float(np.linalg.norm(combined_direction(alphas, grads))))

    def converged() -> bool:
        if criterion == "tloss":
            return float(losses.sum()) < tol
        return float(np.linalg.norm(grads.sum(axis=0))) < tol

    if converged():
        return build_trace(TERM_CONVERGED, 0)

    prev_x: np.ndarray | None = None
    prev_h: np.ndarray | None = None

    for i in range(max_iters):
        h = alphas @ grads
        if rule.kind == "fixed":
            eta = rule.eta
        elif prev_h is None:
            eta = rule.eta_min
        else:
            eta = bb_step_size(x - prev_x, h - prev_h, rule)
        prev_x, prev_h = x, h
        x = x - eta * h

        if not np.isfinite(x).all():
            raise DivergenceError(
                f"non-finite iterate at iteration {i + 1}", build_trace(TERM_DIVERGED, i)
            )
        losses, grads = problem.eval(x)
        losses = np.asarray(losses, dtype=float)
        grads = np.asarray(grads, dtype=float)
        if not (np.isfinite(losses).all() and np.isfinite(grads).all()):
            raise DivergenceError(
                f"non-finite loss or gradient at iteration {i + 1}",
                build_trace(TERM_DIVERGED, i),
            )

        history.record(losses)
        if history.size < warm:
            alphas = uniform
        else:
            alphas = kernel(
                history.window(),
                sa_config.beta,
                sa_config.epsilon,
                sa_config.fd_order,
                sa_config.normalized,
                sa_config.loss_weighted,
            )

        xs.append(x.copy())
        loss_rows.append(losses)
        alpha_rows.append(alphas)
        etas.append(eta)
        dir_norms.append(float(np.linalg.norm(h)))

        if converged():
            return build_trace(TERM_CONVERGED, i + 1)

    return build_trace(TERM_MAX_ITERS, max_iters)
