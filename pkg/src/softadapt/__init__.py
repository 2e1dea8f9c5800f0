"""Adaptive weighting for multi-part objective functions.

Components of a composite loss are rebalanced every step from the recent
rate of change of each part (and optionally its magnitude), via a
max-stabilized softmax with temperature `beta`.  The package bundles the
weight computation, a weighted gradient-descent engine with fixed or
Barzilai-Borwein step sizes, 2-D benchmark problems, a desk-scale sparse
autoencoder demo, and a CLI experiment runner.

The per-step weight kernel has a compiled backend (built from
_kernel.pyx) and a pure-Python fallback, selected at import; see
softadapt.perf for a comparison benchmark.
"""

from . import benchmarks, sae
from ._backend import active_backend, available_backends, get_kernel, resolve_backend
from .benchmarks import BENCHMARKS, BenchmarkSpec, beale, check_gradient, rosenbrock
from .core import (
    VARIANTS,
    LossHistory,
    NonFiniteLossError,
    SlopeVector,
    SoftAdaptConfig,
    WeightVector,
    average_losses,
    compute_weights,
    slopes,
    true_loss,
    weighted_loss,
    weights_from_history,
)
from .finite_diff import InsufficientHistoryError, backward_coefficients, estimate_slope
from .optimize import (
    ComponentProblem,
    DescentTrace,
    DivergenceError,
    StepRule,
    bb_step_size,
    combined_direction,
    descend,
)

__version__ = "0.1.0"

__all__ = [
    "BENCHMARKS",
    "BenchmarkSpec",
    "ComponentProblem",
    "DescentTrace",
    "DivergenceError",
    "InsufficientHistoryError",
    "LossHistory",
    "NonFiniteLossError",
    "SlopeVector",
    "SoftAdaptConfig",
    "StepRule",
    "VARIANTS",
    "WeightVector",
    "active_backend",
    "available_backends",
    "average_losses",
    "backward_coefficients",
    "bb_step_size",
    "beale",
    "benchmarks",
    "check_gradient",
    "combined_direction",
    "compute_weights",
    "descend",
    "estimate_slope",
    "get_kernel",
    "resolve_backend",
    "rosenbrock",
    "sae",
    "slopes",
    "true_loss",
    "weighted_loss",
    "weights_from_history",
]
