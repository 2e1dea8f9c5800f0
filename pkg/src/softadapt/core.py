"""Loss histories and adaptive weight computation.

A composite objective F = sum of components f_k is rebalanced each step:
recent rates of change of the components pass through a max-stabilized
softmax with temperature `beta`, optionally after normalization, and the
result is optionally re-weighted by averaged loss magnitudes.  Positive
`beta` favors the worst-performing components (most positive slope),
negative `beta` the best-performing, and zero gives equal weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._backend import WeightKernel, get_kernel
from .finite_diff import MAX_ORDER, InsufficientHistoryError, estimate_slope

VARIANTS = ("original", "normalized", "loss-weighted", "normalized-loss-weighted")


class NonFiniteLossError(ValueError):
    """A recorded loss value was NaN or infinite."""

    def __init__(self, component: int, value: float):
        self.component = component
        self.value = value
        super().__init__(f"non-finite loss {value!r} for component {component}")


@dataclass
class SoftAdaptConfig:
    """Configuration of the adaptive weighting.

    `fd_order` defaults to min(history_len - 1, 5), the most accurate
    stencil the history can support.  `wait_for_full_history` switches on
    the strict warm-up that holds weights uniform until the history is
    full; by default adaptation starts as soon as two entries exist, with
    the difference order clamped to what is available.
    """

    beta: float = 0.1
    epsilon: float = 1e-8
    history_len: int = 5
    fd_order: int | None = None
    normalized: bool = False
    loss_weighted: bool = False
    wait_for_full_history: bool = False

    def __post_init__(self) -> None:
        if not np.isfinite(self.beta):
            raise ValueError(f"beta must be finite, got {self.beta}")
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.history_len < 2:
            raise ValueError(f"history_len must be >= 2, got {self.history_len}")
        if self.fd_order is None:
            self.fd_order = min(self.history_len - 1, MAX_ORDER)
        if not 1 <= self.fd_order <= self.history_len - 1:
            raise ValueError(
                f"fd_order must be in [1, history_len - 1], got {self.fd_order} "
                f"with history_len {self.history_len}"
            )

    @property
    def variant(self) -> str:
        """Canonical name of the variant combination."""
        if self.normalized and self.loss_weighted:
            return "normalized-loss-weighted"
        if self.normalized:
            return "normalized"
        if self.loss_weighted:
            return "loss-weighted"
        return "original"

    @classmethod
    def from_variant(cls, variant: str, **kwargs) -> "SoftAdaptConfig":
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
        return cls(
            normalized="normalized" in variant,
            loss_weighted="loss-weighted" in variant,
            **kwargs,
        )


class LossHistory:
    """Ring buffers of the most recent values of each loss component.

    All components advance together: record() appends one value per
    component, evicting the oldest entries once `history_len` values are
    held.  `count` is the total number of recorded steps, including
    evicted ones.
    """

    def __init__(self, n_components: int, history_len: int = 5):
        if n_components < 1:
            raise ValueError(f"n_components must be >= 1, got {n_components}")
        if history_len < 2:
            raise ValueError(f"history_len must be >= 2, got {history_len}")
        self.n_components = n_components
        self.history_len = history_len
        self._buf = np.zeros((n_components, history_len))
        self._head = 0
        self._size = 0
        self.count = 0

    @property
    def size(self) -> int:
        """Number of entries currently held per component."""
        return self._size

    def record(self, losses: Sequence[float] | np.ndarray) -> None:
        """Append one loss value per component, evicting the oldest if full.

        Rejects non-finite values (NonFiniteLossError, naming the
        component) and length mismatches (ValueError).
        """
        arr = np.asarray(losses, dtype=float)
        if arr.shape != (self.n_components,):
            raise ValueError(
                f"expected {self.n_components} losses, got shape {arr.shape}"
            )
        finite = np.isfinite(arr)
        if not finite.all():
            bad = int(np.argmin(finite))
            raise NonFiniteLossError(bad, float(arr[bad]))
        self._buf[:, self._head] = arr
        self._head = (self._head + 1) % self.history_len
        self._size = min(self._size + 1, self.history_len)
        self.count += 1

    def window(self) -> np.ndarray:
        """Current entries, shape (n_components, size), oldest column first."""
        if self._size < self.history_len:
            return self._buf[:, : self._size].copy()
        return np.concatenate(
            (self._buf[:, self._head :], self._buf[:, : self._head]), axis=1
        )

    def buffers(self) -> list[list[float]]:
        """Per-component entries as lists, oldest first."""
        return self.window().tolist()


@dataclass
class SlopeVector:
    """Recent rates of change of each component, optionally normalized."""

    values: np.ndarray
    normalized_values: np.ndarray | None = None


@dataclass
class WeightVector:
    """The per-component weights produced for one step."""

    alphas: np.ndarray

    def __len__(self) -> int:
        return len(self.alphas)


def slopes(history: LossHistory, config: SoftAdaptConfig) -> SlopeVector:
    """Per-component slope estimates from the history.

    The difference order is clamped to the entries available.  Normalized
    values (each slope divided by the total absolute slope plus epsilon)
    are populated only when the config asks for them.
    """
    if history.size < 2:
        raise InsufficientHistoryError(
            f"need at least 2 recorded steps to estimate slopes, have {history.size}"
        )
    win = history.window()
    values = np.array(
        [estimate_slope(win[i], config.fd_order) for i in range(history.n_components)]
    )
    normalized_values = None
    if config.normalized:
        normalized_values = values / (np.abs(values).sum() + config.epsilon)
    return SlopeVector(values, normalized_values)


def average_losses(history: LossHistory) -> np.ndarray:
    """Arithmetic mean of each component's current entries."""
    if history.size < 1:
        raise InsufficientHistoryError("history is empty")
    return history.window().mean(axis=1)


def compute_weights(
    slope_vec: SlopeVector,
    avg_losses: Sequence[float] | np.ndarray | None,
    config: SoftAdaptConfig,
) -> WeightVector:
    """Weight vector from slopes and (for the loss-weighted variant) averages.

    The softmax is stabilized by subtracting the maximum before
    exponentiation, so arbitrarily large slopes stay finite; epsilon is
    added to each denominator, which leaves the weight sum marginally
    below one.  At beta == 0 the softmax stage is exactly uniform.
    """
    if config.normalized:
        t = slope_vec.normalized_values
        if t is None:
            t = slope_vec.values / (np.abs(slope_vec.values).sum() + config.epsilon)
    else:
        t = slope_vec.values
    t = np.asarray(t, dtype=float)
    m = t.shape[0]
    if m < 1:
        raise ValueError("need at least one component")

    if config.beta == 0.0:
        alphas = np.full(m, 1.0 / m)
    else:
        # Shift so every exponent is nonpositive: by the max for positive
        # beta, by the min for negative beta (the max shift overflows there).
        shift = t.max() if config.beta > 0 else t.min()
        z = np.exp(config.beta * (t - shift))
        alphas = z / (z.sum() + config.epsilon)

    if config.loss_weighted:
        if avg_losses is None:
            raise ValueError("loss-weighted variant requires averaged losses")
        f = np.asarray(avg_losses, dtype=float)
        if f.shape != (m,):
            raise ValueError(f"expected {m} averaged losses, got shape {f.shape}")
        if (f < 0).any():
            bad = int(np.argmax(f < 0))
            raise ValueError(
                "loss-weighted variant requires nonnegative averaged losses; "
                f"component {bad} averaged to {f[bad]}"
            )
        weighted = f * alphas
        alphas = weighted / (weighted.sum() + config.epsilon)

    return WeightVector(alphas)


def weighted_loss(weights: WeightVector, losses: Sequence[float] | np.ndarray) -> float:
    """The weighted combination sum(alpha_k * l_k) fed to the optimizer."""
    l = np.asarray(losses, dtype=float)
    if l.shape != weights.alphas.shape:
        raise ValueError(
            f"weights and losses disagree in length: {weights.alphas.shape} vs {l.shape}"
        )
    return float(np.dot(weights.alphas, l))


def true_loss(losses: Sequence[float] | np.ndarray) -> float:
    """The unweighted sum of component losses, used for all reporting."""
    l = np.asarray(losses, dtype=float)
    if l.size == 0:
        raise ValueError("losses must be nonempty")
    return float(l.sum())


def weights_from_history(
    history: LossHistory,
    config: SoftAdaptConfig,
    kernel: WeightKernel | None = None,
) -> WeightVector:
    """One-call weight update from a history: the per-step hot path.

    Until two steps are recorded (or `history_len` steps, when
    wait_for_full_history is set) the weights are uniform.  Afterwards the
    computation is delegated to the selected backend kernel and matches
    compute_weights(slopes(...), average_losses(...), config).
    """
    m = history.n_components
    warm = config.history_len if config.wait_for_full_history else 2
    if history.size < warm:
        return WeightVector(np.full(m, 1.0 / m))
    if kernel is None:
        kernel = get_kernel()
    alphas = kernel(
        history.window(),
        config.beta,
        config.epsilon,
        config.fd_order,
        config.normalized,
        config.loss_weighted,
    )
    return WeightVector(alphas)
