"""Desk-scale sparse autoencoder driven by adaptive loss weighting.

A tiny fully connected net (rectifier hidden layer, logistic output)
reconstructs synthetic sparse binary patterns.  Its loss has two parts,
the mean squared reconstruction error and the batch-mean L1 norm of the
hidden activations.  Training either fixes the penalty weight (the
classic hand-tuned lambda) or adapts both weights from the loss history,
combining the two gradient sets with the resulting alphas.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import LossHistory, SoftAdaptConfig, weights_from_history
from .optimize import DivergenceError

Grads = tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]


@dataclass
class TinyNet:
    """Encoder/decoder weights: w1, b1 encode; w2, b2 decode."""

    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.w1.shape[1], self.w1.shape[0], self.w2.shape[0]

    def params(self) -> Grads:
        return self.w1, self.b1, self.w2, self.b2


@dataclass
class SaeLosses:
    mse: float
    l1_act: float

    @property
    def total(self) -> float:
        return self.mse + self.l1_act


@dataclass
class TrainConfig:
    """Training setup; mode is "softadapt" or "fixed" (constant lambda)."""

    epochs: int = 30
    batch_size: int = 32
    lr: float = 1e-2
    seed: int = 7
    mode: str = "softadapt"
    lam: float = 1e-4
    softadapt: SoftAdaptConfig = field(
        default_factory=lambda: SoftAdaptConfig(loss_weighted=True)
    )

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.lr <= 0:
            raise ValueError(f"lr must be positive, got {self.lr}")
        if self.mode not in ("softadapt", "fixed"):
            raise ValueError(f"mode must be 'softadapt' or 'fixed', got {self.mode!r}")
        if self.lam < 0:
            raise ValueError(f"lambda must be nonnegative, got {self.lam}")


@dataclass
class SaeTrace:
    """Per-epoch record: losses on the full dataset and the active weights."""

    mse: np.ndarray
    l1: np.ndarray
    alpha_mse: np.ndarray
    alpha_l1: np.ndarray
    tloss: np.ndarray

    @property
    def epochs(self) -> int:
        return len(self.mse)

    @property
    def final_tloss(self) -> float:
        return float(self.tloss[-1])


def generate_patterns(seed: int, count: int, dim: int, active: int) -> np.ndarray:
    """Binary patterns with exactly `active` ones at seeded positions."""
    if not 0 < active <= dim:
        raise ValueError(f"active must be in (0, dim], got {active} with dim {dim}")
    rng = np.random.default_rng(seed)
    data = np.zeros((count, dim))
    for i in range(count):
        data[i, rng.choice(dim, size=active, replace=False)] = 1.0
    return data


def init_net(seed: int, dims: tuple[int, int, int] = (64, 16, 64)) -> TinyNet:
    """Seeded net with 1/sqrt(fan-in) Gaussian weights and zero biases."""
    d_in, d_hidden, d_out = dims
    rng = np.random.default_rng([seed, 1])
    return TinyNet(
        w1=rng.normal(0.0, 1.0 / np.sqrt(d_in), (d_hidden, d_in)),
        b1=np.zeros(d_hidden),
        w2=rng.normal(0.0, 1.0 / np.sqrt(d_hidden), (d_out, d_hidden)),
        b2=np.zeros(d_out),
    )


def forward(net: TinyNet, batch: np.ndarray) -> tuple[np.ndarray, np.ndarray, SaeLosses]:
    """Reconstructions, hidden activations, and both loss components.

    mse averages the squared error over batch elements and coordinates;
    l1_act averages the per-sample L1 norm of the hidden activations over
    the batch.
    """
    batch = np.asarray(batch, dtype=float)
    if batch.ndim != 2 or batch.shape[1] != net.w1.shape[1]:
        raise ValueError(
            f"batch must have shape (n, {net.w1.shape[1]}), got {batch.shape}"
        )
    z1 = batch @ net.w1.T + net.b1
    hidden = np.maximum(z1, 0.0)
    z2 = hidden @ net.w2.T + net.b2
    recon = 1.0 / (1.0 + np.exp(-z2))
    mse = float(np.mean((batch - recon) ** 2))
    l1_act = float(np.abs(hidden).sum(axis=1).mean())
    return recon, hidden, SaeLosses(mse=mse, l1_act=l1_act)


def backward(net: TinyNet, batch: np.ndarray) -> tuple[Grads, Grads]:
    """Parameter gradients of each loss component, (grad_mse, grad_l1).

    The two gradient sets stay separate so adaptive weights can combine
    them; the activation penalty does not touch the decoder, so its
    decoder block is zero.  The rectifier subgradient at exactly zero is
    taken as zero.
    """
    batch = np.asarray(batch, dtype=float)
    if batch.ndim != 2 or batch.shape[1] != net.w1.shape[1]:
        raise ValueError(
            f"batch must have shape (n, {net.w1.shape[1]}), got {batch.shape}"
        )
    n = batch.shape[0]
    z1 = batch @ net.w1.T + net.b1
    hidden = np.maximum(z1, 0.0)
    z2 = hidden @ net.w2.T + net.b2
    recon = 1.0 / (1.0 + np.exp(-z2))
    active = (z1 > 0).astype(float)

    d_recon = 2.0 * (recon - batch) / batch.size
    dz2 = d_recon * recon * (1.0 - recon)
    gw2 = dz2.T @ hidden
    gb2 = dz2.sum(axis=0)
    dz1 = (dz2 @ net.w2) * active
    grad_mse: Grads = (dz1.T @ batch, dz1.sum(axis=0), gw2, gb2)

    # Rectified activations are nonnegative, so d|a|/dz1 is the active mask.
    dz1_l1 = active / n
    grad_l1: Grads = (
        dz1_l1.T @ batch,
        dz1_l1.sum(axis=0),
        np.zeros_like(net.w2),
        np.zeros_like(net.b2),
    )
    return grad_mse, grad_l1


def train(net: TinyNet, dataset: np.ndarray, config: TrainConfig) -> SaeTrace:
    """Train in place and record per-epoch losses, weights, and true loss.

    In softadapt mode the per-step weights come from the two-component
    loss history, starting from the equal split (0.5, 0.5); in fixed mode
    they stay at (1, lambda).  Epoch rows evaluate the full dataset.
    """
    dataset = np.asarray(dataset, dtype=float)
    rng = np.random.default_rng([config.seed, 2])
    history = LossHistory(2, config.softadapt.history_len)
    alphas = np.array([0.5, 0.5]) if config.mode == "softadapt" else np.array([1.0, config.lam])

    mse_rows, l1_rows, a1_rows, a2_rows, tloss_rows = [], [], [], [], []

    def collect_trace() -> SaeTrace:
        return SaeTrace(
            mse=np.array(mse_rows),
            l1=np.array(l1_rows),
            alpha_mse=np.array(a1_rows),
            alpha_l1=np.array(a2_rows),
            tloss=np.array(tloss_rows),
        )

    for epoch in range(config.epochs):
        order = rng.permutation(len(dataset))
        for start in range(0, len(dataset), config.batch_size):
            batch = dataset[order[start : start + config.batch_size]]
            _, _, batch_losses = forward(net, batch)
            if not (np.isfinite(batch_losses.mse) and np.isfinite(batch_losses.l1_act)):
                raise DivergenceError(
                    f"non-finite loss in epoch {epoch + 1}", collect_trace()
                )
            if config.mode == "softadapt":
                history.record([batch_losses.mse, batch_losses.l1_act])
                alphas = weights_from_history(history, config.softadapt).alphas
            grad_mse, grad_l1 = backward(net, batch)
            for param, g_mse, g_l1 in zip(net.params(), grad_mse, grad_l1):
                param -= config.lr * (alphas[0] * g_mse + alphas[1] * g_l1)

        _, _, full = forward(net, dataset)
        if not (np.isfinite(full.mse) and np.isfinite(full.l1_act)):
            raise DivergenceError(
                f"non-finite loss after epoch {epoch + 1}", collect_trace()
            )
        mse_rows.append(full.mse)
        l1_rows.append(full.l1_act)
        a1_rows.append(float(alphas[0]))
        a2_rows.append(float(alphas[1]))
        tloss_rows.append(full.total)

    return collect_trace()
