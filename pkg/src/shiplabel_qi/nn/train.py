"""Minibatch SGD with momentum on softmax cross-entropy."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from shiplabel_qi.core.errors import ConfigError, EmptyDataset, NonFiniteError, ShapeMismatch
from shiplabel_qi.core.rng import Xoshiro256
from shiplabel_qi.core.serial import check_keys
from shiplabel_qi.nn.loss import batch_cross_entropy, softmax
from shiplabel_qi.nn.network import Sequential

logger = logging.getLogger(__name__)

# Stream tags under the training seed
ORDER_STREAM = 1


@dataclass(frozen=True)
class TrainConfig:
    """
    Optimizer settings for one network.

    Example:
        >>> TrainConfig().with_epochs(20).with_learning_rate(0.005)
    """
    learning_rate: float = 0.01
    momentum: float = 0.9
    epochs: int = 10
    batch_size: int = 16
    seed: int = 0
    input_side: int = 64

    def __post_init__(self) -> None:
        if not self.learning_rate > 0:
            raise ConfigError(f"learning_rate must be > 0, got {self.learning_rate}")
        if not 0 <= self.momentum < 1:
            raise ConfigError(f"momentum must lie in [0, 1), got {self.momentum}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.input_side < 8:
            raise ConfigError(f"input_side must be >= 8, got {self.input_side}")

    def with_epochs(self, epochs: int) -> TrainConfig:
        return replace(self, epochs=epochs)

    def with_learning_rate(self, learning_rate: float) -> TrainConfig:
        return replace(self, learning_rate=learning_rate)

    def with_seed(self, seed: int) -> TrainConfig:
        return replace(self, seed=seed)

    def with_batch_size(self, batch_size: int) -> TrainConfig:
        return replace(self, batch_size=batch_size)

    def with_input_side(self, side: int) -> TrainConfig:
        return replace(self, input_side=side)

    def to_dict(self) -> dict[str, Any]:
        return {
            "learning_rate": self.learning_rate,
            "momentum": self.momentum,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "seed": self.seed,
            "input_side": self.input_side,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> TrainConfig:
        check_keys(cls, data)
        defaults = cls()
        return cls(
            learning_rate=float(data.get("learning_rate", defaults.learning_rate)),
            momentum=float(data.get("momentum", defaults.momentum)),
            epochs=int(data.get("epochs", defaults.epochs)),
            batch_size=int(data.get("batch_size", defaults.batch_size)),
            seed=int(data.get("seed", defaults.seed)),
            input_side=int(data.get("input_side", defaults.input_side)),
        )


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    loss: float
    accuracy: float


@dataclass
class TrainResult:
    """Per-epoch mean loss and training accuracy."""
    history: list[EpochStats] = field(default_factory=list)

    @property
    def final_loss(self) -> float:
        return self.history[-1].loss if self.history else math.nan

    @property
    def final_accuracy(self) -> float:
        return self.history[-1].accuracy if self.history else math.nan

    def losses(self) -> list[float]:
        return [h.loss for h in self.history]

    def to_dict(self) -> dict[str, Any]:
        return {
            "history": [
                {"epoch": h.epoch, "loss": h.loss, "accuracy": h.accuracy}
                for h in self.history
            ]
        }


class SGD:
    """v = momentum * v + g; w -= lr * v, per parameter array."""

    def __init__(self, network: Sequential, learning_rate: float, momentum: float):
        self.network = network
        self.learning_rate = learning_rate
        self.momentum = momentum
        self.velocity = [np.zeros_like(t) for t in network.tensors()]

    def step(self) -> None:
        slots = list(self.network.named_parameters())
        for v, (_, layer, key) in zip(self.velocity, slots):
            v *= self.momentum
            v += layer.grads[key]
            layer.params[key] -= self.learning_rate * v


def fit(
    network: Sequential,
    inputs: np.ndarray,
    labels: np.ndarray,
    config: TrainConfig,
    name: str = "network",
) -> TrainResult:
    """
    Train network in place on (inputs, labels).

    Samples are shuffled once per epoch by a stream seeded from config.seed,
    so the trained parameters are a pure function of the seed, the initial
    parameters and the sample order.

    Raises:
        EmptyDataset: no samples
        NonFiniteError: loss or parameters became NaN or infinite
    """
    n = len(inputs)
    if n == 0:
        raise EmptyDataset(f"Cannot train {name} on an empty split")
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (n,):
        raise ShapeMismatch(f"{n} inputs but {labels.size} labels")

    order_rng = Xoshiro256(config.seed).fork(ORDER_STREAM)
    optimizer = SGD(network, config.learning_rate, config.momentum)
    result = TrainResult()
    for epoch in range(1, config.epochs + 1):
        order = np.asarray(order_rng.permutation(n), dtype=np.int64)
        total_loss = 0.0
        correct = 0
        for start in range(0, n, config.batch_size):
            batch = order[start:start + config.batch_size]
            network.zero_grads()
            logits = network.forward(inputs[batch])
            loss, grad = batch_cross_entropy(logits, labels[batch])
            if not math.isfinite(loss):
                raise NonFiniteError(f"{name}: loss became {loss} in epoch {epoch}")
            network.backward(grad.astype(logits.dtype))
            optimizer.step()
            total_loss += loss * len(batch)
            correct += int((logits.argmax(axis=1) == labels[batch]).sum())
            logger.debug("%s epoch %d batch %d loss %.5f", name, epoch, start // config.batch_size, loss)
        if not network.all_finite():
            raise NonFiniteError(f"{name}: parameters became non-finite in epoch {epoch}")
        stats = EpochStats(epoch=epoch, loss=total_loss / n, accuracy=correct / n)
        result.history.append(stats)
        logger.info(
            "%s epoch %d/%d: loss %.4f, accuracy %.3f",
            name, epoch, config.epochs, stats.loss, stats.accuracy,
        )
    return result


def predict_proba(network: Sequential, inputs: np.ndarray, batch_size: int = 64) -> np.ndarray:
    """Softmax probabilities for inputs, computed in batches."""
    out = [softmax(network.forward(inputs[i:i + batch_size])) for i in range(0, len(inputs), batch_size)]
    return np.concatenate(out, axis=0) if out else np.zeros((0, 0))
