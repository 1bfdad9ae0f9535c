"""Finite-difference verification of backpropagated gradients."""

from __future__ import annotations

import copy
import logging
import math
from dataclasses import dataclass

import numpy as np

from shiplabel_qi.core.rng import Xoshiro256
from shiplabel_qi.nn.loss import softmax_cross_entropy
from shiplabel_qi.nn.network import Sequential

logger = logging.getLogger(__name__)

DEFAULT_SAMPLES = 200
STEP = 1e-4
# Central differences at STEP are accurate to about STEP**2
MATCH_FLOOR = 1e-8
KINK_RTOL = 1e-2
KINK_ATOL = 1e-7
MAX_REDRAWS = 20
# Errors above this are checked against the one-sided slope split
KINK_ERROR = 1e-6


def _loss(network: Sequential, x: np.ndarray, label: int) -> float:
    logits = network.forward(x[np.newaxis])[0]
    loss, _ = softmax_cross_entropy(logits, label)
    return loss


def _sample_slots(sizes: list[int], count: int, rng: Xoshiro256) -> list[tuple[int, int]]:
    """count (tensor, flat index) pairs, visiting tensors round-robin."""
    return [(i % len(sizes), rng.below(sizes[i % len(sizes)])) for i in range(count)]


@dataclass(frozen=True)
class GradientCheckReport:
    """Outcome of one gradient check."""
    max_error: float
    requested: int
    compared: int
    redraws: int

    @property
    def dropped(self) -> int:
        """Sampled weights that stayed on a kink through every redraw."""
        return self.requested - self.compared

    @property
    def complete(self) -> bool:
        return self.compared == self.requested

    def passed(self, tolerance: float = 1e-4) -> bool:
        return self.complete and self.max_error < tolerance

    def to_dict(self) -> dict[str, float | int]:
        return {
            "max_error": self.max_error,
            "requested": self.requested,
            "compared": self.compared,
            "redraws": self.redraws,
            "dropped": self.dropped,
        }


def gradient_check_report(
    network: Sequential,
    sample: np.ndarray,
    label: int,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> GradientCheckReport:
    """
    Compare analytic and numeric gradients on sampled weights.

    The check runs on a float64 copy of network; network itself is not
    modified. For each sampled weight w the numeric gradient is the central
    difference with step h = 1e-4 * max(1, |w|), and the error is
    |g_a - g_n| / max(1e-8, |g_a| + |g_n|). Weights sitting on a ReLU or
    max-pool kink (one-sided differences disagree) are redrawn from the same
    tensor up to MAX_REDRAWS times; a slot still on a kink after that is
    dropped and counted, never compared. Differences below the
    finite-difference accuracy count as exact matches.

    Args:
        network: classifier to check (its backward pass is what is verified)
        sample: one input, without the batch axis
        label: target class of the sample
        samples: number of weights to sample, spread over every tensor
        seed: seed of the weight sampling stream
    """
    net = copy.deepcopy(network).astype(np.float64)
    x = np.asarray(sample, dtype=np.float64)

    net.zero_grads()
    logits = net.forward(x[np.newaxis])
    _, grad = softmax_cross_entropy(logits[0], label)
    net.backward(grad[np.newaxis])

    slots = list(net.named_parameters())
    analytic = [layer.grads[key].copy() for _, layer, key in slots]
    sizes = [layer.params[key].size for _, layer, key in slots]
    rng = Xoshiro256(seed)

    worst = 0.0
    redraws = 0
    compared = 0
    for t, flat in _sample_slots(sizes, samples, rng):
        name, layer, key = slots[t]
        for _ in range(MAX_REDRAWS + 1):
            param = layer.params[key].reshape(-1)
            w = float(param[flat])
            h = STEP * max(1.0, abs(w))
            base = _loss(net, x, label)
            param[flat] = w + h
            plus = _loss(net, x, label)
            param[flat] = w - h
            minus = _loss(net, x, label)
            param[flat] = w
            d_plus = (plus - base) / h
            d_minus = (base - minus) / h
            numeric = (plus - minus) / (2.0 * h)
            g = float(analytic[t].reshape(-1)[flat])
            diff = abs(g - numeric)
            error = 0.0 if diff <= MATCH_FLOOR else diff / max(1e-8, abs(g) + abs(numeric))
            one_sided = abs(d_plus - d_minus)
            # A kink inside [w - h, w + h] splits the one-sided slopes; a
            # mismatch no larger than that split is the kink's, not backprop's
            kink = one_sided > KINK_RTOL * (abs(d_plus) + abs(d_minus)) + KINK_ATOL or (
                error > KINK_ERROR and one_sided >= diff
            )
            if not kink:
                break
            redraws += 1
            flat = rng.below(sizes[t])
        else:
            logger.warning("%s: no kink-free weight after %d redraws", name, MAX_REDRAWS)
            continue

        compared += 1
        if error > worst:
            logger.debug("%s[%d]: analytic %.6g numeric %.6g", name, flat, g, numeric)
            worst = error

    report = GradientCheckReport(worst, samples, compared, redraws)
    logger.info(
        "Gradient check: max relative error %.3g over %d/%d weights (%d kink redraws)",
        worst, compared, samples, redraws,
    )
    return report


def gradient_check(
    network: Sequential,
    sample: np.ndarray,
    label: int,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> float:
    """
    Largest relative error between analytic and numeric gradients.

    Returns inf when any sampled weight could not be compared, so an
    incomplete check never passes. See gradient_check_report for details.
    """
    report = gradient_check_report(network, sample, label, samples, seed)
    return report.max_error if report.complete else math.inf
