"""Softmax and cross-entropy."""

from __future__ import annotations

import numpy as np

from shiplabel_qi.core.errors import LabelOutOfRange, ShapeMismatch


def softmax(logits: np.ndarray) -> np.ndarray:
    """Max-subtracted softmax over the last axis."""
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def _check_labels(labels: np.ndarray, k: int) -> None:
    if labels.size and (labels.min() < 0 or labels.max() >= k):
        bad = labels[(labels < 0) | (labels >= k)][0]
        raise LabelOutOfRange(f"Label {int(bad)} outside [0, {k})")


def softmax_cross_entropy(logits: np.ndarray, label: int) -> tuple[float, np.ndarray]:
    """
    Loss -log p[label] of one logit vector and its gradient p - onehot(label).

    Raises:
        LabelOutOfRange: label not in [0, K)
    """
    logits = np.asarray(logits)
    if logits.ndim != 1:
        raise ShapeMismatch(f"Expected a logit vector, got shape {logits.shape}")
    loss, grad = batch_cross_entropy(logits[np.newaxis, :], np.array([label]))
    return loss, grad[0]


def batch_cross_entropy(logits: np.ndarray, labels: np.ndarray) -> tuple[float, np.ndarray]:
    """
    Mean loss over a batch and its gradient with respect to the logits.

    The gradient is (p - onehot) / N, so parameter gradients are batch means.
    """
    n, k = logits.shape
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (n,):
        raise ShapeMismatch(f"Expected {n} labels, got shape {labels.shape}")
    _check_labels(labels, k)
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=1))
    rows = np.arange(n)
    log_p = shifted[rows, labels] - log_z
    probs = np.exp(shifted - log_z[:, np.newaxis])
    grad = probs
    grad[rows, labels] -= 1.0
    return float(-log_p.mean()), grad / n
