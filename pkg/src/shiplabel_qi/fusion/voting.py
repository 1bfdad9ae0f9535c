"""Majority and weighted-majority voting over per-branch predictions."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from shiplabel_qi.core.errors import AllZeroWeights, EmptyInput, VotingError
from shiplabel_qi.core.labels import NUM_CLASSES, QualityClass


def _classes(predictions: Sequence[QualityClass | int]) -> list[QualityClass]:
    if len(predictions) == 0:
        raise EmptyInput("Voting needs at least one prediction")
    return [QualityClass.parse(p) for p in predictions]


def _winner(tally: np.ndarray) -> QualityClass:
    # argmax resolves ties to the lowest class index
    return QualityClass(int(np.argmax(tally)))


def predict_majority(predictions: Sequence[QualityClass | int]) -> QualityClass:
    """Most frequent class; ties go to the lowest class index."""
    classes = _classes(predictions)
    tally = np.bincount([int(c) for c in classes], minlength=NUM_CLASSES)
    return _winner(tally)


def predict_weighted_majority(
    predictions: Sequence[QualityClass | int], weights: Sequence[float]
) -> QualityClass:
    """
    Class with the largest summed weight; ties go to the lowest class index.

    Raises:
        EmptyInput: no predictions
        AllZeroWeights: every weight is zero
        VotingError: weights misaligned with predictions, or negative
    """
    classes = _classes(predictions)
    if len(weights) != len(classes):
        raise VotingError(f"{len(classes)} predictions but {len(weights)} weights")
    w = np.asarray(weights, dtype=np.float64)
    if (w < 0).any() or not np.isfinite(w).all():
        raise VotingError(f"Weights must be finite and >= 0, got {list(weights)}")
    if not (w > 0).any():
        raise AllZeroWeights("At least one voting weight must be > 0")
    tally = np.zeros(NUM_CLASSES, dtype=np.float64)
    for cls, weight in zip(classes, w):
        tally[int(cls)] += weight
    return _winner(tally)


def branch_vote(probabilities: np.ndarray) -> QualityClass:
    """
    One branch's vote from its class probabilities.

    A (n_p, 5) stack of FAST patch probabilities is averaged first.
    """
    probs = np.asarray(probabilities, dtype=np.float64)
    if probs.ndim == 2:
        probs = probs.mean(axis=0)
    return _winner(probs)
