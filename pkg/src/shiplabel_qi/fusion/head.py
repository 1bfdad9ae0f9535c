"""Stacked-generalization head over fused branch features."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Union

import numpy as np

from shiplabel_qi.codec.weights import (
    FUSION_BRANCH_ID,
    WeightFile,
    weights_from_bytes,
    weights_to_bytes,
)
from shiplabel_qi.core.errors import DimMismatch, IoFailure, WeightFormatError
from shiplabel_qi.core.labels import CLASS_ACTIONS, NUM_CLASSES, QualityClass
from shiplabel_qi.core.rng import Xoshiro256, derive_seed
from shiplabel_qi.fusion.config import FusionConfig
from shiplabel_qi.nn.extractor import FeatureVector
from shiplabel_qi.nn.layers import Dense, ReLU
from shiplabel_qi.nn.loss import softmax
from shiplabel_qi.nn.network import Sequential, he_init
from shiplabel_qi.nn.train import TrainConfig, TrainResult, fit

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Prediction:
    """Predicted class and the five class probabilities."""
    quality: QualityClass
    probabilities: tuple[float, ...]

    @classmethod
    def from_probabilities(cls, probabilities: np.ndarray) -> Prediction:
        # argmax returns the lowest index among exact ties
        probs = np.asarray(probabilities, dtype=np.float64)
        return cls(QualityClass(int(probs.argmax())), tuple(float(p) for p in probs))

    @property
    def action(self) -> str:
        return CLASS_ACTIONS[self.quality]

    def to_dict(self) -> dict[str, Any]:
        return {
            "class": int(self.quality),
            "label": self.quality.label,
            "probabilities": list(self.probabilities),
            "action": self.action,
        }


def build_head(config: FusionConfig) -> Sequential:
    first, second = config.hidden
    return Sequential([
        Dense(config.concat_dim, first),
        ReLU(),
        Dense(first, second),
        ReLU(),
        Dense(second, NUM_CLASSES),
    ])


@dataclass
class FusionParams:
    """Weights of the three dense layers of the head."""
    config: FusionConfig
    network: Sequential
    history: TrainResult | None = field(default=None, compare=False)

    @classmethod
    def create(cls, config: FusionConfig, seed: int = 0) -> FusionParams:
        network = build_head(config)
        he_init(network, Xoshiro256(derive_seed(seed, FUSION_BRANCH_ID)))
        return cls(config, network)

    def to_bytes(self) -> bytes:
        return weights_to_bytes(WeightFile(
            branch=FUSION_BRANCH_ID,
            tensors=self.network.tensors(),
            meta={"fusion": self.config.to_dict(), "tensors": self.network.tensor_names()},
        ))

    @classmethod
    def from_bytes(cls, data: bytes) -> FusionParams:
        wf = weights_from_bytes(data)
        if wf.branch != FUSION_BRANCH_ID:
            raise WeightFormatError(f"Weight file holds branch {wf.branch}, not a fusion head")
        try:
            config = FusionConfig.from_dict(wf.meta["fusion"])
        except (KeyError, TypeError) as e:
            raise WeightFormatError(f"Fusion weight file lacks its config: {e}") from e
        params = cls.create(config)
        params.network.load_tensors(wf.tensors)
        return params

    def save(self, path: Union[str, Path]) -> None:
        try:
            Path(path).write_bytes(self.to_bytes())
        except OSError as e:
            raise IoFailure(f"Cannot write weights to {path}: {e}") from e

    @classmethod
    def load(cls, path: Union[str, Path]) -> FusionParams:
        try:
            data = Path(path).read_bytes()
        except OSError as e:
            raise IoFailure(f"Cannot read weights from {path}: {e}") from e
        return cls.from_bytes(data)


def _check_dim(features: np.ndarray, config: FusionConfig) -> None:
    if features.shape[-1] != config.concat_dim:
        raise DimMismatch(
            f"Fused features have length {features.shape[-1]}, expected {config.concat_dim}"
        )


def train_fusion_head(
    features: np.ndarray,
    labels: np.ndarray,
    config: FusionConfig,
    train_config: TrainConfig,
) -> FusionParams:
    """
    Train the head on precomputed fused features (N, concat_dim).

    Branch extractors are frozen; only the head learns.

    Raises:
        EmptyDataset: no samples
        DimMismatch: feature length differs from config.concat_dim
    """
    features = np.asarray(features, dtype=np.float32)
    if features.ndim != 2:
        features = features.reshape(len(features), -1)
    params = FusionParams.create(config, train_config.seed)
    if len(features):
        _check_dim(features, config)
    logger.info("Training fusion head on %d samples", len(features))
    params.history = fit(params.network, features, labels, train_config, name="fusion head")
    return params


def predict_stacked(params: FusionParams, fused: FeatureVector | np.ndarray) -> Prediction:
    """
    Raises:
        DimMismatch: fused length differs from the head's input size
    """
    values = fused.values if isinstance(fused, FeatureVector) else np.asarray(fused)
    values = values.reshape(-1).astype(np.float32)
    _check_dim(values, params.config)
    logits = params.network.forward(values[np.newaxis])[0].astype(np.float64)
    return Prediction.from_probabilities(softmax(logits))


def predict_stacked_batch(params: FusionParams, features: np.ndarray) -> list[Prediction]:
    features = np.asarray(features, dtype=np.float32)
    _check_dim(features, params.config)
    logits = params.network.forward(features).astype(np.float64)
    return [Prediction.from_probabilities(p) for p in softmax(logits)]
