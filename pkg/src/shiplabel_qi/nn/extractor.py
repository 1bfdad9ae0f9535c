"""Branch feature extractors.

Each branch owns a small CNN trunk that maps a letterboxed grayscale image to
a feature vector, plus a temporary 5-way head used only to pretrain the
trunk and to produce the per-branch votes of the voting baselines. The FAST
patch branch has one parameter set shared by all of an image's patches.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path
from typing import Union

import numpy as np

from shiplabel_qi.codec.weights import WeightFile, weights_from_bytes, weights_to_bytes
from shiplabel_qi.core.errors import (
    DimMismatch,
    IoFailure,
    ShapeMismatch,
    WeightFormatError,
)
from shiplabel_qi.core.labels import NUM_CLASSES
from shiplabel_qi.core.raster import Raster
from shiplabel_qi.core.rng import Xoshiro256, derive_seed
from shiplabel_qi.nn.layers import Conv3x3, Dense, GlobalAvgPool, MaxPool2, ReLU
from shiplabel_qi.nn.network import Sequential, he_init
from shiplabel_qi.nn.train import TrainConfig, TrainResult, fit, predict_proba
from shiplabel_qi.transform.color import to_grayscale
from shiplabel_qi.transform.geometry import resize_letterbox

logger = logging.getLogger(__name__)

CONV_WIDTHS = (8, 16, 32)
PAD_VALUE = 255


class Branch(IntEnum):
    """Feature branch. Values are the branch ids of the weight file."""
    GLOBAL = 0
    ADDRESS = 1
    BARCODE = 2
    FAST_PATCH = 3
    FUSION = 255

    @property
    def label(self) -> str:
        return self.name.lower()


EXTRACTOR_BRANCHES = (Branch.GLOBAL, Branch.ADDRESS, Branch.BARCODE, Branch.FAST_PATCH)


@dataclass(frozen=True)
class FeatureVector:
    """Output of one branch for one image."""
    branch: Branch
    values: np.ndarray

    def __len__(self) -> int:
        return int(self.values.shape[0])


def build_trunk(feature_dim: int) -> Sequential:
    layers = []
    channels = 1
    for width in CONV_WIDTHS:
        layers += [Conv3x3(channels, width), ReLU(), MaxPool2()]
        channels = width
    layers += [GlobalAvgPool(), Dense(channels, feature_dim)]
    return Sequential(layers)


@dataclass
class ExtractorParams:
    """
    Trunk and pretraining head of one branch.

    `classifier` chains the trunk and head layers (the same layer objects),
    and is the network that is trained and stored.
    """
    branch: Branch
    feature_dim: int
    input_side: int
    trunk: Sequential
    head: Sequential
    history: TrainResult | None = field(default=None, compare=False)

    @classmethod
    def create(
        cls, branch: Branch, feature_dim: int, input_side: int = 64, seed: int = 0
    ) -> ExtractorParams:
        """Fresh He-initialized parameters; the stream is seeded per branch."""
        params = cls(
            branch=Branch(branch),
            feature_dim=feature_dim,
            input_side=input_side,
            trunk=build_trunk(feature_dim),
            head=Sequential([Dense(feature_dim, NUM_CLASSES)]),
        )
        he_init(params.classifier, Xoshiro256(derive_seed(seed, int(branch))))
        return params

    @property
    def classifier(self) -> Sequential:
        return Sequential(self.trunk.layers + self.head.layers)

    def to_weight_file(self) -> WeightFile:
        net = self.classifier
        return WeightFile(
            branch=int(self.branch),
            tensors=net.tensors(),
            meta={
                "feature_dim": self.feature_dim,
                "input_side": self.input_side,
                "tensors": net.tensor_names(),
            },
        )

    def to_bytes(self) -> bytes:
        return weights_to_bytes(self.to_weight_file())

    @classmethod
    def from_bytes(cls, data: bytes) -> ExtractorParams:
        wf = weights_from_bytes(data)
        try:
            branch = Branch(wf.branch)
            feature_dim = int(wf.meta["feature_dim"])
            input_side = int(wf.meta["input_side"])
        except (KeyError, ValueError, TypeError) as e:
            raise WeightFormatError(f"Not an extractor weight file: {e}") from e
        if branch is Branch.FUSION:
            raise WeightFormatError("Weight file holds a fusion head, not an extractor")
        params = cls.create(branch, feature_dim, input_side)
        params.classifier.load_tensors(wf.tensors)
        return params


def prepare_input(raster: Raster, side: int) -> np.ndarray:
    """Grayscale, letterbox to side x side with white padding, scale to [0, 1]."""
    gray = to_grayscale(raster)
    boxed = resize_letterbox(gray, side, side, PAD_VALUE)
    return (boxed.pixels.astype(np.float32) / 255.0).reshape(side, side, 1)


def _check_inputs(params: ExtractorParams, inputs: np.ndarray) -> None:
    side = params.input_side
    if inputs.shape[-3:] != (side, side, 1):
        raise ShapeMismatch(
            f"{params.branch.label} branch expects {side}x{side}x1 inputs, got {inputs.shape}"
        )


def forward_features(params: ExtractorParams, image: Raster | np.ndarray) -> FeatureVector:
    """
    Feature vector of one image.

    Rasters are prepared with prepare_input; arrays must already be
    (side, side, 1).

    Raises:
        ShapeMismatch: array input of the wrong shape
    """
    x = prepare_input(image, params.input_side) if isinstance(image, Raster) else np.asarray(image)
    _check_inputs(params, x)
    if x.ndim != 3:
        raise ShapeMismatch(f"Expected a single (side, side, 1) input, got {x.shape}")
    values = params.trunk.forward(x[np.newaxis].astype(np.float32))[0]
    return FeatureVector(params.branch, values.copy())


def extract_features(params: ExtractorParams, inputs: np.ndarray, batch_size: int = 64) -> np.ndarray:
    """
    Batched features, (N, feature_dim).

    FAST-patch inputs (N, n_p, side, side, 1) give (N, n_p, feature_dim).
    """
    _check_inputs(params, inputs)
    if inputs.ndim == 5:
        n, n_p = inputs.shape[:2]
        flat = extract_features(params, inputs.reshape(n * n_p, *inputs.shape[2:]), batch_size)
        return flat.reshape(n, n_p, params.feature_dim)
    chunks = [
        params.trunk.forward(inputs[i:i + batch_size]) for i in range(0, len(inputs), batch_size)
    ]
    if not chunks:
        return np.zeros((0, params.feature_dim), dtype=np.float32)
    return np.concatenate(chunks, axis=0)


def flatten_patches(inputs: np.ndarray, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Turn (N, n_p, ...) patch stacks into N*n_p samples sharing their image's label."""
    n, n_p = inputs.shape[:2]
    return inputs.reshape(n * n_p, *inputs.shape[2:]), np.repeat(np.asarray(labels), n_p)


def train_extractor(
    branch: Branch,
    inputs: np.ndarray,
    labels: np.ndarray,
    config: TrainConfig,
    feature_dim: int,
) -> ExtractorParams:
    """
    Pretrain one branch on its prepared inputs.

    inputs are (N, side, side, 1), or (N, n_p, side, side, 1) for the FAST
    patch branch, where every patch becomes a separate sample with its
    image's label.

    Raises:
        EmptyDataset: no samples
        NonFiniteError: training diverged
    """
    branch = Branch(branch)
    params = ExtractorParams.create(branch, feature_dim, config.input_side, config.seed)
    inputs = np.asarray(inputs, dtype=np.float32)
    if inputs.size:
        _check_inputs(params, inputs)
    if inputs.ndim == 5:
        inputs, labels = flatten_patches(inputs, labels)
    logger.info("Training %s extractor on %d samples", branch.label, len(inputs))
    params.history = fit(params.classifier, inputs, labels, config, name=f"{branch.label} extractor")
    return params


def predict_branch(params: ExtractorParams, inputs: np.ndarray) -> np.ndarray:
    """
    Class probabilities from the pretraining head, (N, 5).

    For FAST-patch inputs the n_p patch probability vectors of each image
    are averaged.
    """
    inputs = np.asarray(inputs, dtype=np.float32)
    _check_inputs(params, inputs)
    if inputs.ndim == 5:
        n, n_p = inputs.shape[:2]
        probs = predict_proba(params.classifier, inputs.reshape(n * n_p, *inputs.shape[2:]))
        return probs.reshape(n, n_p, NUM_CLASSES).mean(axis=1)
    return predict_proba(params.classifier, inputs)


def check_feature_dim(params: ExtractorParams, expected: int) -> None:
    if params.feature_dim != expected:
        raise DimMismatch(
            f"{params.branch.label} extractor has feature_dim {params.feature_dim}, expected {expected}"
        )


def save_extractor(params: ExtractorParams, path: Union[str, Path]) -> None:
    try:
        Path(path).write_bytes(params.to_bytes())
    except OSError as e:
        raise IoFailure(f"Cannot write weights to {path}: {e}") from e


def load_extractor(path: Union[str, Path]) -> ExtractorParams:
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise IoFailure(f"Cannot read weights from {path}: {e}") from e
    return ExtractorParams.from_bytes(data)
