"""The trained quality classifier: four branch extractors and a fusion head."""

from __future__ import annotations

import json
import logging
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Union

import numpy as np

from shiplabel_qi.core.errors import IoFailure, WeightFormatError
from shiplabel_qi.core.labels import Annotation, QualityClass
from shiplabel_qi.core.raster import Raster
from shiplabel_qi.features.patches import PatchSelectionConfig
from shiplabel_qi.fusion.features import fuse_batch
from shiplabel_qi.fusion.head import (
    FusionParams,
    Prediction,
    predict_stacked_batch,
    train_fusion_head,
)
from shiplabel_qi.fusion.voting import branch_vote, predict_majority, predict_weighted_majority
from shiplabel_qi.nn.extractor import (
    EXTRACTOR_BRANCHES,
    Branch,
    ExtractorParams,
    check_feature_dim,
    extract_features,
    load_extractor,
    predict_branch,
    save_extractor,
    train_extractor,
)
from shiplabel_qi.parallel import ordered_map
from shiplabel_qi.pipeline.config import PipelineConfig
from shiplabel_qi.pipeline.inputs import BranchInputs, InputSpec, prepare_image
from shiplabel_qi.render.json_format import JsonRenderer

logger = logging.getLogger(__name__)

MODEL_FILE = "model.json"
FUSION_FILE = "fusion.slqi"
MODEL_VERSION = 1


def weight_file(branch: Branch) -> str:
    return f"{branch.label}.slqi"


def input_spec(config: PipelineConfig) -> InputSpec:
    return InputSpec(
        sides={b: config.train_config(b).input_side for b in EXTRACTOR_BRANCHES},
        patches=config.patches,
        detector=config.detector,
    )


@dataclass
class ModelOutputs:
    """Per-branch probabilities and stacked predictions for N images."""
    branch_probabilities: dict[Branch, np.ndarray]
    stacked: list[Prediction]

    def __len__(self) -> int:
        return len(self.stacked)

    def branch_votes(self, index: int) -> list[QualityClass]:
        """Votes of the global, address, barcode and FAST branches for one image."""
        return [branch_vote(self.branch_probabilities[b][index]) for b in EXTRACTOR_BRANCHES]

    def global_only(self) -> list[QualityClass]:
        return [branch_vote(p) for p in self.branch_probabilities[Branch.GLOBAL]]

    def majority(self) -> list[QualityClass]:
        return [predict_majority(self.branch_votes(i)) for i in range(len(self))]

    def weighted_majority(self, weights: Sequence[float]) -> list[QualityClass]:
        return [predict_weighted_majority(self.branch_votes(i), weights) for i in range(len(self))]

    def stacked_classes(self) -> list[QualityClass]:
        return [p.quality for p in self.stacked]


@dataclass
class QualityModel:
    """
    Frozen branch extractors, the stacked fusion head and the voting weights.

    Example:
        >>> model = QualityModel.load("weights/")
        >>> model.classify(load("label.pnm")).action
        'proceed'
    """
    extractors: dict[Branch, ExtractorParams]
    fusion: FusionParams
    spec: InputSpec
    vote_weights: dict[Branch, float]

    @classmethod
    def train(
        cls,
        inputs: BranchInputs,
        labels: Sequence[QualityClass | int],
        config: PipelineConfig,
        validation: tuple[BranchInputs, Sequence[QualityClass | int]] | None = None,
    ) -> QualityModel:
        """
        Train the four extractors, then the fusion head on their frozen features.

        Branch voting weights are each branch's accuracy on the validation
        inputs, or equal weights without validation data.
        """
        y = np.asarray([int(c) for c in labels], dtype=np.int64)

        def train_branch(branch: Branch) -> ExtractorParams:
            return train_extractor(
                branch,
                inputs[branch],
                y,
                config.train_config(branch),
                config.fusion.branch_dim(branch),
            )

        trained = ordered_map(train_branch, list(EXTRACTOR_BRANCHES))
        extractors = dict(zip(EXTRACTOR_BRANCHES, trained))
        model = cls(
            extractors=extractors,
            fusion=FusionParams.create(config.fusion),
            spec=input_spec(config),
            vote_weights={b: 1.0 for b in EXTRACTOR_BRANCHES},
        )
        model.fusion = train_fusion_head(
            model.features(inputs), y, config.fusion, config.train_config("fusion")
        )
        if validation is not None and len(validation[0]):
            model.vote_weights = model.validation_accuracies(*validation)
        return model

    def features(self, inputs: BranchInputs) -> np.ndarray:
        """Fused feature matrix (N, concat_dim)."""
        config = self.fusion.config
        for branch, params in self.extractors.items():
            check_feature_dim(params, config.branch_dim(branch))
        return fuse_batch(
            extract_features(self.extractors[Branch.GLOBAL], inputs[Branch.GLOBAL]),
            extract_features(self.extractors[Branch.ADDRESS], inputs[Branch.ADDRESS]),
            extract_features(self.extractors[Branch.BARCODE], inputs[Branch.BARCODE]),
            extract_features(self.extractors[Branch.FAST_PATCH], inputs[Branch.FAST_PATCH]),
            config,
            n_p=self.spec.patches.n_p,
        )

    def predict(self, inputs: BranchInputs) -> ModelOutputs:
        probabilities = {b: predict_branch(self.extractors[b], inputs[b]) for b in EXTRACTOR_BRANCHES}
        return ModelOutputs(probabilities, predict_stacked_batch(self.fusion, self.features(inputs)))

    def validation_accuracies(
        self, inputs: BranchInputs, labels: Sequence[QualityClass | int]
    ) -> dict[Branch, float]:
        y = np.asarray([int(c) for c in labels], dtype=np.int64)
        weights = {}
        for branch in EXTRACTOR_BRANCHES:
            votes = predict_branch(self.extractors[branch], inputs[branch]).argmax(axis=1)
            weights[branch] = float((votes == y).mean())
        if not any(w > 0 for w in weights.values()):
            logger.warning("Every branch scored 0 on validation; using equal vote weights")
            return {b: 1.0 for b in EXTRACTOR_BRANCHES}
        logger.info("Vote weights: %s", {b.label: round(w, 4) for b, w in weights.items()})
        return weights

    @property
    def weight_list(self) -> list[float]:
        return [self.vote_weights[b] for b in EXTRACTOR_BRANCHES]

    def classify(self, image: Raster, annotation: Annotation | None = None) -> Prediction:
        """Stacked prediction for one image."""
        inputs = prepare_image(image, self.spec, annotation)
        return predict_stacked_batch(self.fusion, self.features(inputs))[0]

    def to_dict(self) -> dict[str, Any]:
        return {
            "version": MODEL_VERSION,
            "detector": self.spec.detector,
            "patches": self.spec.patches.to_dict(),
            "vote_weights": {b.label: self.vote_weights[b] for b in EXTRACTOR_BRANCHES},
        }

    def save(self, directory: Union[str, Path]) -> None:
        """
        Write one weight file per branch, the fusion head and model.json.

        Raises:
            IoFailure: the directory cannot be written
        """
        root = Path(directory)
        try:
            root.mkdir(parents=True, exist_ok=True)
            (root / MODEL_FILE).write_text(JsonRenderer().render(self.to_dict()), encoding="utf-8")
        except OSError as e:
            raise IoFailure(f"Cannot write model to {root}: {e}") from e
        for branch, params in self.extractors.items():
            save_extractor(params, root / weight_file(branch))
        self.fusion.save(root / FUSION_FILE)
        logger.info("Saved model to %s", root)

    @classmethod
    def load(cls, directory: Union[str, Path]) -> QualityModel:
        """
        Raises:
            IoFailure: missing files
            WeightFormatError: corrupt or mismatched weight files
        """
        root = Path(directory)
        try:
            meta = json.loads((root / MODEL_FILE).read_text(encoding="utf-8"))
        except OSError as e:
            raise IoFailure(f"Cannot read {root / MODEL_FILE}: {e}") from e
        except ValueError as e:
            raise WeightFormatError(f"{root / MODEL_FILE} is not valid JSON: {e}") from e
        if meta.get("version") != MODEL_VERSION:
            raise WeightFormatError(f"Unsupported model version {meta.get('version')}")

        extractors = {b: load_extractor(root / weight_file(b)) for b in EXTRACTOR_BRANCHES}
        for branch, params in extractors.items():
            if params.branch is not branch:
                raise WeightFormatError(
                    f"{weight_file(branch)} holds the {params.branch.label} branch"
                )
        spec = InputSpec(
            sides={b: p.input_side for b, p in extractors.items()},
            patches=PatchSelectionConfig.from_dict(meta["patches"]),
            detector=str(meta["detector"]),
        )
        weights = {b: float(meta["vote_weights"][b.label]) for b in EXTRACTOR_BRANCHES}
        return cls(extractors, FusionParams.load(root / FUSION_FILE), spec, weights)
