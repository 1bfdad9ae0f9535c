"""End-to-end pipeline: configuration, branch inputs, the trained model, experiments."""

from shiplabel_qi.pipeline.config import EvalConfig, PipelineConfig
from shiplabel_qi.pipeline.experiment import (
    VARIANTS,
    CrossValidationExperiment,
    ExperimentReport,
    FoldResult,
)
from shiplabel_qi.pipeline.inputs import BranchInputs, InputSpec, prepare_dataset, prepare_image
from shiplabel_qi.pipeline.model import ModelOutputs, QualityModel, input_spec

__all__ = [
    "EvalConfig",
    "PipelineConfig",
    "VARIANTS",
    "CrossValidationExperiment",
    "ExperimentReport",
    "FoldResult",
    "BranchInputs",
    "InputSpec",
    "prepare_dataset",
    "prepare_image",
    "ModelOutputs",
    "QualityModel",
    "input_spec",
]
