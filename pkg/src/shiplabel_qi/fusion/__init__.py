"""Global-local feature fusion and voting baselines."""

from shiplabel_qi.fusion.config import FusionConfig
from shiplabel_qi.fusion.features import fuse_batch, fuse_features, pool_patches
from shiplabel_qi.fusion.head import (
    FusionParams,
    Prediction,
    predict_stacked,
    predict_stacked_batch,
    train_fusion_head,
)
from shiplabel_qi.fusion.voting import branch_vote, predict_majority, predict_weighted_majority
from shiplabel_qi.nn.extractor import FeatureVector

__all__ = [
    "FeatureVector",
    "FusionConfig",
    "fuse_batch",
    "fuse_features",
    "pool_patches",
    "FusionParams",
    "Prediction",
    "predict_stacked",
    "predict_stacked_batch",
    "train_fusion_head",
    "branch_vote",
    "predict_majority",
    "predict_weighted_majority",
]
