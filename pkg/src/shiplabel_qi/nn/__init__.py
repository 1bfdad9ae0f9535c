"""Small numpy CNNs: layers, loss, SGD training, gradient checks, branch extractors."""

from shiplabel_qi.nn.extractor import (
    EXTRACTOR_BRANCHES,
    Branch,
    ExtractorParams,
    FeatureVector,
    extract_features,
    forward_features,
    load_extractor,
    predict_branch,
    prepare_input,
    save_extractor,
    train_extractor,
)
from shiplabel_qi.nn.gradcheck import GradientCheckReport, gradient_check, gradient_check_report
from shiplabel_qi.nn.layers import Conv3x3, Dense, GlobalAvgPool, Layer, MaxPool2, ReLU
from shiplabel_qi.nn.loss import batch_cross_entropy, softmax, softmax_cross_entropy
from shiplabel_qi.nn.network import Sequential, he_init
from shiplabel_qi.nn.train import SGD, EpochStats, TrainConfig, TrainResult, fit, predict_proba

__all__ = [
    "EXTRACTOR_BRANCHES",
    "Branch",
    "ExtractorParams",
    "FeatureVector",
    "extract_features",
    "forward_features",
    "load_extractor",
    "predict_branch",
    "prepare_input",
    "save_extractor",
    "train_extractor",
    "GradientCheckReport",
    "gradient_check",
    "gradient_check_report",
    "Conv3x3",
    "Dense",
    "GlobalAvgPool",
    "Layer",
    "MaxPool2",
    "ReLU",
    "batch_cross_entropy",
    "softmax",
    "softmax_cross_entropy",
    "Sequential",
    "he_init",
    "SGD",
    "EpochStats",
    "TrainConfig",
    "TrainResult",
    "fit",
    "predict_proba",
]
