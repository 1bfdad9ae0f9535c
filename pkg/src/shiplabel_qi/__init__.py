"""
shiplabel-qi: image-quality verification for shipping-label photos

Classifies a label image as normal, contaminated, unreadable, handwritten or
damaged by fusing a global CNN feature with features of the barcode region,
the address region and the patches richest in FAST corners.

Quick Start:
    >>> import shiplabel_qi as slqi
    >>> manifest = slqi.build_dataset(slqi.GenConfig().with_count(20), "data/")
    >>> model = slqi.QualityModel.load("weights/")
    >>> model.classify(slqi.load("data/images/000000.pnm")).quality
    <QualityClass.NORMAL: 0>

Features:
    - Seeded synthetic label generator with Code 128 barcodes and four
      degradation families
    - FAST-9 corner detection and corner-density patch selection
    - Classical and oracle barcode/address region detectors with AP metrics
    - Small numpy CNNs with hand-written backpropagation and gradient checks
    - Stacked-generalization fusion plus majority and weighted voting
    - Stratified k-fold evaluation with mean ± std tables
"""

__version__ = "0.1.0"

# Core types
from shiplabel_qi.core.errors import SlqiError
from shiplabel_qi.core.labels import Annotation, QualityClass
from shiplabel_qi.core.raster import BoundingBox, Raster

# Convenience functions
from shiplabel_qi.io.reader import load
from shiplabel_qi.io.writer import save

# Stages
from shiplabel_qi.detect.roi import detect_rois
from shiplabel_qi.features.fast import detect_corners
from shiplabel_qi.features.patches import PatchSelectionConfig, select_patches
from shiplabel_qi.fusion.head import Prediction
from shiplabel_qi.pipeline.config import PipelineConfig
from shiplabel_qi.pipeline.experiment import CrossValidationExperiment
from shiplabel_qi.pipeline.model import QualityModel
from shiplabel_qi.synth.config import GenConfig
from shiplabel_qi.synth.dataset import build_dataset, load_manifest

__all__ = [
    "__version__",
    "SlqiError",
    "Annotation",
    "QualityClass",
    "BoundingBox",
    "Raster",
    "load",
    "save",
    "detect_rois",
    "detect_corners",
    "PatchSelectionConfig",
    "select_patches",
    "Prediction",
    "PipelineConfig",
    "CrossValidationExperiment",
    "QualityModel",
    "GenConfig",
    "build_dataset",
    "load_manifest",
]
