"""Synthetic shipping-label generation: barcodes, layouts, degradations, datasets."""

from shiplabel_qi.synth.builder import LabelBuilder
from shiplabel_qi.synth.code128 import Code128Symbol, encode, encode_code128
from shiplabel_qi.synth.config import GenConfig
from shiplabel_qi.synth.dataset import DatasetManifest, build_dataset, load_manifest
from shiplabel_qi.synth.degrade import (
    DegradationResult,
    apply_degradation,
    degrade_label,
    variance_of_laplacian,
)
from shiplabel_qi.synth.generator import GeneratedLabel, generate, generate_label

__all__ = [
    "LabelBuilder",
    "Code128Symbol",
    "encode",
    "encode_code128",
    "GenConfig",
    "DatasetManifest",
    "build_dataset",
    "load_manifest",
    "DegradationResult",
    "apply_degradation",
    "degrade_label",
    "variance_of_laplacian",
    "GeneratedLabel",
    "generate",
    "generate_label",
]
