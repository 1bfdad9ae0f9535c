"""Core data structures: rasters, boxes, quality classes, seeded streams."""

from shiplabel_qi.core.errors import SlqiError
from shiplabel_qi.core.labels import CLASS_ACTIONS, NUM_CLASSES, Annotation, QualityClass
from shiplabel_qi.core.raster import BoundingBox, Raster
from shiplabel_qi.core.rng import Xoshiro256, derive_seed

__all__ = [
    "SlqiError",
    "CLASS_ACTIONS",
    "NUM_CLASSES",
    "Annotation",
    "QualityClass",
    "BoundingBox",
    "Raster",
    "Xoshiro256",
    "derive_seed",
]
