"""Image transforms: grayscale, crop, letterbox resize, augmentation."""

from shiplabel_qi.transform.color import to_grayscale, to_rgb
from shiplabel_qi.transform.geometry import (
    AugmentOp,
    augment,
    augment_box,
    crop,
    pad_to,
    resize_bilinear,
    resize_letterbox,
)

__all__ = [
    "to_grayscale",
    "to_rgb",
    "AugmentOp",
    "augment",
    "augment_box",
    "crop",
    "pad_to",
    "resize_bilinear",
    "resize_letterbox",
]
