"""FAST corners and high-feature patch localization."""

from shiplabel_qi.features.fast import Corner, CornerSet, detect_corners, score_map
from shiplabel_qi.features.patches import (
    PatchSelectionConfig,
    PatchSet,
    count_per_tile,
    rank_tiles,
    select_patches,
)

__all__ = [
    "Corner",
    "CornerSet",
    "detect_corners",
    "score_map",
    "PatchSelectionConfig",
    "PatchSet",
    "count_per_tile",
    "rank_tiles",
    "select_patches",
]
