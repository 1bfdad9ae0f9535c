"""Preparation of the four branch inputs of an image."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from shiplabel_qi.core.labels import Annotation
from shiplabel_qi.core.raster import BoundingBox, Raster
from shiplabel_qi.detect.roi import RegionKind, best_box, detect_rois
from shiplabel_qi.features.patches import PatchSelectionConfig, select_patches
from shiplabel_qi.nn.extractor import EXTRACTOR_BRANCHES, Branch, prepare_input
from shiplabel_qi.parallel import ordered_map
from shiplabel_qi.synth.dataset import DatasetManifest
from shiplabel_qi.transform.geometry import AugmentOp, augment, augment_box, crop

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InputSpec:
    """How raw images become branch inputs."""
    sides: dict[Branch, int]
    patches: PatchSelectionConfig
    detector: str = "classical"


@dataclass
class BranchInputs:
    """
    Prepared inputs of N images, one float32 array per branch.

    GLOBAL, ADDRESS and BARCODE are (N, side, side, 1); FAST_PATCH is
    (N, n_p, side, side, 1).
    """
    arrays: dict[Branch, np.ndarray]

    def __len__(self) -> int:
        return int(self.arrays[Branch.GLOBAL].shape[0])

    def __getitem__(self, branch: Branch) -> np.ndarray:
        return self.arrays[branch]

    def take(self, indices: Sequence[int]) -> BranchInputs:
        idx = np.asarray(indices, dtype=np.int64)
        return BranchInputs({b: a[idx] for b, a in self.arrays.items()})

    @classmethod
    def concat(cls, parts: Sequence[BranchInputs]) -> BranchInputs:
        return cls({b: np.concatenate([p.arrays[b] for p in parts]) for b in EXTRACTOR_BRANCHES})


def region_or_image(image: Raster, box: BoundingBox | None) -> Raster:
    """Crop of box, or the whole image when no region was found."""
    return image if box is None else crop(image, box)


def prepare_image(image: Raster, spec: InputSpec, annotation: Annotation | None = None) -> BranchInputs:
    """Inputs of a single image, with a batch axis of length one."""
    detections = detect_rois(image, spec.detector, annotation)
    address = region_or_image(image, best_box(detections, RegionKind.ADDRESS))
    barcode = region_or_image(image, best_box(detections, RegionKind.BARCODE))
    patch_set = select_patches(image, spec.patches)
    fast_side = spec.sides[Branch.FAST_PATCH]
    arrays = {
        Branch.GLOBAL: prepare_input(image, spec.sides[Branch.GLOBAL]),
        Branch.ADDRESS: prepare_input(address, spec.sides[Branch.ADDRESS]),
        Branch.BARCODE: prepare_input(barcode, spec.sides[Branch.BARCODE]),
        Branch.FAST_PATCH: np.stack([prepare_input(p, fast_side) for p in patch_set.patches]),
    }
    return BranchInputs({b: a[np.newaxis] for b, a in arrays.items()})


def augmented(image: Raster, annotation: Annotation, op: AugmentOp) -> tuple[Raster, Annotation]:
    """Rotate or flip an image together with its annotation boxes."""
    w, h = image.width, image.height
    return augment(image, op), annotation.with_boxes(
        augment_box(annotation.barcode_box, w, h, op),
        augment_box(annotation.address_box, w, h, op),
    )


def prepare_dataset(
    manifest: DatasetManifest,
    indices: Sequence[int],
    spec: InputSpec,
    ops: Sequence[AugmentOp | None] = (None,),
) -> BranchInputs:
    """
    Inputs of manifest entries, in index order.

    Each entry contributes one sample per op (None is the untransformed
    image), grouped per entry. The oracle detector reads boxes from the
    manifest annotations.
    """
    def one(index: int) -> BranchInputs:
        image = manifest.load_image(index)
        annotation = manifest[index]
        parts = []
        for op in ops:
            img, ann = (image, annotation) if op is None else augmented(image, annotation, op)
            parts.append(prepare_image(img, spec, ann))
        return BranchInputs.concat(parts)

    logger.info("Preparing branch inputs for %d images", len(indices))
    parts = ordered_map(one, list(indices))
    if not parts:
        return empty_inputs(spec)
    return BranchInputs.concat(parts)


def empty_inputs(spec: InputSpec) -> BranchInputs:
    arrays = {}
    for branch in EXTRACTOR_BRANCHES:
        side = spec.sides[branch]
        shape: tuple[int, ...] = (0, side, side, 1)
        if branch is Branch.FAST_PATCH:
            shape = (0, spec.patches.n_p, side, side, 1)
        arrays[branch] = np.zeros(shape, dtype=np.float32)
    return BranchInputs(arrays)
