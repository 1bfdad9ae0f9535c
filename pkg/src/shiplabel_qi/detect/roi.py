"""Barcode and address region detection.

Two detectors share one interface: an oracle that replays annotation boxes,
and a classical detector built from gradient and text-line analysis.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Protocol

import numpy as np
from scipy import ndimage
from skimage.filters import threshold_otsu

from shiplabel_qi.core.errors import ConfigError, MissingAnnotation
from shiplabel_qi.core.labels import Annotation
from shiplabel_qi.core.raster import BoundingBox, Raster
from shiplabel_qi.core.serial import canonical_json
from shiplabel_qi.transform.color import to_grayscale

logger = logging.getLogger(__name__)


class RegionKind(str, Enum):
    BARCODE = "barcode"
    ADDRESS = "address"


@dataclass(frozen=True)
class Detection:
    """A detected region with its kind and confidence in [0, 1]."""
    box: BoundingBox
    kind: RegionKind
    confidence: float
    image: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "path": self.image,
            "kind": self.kind.value,
            "box": self.box.to_list(),
            "conf": round(self.confidence, 6),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Detection:
        return cls(
            box=BoundingBox.from_list(data["box"]),
            kind=RegionKind(data["kind"]),
            confidence=float(data["conf"]),
            image=str(data.get("path", "")),
        )


class Detector(Protocol):
    """Anything that finds barcode and address regions in a label image."""

    name: str

    def detect(self, image: Raster, annotation: Annotation | None = None) -> list[Detection]:
        ...


class OracleDetector:
    """Returns the annotation boxes with confidence 1.0."""

    name = "oracle"

    def detect(self, image: Raster, annotation: Annotation | None = None) -> list[Detection]:
        if annotation is None:
            raise MissingAnnotation("Oracle detection needs the image's annotation")
        annotation.check_fits(image.width, image.height)
        return [
            Detection(annotation.barcode_box, RegionKind.BARCODE, 1.0, annotation.image_path),
            Detection(annotation.address_box, RegionKind.ADDRESS, 1.0, annotation.image_path),
        ]


@dataclass(frozen=True)
class ClassicalDetector:
    """
    Gradient-based barcode finder and text-line address finder.

    Barcode: |d/dx| - |d/dy| Sobel response, box blur, Otsu threshold,
    closing, largest connected component. Address: rows with many
    dark/light transitions grouped into multi-line blocks outside the
    barcode; the block with the most transitions wins.
    """
    blur: int = 9
    close_w: int = 7
    close_h: int = 3
    dark_threshold: int = 128
    min_transitions: int = 4
    line_gap: int = 5
    min_lines: int = 2
    name: str = "classical"

    def detect(self, image: Raster, annotation: Annotation | None = None) -> list[Detection]:
        gray = to_grayscale(image).plane()
        path = annotation.image_path if annotation is not None else ""
        found = []
        barcode = self.find_barcode(gray)
        if barcode is not None:
            found.append(Detection(barcode[0], RegionKind.BARCODE, barcode[1], path))
        address = self.find_address(gray, barcode[0] if barcode else None)
        if address is not None:
            found.append(Detection(address[0], RegionKind.ADDRESS, address[1], path))
        return found

    def find_barcode(self, gray: np.ndarray) -> tuple[BoundingBox, float] | None:
        g = gray.astype(np.float64)
        response = np.abs(ndimage.sobel(g, axis=1)) - np.abs(ndimage.sobel(g, axis=0))
        response = np.clip(response, 0, None)
        smooth = ndimage.uniform_filter(response, size=self.blur)
        if smooth.max() <= 0 or smooth.min() == smooth.max():
            return None
        binary = smooth > threshold_otsu(smooth)
        structure = np.ones((self.close_h, self.close_w), dtype=bool)
        binary = ndimage.binary_closing(binary, structure=structure)
        labels, n = ndimage.label(binary)
        if n == 0:
            return None
        sizes = np.bincount(labels.ravel())[1:]
        best = int(np.argmax(sizes)) + 1
        rows, cols = ndimage.find_objects(labels)[best - 1]
        box = BoundingBox(cols.start, rows.start, cols.stop - cols.start, rows.stop - rows.start)
        return box, float(sizes[best - 1]) / box.area

    def find_address(
        self, gray: np.ndarray, barcode: BoundingBox | None
    ) -> tuple[BoundingBox, float] | None:
        dark = gray < self.dark_threshold
        if barcode is not None:
            dark = dark.copy()
            dark[barcode.y:barcode.y2, barcode.x:barcode.x2] = False
        transitions = np.count_nonzero(dark[:, 1:] != dark[:, :-1], axis=1)
        text_rows = transitions >= self.min_transitions

        best: tuple[int, int, int] | None = None  # (mass, first row, stop row)
        for start, stop, lines in _row_blocks(text_rows, self.line_gap):
            if lines < self.min_lines:
                continue
            mass = int(transitions[start:stop].sum())
            if best is None or mass > best[0]:
                best = (mass, start, stop)
        if best is None:
            return None
        mass, start, stop = best

        block = dark[start:stop]
        # Columns dark in every row are frames or rules, not text
        column_ink = block.sum(axis=0)
        text_cols = np.nonzero((column_ink > 0) & (column_ink < block.shape[0]))[0]
        if text_cols.size == 0:
            return None
        x1, x2 = int(text_cols[0]), int(text_cols[-1]) + 1
        box = BoundingBox(x1, start, x2 - x1, stop - start)
        density = mass / max(1, box.h * max(1, box.w - 1))
        return box, float(min(1.0, density))


def _row_blocks(text_rows: np.ndarray, max_gap: int) -> list[tuple[int, int, int]]:
    """
    Group text rows into blocks: (first row, stop row, line count).

    A line is a run of consecutive text rows; lines separated by at most
    max_gap blank rows belong to one block.
    """
    runs: list[list[int]] = []
    for y in np.nonzero(text_rows)[0].tolist():
        if runs and y == runs[-1][1]:
            runs[-1][1] = y + 1
        else:
            runs.append([y, y + 1])
    blocks: list[tuple[int, int, int]] = []
    for start, stop in runs:
        if blocks and start - blocks[-1][1] <= max_gap:
            first, _, lines = blocks[-1]
            blocks[-1] = (first, stop, lines + 1)
        else:
            blocks.append((start, stop, 1))
    return blocks


DETECTORS: dict[str, type] = {
    "oracle": OracleDetector,
    "classical": ClassicalDetector,
}


def get_detector(method: str | Detector) -> Detector:
    if not isinstance(method, str):
        return method
    if method not in DETECTORS:
        raise ConfigError(f"Unknown detector {method!r}; choose from {sorted(DETECTORS)}")
    detector: Detector = DETECTORS[method]()
    return detector


def detect_rois(
    image: Raster,
    method: str | Detector = "classical",
    annotation: Annotation | None = None,
) -> list[Detection]:
    """
    Detect barcode and address regions, highest confidence first.

    Raises:
        MissingAnnotation: oracle method without an annotation
    """
    detector = get_detector(method)
    detections = detector.detect(image, annotation)
    logger.debug("%s detector found %d regions", detector.name, len(detections))
    for d in detections:
        d.box.check_fits(image.width, image.height)
    return sorted(detections, key=lambda d: -d.confidence)


def best_box(detections: list[Detection], kind: RegionKind) -> BoundingBox | None:
    """Highest-confidence box of a kind, or None."""
    of_kind = [d for d in detections if d.kind is kind]
    if not of_kind:
        return None
    return max(of_kind, key=lambda d: d.confidence).box


def detections_to_jsonl(detections: list[Detection]) -> str:
    return "".join(canonical_json(d.to_dict()) + "\n" for d in detections)


def detections_from_jsonl(text: str) -> list[Detection]:
    return [Detection.from_dict(json.loads(line)) for line in text.splitlines() if line.strip()]
