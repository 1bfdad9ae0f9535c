"""IoU and average precision for region detections."""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any, NamedTuple

import numpy as np

from shiplabel_qi.core.errors import MultipleGroundTruth
from shiplabel_qi.core.labels import Annotation
from shiplabel_qi.core.raster import BoundingBox
from shiplabel_qi.detect.roi import Detection, RegionKind


class GroundTruth(NamedTuple):
    image: str
    kind: RegionKind
    box: BoundingBox


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union; 0.0 for disjoint boxes."""
    inter = a.intersection(b)
    if inter is None:
        return 0.0
    union = a.area + b.area - inter.area
    return inter.area / union


def ground_truth_from_annotations(annotations: Sequence[Annotation]) -> list[GroundTruth]:
    """One barcode and one address box per annotated image."""
    truth = []
    for a in annotations:
        truth.append(GroundTruth(a.image_path, RegionKind.BARCODE, a.barcode_box))
        truth.append(GroundTruth(a.image_path, RegionKind.ADDRESS, a.address_box))
    return truth


def interpolated_ap(recall: np.ndarray, precision: np.ndarray) -> float:
    """Area under the precision envelope over all recall points."""
    mrec = np.concatenate(([0.0], recall, [1.0]))
    mpre = np.concatenate(([0.0], precision, [0.0]))
    mpre = np.maximum.accumulate(mpre[::-1])[::-1]
    steps = np.nonzero(mrec[1:] != mrec[:-1])[0]
    return float(np.sum((mrec[steps + 1] - mrec[steps]) * mpre[steps + 1]))


@dataclass
class DetectionMetrics:
    """Per-kind AP, ground-truth support and their mean."""
    ap_per_kind: dict[RegionKind, float] = field(default_factory=dict)
    support: dict[RegionKind, int] = field(default_factory=dict)
    detections: dict[RegionKind, int] = field(default_factory=dict)
    iou_threshold: float = 0.5

    @property
    def map(self) -> float:
        """Mean AP over kinds that have ground truth (0.0 when none do)."""
        if not self.ap_per_kind:
            return 0.0
        return float(np.mean(list(self.ap_per_kind.values())))

    def to_dict(self) -> dict[str, Any]:
        return {
            "iou_threshold": self.iou_threshold,
            "ap": {k.value: v for k, v in self.ap_per_kind.items()},
            "support": {k.value: v for k, v in self.support.items()},
            "detections": {k.value: v for k, v in self.detections.items()},
            "map": self.map,
        }


def _kind_ap(
    detections: list[Detection], truth: dict[str, BoundingBox], threshold: float
) -> float:
    ranked = sorted(detections, key=lambda d: -d.confidence)
    matched: set[str] = set()
    tp = np.zeros(len(ranked))
    for i, det in enumerate(ranked):
        gt = truth.get(det.image)
        if gt is not None and det.image not in matched and iou(det.box, gt) >= threshold:
            matched.add(det.image)
            tp[i] = 1.0
    if not ranked:
        return 0.0
    cum_tp = np.cumsum(tp)
    cum_fp = np.cumsum(1.0 - tp)
    recall = cum_tp / len(truth)
    precision = cum_tp / (cum_tp + cum_fp)
    return interpolated_ap(recall, precision)


def average_precision(
    detections: Sequence[Detection],
    ground_truth: Sequence[GroundTruth],
    iou_threshold: float = 0.5,
) -> DetectionMetrics:
    """
    Greedy-matched AP per region kind and their mean.

    Detections are visited by descending confidence; each one matches the
    image's ground-truth box of its kind if that box is still unmatched and
    the IoU reaches iou_threshold.

    Raises:
        MultipleGroundTruth: an image has two ground-truth boxes of one kind
    """
    truth: dict[RegionKind, dict[str, BoundingBox]] = defaultdict(dict)
    for gt in ground_truth:
        if gt.image in truth[gt.kind]:
            raise MultipleGroundTruth(
                f"Image {gt.image!r} has more than one {gt.kind.value} box"
            )
        truth[gt.kind][gt.image] = gt.box

    by_kind: dict[RegionKind, list[Detection]] = defaultdict(list)
    for det in detections:
        by_kind[det.kind].append(det)

    metrics = DetectionMetrics(iou_threshold=iou_threshold)
    for kind in RegionKind:
        if not truth[kind]:
            continue
        metrics.ap_per_kind[kind] = _kind_ap(by_kind[kind], truth[kind], iou_threshold)
        metrics.support[kind] = len(truth[kind])
        metrics.detections[kind] = len(by_kind[kind])
    return metrics
