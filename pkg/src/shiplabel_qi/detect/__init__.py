"""Region-of-interest detection and detection metrics."""

from shiplabel_qi.detect.metrics import (
    DetectionMetrics,
    GroundTruth,
    average_precision,
    ground_truth_from_annotations,
    iou,
)
from shiplabel_qi.detect.roi import (
    ClassicalDetector,
    Detection,
    Detector,
    OracleDetector,
    RegionKind,
    best_box,
    detect_rois,
    detections_from_jsonl,
    detections_to_jsonl,
    get_detector,
)

__all__ = [
    "DetectionMetrics",
    "GroundTruth",
    "average_precision",
    "ground_truth_from_annotations",
    "iou",
    "ClassicalDetector",
    "Detection",
    "Detector",
    "OracleDetector",
    "RegionKind",
    "best_box",
    "detect_rois",
    "detections_from_jsonl",
    "detections_to_jsonl",
    "get_detector",
]
