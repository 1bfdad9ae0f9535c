"""Tests for region detection, IoU and average precision."""

import numpy as np
import pytest

from shiplabel_qi.core.errors import ConfigError, MissingAnnotation, MultipleGroundTruth
from shiplabel_qi.core.labels import QualityClass
from shiplabel_qi.core.raster import BoundingBox, Raster
from shiplabel_qi.core.rng import derive_seed
from shiplabel_qi.detect.metrics import (
    GroundTruth,
    average_precision,
    ground_truth_from_annotations,
    interpolated_ap,
    iou,
)
from shiplabel_qi.detect.roi import (
    Detection,
    RegionKind,
    best_box,
    detect_rois,
    detections_from_jsonl,
    detections_to_jsonl,
    get_detector,
)
from shiplabel_qi.synth.config import GenConfig
from shiplabel_qi.synth.generator import generate_label


class TestIoU:
    """Tests for intersection over union."""

    def test_identical(self) -> None:
        box = BoundingBox(3, 4, 10, 20)
        assert iou(box, box) == 1.0

    def test_disjoint(self) -> None:
        assert iou(BoundingBox(0, 0, 5, 5), BoundingBox(5, 0, 5, 5)) == 0.0

    def test_half_overlap(self) -> None:
        # intersection 50, union 150
        assert iou(BoundingBox(0, 0, 10, 10), BoundingBox(5, 0, 10, 10)) == pytest.approx(1 / 3)

    def test_contained(self) -> None:
        assert iou(BoundingBox(0, 0, 10, 10), BoundingBox(0, 0, 5, 10)) == pytest.approx(0.5)

    def test_symmetric(self) -> None:
        rng = np.random.default_rng(4)
        for _ in range(200):
            a = BoundingBox(*(int(v) for v in rng.integers(0, 50, 2)), *(int(v) for v in rng.integers(1, 40, 2)))
            b = BoundingBox(*(int(v) for v in rng.integers(0, 50, 2)), *(int(v) for v in rng.integers(1, 40, 2)))
            assert iou(a, b) == pytest.approx(iou(b, a))
            assert 0.0 <= iou(a, b) <= 1.0


class TestAveragePrecision:
    """Tests for interpolated AP and greedy matching."""

    def test_envelope(self) -> None:
        # precision 0 at recall 0.5 is lifted by the later point
        ap = interpolated_ap(np.array([0.0, 0.5, 1.0]), np.array([0.0, 0.5, 0.6667]))
        assert ap == pytest.approx(0.6667)

    def test_perfect(self) -> None:
        truth = [GroundTruth("a", RegionKind.BARCODE, BoundingBox(0, 0, 10, 10))]
        dets = [Detection(BoundingBox(0, 0, 10, 10), RegionKind.BARCODE, 0.9, "a")]
        metrics = average_precision(dets, truth)
        assert metrics.ap_per_kind[RegionKind.BARCODE] == pytest.approx(1.0)
        assert metrics.map == pytest.approx(1.0)

    def test_false_positive_ranked_first(self) -> None:
        truth = [GroundTruth("a", RegionKind.BARCODE, BoundingBox(0, 0, 10, 10))]
        dets = [
            Detection(BoundingBox(50, 50, 10, 10), RegionKind.BARCODE, 0.9, "a"),
            Detection(BoundingBox(0, 0, 10, 10), RegionKind.BARCODE, 0.5, "a"),
        ]
        assert average_precision(dets, truth).map == pytest.approx(0.5)

    def test_duplicate_is_false_positive(self) -> None:
        truth = [
            GroundTruth("a", RegionKind.ADDRESS, BoundingBox(0, 0, 10, 10)),
            GroundTruth("b", RegionKind.ADDRESS, BoundingBox(0, 0, 10, 10)),
        ]
        dets = [
            Detection(BoundingBox(0, 0, 10, 10), RegionKind.ADDRESS, 0.9, "a"),
            Detection(BoundingBox(0, 0, 10, 10), RegionKind.ADDRESS, 0.8, "a"),
            Detection(BoundingBox(0, 0, 10, 10), RegionKind.ADDRESS, 0.7, "b"),
        ]
        # recall 0.5, 0.5, 1.0 at precision 1, 0.5, 2/3
        assert average_precision(dets, truth).map == pytest.approx(0.5 + 0.5 * 2 / 3)

    def test_iou_threshold(self) -> None:
        truth = [GroundTruth("a", RegionKind.BARCODE, BoundingBox(0, 0, 10, 10))]
        dets = [Detection(BoundingBox(5, 0, 10, 10), RegionKind.BARCODE, 0.9, "a")]
        assert average_precision(dets, truth, 0.5).map == 0.0
        assert average_precision(dets, truth, 0.3).map == pytest.approx(1.0)

    def test_no_detections(self) -> None:
        truth = [GroundTruth("a", RegionKind.BARCODE, BoundingBox(0, 0, 10, 10))]
        assert average_precision([], truth).map == 0.0

    def test_monotone_confidence_rescale(self) -> None:
        rng = np.random.default_rng(13)
        truth, dets = [], []
        for i in range(6):
            for kind in RegionKind:
                gt = BoundingBox(20 * i, 30 if kind is RegionKind.ADDRESS else 0, 16, 12)
                truth.append(GroundTruth(str(i), kind, gt))
                for _ in range(4):
                    dx, dy = (int(v) for v in rng.integers(0, 10, 2))
                    dets.append(Detection(gt.translate(dx, dy), kind, float(rng.random()), str(i)))

        def rescaled(fn) -> list[Detection]:
            return [Detection(d.box, d.kind, fn(d.confidence), d.image) for d in dets]

        base = average_precision(dets, truth)
        assert 0.0 < base.map < 1.0
        for fn in (lambda c: c**3, lambda c: 0.5 * c + 0.1, np.sqrt):
            other = average_precision(rescaled(fn), truth)
            assert other.map == base.map
            assert other.ap_per_kind == base.ap_per_kind

    def test_multiple_ground_truth(self) -> None:
        truth = [
            GroundTruth("a", RegionKind.BARCODE, BoundingBox(0, 0, 10, 10)),
            GroundTruth("a", RegionKind.BARCODE, BoundingBox(20, 0, 10, 10)),
        ]
        with pytest.raises(MultipleGroundTruth):
            average_precision([], truth)


class TestDetectors:
    """Tests for the oracle and classical detectors."""

    def test_oracle_needs_annotation(self, tiny_dataset) -> None:
        with pytest.raises(MissingAnnotation):
            detect_rois(tiny_dataset.load_image(0), "oracle")

    def test_oracle_map_is_one(self, tiny_dataset) -> None:
        detections = []
        for i, ann in enumerate(tiny_dataset):
            detections += detect_rois(tiny_dataset.load_image(i), "oracle", ann)
        metrics = average_precision(detections, ground_truth_from_annotations(list(tiny_dataset)))
        assert metrics.map == pytest.approx(1.0)
        assert metrics.support == {RegionKind.BARCODE: 10, RegionKind.ADDRESS: 10}

    def test_unknown_method(self) -> None:
        with pytest.raises(ConfigError):
            get_detector("yolo")

    def test_classical_boxes_fit(self, tiny_dataset) -> None:
        for i in range(len(tiny_dataset)):
            image = tiny_dataset.load_image(i)
            found = detect_rois(image, "classical")
            assert len(found) <= 2
            assert [d.confidence for d in found] == sorted((d.confidence for d in found), reverse=True)
            for d in found:
                assert d.box.fits(image.width, image.height)
                assert 0.0 <= d.confidence <= 1.0

    def test_blank_image_has_no_regions(self) -> None:
        assert detect_rois(Raster.blank(300, 200, 3, 255), "classical") == []
        assert detect_rois(Raster.blank(300, 200, 1, 255), "classical") == []

    def test_classical_finds_barcodes(self) -> None:
        config = GenConfig().with_seed(5)
        hits = 0
        for i in range(10):
            image, ann = generate_label(derive_seed(5, i), config, QualityClass.NORMAL)
            box = best_box(detect_rois(image, "classical"), RegionKind.BARCODE)
            if box is not None and iou(box, ann.barcode_box) >= 0.5:
                hits += 1
        assert hits >= 7

    @pytest.mark.slow
    def test_classical_barcode_ap(self) -> None:
        config = GenConfig().with_seed(9)
        detections, annotations = [], []
        for i in range(100):
            image, ann = generate_label(derive_seed(9, i), config, QualityClass.NORMAL, f"{i}.pnm")
            annotations.append(ann)
            detections += [
                Detection(d.box, d.kind, d.confidence, ann.image_path)
                for d in detect_rois(image, "classical")
            ]
        metrics = average_precision(detections, ground_truth_from_annotations(annotations))
        assert metrics.ap_per_kind[RegionKind.BARCODE] >= 0.80

    def test_best_box(self) -> None:
        dets = [
            Detection(BoundingBox(0, 0, 5, 5), RegionKind.ADDRESS, 0.4),
            Detection(BoundingBox(1, 1, 5, 5), RegionKind.ADDRESS, 0.8),
        ]
        assert best_box(dets, RegionKind.ADDRESS) == BoundingBox(1, 1, 5, 5)
        assert best_box(dets, RegionKind.BARCODE) is None

    def test_jsonl_lines(self) -> None:
        dets = [Detection(BoundingBox(1, 2, 3, 4), RegionKind.BARCODE, 0.25, "images/000001.pnm")]
        text = detections_to_jsonl(dets)
        assert text == '{"box":[1,2,3,4],"conf":0.25,"kind":"barcode","path":"images/000001.pnm"}\n'
        assert detections_from_jsonl(text) == dets
