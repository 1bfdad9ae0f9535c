"""Tests for rasters, boxes, the PNM codec, file I/O and pixel transforms."""

import numpy as np
import pytest

from shiplabel_qi.codec.pnm import read_pnm, write_pnm
from shiplabel_qi.core.errors import (
    MalformedHeader,
    OutOfBounds,
    RasterError,
    TruncatedBody,
    UnsupportedMaxval,
)
from shiplabel_qi.core.raster import BoundingBox, Raster
from shiplabel_qi.core.rng import Xoshiro256, derive_seed
from shiplabel_qi.io.reader import load
from shiplabel_qi.io.writer import save
from shiplabel_qi.transform.color import to_grayscale, to_rgb
from shiplabel_qi.transform.geometry import (
    AugmentOp,
    augment,
    augment_box,
    crop,
    letterbox_geometry,
    pad_to,
    resize_bilinear,
    resize_letterbox,
)


class TestRaster:
    """Tests for the Raster carrier."""

    def test_from_array_gray(self) -> None:
        r = Raster.from_array(np.arange(12, dtype=np.uint8).reshape(3, 4))
        assert r.size == (4, 3)
        assert r.channels == 1
        assert r.is_grayscale
        assert len(r.data) == 12

    def test_from_array_rounds_floats(self) -> None:
        r = Raster.from_array(np.array([[0.4, 0.5, 254.6, 300.0]]))
        assert r.plane().tolist() == [[0, 1, 255, 255]]

    def test_rejects_wrong_channels(self) -> None:
        with pytest.raises(RasterError):
            Raster(np.zeros((2, 2, 2), dtype=np.uint8))

    def test_rejects_wrong_dtype(self) -> None:
        with pytest.raises(RasterError):
            Raster(np.zeros((2, 2, 1), dtype=np.float32))

    def test_from_bytes_length_checked(self) -> None:
        with pytest.raises(RasterError):
            Raster.from_bytes(2, 2, 3, b"\x00" * 11)

    def test_equality_by_content(self) -> None:
        a = Raster.blank(5, 4, 3, 200)
        b = Raster.blank(5, 4, 3, 200)
        assert a == b
        assert hash(a) == hash(b)
        assert a != Raster.blank(5, 4, 3, 199)

    def test_plane_requires_gray(self) -> None:
        with pytest.raises(RasterError):
            Raster.blank(2, 2, 3).plane()


class TestBoundingBox:
    """Tests for BoundingBox geometry."""

    def test_edges_and_area(self) -> None:
        box = BoundingBox(2, 3, 10, 4)
        assert (box.x2, box.y2) == (12, 7)
        assert box.area == 40

    def test_rejects_empty(self) -> None:
        with pytest.raises(RasterError):
            BoundingBox(0, 0, 0, 5)

    def test_intersection(self) -> None:
        a = BoundingBox(0, 0, 10, 10)
        b = BoundingBox(5, 5, 10, 10)
        assert a.intersection(b) == BoundingBox(5, 5, 5, 5)
        assert a.intersection(BoundingBox(10, 0, 3, 3)) is None

    def test_fits(self) -> None:
        box = BoundingBox(90, 40, 10, 10)
        assert box.fits(100, 50)
        with pytest.raises(OutOfBounds):
            box.check_fits(99, 50)

    def test_expand_clips(self) -> None:
        assert BoundingBox(2, 2, 4, 4).expand(5, 20, 8) == BoundingBox(0, 0, 11, 8)

    def test_list_form(self) -> None:
        box = BoundingBox(1, 2, 3, 4)
        assert BoundingBox.from_list(box.to_list()) == box
        with pytest.raises(RasterError):
            BoundingBox.from_list([1, 2, 3])


class TestPnmCodec:
    """Tests for the binary PNM codec."""

    def test_canonical_header(self) -> None:
        data = write_pnm(Raster.blank(3, 2, 1, 7))
        assert data == b"P5\n3 2\n255\n" + b"\x07" * 6

    def test_color_magic(self) -> None:
        assert write_pnm(Raster.blank(1, 1, 3)).startswith(b"P6\n")

    def test_decode_known_bytes(self) -> None:
        r = read_pnm(b"P6 2 1 255\n" + bytes([1, 2, 3, 4, 5, 6]))
        assert r.size == (2, 1)
        assert r.pixels[0, 1].tolist() == [4, 5, 6]

    def test_header_comments(self) -> None:
        r = read_pnm(b"P5\n# made by hand\n2 2\n# max\n255\n" + b"\x01\x02\x03\x04")
        assert r.plane().tolist() == [[1, 2], [3, 4]]

    def test_reencode_is_identical(self) -> None:
        rng = np.random.default_rng(5)
        r = Raster.from_array(rng.integers(0, 256, size=(7, 9, 3), dtype=np.uint8))
        data = write_pnm(r)
        assert write_pnm(read_pnm(data)) == data

    def test_bad_magic(self) -> None:
        with pytest.raises(MalformedHeader):
            read_pnm(b"P2\n1 1\n255\n\x00")

    def test_maxval(self) -> None:
        with pytest.raises(UnsupportedMaxval):
            read_pnm(b"P5\n1 1\n65535\n\x00\x00")

    def test_truncated(self) -> None:
        with pytest.raises(TruncatedBody):
            read_pnm(b"P5\n4 4\n255\n" + b"\x00" * 15)

    def test_zero_dimension(self) -> None:
        with pytest.raises(MalformedHeader):
            read_pnm(b"P5\n0 4\n255\n")

    def test_non_numeric_width(self) -> None:
        with pytest.raises(MalformedHeader):
            read_pnm(b"P5\nx 4\n255\n")


class TestFileIO:
    """Tests for load/save on disk."""

    def test_pnm_file(self, tmp_path) -> None:
        r = Raster.blank(4, 3, 3, 90)
        path = tmp_path / "nested" / "a.ppm"
        save(r, path)
        assert load(path) == r

    def test_png_file(self, tmp_path) -> None:
        pytest.importorskip("PIL")
        gray = Raster.from_array(np.arange(12, dtype=np.uint8).reshape(3, 4))
        save(gray, tmp_path / "g.png")
        assert load(tmp_path / "g.png") == gray
        color = Raster.blank(5, 2, 3, 200)
        save(color, tmp_path / "c.png")
        assert load(tmp_path / "c.png") == color


class TestColor:
    """Tests for color conversion."""

    def test_luma_rounding(self) -> None:
        px = np.array([[[255, 0, 0], [0, 255, 0], [0, 0, 255], [10, 20, 30]]], dtype=np.uint8)
        gray = to_grayscale(Raster(px)).plane()[0].tolist()
        # 0.299*255 = 76.245, 0.587*255 = 149.685, 0.114*255 = 29.07, 18.15
        assert gray == [76, 150, 29, 18]

    def test_gray_passthrough(self) -> None:
        r = Raster.blank(2, 2, 1, 9)
        assert to_grayscale(r) is r

    def test_to_rgb(self) -> None:
        rgb = to_rgb(Raster.blank(2, 2, 1, 9))
        assert rgb.channels == 3
        assert to_grayscale(rgb) == Raster.blank(2, 2, 1, 9)


class TestGeometry:
    """Tests for crops, resizes and augmentation."""

    def test_crop_exact(self) -> None:
        r = Raster.from_array(np.arange(20, dtype=np.uint8).reshape(4, 5))
        assert crop(r, BoundingBox(1, 1, 2, 2)).plane().tolist() == [[6, 7], [11, 12]]

    def test_crop_out_of_bounds(self) -> None:
        with pytest.raises(OutOfBounds):
            crop(Raster.blank(4, 4), BoundingBox(2, 2, 3, 3))

    def test_letterbox_geometry(self) -> None:
        s, box = letterbox_geometry(200, 100, 64, 64)
        assert s == pytest.approx(0.32)
        assert box == BoundingBox(0, 16, 64, 32)

    def test_letterbox_pads_white(self) -> None:
        out = resize_letterbox(Raster.blank(200, 100, 1, 0), 64, 64)
        plane = out.plane()
        assert out.size == (64, 64)
        assert (plane[:16] == 255).all()
        assert (plane[16:48] == 0).all()
        assert (plane[48:] == 255).all()

    def test_bilinear_constant(self) -> None:
        out = resize_bilinear(Raster.blank(37, 23, 3, 123), 11, 50)
        assert out == Raster.blank(11, 50, 3, 123)

    def test_pad_to_clips(self) -> None:
        r = Raster.from_array(np.zeros((10, 30), dtype=np.uint8))
        out = pad_to(r, 20, 20)
        assert (out.plane()[:10] == 0).all()
        assert (out.plane()[10:] == 255).all()

    @pytest.mark.parametrize("op", list(AugmentOp))
    def test_box_follows_pixels(self, op: AugmentOp) -> None:
        rng = Xoshiro256(derive_seed(3, 0))
        r = Raster.from_array(np.asarray(
            [[rng.below(256) for _ in range(13)] for _ in range(9)], dtype=np.uint8
        ))
        box = BoundingBox(2, 1, 5, 4)
        moved = augment_box(box, r.width, r.height, op)
        out = augment(r, op)
        assert moved.fits(out.width, out.height)
        assert sorted(crop(out, moved).data) == sorted(crop(r, box).data)
        assert np.array_equal(augment(crop(r, box), op).pixels, crop(out, moved).pixels)

    def test_rotation_swaps_size(self) -> None:
        assert augment(Raster.blank(7, 3), AugmentOp.ROT90).size == (3, 7)
        assert augment(Raster.blank(7, 3), "rot180").size == (7, 3)
