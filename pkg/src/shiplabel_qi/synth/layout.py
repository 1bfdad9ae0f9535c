"""Parametric shipping-label layouts.

Every layout stacks the same parts vertically: a carrier band (or a framed
title line), a sender block, the receiver block and a barcode strip with the
human-readable tracking number underneath. Layouts differ in the order of the
parts and in the decoration.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from shiplabel_qi.core.errors import ConfigTooSmall
from shiplabel_qi.core.raster import BoundingBox, Raster
from shiplabel_qi.core.rng import Xoshiro256
from shiplabel_qi.synth import font
from shiplabel_qi.synth.builder import INK, WHITE, Color, LabelBuilder
from shiplabel_qi.synth.code128 import QUIET_ZONE_MODULES, encode
from shiplabel_qi.synth.config import GenConfig

logger = logging.getLogger(__name__)

# Fictional address parts, no real-address corpus
FIRST_NAMES = (
    "JANE", "JOHN", "MARIA", "LEE", "SAM", "ALEX", "NOVA", "KIM",
    "OMAR", "IVY", "RUTH", "OWEN", "MILA", "PAUL", "ZOE", "HUGO",
)
LAST_NAMES = (
    "DOE", "PARK", "SMITH", "RIVERA", "CHEN", "NOVAK", "ODUYA", "BERG",
    "KANE", "MOREAU", "SATO", "QUINN", "LINDQVIST", "ABARA",
)
STREETS = (
    "MAIN ST", "OAK AVE", "PINE RD", "LAKE DR", "HILL ST", "CEDAR LN",
    "RIVER RD", "ELM CT", "MAPLE WAY", "HARBOR BLVD", "MILL ST",
)
CITIES = (
    "SPRINGFIELD", "RIVERTON", "LAKEWOOD", "FAIRVIEW", "GREENVILLE",
    "MIDDLETON", "CLAYTON", "ASHFORD", "BROOKSIDE", "WESTBURY",
)
REGIONS = ("CA", "NY", "TX", "WA", "IL", "OR", "MA", "CO", "GA", "MN")
CARRIERS = ("PARCELGO", "SWIFTSHIP", "BLUEPOST", "CARGOLINE", "NORTHEX")
BAND_COLORS: tuple[Color, ...] = (
    (60, 40, 110), (150, 30, 30), (20, 70, 140), (30, 110, 60), (70, 70, 70),
)
TRACKING_ALPHABET = "0123456789ABCDEFGHJKLMNPRSTUVWXYZ"

MIN_GAP = 10
MIN_BARCODE_HEIGHT = 24
FRAME_THICKNESS = 3
# Gap between the bars and the human-readable line below them
CAPTION_GAP = 3


@dataclass(frozen=True)
class LabelRender:
    """An undegraded label and the boxes of its regions of interest."""
    raster: Raster
    barcode_box: BoundingBox
    address_box: BoundingBox
    address_lines: tuple[str, ...]
    tracking: str
    layout: str


def _name(rng: Xoshiro256) -> str:
    return f"{rng.choice(FIRST_NAMES)} {rng.choice(LAST_NAMES)}"


def _street(rng: Xoshiro256) -> str:
    return f"{rng.randint(1, 9999)} {rng.choice(STREETS)}"


def _city_line(rng: Xoshiro256) -> str:
    return f"{rng.choice(CITIES)}, {rng.choice(REGIONS)} {rng.randint(10000, 99999)}"


def receiver_lines(rng: Xoshiro256, max_len: int) -> list[str]:
    """Three or four random receiver lines, each at most max_len characters."""
    lines = [_name(rng), _street(rng)]
    if rng.below(2):
        lines.append(f"APT {rng.randint(1, 99)}")
    lines.append(_city_line(rng))
    return [line[:max_len].rstrip() or line[:1] for line in lines]


def sender_lines(rng: Xoshiro256, max_len: int) -> list[str]:
    lines = [f"FROM: {_name(rng)}", _street(rng), _city_line(rng)]
    return [line[:max_len].rstrip() or line[:1] for line in lines]


def tracking_number(rng: Xoshiro256, length: int) -> str:
    prefix = "1Z"
    body = "".join(rng.choice(TRACKING_ALPHABET) for _ in range(length - len(prefix)))
    return prefix + body


def _barcode_fit(rng: Xoshiro256, avail_w: int, max_module_px: int) -> tuple[str, int]:
    """Pick a tracking number and module width that fit avail_w."""
    length = rng.randint(10, 14)
    tracking = tracking_number(rng, length)
    while True:
        modules = encode(tracking).total_modules + 2 * QUIET_ZONE_MODULES
        module_px = min(max_module_px, avail_w // modules)
        if module_px >= 1:
            return tracking, module_px
        if len(tracking) <= 4:
            raise ConfigTooSmall(f"No barcode fits in {avail_w} pixels")
        tracking = tracking[:-1]


def render_label(
    rng: Xoshiro256, width: int, height: int, config: GenConfig
) -> LabelRender:
    """
    Draw one undegraded label of the given size.

    Raises:
        ConfigTooSmall: the parts do not fit the label
    """
    layout = rng.choice(config.layouts)
    fs = config.font_scale
    sender_scale = max(1, fs // 2)
    m = config.margin
    framed = layout == "framed"
    frame = FRAME_THICKNESS if framed else 0

    left = m + frame
    avail_w = width - 2 * left
    if avail_w < font.advance(fs) * 8:
        raise ConfigTooSmall(f"Label width {width} leaves {avail_w} pixels for text")

    carrier = rng.choice(CARRIERS)
    band_color = rng.choice(BAND_COLORS)
    receiver = receiver_lines(rng, font.max_chars(avail_w, fs))
    sender = sender_lines(rng, font.max_chars(avail_w, sender_scale))
    tracking, module_px = _barcode_fit(rng, avail_w, config.max_module_px)

    band_h = font.GLYPH_H * fs + 12
    title_h = font.GLYPH_H * fs
    receiver_h = len(receiver) * font.GLYPH_H * fs + (len(receiver) - 1) * 2 * fs
    sender_h = len(sender) * font.GLYPH_H * sender_scale + (len(sender) - 1) * 2 * sender_scale
    caption_h = CAPTION_GAP + font.GLYPH_H
    bar_h = config.barcode_height

    if layout == "stacked":
        order = ["sender", "receiver", "barcode"]
    elif layout == "barcode_first":
        order = ["barcode", "receiver", "sender"]
    elif layout == "footer_band":
        order = ["sender", "receiver", "barcode"]
    else:
        order = ["title", "receiver", "sender", "barcode"]

    top = frame + m + (band_h if layout in ("stacked", "barcode_first") else 0)
    bottom = height - frame - m - (band_h if layout == "footer_band" else 0)
    heights = {
        "title": title_h,
        "sender": sender_h,
        "receiver": receiver_h,
        "barcode": bar_h + caption_h,
    }
    needed = sum(heights[part] for part in order) + MIN_GAP * (len(order) - 1)
    slack = (bottom - top) - needed
    if slack < 0:
        shrink = min(-slack, bar_h - MIN_BARCODE_HEIGHT)
        bar_h -= shrink
        heights["barcode"] = bar_h + caption_h
        slack += shrink
    if slack < 0:
        raise ConfigTooSmall(
            f"Layout {layout!r} needs {needed} rows, label has {bottom - top}"
        )

    builder = LabelBuilder(width, height)
    if layout in ("stacked", "barcode_first"):
        builder.fill_rect(BoundingBox(0, 0, width, band_h), band_color)
        builder.ink(WHITE).move_to(left, (band_h - title_h) // 2).text(carrier, fs)
    elif layout == "footer_band":
        builder.fill_rect(BoundingBox(0, height - band_h, width, band_h), band_color)
        band_y = height - band_h + (band_h - title_h) // 2
        builder.ink(WHITE).move_to(left, band_y).text(carrier, fs)
    else:
        builder.frame(FRAME_THICKNESS)
    builder.ink(INK)

    n_gaps = len(order) - 1
    y = top
    for i, part in enumerate(order):
        if part == "title":
            builder.move_to(left, y).text(carrier, fs)
            builder.hrule(y + title_h + MIN_GAP // 2, left, width - left)
        elif part == "sender":
            block_w = max(font.text_size(line, sender_scale)[0] for line in sender)
            x = left + rng.randint(0, max(0, min(24, avail_w - block_w)))
            builder.move_to(x, y).text_block("sender", sender, sender_scale)
        elif part == "receiver":
            block_w = max(font.text_size(line, fs)[0] for line in receiver)
            x = left + rng.randint(0, max(0, min(24, avail_w - block_w)))
            builder.move_to(x, y).text_block("receiver", receiver, fs)
        else:
            symbol = encode(tracking)
            full_w = (symbol.total_modules + 2 * QUIET_ZONE_MODULES) * module_px
            x = left + rng.randint(0, max(0, avail_w - full_w))
            builder.move_to(x, y).barcode("barcode", symbol, module_px, bar_h)
            bars = builder.regions["barcode"]
            builder.move_to(bars.x, bars.y2 + CAPTION_GAP).text(tracking, 1)
        y += heights[part]
        if i < n_gaps:
            extra = rng.randint(0, slack // n_gaps) if slack > 0 else 0
            y += MIN_GAP + extra

    render = LabelRender(
        raster=builder.build(),
        barcode_box=builder.regions["barcode"],
        address_box=builder.regions["receiver"],
        address_lines=tuple(receiver),
        tracking=tracking,
        layout=layout,
    )
    logger.debug(
        "Rendered %s label %dx%d, tracking %s", layout, width, height, tracking
    )
    return render
