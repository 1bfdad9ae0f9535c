"""Fluent builder API for drawing shipping labels."""

from __future__ import annotations

import numpy as np

from shiplabel_qi.core.raster import BoundingBox, Raster
from shiplabel_qi.synth import font
from shiplabel_qi.synth.code128 import Code128Symbol

Color = tuple[int, int, int]

WHITE: Color = (255, 255, 255)
INK: Color = (20, 20, 20)
BAR: Color = (0, 0, 0)


class LabelBuilder:
    """
    Fluent API for drawing a label on an RGB canvas.

    Named regions (text blocks, barcode) are recorded as they are drawn so
    layouts can read back the boxes that go into the annotation.

    Example:
        >>> label = (LabelBuilder(400, 300)
        ...     .move_to(12, 12)
        ...     .text_block("receiver", ["JANE DOE", "1 MAIN ST"], scale=2)
        ...     .barcode("barcode", encode("1Z123"), module_px=2, height=40)
        ...     .build())
    """

    def __init__(self, width: int, height: int, background: Color = WHITE):
        self.width = width
        self.height = height
        self.pixels = np.empty((height, width, 3), dtype=np.uint8)
        self.pixels[:, :] = background
        self.cursor_x = 0
        self.cursor_y = 0
        self._ink: Color = INK
        self.regions: dict[str, BoundingBox] = {}

    def ink(self, color: Color) -> LabelBuilder:
        """Set the drawing color for text."""
        self._ink = color
        return self

    def move_to(self, x: int, y: int) -> LabelBuilder:
        """Move cursor to absolute position."""
        self.cursor_x = x
        self.cursor_y = y
        return self

    def advance_y(self, dy: int) -> LabelBuilder:
        self.cursor_y += dy
        return self

    def fill_rect(self, box: BoundingBox, color: Color) -> LabelBuilder:
        """Fill a rectangle (clipped to the canvas)."""
        self.pixels[box.y:min(box.y2, self.height), box.x:min(box.x2, self.width)] = color
        return self

    def frame(self, thickness: int, color: Color = INK) -> LabelBuilder:
        """Draw a border around the whole label."""
        t = thickness
        self.pixels[:t, :] = color
        self.pixels[-t:, :] = color
        self.pixels[:, :t] = color
        self.pixels[:, -t:] = color
        return self

    def hrule(self, y: int, x1: int, x2: int, color: Color = INK) -> LabelBuilder:
        """One-pixel horizontal line from x1 (inclusive) to x2 (exclusive)."""
        if 0 <= y < self.height:
            self.pixels[y, max(0, x1):min(self.width, x2)] = color
        return self

    def stamp(self, mask: np.ndarray, x: int, y: int, color: Color | None = None) -> LabelBuilder:
        """Paint color wherever mask is True, with the mask's top-left at (x, y)."""
        color = color or self._ink
        h, w = mask.shape
        x1, y1 = max(0, x), max(0, y)
        x2, y2 = min(self.width, x + w), min(self.height, y + h)
        if x2 <= x1 or y2 <= y1:
            return self
        sub = mask[y1 - y:y2 - y, x1 - x:x2 - x]
        self.pixels[y1:y2, x1:x2][sub] = color
        return self

    def text(self, line: str, scale: int = 1) -> LabelBuilder:
        """Draw one line of text at the cursor and move the cursor right."""
        if line:
            self.stamp(font.text_mask(line, scale), self.cursor_x, self.cursor_y)
            self.cursor_x += font.text_size(line, scale)[0] + font.SPACING * scale
        return self

    def text_block(
        self,
        name: str,
        lines: list[str],
        scale: int = 1,
        line_gap: int | None = None,
    ) -> LabelBuilder:
        """Draw stacked lines at the cursor and record the block's box as name."""
        gap = line_gap if line_gap is not None else 2 * scale
        x0, y0 = self.cursor_x, self.cursor_y
        width = max(font.text_size(line, scale)[0] for line in lines)
        for line in lines:
            self.move_to(x0, self.cursor_y).text(line, scale)
            self.cursor_y += font.GLYPH_H * scale + gap
        height = len(lines) * (font.GLYPH_H * scale + gap) - gap
        self.regions[name] = BoundingBox(x0, y0, max(1, width), height)
        self.move_to(x0, y0 + height)
        return self

    def barcode(
        self,
        name: str,
        symbol: Code128Symbol,
        module_px: int,
        height: int,
        quiet_zone: int = 10,
    ) -> LabelBuilder:
        """
        Draw a Code 128 symbol with quiet zones at the cursor.

        The recorded box covers the bars only; the quiet zones stay white.
        """
        bits = symbol.module_bits(quiet_zone)
        row = np.repeat(np.array(bits, dtype=bool), module_px)
        mask = np.broadcast_to(row, (height, row.size))
        x0 = self.cursor_x
        self.fill_rect(BoundingBox(x0, self.cursor_y, row.size, height), WHITE)
        self.stamp(np.ascontiguousarray(mask), x0, self.cursor_y, BAR)
        bar_x = x0 + quiet_zone * module_px
        self.regions[name] = BoundingBox(
            bar_x, self.cursor_y, symbol.total_modules * module_px, height
        )
        self.move_to(x0, self.cursor_y + height)
        return self

    def build(self) -> Raster:
        """Return the finished label."""
        return Raster(self.pixels.copy())
