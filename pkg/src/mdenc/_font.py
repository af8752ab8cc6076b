"""Embedded 5x7 bitmap glyphs for the text-grid encoder.

Hand-drawn pixel font covering digits, sign, decimal point and the
exponent marker; one blank column separates adjacent glyphs. Integer
scaling only, so rendering is bit-exact on every platform.
"""

from __future__ import annotations

import numpy as np

from .errors import ParameterError

GLYPH_WIDTH = 5
GLYPH_HEIGHT = 7
GLYPH_ADVANCE = GLYPH_WIDTH + 1

_GLYPH_ROWS = {
    "0": (".###.", "#...#", "#..##", "#.#.#", "##..#", "#...#", ".###."),
    "1": ("..#..", ".##..", "..#..", "..#..", "..#..", "..#..", ".###."),
    "2": (".###.", "#...#", "....#", "...#.", "..#..", ".#...", "#####"),
    "3": ("#####", "...#.", "..#..", "...#.", "....#", "#...#", ".###."),
    "4": ("...#.", "..##.", ".#.#.", "#..#.", "#####", "...#.", "...#."),
    "5": ("#####", "#....", "####.", "....#", "....#", "#...#", ".###."),
    "6": ("..##.", ".#...", "#....", "####.", "#...#", "#...#", ".###."),
    "7": ("#####", "....#", "...#.", "..#..", "..#..", "..#..", "..#.."),
    "8": (".###.", "#...#", "#...#", ".###.", "#...#", "#...#", ".###."),
    "9": (".###.", "#...#", "#...#", ".####", "....#", "...#.", ".##.."),
    ".": (".....", ".....", ".....", ".....", ".....", ".##..", ".##.."),
    "-": (".....", ".....", ".....", "#####", ".....", ".....", "....."),
    "+": (".....", "..#..", "..#..", "#####", "..#..", "..#..", "....."),
    "e": (".....", ".....", ".###.", "#...#", "#####", "#....", ".###."),
}

GLYPHS = {
    ch: np.array([[cell == "#" for cell in row] for row in rows], dtype=bool)
    for ch, rows in _GLYPH_ROWS.items()
}


def text_size(text: str, scale: int = 1) -> tuple[int, int]:
    """(width, height) in pixels of ``text`` at the given integer scale."""
    if not text:
        return 0, 0
    return scale * (len(text) * GLYPH_ADVANCE - 1), scale * GLYPH_HEIGHT


def draw_text(pixels: np.ndarray, text: str, x: int, y: int, scale: int,
              clip: tuple[int, int, int, int]) -> None:
    """Blit ``text`` at (x, y) with foreground 255, clipped to the
    (x0, y0, x1, y1) rectangle intersected with the buffer bounds."""
    if scale < 1:
        raise ParameterError("scale must be a positive integer")
    x0 = max(0, clip[0])
    y0 = max(0, clip[1])
    x1 = min(pixels.shape[1], clip[2])
    y1 = min(pixels.shape[0], clip[3])
    for ch in text:
        glyph = GLYPHS.get(ch)
        if glyph is None:
            raise ParameterError(f"no glyph for character {ch!r}")
        mask = glyph.repeat(scale, axis=0).repeat(scale, axis=1)
        gx0, gy0 = max(x, x0), max(y, y0)
        gx1 = min(x + mask.shape[1], x1)
        gy1 = min(y + mask.shape[0], y1)
        if gx0 < gx1 and gy0 < gy1:
            window = mask[gy0 - y:gy1 - y, gx0 - x:gx1 - x]
            region = pixels[gy0:gy1, gx0:gx1]
            region[window] = 255
        x += GLYPH_ADVANCE * scale
