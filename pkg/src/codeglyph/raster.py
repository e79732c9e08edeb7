"""Deterministic code-to-image rendering on a fixed glyph grid.

Source text is laid out on a grid of fixed-size cells using the embedded
bitmap font and colored according to the chosen visualization variant.
Identical (source, profile, config) inputs produce byte-identical pixel
buffers on every platform: the font is baked into the package and all
arithmetic is integer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Mapping

import numpy as np

from . import fontdata, kernels
from .errors import ConfigError
from .tokens import LanguageProfile, TokenClass, lex, to_source_bytes

RGB = tuple[int, int, int]


class Variant(str, Enum):
    PLAIN = "plain"
    KEYWORD = "keyword-color"
    SYNTAX = "syntax-color"


DEFAULT_PALETTE: Mapping[TokenClass, RGB] = MappingProxyType({
    TokenClass.KEYWORD: (200, 0, 0),
    TokenClass.IDENTIFIER: (0, 0, 0),
    TokenClass.NUMBER: (0, 0, 200),
    TokenClass.STRING: (0, 128, 0),
    TokenClass.CHAR: (0, 128, 0),
    TokenClass.COMMENT: (128, 128, 128),
    TokenClass.PUNCTUATION: (0, 0, 0),
    TokenClass.WHITESPACE: (0, 0, 0),
})


class RasterImage:
    """Fixed-size 8-bit RGB pixel grid.

    Wraps a (height, width, 3) uint8 array; the buffer is row-major RGB.
    """

    __slots__ = ("data",)

    def __init__(self, data: np.ndarray) -> None:
        arr = np.asarray(data, dtype=np.uint8)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ConfigError(f"image array must be (height, width, 3), got {arr.shape}")
        if arr.shape[0] == 0 or arr.shape[1] == 0:
            raise ConfigError("image dimensions must be positive")
        self.data = np.ascontiguousarray(arr)

    @classmethod
    def filled(cls, width: int, height: int, color: RGB) -> "RasterImage":
        return cls(np.full((height, width, 3), color, dtype=np.uint8))

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    def tobytes(self) -> bytes:
        return self.data.tobytes()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RasterImage):
            return NotImplemented
        return self.data.shape == other.data.shape and bool(np.array_equal(self.data, other.data))

    def __repr__(self) -> str:
        return f"RasterImage({self.width}x{self.height})"


def _check_color(name: str, color: RGB) -> None:
    if len(color) != 3 or not all(isinstance(c, int) and 0 <= c <= 255 for c in color):
        raise ConfigError(f"{name} must be an 8-bit RGB triple, got {color!r}")


@dataclass(frozen=True)
class RenderConfig:
    """Canvas geometry, variant, and colors for the renderer."""

    width: int = 224
    height: int = 224
    cell_width: int = fontdata.GLYPH_WIDTH
    cell_height: int = fontdata.GLYPH_HEIGHT
    tab_width: int = 4
    variant: Variant = Variant.SYNTAX
    palette: Mapping[TokenClass, RGB] = field(default=DEFAULT_PALETTE)
    background: RGB = (255, 255, 255)
    foreground: RGB = (0, 0, 0)

    def __post_init__(self) -> None:
        if self.cell_width < fontdata.GLYPH_WIDTH or self.cell_height < fontdata.GLYPH_HEIGHT:
            raise ConfigError(
                f"glyph cells must be at least {fontdata.GLYPH_WIDTH}x{fontdata.GLYPH_HEIGHT}")
        if self.width < self.cell_width or self.height < self.cell_height:
            raise ConfigError("canvas must fit at least one glyph cell")
        if self.tab_width < 1:
            raise ConfigError("tab width must be >= 1")
        _check_color("background", self.background)
        _check_color("foreground", self.foreground)
        if self.variant is not Variant.PLAIN:
            missing = [tc.value for tc in TokenClass if tc not in self.palette]
            if missing:
                raise ConfigError(f"palette missing token classes: {missing}")
            for tc in TokenClass:
                _check_color(f"palette[{tc.value}]", self.palette[tc])

    @property
    def columns(self) -> int:
        return self.width // self.cell_width

    @property
    def rows(self) -> int:
        return self.height // self.cell_height


_GLYPH_TABLE = np.frombuffer(fontdata._BITMAPS, dtype=np.uint8).reshape(
    fontdata.GLYPH_COUNT, fontdata.GLYPH_HEIGHT).copy()

_NL = 0x0A
_TAB = 0x09
_SPACE = 0x20
_SILENT = frozenset((0x0D, 0x0B, 0x0C))  # \r \v \f: advance one column, draw nothing


def render(source: str | bytes, profile: LanguageProfile, config: RenderConfig) -> RasterImage:
    """Render source text to a fixed-size RGB image.

    Layout walks the UTF-8 bytes of the source left to right on a
    ``columns x rows`` cell grid: newlines break, tabs advance to the
    next multiple of the tab width, lines wrap at the last column, and
    rows past the bottom of the canvas are dropped. Bytes outside
    printable ASCII draw the replacement glyph. Glyph color comes from
    the variant: the foreground color for ``plain``, the keyword palette
    entry for keywords under ``keyword-color``, and the per-class
    palette entry under ``syntax-color``. Layout never depends on the
    variant, only colors do.
    """
    data = to_source_bytes(source)
    canvas = np.full((config.height, config.width, 3), config.background, dtype=np.uint8)
    cols, rows = config.columns, config.rows

    colors = _byte_colors(data, profile, config)
    cells: list[tuple[int, int, int, int, int, int]] = []
    row = 0
    col = 0
    for i, b in enumerate(data):
        if b == _NL:
            row += 1
            col = 0
            if row >= rows:
                break
            continue
        if b == _TAB:
            col = (col // config.tab_width + 1) * config.tab_width
            continue
        if col >= cols:
            row += 1
            col = 0
            if row >= rows:
                break
        if b != _SPACE and b not in _SILENT:
            r, g, bl = colors[i]
            cells.append((row * config.cell_height, col * config.cell_width,
                          fontdata.glyph_index(b), r, g, bl))
        col += 1

    if cells:
        kernels.blit_cells(canvas, _GLYPH_TABLE,
                           np.asarray(cells, dtype=np.int32))
    return RasterImage(canvas)


def _byte_colors(data: bytes, profile: LanguageProfile,
                 config: RenderConfig) -> "_ColorLookup":
    if config.variant is Variant.PLAIN:
        return _ColorLookup(None, config.foreground)
    spans = lex(data, profile)
    classes = np.empty(len(data), dtype=np.uint8)
    class_list = list(TokenClass)
    class_index = {tc: i for i, tc in enumerate(class_list)}
    for span in spans:
        classes[span.start:span.end] = class_index[span.cls]
    if config.variant is Variant.KEYWORD:
        table = [config.palette[TokenClass.KEYWORD] if tc is TokenClass.KEYWORD
                 else config.foreground for tc in class_list]
    else:
        table = [config.palette[tc] for tc in class_list]
    return _ColorLookup(classes, config.foreground, table)


class _ColorLookup:
    __slots__ = ("classes", "fallback", "table")

    def __init__(self, classes, fallback, table=None):
        self.classes = classes
        self.fallback = fallback
        self.table = table

    def __getitem__(self, i: int) -> RGB:
        if self.classes is None:
            return self.fallback
        return self.table[self.classes[i]]
