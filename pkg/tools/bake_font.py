#!/usr/bin/env python3
"""Bake the embedded 8x16 bitmap font from a TTF into a Python module.

One-time developer tool: rasterizes ASCII 32-126 plus the replacement
glyph (U+FFFD) from DejaVu Sans Mono into fixed 8x16 cells, thresholds
the coverage, and writes the packed bitmaps to src/codeglyph/fontdata.py.
The generated module is committed; the runtime never touches a font file,
so rendered output is identical on every platform.

Usage: python tools/bake_font.py [--ttf PATH] [--preview CHARS]
"""

import argparse
from pathlib import Path

from PIL import Image, ImageDraw, ImageFont

CELL_W = 8
CELL_H = 16
FONT_SIZE = 13
THRESHOLD = 128
CODEPOINTS = list(range(32, 127)) + [0xFFFD]

HEADER = '''"""Embedded 8x16 monospace bitmap font.

Glyphs for ASCII 32-126 plus a replacement glyph, baked from DejaVu Sans
Mono (tools/bake_font.py) into fixed-size 1-bit cells. Each glyph is
GLYPH_HEIGHT bytes, one byte per row, most significant bit = leftmost
pixel. Baking the bitmaps into source keeps rendering bit-identical
across platforms; runtime code never invokes a font rasterizer.
"""

GLYPH_WIDTH = {w}
GLYPH_HEIGHT = {h}
FIRST_CODEPOINT = 32
LAST_CODEPOINT = 126
REPLACEMENT_INDEX = {ri}
GLYPH_COUNT = {count}

_BITMAPS = bytes.fromhex(
{hexdata}
)


def glyph_rows(index: int) -> bytes:
    """Row bitmasks (GLYPH_HEIGHT bytes) for the glyph at ``index``."""
    return _BITMAPS[index * GLYPH_HEIGHT:(index + 1) * GLYPH_HEIGHT]


def glyph_index(byte_value: int) -> int:
    """Glyph table index for a source byte.

    Printable ASCII maps to its own glyph; every other byte (controls,
    bytes >= 0x80 from multi-byte encodings) maps to the replacement
    glyph.
    """
    if FIRST_CODEPOINT <= byte_value <= LAST_CODEPOINT:
        return byte_value - FIRST_CODEPOINT
    return REPLACEMENT_INDEX
'''


def default_ttf() -> Path:
    import matplotlib

    return Path(matplotlib.get_data_path()) / "fonts" / "ttf" / "DejaVuSansMono.ttf"


def rasterize(font: ImageFont.FreeTypeFont, codepoint: int) -> bytes:
    img = Image.new("L", (CELL_W, CELL_H), 0)
    ImageDraw.Draw(img).text((0, 0), chr(codepoint), font=font, fill=255)
    px = img.load()
    rows = bytearray()
    for y in range(CELL_H):
        mask = 0
        for x in range(CELL_W):
            mask = (mask << 1) | (1 if px[x, y] >= THRESHOLD else 0)
        rows.append(mask)
    return bytes(rows)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ttf", type=Path, default=None)
    ap.add_argument("--out", type=Path,
                    default=Path(__file__).resolve().parent.parent / "src" / "codeglyph" / "fontdata.py")
    ap.add_argument("--preview", default="", help="dump these glyphs as ASCII art")
    args = ap.parse_args()

    font = ImageFont.truetype(str(args.ttf or default_ttf()), size=FONT_SIZE)
    bitmaps = b"".join(rasterize(font, cp) for cp in CODEPOINTS)

    for ch in args.preview:
        idx = CODEPOINTS.index(ord(ch))
        print(f"--- {ch!r}")
        for row in bitmaps[idx * CELL_H:(idx + 1) * CELL_H]:
            print("".join("#" if row & (0x80 >> x) else "." for x in range(CELL_W)))

    hexstr = bitmaps.hex()
    lines = [f'    "{hexstr[i:i + 64]}"' for i in range(0, len(hexstr), 64)]
    args.out.write_text(HEADER.format(
        w=CELL_W, h=CELL_H, ri=len(CODEPOINTS) - 1, count=len(CODEPOINTS),
        hexdata="\n".join(lines),
    ))
    print(f"wrote {args.out} ({len(CODEPOINTS)} glyphs, {len(bitmaps)} bytes)")


if __name__ == "__main__":
    main()
