"""Embedded 8x16 monospace bitmap font.

Glyphs for ASCII 32-126 plus a replacement glyph, baked from DejaVu Sans
Mono (tools/bake_font.py) into fixed-size 1-bit cells. Each glyph is
GLYPH_HEIGHT bytes, one byte per row, most significant bit = leftmost
pixel. Baking the bitmaps into source keeps rendering bit-identical
across platforms; runtime code never invokes a font rasterizer.
"""

GLYPH_WIDTH = 8
GLYPH_HEIGHT = 16
FIRST_CODEPOINT = 32
LAST_CODEPOINT = 126
REPLACEMENT_INDEX = 95
GLYPH_COUNT = 96

_BITMAPS = bytes.fromhex(
    "0000000000000000000000000000000000000000181818181810001818000000"
    "000000002424242400000000000000000000001212147f2424fe284848000000"
    "00000000003c6040380c02423c0000000000000060909066184e0b0b0e000000"
    "000000003c20203051c8c6463a00000000000000101010100000000000000000"
    "0000080818101010101010180808000000002010100808080808081010200000"
    "0000000000403838400000000000000000000000001010107e10101000000000"
    "000000000000000000000018181010000000000000000000003c000000000000"
    "0000000000000000000000181800000000000000060404080810102020604000"
    "000000003c6446425a4246643c0000000000000038080808080808083e000000"
    "00000000384406040c1830607e00000000000000384406043c0402463c000000"
    "000000000c1c142424447e0404000000000000007c4040780406064438000000"
    "000000001c20405c664242663c000000000000007e04040c0808101030000000"
    "000000003c6646643c6642663c000000000000003c644646663e060438000000"
    "0000000000001818000000181800000000000000000018180000001818101000"
    "000000000000021c60601c0200000000000000000000007e00007e0000000000"
    "00000000000040380606384000000000000000003c04040c1810001010000000"
    "000000001c62428e9290928e40201c00000000001818382424647e42c2000000"
    "000000007c4642467c4642467c000000000000001c226040404060221c000000"
    "00000000784446424242464478000000000000007e6060607e6060607e000000"
    "000000007e6060607e60606060000000000000001c6040404e4242623c000000"
    "00000000424242427e42424242000000000000007e181818181818187e000000"
    "000000003c0404040404044c7800000000000000424448707848444642000000"
    "0000000060606060606060607e000000000000004666664a5a5a424242000000"
    "0000000062627252524a4e4646000000000000003c644242424242643c000000"
    "000000007c666262667c606060000000000000003c644242424242643c040400"
    "000000007c4646447844464243000000000000003c6040603c0602463c000000"
    "00000000ff18181818181818180000000000000042424242424242663c000000"
    "00000000424246642424281818000000000000008183c25a5a5a666664000000"
    "000000004224241818382446c200000000000000424624381818181818000000"
    "000000007e060408181020607e00000000001c101010101010101010101c0000"
    "0000000040602020101008080404060000003808080808080808080808380000"
    "00000000183c24420000000000000000000000000000000000000000000000ff"
    "000000201000000000000000000000000000000000003c44023e46463e000000"
    "0000404040407c66624262667c0000000000000000001c20606060201c000000"
    "0000060606063e66464646663e0000000000000000003c66427e40623c000000"
    "00000e1810107e1010101010100000000000000000003e66464646663e040438"
    "0000404040407c6446464646460000000000180000003818181818187e000000"
    "00000800000038080808080808081870000060606060666c78786c6662000000"
    "0000701010101010101010100e000000000000000000765a5252525252000000"
    "0000000000007c6446464646460000000000000000003c64424242643c000000"
    "0000000000007c66624262667c4040400000000000003e66464646663e020202"
    "0000000000003e3030202020200000000000000000003864603c04443c000000"
    "0000000010107e10101010101e0000000000000000004646464646663e000000"
    "000000000000424624242c181800000000000000000081825a5a5a6624000000"
    "00000000000046241818382442000000000000000000424224243c1818101060"
    "0000000000007e04081830207e00000000000c181818107010181818180c0000"
    "00001010101010101010101010101000000070101010180c1818101010700000"
    "0000000000000000700e0000000000000000182452787a7276667e7e24180000"
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
