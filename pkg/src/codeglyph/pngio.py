"""Minimal PNG reader/writer for 8-bit RGB images.

The writer always emits the same byte stream for the same pixels
(fixed zlib level, filter type 0 on every scanline), which keeps
golden-file tests meaningful. The reader handles any non-interlaced
8-bit RGB PNG, including all five scanline filters.
"""

from __future__ import annotations

import struct
import zlib
from pathlib import Path

import numpy as np

from .errors import PngFormatError
from .raster import RasterImage

_SIGNATURE = b"\x89PNG\r\n\x1a\n"
_ZLIB_LEVEL = 6


def _chunk(tag: bytes, payload: bytes) -> bytes:
    return (struct.pack(">I", len(payload)) + tag + payload
            + struct.pack(">I", zlib.crc32(tag + payload)))


def encode_png(image: RasterImage) -> bytes:
    """Serialize an image to PNG bytes (8-bit RGB, no alpha, no interlace)."""
    ihdr = struct.pack(">IIBBBBB", image.width, image.height, 8, 2, 0, 0, 0)
    rows = image.data.reshape(image.height, image.width * 3)
    raw = b"".join(b"\x00" + row.tobytes() for row in rows)
    return (_SIGNATURE
            + _chunk(b"IHDR", ihdr)
            + _chunk(b"IDAT", zlib.compress(raw, _ZLIB_LEVEL))
            + _chunk(b"IEND", b""))


def write_image(image: RasterImage, path: str | Path) -> None:
    """Write an image to ``path`` as a lossless PNG."""
    path = Path(path)
    try:
        path.write_bytes(encode_png(image))
    except OSError as exc:
        raise PngFormatError(f"cannot write PNG {path}: {exc}") from exc


def read_image(path: str | Path) -> RasterImage:
    """Read a non-interlaced 8-bit RGB PNG back into a RasterImage."""
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as exc:
        raise PngFormatError(f"cannot read PNG {path}: {exc}") from exc
    return decode_png(blob, name=str(path))


def decode_png(blob: bytes, name: str = "<bytes>") -> RasterImage:
    if blob[:8] != _SIGNATURE:
        raise PngFormatError(f"{name}: not a PNG file")
    pos = 8
    width = height = 0
    idat = bytearray()
    seen_ihdr = False
    while pos < len(blob):
        if pos + 8 > len(blob):
            raise PngFormatError(f"{name}: truncated chunk header")
        (length,) = struct.unpack(">I", blob[pos:pos + 4])
        tag = blob[pos + 4:pos + 8]
        payload = blob[pos + 8:pos + 8 + length]
        if len(payload) != length:
            raise PngFormatError(f"{name}: truncated {tag!r} chunk")
        pos += 12 + length  # header + payload + crc
        if tag == b"IHDR":
            width, height, depth, color, _comp, _filt, interlace = struct.unpack(
                ">IIBBBBB", payload)
            if depth != 8 or color != 2:
                raise PngFormatError(
                    f"{name}: unsupported PNG (need 8-bit RGB, got depth={depth} color={color})")
            if interlace != 0:
                raise PngFormatError(f"{name}: interlaced PNG not supported")
            seen_ihdr = True
        elif tag == b"IDAT":
            idat.extend(payload)
        elif tag == b"IEND":
            break
    if not seen_ihdr:
        raise PngFormatError(f"{name}: missing IHDR")
    try:
        raw = zlib.decompress(bytes(idat))
    except zlib.error as exc:
        raise PngFormatError(f"{name}: corrupt image data: {exc}") from exc
    stride = width * 3
    if len(raw) != (stride + 1) * height:
        raise PngFormatError(f"{name}: image data has wrong length")
    out = np.empty((height, stride), dtype=np.uint8)
    prev = np.zeros(stride, dtype=np.uint8)
    for y in range(height):
        ftype = raw[y * (stride + 1)]
        line = np.frombuffer(raw, dtype=np.uint8,
                             count=stride, offset=y * (stride + 1) + 1)
        out[y] = _unfilter(ftype, line, prev, name)
        prev = out[y]
    return RasterImage(out.reshape(height, width, 3))


def _unfilter(ftype: int, line: np.ndarray, prev: np.ndarray, name: str) -> np.ndarray:
    bpp = 3
    if ftype == 0:
        return line.copy()
    if ftype == 2:
        return line + prev
    cur = np.empty_like(line)
    if ftype == 1:
        cur[:bpp] = line[:bpp]
        for i in range(bpp, len(line)):
            cur[i] = (int(line[i]) + int(cur[i - bpp])) % 256
        return cur
    if ftype == 3:
        for i in range(len(line)):
            left = int(cur[i - bpp]) if i >= bpp else 0
            cur[i] = (int(line[i]) + (left + int(prev[i])) // 2) % 256
        return cur
    if ftype == 4:
        for i in range(len(line)):
            a = int(cur[i - bpp]) if i >= bpp else 0
            b = int(prev[i])
            c = int(prev[i - bpp]) if i >= bpp else 0
            p = a + b - c
            pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
            if pa <= pb and pa <= pc:
                pred = a
            elif pb <= pc:
                pred = b
            else:
                pred = c
            cur[i] = (int(line[i]) + pred) % 256
        return cur
    raise PngFormatError(f"{name}: unknown scanline filter {ftype}")
