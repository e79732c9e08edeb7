"""Numpy implementations of the per-pixel kernels.

Fallback backend used when the compiled extension is unavailable. Every
function here must stay arithmetically identical to its twin in
``_ckernels.pyx``: same operations, same association order, same
summation order, so both backends produce bit-identical outputs
(verified by the parity tests).
"""

from __future__ import annotations

import numpy as np

_BIT_COLUMNS = np.arange(7, -1, -1, dtype=np.uint8)


def blit_cells(canvas: np.ndarray, glyphs: np.ndarray, cells: np.ndarray) -> None:
    """Draw glyph cells onto ``canvas`` in place.

    canvas: (H, W, 3) uint8. glyphs: (G, cell_h) uint8 row bitmasks,
    MSB = leftmost pixel (cell width <= 8). cells: (N, 6) int32 rows of
    (y0, x0, glyph_index, r, g, b); every cell must lie fully inside the
    canvas.
    """
    if cells.shape[0] == 0:
        return
    cell_h = glyphs.shape[1]
    masks = ((glyphs[:, :, None] >> _BIT_COLUMNS[None, None, :]) & 1).astype(bool)
    for y0, x0, gi, r, g, b in cells:
        region = canvas[y0:y0 + cell_h, x0:x0 + 8]
        region[masks[gi]] = np.array([r, g, b], dtype=np.uint8)


def resize_bilinear_u8(src: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Bilinear resize of an (H, W, 3) uint8 image, half-pixel centers.

    Source coordinates: src = (dst + 0.5) * (src_size / dst_size) - 0.5,
    clamped to the valid range; channels interpolated independently;
    result rounded to nearest with ties away from zero.
    """
    src_h, src_w = src.shape[0], src.shape[1]
    sy = _axis_coords(src_h, out_h)
    sx = _axis_coords(src_w, out_w)
    y0 = np.floor(sy).astype(np.intp)
    x0 = np.floor(sx).astype(np.intp)
    fy = (sy - y0)[:, None, None]
    fx = (sx - x0)[None, :, None]
    y1 = np.minimum(y0 + 1, src_h - 1)
    x1 = np.minimum(x0 + 1, src_w - 1)

    srcf = src.astype(np.float64)
    tl = srcf[y0[:, None], x0[None, :]]
    tr = srcf[y0[:, None], x1[None, :]]
    bl = srcf[y1[:, None], x0[None, :]]
    br = srcf[y1[:, None], x1[None, :]]
    top = tl * (1.0 - fx) + tr * fx
    bot = bl * (1.0 - fx) + br * fx
    val = top * (1.0 - fy) + bot * fy
    return np.floor(val + 0.5).astype(np.uint8)


def _axis_coords(src_size: int, dst_size: int) -> np.ndarray:
    scale = src_size / dst_size
    coords = (np.arange(dst_size, dtype=np.float64) + 0.5) * scale - 0.5
    return np.clip(coords, 0.0, float(src_size - 1))


def normalize_u8(img: np.ndarray, mean: np.ndarray, std: np.ndarray) -> np.ndarray:
    """Map an (H, W, 3) uint8 image to a channel-major float64 tensor.

    value(c, y, x) = (pixel(x, y, c) / 255 - mean[c]) / std[c].
    """
    scaled = (img.astype(np.float64) / 255.0 - mean[None, None, :]) / std[None, None, :]
    return np.ascontiguousarray(scaled.transpose(2, 0, 1))


def patch_mean(tensor: np.ndarray, grid: int) -> np.ndarray:
    """Mean over each cell of a grid x grid partition, per channel.

    tensor: (C, H, W) float64 with H and W divisible by ``grid``.
    Output is channel-major: out[c*grid*grid + py*grid + px]. Summation
    runs in (dy, dx) row-major order within each patch to pin the
    floating-point result.
    """
    c, h, w = tensor.shape
    ph = h // grid
    pw = w // grid
    view = tensor.reshape(c, grid, ph, grid, pw)
    acc = np.zeros((c, grid, grid), dtype=np.float64)
    for dy in range(ph):
        for dx in range(pw):
            acc += view[:, :, dy, :, dx]
    return (acc / float(ph * pw)).reshape(c * grid * grid)
