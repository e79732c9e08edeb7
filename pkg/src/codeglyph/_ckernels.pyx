# cython: language_level=3
"""Compiled implementations of the per-pixel kernels.

Arithmetic twin of ``_pykernels``: same operations in the same order, so
the two backends are bit-identical (see the parity tests). Keep both
files in sync when touching either.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport floor

cnp.import_array()


def blit_cells(cnp.uint8_t[:, :, ::1] canvas,
               cnp.uint8_t[:, ::1] glyphs,
               cnp.int32_t[:, ::1] cells):
    """Draw glyph cells onto ``canvas`` in place; see _pykernels.blit_cells."""
    cdef Py_ssize_t n = cells.shape[0]
    cdef Py_ssize_t cell_h = glyphs.shape[1]
    cdef Py_ssize_t i, dy, dx, y0, x0
    cdef int gi
    cdef cnp.uint8_t r, g, b, row
    with nogil:
        for i in range(n):
            y0 = cells[i, 0]
            x0 = cells[i, 1]
            gi = cells[i, 2]
            r = <cnp.uint8_t> cells[i, 3]
            g = <cnp.uint8_t> cells[i, 4]
            b = <cnp.uint8_t> cells[i, 5]
            for dy in range(cell_h):
                row = glyphs[gi, dy]
                for dx in range(8):
                    if row & (0x80 >> dx):
                        canvas[y0 + dy, x0 + dx, 0] = r
                        canvas[y0 + dy, x0 + dx, 1] = g
                        canvas[y0 + dy, x0 + dx, 2] = b


def resize_bilinear_u8(cnp.uint8_t[:, :, ::1] src, int out_h, int out_w):
    """Bilinear resize, half-pixel centers; see _pykernels.resize_bilinear_u8."""
    cdef Py_ssize_t src_h = src.shape[0]
    cdef Py_ssize_t src_w = src.shape[1]
    out = np.empty((out_h, out_w, 3), dtype=np.uint8)
    cdef cnp.uint8_t[:, :, ::1] dst = out
    cdef double scale_y = src_h / <double> out_h
    cdef double scale_x = src_w / <double> out_w
    cdef Py_ssize_t dy, dx, c, y0, x0, y1, x1
    cdef double sy, sx, fy, fx, tl, tr, bl, br, top, bot, val
    with nogil:
        for dy in range(out_h):
            sy = (dy + 0.5) * scale_y - 0.5
            if sy < 0.0:
                sy = 0.0
            elif sy > src_h - 1:
                sy = src_h - 1
            y0 = <Py_ssize_t> floor(sy)
            fy = sy - y0
            y1 = y0 + 1
            if y1 > src_h - 1:
                y1 = src_h - 1
            for dx in range(out_w):
                sx = (dx + 0.5) * scale_x - 0.5
                if sx < 0.0:
                    sx = 0.0
                elif sx > src_w - 1:
                    sx = src_w - 1
                x0 = <Py_ssize_t> floor(sx)
                fx = sx - x0
                x1 = x0 + 1
                if x1 > src_w - 1:
                    x1 = src_w - 1
                for c in range(3):
                    tl = src[y0, x0, c]
                    tr = src[y0, x1, c]
                    bl = src[y1, x0, c]
                    br = src[y1, x1, c]
                    top = tl * (1.0 - fx) + tr * fx
                    bot = bl * (1.0 - fx) + br * fx
                    val = top * (1.0 - fy) + bot * fy
                    dst[dy, dx, c] = <cnp.uint8_t> floor(val + 0.5)
    return out


def normalize_u8(cnp.uint8_t[:, :, ::1] img, double[::1] mean, double[::1] std):
    """Channel-major normalization; see _pykernels.normalize_u8."""
    cdef Py_ssize_t h = img.shape[0]
    cdef Py_ssize_t w = img.shape[1]
    out = np.empty((3, h, w), dtype=np.float64)
    cdef double[:, :, ::1] dst = out
    cdef Py_ssize_t c, y, x
    cdef double m, s
    with nogil:
        for c in range(3):
            m = mean[c]
            s = std[c]
            for y in range(h):
                for x in range(w):
                    dst[c, y, x] = (img[y, x, c] / 255.0 - m) / s
    return out


def patch_mean(double[:, :, ::1] tensor, int grid):
    """Per-patch mean over a grid x grid partition; see _pykernels.patch_mean."""
    cdef Py_ssize_t c = tensor.shape[0]
    cdef Py_ssize_t h = tensor.shape[1]
    cdef Py_ssize_t w = tensor.shape[2]
    cdef Py_ssize_t ph = h // grid
    cdef Py_ssize_t pw = w // grid
    out = np.empty(c * grid * grid, dtype=np.float64)
    cdef double[::1] dst = out
    cdef Py_ssize_t ci, py, px, dy, dx
    cdef double acc, count = <double> (ph * pw)
    with nogil:
        for ci in range(c):
            for py in range(grid):
                for px in range(grid):
                    acc = 0.0
                    for dy in range(ph):
                        for dx in range(pw):
                            acc = acc + tensor[ci, py * ph + dy, px * pw + dx]
                    dst[ci * grid * grid + py * grid + px] = acc / count
    return out
