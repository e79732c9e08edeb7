"""Image-to-tensor preprocessing for the feature extractor.

An input tensor is a channel-major (3, height, width) float64 array;
value(c, y, x) = (pixel(x, y, c) / 255 - mean[c]) / std[c]. Both steps
are pure and deterministic; the bilinear convention (half-pixel centers,
clamped, ties rounded away from zero) is fixed so that other consumers
of rendered PNGs can mirror it exactly.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .errors import ConfigError
from .raster import RasterImage

InputTensor = np.ndarray


def resize_bilinear(image: RasterImage, width: int, height: int) -> RasterImage:
    """Resample ``image`` to ``width`` x ``height`` with bilinear interpolation."""
    if width <= 0 or height <= 0:
        raise ConfigError(f"target dimensions must be positive, got {width}x{height}")
    return RasterImage(kernels.resize_bilinear_u8(image.data, height, width))


def normalize(image: RasterImage, mean: tuple[float, float, float],
              std: tuple[float, float, float]) -> InputTensor:
    """Normalize an image into a channel-major float64 input tensor."""
    mean_arr = np.asarray(mean, dtype=np.float64)
    std_arr = np.asarray(std, dtype=np.float64)
    if mean_arr.shape != (3,) or std_arr.shape != (3,):
        raise ConfigError("mean and std must each have 3 components")
    if np.any(std_arr == 0.0):
        raise ConfigError(f"std components must be nonzero, got {tuple(std_arr)}")
    return kernels.normalize_u8(image.data, mean_arr, std_arr)
