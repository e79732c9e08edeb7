"""Kernel backend selection.

Imports the compiled extension when it is built and falls back to the
numpy implementation otherwise. Both backends are bit-identical; the
compiled one is just faster (see benchmarks/bench_kernels.py). Set
``CODEGLYPH_PURE=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _pykernels

if os.environ.get("CODEGLYPH_PURE"):
    _impl = _pykernels
    BACKEND = "pure"
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _pykernels
        BACKEND = "pure"

blit_cells = _impl.blit_cells
resize_bilinear_u8 = _impl.resize_bilinear_u8
normalize_u8 = _impl.normalize_u8
patch_mean = _impl.patch_mean
