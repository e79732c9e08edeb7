"""Batch driver: render, preprocess, and embed every manifest snippet.

Per-snippet failures (unreadable file, bad UTF-8) are collected instead
of aborting the batch. Worker count only affects wall time: every
snippet is processed independently and embedding batches are formed in
manifest order, so outputs are identical for any parallelism degree.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .cache import EmbeddingVector
from .corpus import CorpusManifest, ManifestEntry
from .errors import CodeGlyphError
from .model import EmbeddingModel
from .preprocess import normalize, resize_bilinear
from .raster import RenderConfig, render
from .tokens import LanguageProfile


@dataclass
class CorpusResult:
    vectors: list[EmbeddingVector]
    failures: dict[str, str]  # id -> reason


def snippet_tensor(source: bytes, profile: LanguageProfile, config: RenderConfig,
                   model: EmbeddingModel) -> np.ndarray:
    """Render one snippet and preprocess it for ``model``."""
    d = model.descriptor
    image = render(source, profile, config)
    if (image.width, image.height) != (d.input_width, d.input_height):
        image = resize_bilinear(image, d.input_width, d.input_height)
    return normalize(image, d.mean, d.std)


def embed_corpus(model: EmbeddingModel, manifest: CorpusManifest,
                 profiles: Mapping[str, LanguageProfile],
                 config: RenderConfig | None = None,
                 workers: int = 1) -> CorpusResult:
    """Embed every manifest entry; returns vectors plus per-id failures."""
    config = config or RenderConfig()

    def prepare(entry: ManifestEntry) -> tuple[str, np.ndarray | None, str | None]:
        try:
            source = entry.path.read_bytes()
        except OSError as exc:
            return entry.id, None, f"cannot read snippet: {exc}"
        try:
            tensor = snippet_tensor(source, profiles[entry.language], config, model)
        except KeyError:
            return entry.id, None, f"no profile loaded for language {entry.language!r}"
        except CodeGlyphError as exc:
            return entry.id, None, str(exc)
        return entry.id, tensor, None

    if workers <= 1:
        prepared = [prepare(entry) for entry in manifest]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            prepared = list(pool.map(prepare, manifest))

    failures = {sid: reason for sid, _, reason in prepared if reason is not None}
    good = [(sid, tensor) for sid, tensor, reason in prepared if reason is None]
    embedded = model.embed_batch([tensor for _, tensor in good])
    vectors = [EmbeddingVector(sid, values)
               for (sid, _), values in zip(good, embedded)]
    return CorpusResult(vectors=vectors, failures=failures)
