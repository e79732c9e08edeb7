"""codeglyph: deterministic code visualization and embedding toolkit.

Renders source snippets to fixed-size raster images with an embedded
bitmap font, embeds the images with a visual feature extractor, and runs
semantic clone detection and kNN classification over the embeddings.
"""

from .analysis import (
    Metrics,
    NeighborIndex,
    calibrate_threshold,
    cosine_similarity,
    detect_clone,
    evaluate_classification,
    evaluate_pairs,
    knn_classify,
)
from .cache import EmbeddingVector, read_cache, write_cache
from .corpus import ClonePair, CorpusManifest, ManifestEntry, load_manifest, load_pairs
from .model import ModelDescriptor, load_model
from .pipeline import embed_corpus
from .pngio import read_image, write_image
from .preprocess import normalize, resize_bilinear
from .raster import DEFAULT_PALETTE, RasterImage, RenderConfig, Variant, render
from .tokens import (
    LanguageProfile,
    TokenClass,
    TokenSpan,
    builtin_profiles,
    lex,
    load_profile,
)

__version__ = "0.1.0"

__all__ = [
    "Metrics", "NeighborIndex", "calibrate_threshold", "cosine_similarity",
    "detect_clone", "evaluate_classification", "evaluate_pairs", "knn_classify",
    "EmbeddingVector", "read_cache", "write_cache",
    "ClonePair", "CorpusManifest", "ManifestEntry", "load_manifest", "load_pairs",
    "ModelDescriptor", "load_model", "embed_corpus",
    "read_image", "write_image", "normalize", "resize_bilinear",
    "DEFAULT_PALETTE", "RasterImage", "RenderConfig", "Variant", "render",
    "LanguageProfile", "TokenClass", "TokenSpan", "builtin_profiles", "lex",
    "load_profile",
    "__version__",
]
