"""Exception hierarchy shared across the toolkit."""


class CodeGlyphError(Exception):
    """Base class for all toolkit errors."""


class ProfileError(CodeGlyphError):
    """A language profile violates its invariants or failed to parse."""


class IngestionError(CodeGlyphError):
    """Input data could not be ingested (bad UTF-8, manifest or pair rows).

    Messages carry the 1-based line/row number where applicable.
    """


class ConfigError(CodeGlyphError):
    """Invalid configuration: render config, descriptor values, zero std."""


class CacheFormatError(CodeGlyphError):
    """Embedding cache is malformed: bad magic, truncation, or dimension."""


class PngFormatError(CodeGlyphError):
    """PNG bytes are malformed or use an unsupported encoding."""


class GraphFormatError(CodeGlyphError):
    """A feature-extractor graph file could not be parsed."""


class ShapeMismatchError(CodeGlyphError):
    """Declared tensor shapes disagree with the descriptor or input."""


class ZeroVectorError(CodeGlyphError):
    """Cosine similarity requested for an all-zero vector."""
