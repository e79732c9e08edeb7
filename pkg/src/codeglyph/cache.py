"""Binary embedding cache.

Layout (all integers little-endian):

    magic   4 bytes  b"WEMB"
    version u32      1
    dim     u32      vector dimension
    count   u64      number of records
    records, sorted ascending by id:
        id_len  u32
        id      id_len bytes, UTF-8
        values  dim x f32

Values are stored as 32-bit floats; the round trip is bit-exact on
(id, float32 values) pairs regardless of insertion order.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import CacheFormatError

MAGIC = b"WEMB"
VERSION = 1


@dataclass(frozen=True, eq=False)
class EmbeddingVector:
    """One snippet's embedding: id plus a float32 vector."""

    id: str
    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(np.asarray(self.values, dtype=np.float32))
        object.__setattr__(self, "values", arr)
        if arr.ndim != 1:
            raise CacheFormatError(f"vector {self.id!r}: values must be 1-D")
        if not np.all(np.isfinite(arr)):
            raise CacheFormatError(f"vector {self.id!r}: values must be finite")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EmbeddingVector):
            return NotImplemented
        return self.id == other.id and np.array_equal(self.values, other.values)


def write_cache(vectors: Iterable[EmbeddingVector], path: str | Path) -> None:
    """Write vectors to ``path``, sorted by id. All must share one dimension."""
    vecs = sorted(vectors, key=lambda v: v.id)
    if vecs:
        dim = len(vecs[0].values)
        for v in vecs:
            if len(v.values) != dim:
                raise CacheFormatError(
                    f"dimension mismatch: {v.id!r} has {len(v.values)}, expected {dim}")
        ids = [v.id for v in vecs]
        for a, b in zip(ids, ids[1:]):
            if a == b:
                raise CacheFormatError(f"duplicate id {a!r}")
    else:
        dim = 0
    parts = [MAGIC, struct.pack("<IIQ", VERSION, dim, len(vecs))]
    for v in vecs:
        raw_id = v.id.encode("utf-8")
        parts.append(struct.pack("<I", len(raw_id)))
        parts.append(raw_id)
        parts.append(v.values.astype("<f4", copy=False).tobytes())
    Path(path).write_bytes(b"".join(parts))


def read_cache(path: str | Path) -> list[EmbeddingVector]:
    """Read a cache written by write_cache; returns vectors sorted by id."""
    blob = Path(path).read_bytes()
    if blob[:4] != MAGIC:
        raise CacheFormatError(f"{path}: bad magic {blob[:4]!r}, expected {MAGIC!r}")
    if len(blob) < 20:
        raise CacheFormatError(f"{path}: truncated header")
    version, dim, count = struct.unpack_from("<IIQ", blob, 4)
    if version != VERSION:
        raise CacheFormatError(f"{path}: unsupported version {version}")
    pos = 20
    vectors: list[EmbeddingVector] = []
    for i in range(count):
        if pos + 4 > len(blob):
            raise CacheFormatError(f"{path}: truncated at record {i}")
        (id_len,) = struct.unpack_from("<I", blob, pos)
        pos += 4
        if pos + id_len + 4 * dim > len(blob):
            raise CacheFormatError(f"{path}: truncated at record {i}")
        snippet_id = blob[pos:pos + id_len].decode("utf-8")
        pos += id_len
        values = np.frombuffer(blob, dtype="<f4", count=dim, offset=pos).copy()
        pos += 4 * dim
        vectors.append(EmbeddingVector(snippet_id, values))
    if pos != len(blob):
        raise CacheFormatError(f"{path}: {len(blob) - pos} trailing bytes")
    return vectors


def as_matrix(vectors: Sequence[EmbeddingVector]) -> tuple[list[str], np.ndarray]:
    """Split vectors into (ids, (n, dim) float32 matrix) in the given order."""
    if not vectors:
        return [], np.empty((0, 0), dtype=np.float32)
    return [v.id for v in vectors], np.stack([v.values for v in vectors])
