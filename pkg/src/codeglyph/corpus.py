"""Corpus ingestion: snippet manifests and labeled clone-pair lists.

Manifests are JSONL (one object per non-empty line) so corpora can be
streamed and appended; pair lists are CSV, matching common benchmark
exports. Every ingestion error names the offending 1-based line.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Collection

from .errors import IngestionError

PAIRS_HEADER = ["id_a", "id_b", "label"]


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    path: Path
    language: str
    label: str | None = None


@dataclass(frozen=True)
class CorpusManifest:
    entries: tuple[ManifestEntry, ...]

    def __post_init__(self) -> None:
        ids = [e.id for e in self.entries]
        if len(set(ids)) != len(ids):
            raise IngestionError("manifest ids must be unique")

    @property
    def ids(self) -> list[str]:
        return [e.id for e in self.entries]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def by_id(self, snippet_id: str) -> ManifestEntry:
        for entry in self.entries:
            if entry.id == snippet_id:
                return entry
        raise KeyError(snippet_id)

    def labels(self) -> dict[str, str]:
        """id -> label for every labeled entry."""
        return {e.id: e.label for e in self.entries if e.label is not None}


@dataclass(frozen=True)
class ClonePair:
    id_a: str
    id_b: str
    label: bool

    def __post_init__(self) -> None:
        if self.id_a == self.id_b:
            raise IngestionError(f"clone pair may not pair {self.id_a!r} with itself")

    @property
    def key(self) -> frozenset[str]:
        return frozenset((self.id_a, self.id_b))


def load_manifest(path: str | Path,
                  known_languages: Collection[str]) -> CorpusManifest:
    """Parse a JSONL manifest; paths resolve relative to the manifest file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IngestionError(f"cannot read manifest {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise IngestionError(f"manifest {path} is not valid UTF-8: {exc}") from exc

    entries: list[ManifestEntry] = []
    seen: dict[str, int] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise IngestionError(f"{path}:{lineno}: malformed JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise IngestionError(f"{path}:{lineno}: expected a JSON object")
        snippet_id = obj.get("id")
        snippet_path = obj.get("path")
        language = obj.get("language")
        label = obj.get("label")
        if not snippet_id or not isinstance(snippet_id, str):
            raise IngestionError(f"{path}:{lineno}: missing or empty 'id'")
        if not snippet_path or not isinstance(snippet_path, str):
            raise IngestionError(f"{path}:{lineno}: missing or empty 'path'")
        if not language or not isinstance(language, str):
            raise IngestionError(f"{path}:{lineno}: missing or empty 'language'")
        if label is not None and not isinstance(label, str):
            raise IngestionError(f"{path}:{lineno}: 'label' must be a string")
        if language not in known_languages:
            raise IngestionError(
                f"{path}:{lineno}: unknown language {language!r} "
                f"(known: {sorted(known_languages)})")
        if snippet_id in seen:
            raise IngestionError(
                f"{path}:{lineno}: duplicate id {snippet_id!r} (first seen on line "
                f"{seen[snippet_id]})")
        seen[snippet_id] = lineno
        resolved = Path(snippet_path)
        if not resolved.is_absolute():
            resolved = path.parent / resolved
        entries.append(ManifestEntry(id=snippet_id, path=resolved,
                                     language=language, label=label))
    return CorpusManifest(tuple(entries))


def load_pairs(path: str | Path, manifest: CorpusManifest) -> list[ClonePair]:
    """Parse a labeled pair CSV and check it against the manifest."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IngestionError(f"cannot read pairs {path}: {exc}") from exc

    rows = list(csv.reader(text.splitlines()))
    if not rows:
        raise IngestionError(f"{path}: empty file (expected header {PAIRS_HEADER})")
    if [c.strip() for c in rows[0]] != PAIRS_HEADER:
        raise IngestionError(
            f"{path}:1: bad header {rows[0]!r}, expected {PAIRS_HEADER}")

    known_ids = set(manifest.ids)
    pairs: list[ClonePair] = []
    seen: dict[frozenset[str], int] = {}
    for rowno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 3:
            raise IngestionError(f"{path}:{rowno}: expected 3 columns, got {len(row)}")
        id_a, id_b, label = (c.strip() for c in row)
        if id_a not in known_ids:
            raise IngestionError(f"{path}:{rowno}: unknown id {id_a!r}")
        if id_b not in known_ids:
            raise IngestionError(f"{path}:{rowno}: unknown id {id_b!r}")
        if id_a == id_b:
            raise IngestionError(f"{path}:{rowno}: pair references {id_a!r} twice")
        if label not in ("0", "1"):
            raise IngestionError(f"{path}:{rowno}: label must be 0 or 1, got {label!r}")
        key = frozenset((id_a, id_b))
        if key in seen:
            raise IngestionError(
                f"{path}:{rowno}: duplicate pair {id_a!r},{id_b!r} "
                f"(first seen on line {seen[key]})")
        seen[key] = rowno
        pairs.append(ClonePair(id_a, id_b, label == "1"))
    return pairs
