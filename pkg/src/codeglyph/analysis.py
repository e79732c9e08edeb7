"""Similarity scoring, clone decisions, threshold calibration, kNN, metrics.

All similarity arithmetic runs in 64-bit floats. Decision rules are
pinned exactly (inclusive thresholds, documented tie-breaking) so that
independent implementations agree bit-for-bit on every decision.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .corpus import ClonePair
from .errors import ShapeMismatchError, ZeroVectorError

METRIC_COSINE = "cosine-distance"
METRIC_EUCLIDEAN = "euclidean"


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity in 64-bit arithmetic, clamped to [-1, 1].

    Identical vectors score exactly 1.0; all-zero vectors are rejected
    (their similarity is undefined).
    """
    av = np.asarray(a, dtype=np.float64).reshape(-1)
    bv = np.asarray(b, dtype=np.float64).reshape(-1)
    if av.shape != bv.shape:
        raise ShapeMismatchError(
            f"vectors have different dimensions: {av.shape[0]} vs {bv.shape[0]}")
    norm_a = float(np.dot(av, av))
    norm_b = float(np.dot(bv, bv))
    if norm_a == 0.0 or norm_b == 0.0:
        raise ZeroVectorError("cosine similarity is undefined for an all-zero vector")
    if np.array_equal(av, bv):
        return 1.0
    score = float(np.dot(av, bv)) / (np.sqrt(norm_a) * np.sqrt(norm_b))
    return min(1.0, max(-1.0, score))


def detect_clone(a: np.ndarray, b: np.ndarray,
                 threshold: float) -> tuple[float, bool]:
    """Score a pair and decide clone-ness; the threshold is inclusive."""
    score = cosine_similarity(a, b)
    return score, score >= threshold


@dataclass(frozen=True)
class Metrics:
    """Confusion counts plus the derived rates.

    Degenerate denominators follow the explicit convention: a rate whose
    denominator is zero is 0.
    """

    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2.0 * p * r / (p + r) if p + r else 0.0

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.total if self.total else 0.0

    def as_dict(self) -> dict:
        return {
            "tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn,
            "precision": self.precision, "recall": self.recall,
            "f1": self.f1, "accuracy": self.accuracy,
        }


def _f1_at(scores: np.ndarray, labels: np.ndarray, threshold: float) -> float:
    predicted = scores >= threshold
    tp = int(np.sum(predicted & labels))
    fp = int(np.sum(predicted & ~labels))
    fn = int(np.sum(~predicted & labels))
    return Metrics(tp=tp, fp=fp, tn=0, fn=fn).f1


def calibrate_threshold(
        pairs: Sequence[tuple[float, bool]]) -> tuple[float, float]:
    """Pick the decision threshold maximizing F1 of ``score >= t``.

    Candidates are the midpoints between consecutive distinct sorted
    scores plus one sentinel below the minimum and one above the
    maximum. Ties on F1 go to the smallest threshold. Requires at least
    one positive and one negative label.
    """
    if not pairs:
        raise ValueError("cannot calibrate on an empty score list")
    scores = np.asarray([s for s, _ in pairs], dtype=np.float64)
    labels = np.asarray([bool(l) for _, l in pairs], dtype=bool)
    if bool(labels.all()) or not bool(labels.any()):
        raise ValueError("calibration needs both positive and negative labels")

    distinct = np.unique(scores)
    candidates = [float(distinct[0]) - 1.0]
    candidates.extend((float(a) + float(b)) / 2.0
                      for a, b in zip(distinct[:-1], distinct[1:]))
    candidates.append(float(distinct[-1]) + 1.0)

    best_t = candidates[0]
    best_f1 = _f1_at(scores, labels, best_t)
    for t in candidates[1:]:
        f1 = _f1_at(scores, labels, t)
        if f1 > best_f1:
            best_t, best_f1 = t, f1
    return best_t, best_f1


@dataclass(frozen=True)
class NeighborIndex:
    """Immutable labeled vector index for kNN queries."""

    ids: tuple[str, ...]
    labels: tuple[str, ...]
    vectors: np.ndarray  # (n, dim) float64
    metric: str = METRIC_COSINE

    def __post_init__(self) -> None:
        if self.metric not in (METRIC_COSINE, METRIC_EUCLIDEAN):
            raise ValueError(f"unknown metric {self.metric!r}")
        if not (len(self.ids) == len(self.labels) == self.vectors.shape[0]):
            raise ValueError("ids, labels, and vectors must have equal lengths")
        if any(not lbl for lbl in self.labels):
            raise ValueError("labels must be non-empty strings")
        object.__setattr__(self, "vectors",
                           np.ascontiguousarray(self.vectors, dtype=np.float64))

    @classmethod
    def build(cls, entries: Sequence[tuple[str, str, np.ndarray]],
              metric: str = METRIC_COSINE) -> "NeighborIndex":
        """Build from (id, label, values) triples."""
        if not entries:
            raise ValueError("cannot build an empty index")
        ids = tuple(e[0] for e in entries)
        labels = tuple(e[1] for e in entries)
        vectors = np.stack([np.asarray(e[2], dtype=np.float64) for e in entries])
        return cls(ids=ids, labels=labels, vectors=vectors, metric=metric)

    def __len__(self) -> int:
        return len(self.ids)


def _distance(index: NeighborIndex, query: np.ndarray, row: int) -> float:
    v = index.vectors[row]
    if index.metric == METRIC_COSINE:
        return 1.0 - cosine_similarity(query, v)
    return float(np.sqrt(np.dot(query - v, query - v)))


def knn_classify(index: NeighborIndex, query: np.ndarray, k: int) -> str:
    """Majority label among the k nearest index entries.

    Entries are ranked by (distance, id) ascending, which settles ties at
    the k-boundary. A majority tie goes to the label whose nearest
    representative among the k is closest; a remaining tie goes to the
    lexicographically smallest label.
    """
    if len(index) == 0:
        raise ValueError("index is empty")
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")
    if k > len(index):
        raise ValueError(f"k={k} exceeds index size {len(index)}")
    queryv = np.asarray(query, dtype=np.float64).reshape(-1)
    if queryv.shape[0] != index.vectors.shape[1]:
        raise ShapeMismatchError(
            f"query dimension {queryv.shape[0]} does not match index "
            f"dimension {index.vectors.shape[1]}")

    ranked = sorted(range(len(index)),
                    key=lambda row: (_distance(index, queryv, row), index.ids[row]))
    nearest = ranked[:k]

    votes = Counter(index.labels[row] for row in nearest)
    top_count = max(votes.values())
    tied = [label for label, count in votes.items() if count == top_count]
    if len(tied) == 1:
        return tied[0]
    closest: dict[str, float] = {}
    for row in nearest:
        label = index.labels[row]
        if label in tied and label not in closest:
            closest[label] = _distance(index, queryv, row)
    return min(tied, key=lambda label: (closest[label], label))


def evaluate_pairs(pairs: Sequence[ClonePair],
                   scores: Mapping[frozenset[str], float],
                   threshold: float) -> Metrics:
    """Confusion metrics of thresholded scores against pair labels.

    ``scores`` is keyed by unordered id pair; every pair must be scored.
    """
    tp = fp = tn = fn = 0
    for pair in pairs:
        if pair.key not in scores:
            raise ValueError(f"no score for pair ({pair.id_a!r}, {pair.id_b!r})")
        predicted = scores[pair.key] >= threshold
        if predicted and pair.label:
            tp += 1
        elif predicted and not pair.label:
            fp += 1
        elif not predicted and pair.label:
            fn += 1
        else:
            tn += 1
    return Metrics(tp=tp, fp=fp, tn=tn, fn=fn)


@dataclass(frozen=True)
class ClassificationMetrics:
    accuracy: float
    per_label: Mapping[str, Metrics]

    def as_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "per_label": {label: m.as_dict() for label, m in self.per_label.items()},
        }


def evaluate_classification(predictions: Mapping[str, str],
                            truth: Mapping[str, str]) -> ClassificationMetrics:
    """Accuracy plus one-vs-rest metrics per label."""
    if set(predictions) != set(truth):
        missing = set(truth) - set(predictions)
        extra = set(predictions) - set(truth)
        raise ValueError(
            f"prediction ids do not match truth ids "
            f"(missing: {sorted(missing)}, extra: {sorted(extra)})")
    ids = sorted(truth)
    if not ids:
        return ClassificationMetrics(accuracy=0.0, per_label={})
    correct = sum(1 for i in ids if predictions[i] == truth[i])
    labels = sorted(set(truth.values()) | set(predictions.values()))
    per_label: dict[str, Metrics] = {}
    for label in labels:
        tp = sum(1 for i in ids if predictions[i] == label and truth[i] == label)
        fp = sum(1 for i in ids if predictions[i] == label and truth[i] != label)
        fn = sum(1 for i in ids if predictions[i] != label and truth[i] == label)
        tn = len(ids) - tp - fp - fn
        per_label[label] = Metrics(tp=tp, fp=fp, tn=tn, fn=fn)
    return ClassificationMetrics(accuracy=correct / len(ids), per_label=per_label)
