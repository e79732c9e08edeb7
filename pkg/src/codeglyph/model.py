"""Feature-extractor models: descriptor loading and tensor embedding.

Two backends. ``builtin-patch-mean`` is a deterministic fallback
extractor that needs no trained weights: it partitions each channel into
an 8x8 grid and emits the per-patch means (dimension 192), which is
enough to exercise the whole pipeline bit-exactly. ``graph-file`` runs a
serialized ONNX feature extractor through the bundled executor.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels, onnx_graph
from .errors import ConfigError, ShapeMismatchError

PATCH_GRID = 8
PATCH_MEAN_DIM = 3 * PATCH_GRID * PATCH_GRID
BACKEND_BUILTIN = "builtin-patch-mean"
BACKEND_GRAPH = "graph-file"
DEFAULT_BATCH_SIZE = 16


@dataclass(frozen=True)
class ModelDescriptor:
    """Metadata binding a feature extractor to its input contract."""

    backend: str
    input_width: int
    input_height: int
    mean: tuple[float, float, float]
    std: tuple[float, float, float]
    embedding_dim: int
    graph_path: Path | None = None

    def __post_init__(self) -> None:
        if self.backend not in (BACKEND_BUILTIN, BACKEND_GRAPH):
            raise ConfigError(f"unknown backend {self.backend!r}")
        if self.input_width <= 0 or self.input_height <= 0:
            raise ConfigError("input dimensions must be positive")
        if self.embedding_dim <= 0:
            raise ConfigError("embedding dimension must be positive")
        if len(self.mean) != 3 or len(self.std) != 3:
            raise ConfigError("mean and std must each have 3 components")
        if any(s == 0.0 for s in self.std):
            raise ConfigError("std components must be nonzero")
        if (self.graph_path is not None) != (self.backend == BACKEND_GRAPH):
            raise ConfigError("graph_path must be given exactly when backend is graph-file")

    @classmethod
    def from_file(cls, path: str | Path) -> "ModelDescriptor":
        path = Path(path)
        if not path.is_file():
            raise FileNotFoundError(f"model descriptor not found: {path}")
        try:
            obj = json.loads(path.read_text(encoding="utf-8"))
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise ConfigError(f"descriptor {path}: invalid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise ConfigError(f"descriptor {path}: expected a JSON object")
        try:
            graph_path = obj.get("graph_path")
            return cls(
                backend=obj["backend"],
                input_width=int(obj["input_width"]),
                input_height=int(obj["input_height"]),
                mean=tuple(float(v) for v in obj["mean"]),
                std=tuple(float(v) for v in obj["std"]),
                embedding_dim=int(obj["embedding_dim"]),
                # Relative graph paths are resolved against the descriptor's
                # own directory so the pair can move together.
                graph_path=(path.parent / graph_path) if graph_path else None,
            )
        except KeyError as exc:
            raise ConfigError(f"descriptor {path}: missing field {exc.args[0]!r}") from exc
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"descriptor {path}: {exc}") from exc

    def to_file(self, path: str | Path) -> None:
        obj: dict = {
            "backend": self.backend,
            "input_width": self.input_width,
            "input_height": self.input_height,
            "mean": list(self.mean),
            "std": list(self.std),
            "embedding_dim": self.embedding_dim,
        }
        if self.graph_path is not None:
            obj["graph_path"] = self.graph_path.name
        Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n",
                              encoding="utf-8")


class EmbeddingModel:
    """Handle that maps input tensors to embedding vectors.

    Read-only after construction; safe to share across threads.
    """

    def __init__(self, descriptor: ModelDescriptor) -> None:
        self.descriptor = descriptor

    def _check_tensor(self, tensor: np.ndarray) -> None:
        want = (3, self.descriptor.input_height, self.descriptor.input_width)
        if tuple(tensor.shape) != want:
            raise ShapeMismatchError(
                f"input tensor has shape {tuple(tensor.shape)}, expected {want}")

    def embed(self, tensor: np.ndarray) -> np.ndarray:
        """Embed one (3, H, W) tensor into a float32 vector."""
        raise NotImplementedError

    def embed_batch(self, tensors: list[np.ndarray]) -> list[np.ndarray]:
        """Embed many tensors; grouping never affects the values."""
        return [self.embed(t) for t in tensors]


class PatchMeanModel(EmbeddingModel):
    def __init__(self, descriptor: ModelDescriptor) -> None:
        super().__init__(descriptor)
        if descriptor.embedding_dim != PATCH_MEAN_DIM:
            raise ShapeMismatchError(
                f"{BACKEND_BUILTIN} produces dimension {PATCH_MEAN_DIM}, "
                f"descriptor declares {descriptor.embedding_dim}")
        if descriptor.input_width % PATCH_GRID or descriptor.input_height % PATCH_GRID:
            raise ConfigError(
                f"{BACKEND_BUILTIN} needs input dimensions divisible by {PATCH_GRID}, "
                f"got {descriptor.input_width}x{descriptor.input_height}")

    def embed(self, tensor: np.ndarray) -> np.ndarray:
        self._check_tensor(tensor)
        values = kernels.patch_mean(np.ascontiguousarray(tensor, dtype=np.float64),
                                    PATCH_GRID)
        return values.astype(np.float32)


class GraphModel(EmbeddingModel):
    def __init__(self, descriptor: ModelDescriptor,
                 batch_size: int = DEFAULT_BATCH_SIZE) -> None:
        super().__init__(descriptor)
        assert descriptor.graph_path is not None
        self.graph = onnx_graph.load_graph(descriptor.graph_path)
        onnx_graph.validate_shapes(self.graph, descriptor.input_height,
                                   descriptor.input_width, descriptor.embedding_dim,
                                   descriptor.graph_path)
        self.batch_size = batch_size

    def embed(self, tensor: np.ndarray) -> np.ndarray:
        return self.embed_batch([tensor])[0]

    def embed_batch(self, tensors: list[np.ndarray]) -> list[np.ndarray]:
        out: list[np.ndarray] = []
        for i in range(0, len(tensors), self.batch_size):
            chunk = tensors[i:i + self.batch_size]
            for t in chunk:
                self._check_tensor(t)
            batch = np.stack([t for t in chunk]).astype(np.float32)
            pad = self.batch_size - len(chunk)
            if pad > 0:
                # Fixed-shape batches: pad with zeros, truncate the result.
                batch = np.concatenate(
                    [batch, np.zeros((pad,) + batch.shape[1:], dtype=np.float32)])
            result = onnx_graph.run_graph(self.graph, batch)[:len(chunk)]
            out.extend(np.ascontiguousarray(row) for row in result)
        return out


def load_model(descriptor: str | Path | ModelDescriptor) -> EmbeddingModel:
    """Build an embedding model from a descriptor (path or parsed)."""
    if not isinstance(descriptor, ModelDescriptor):
        descriptor = ModelDescriptor.from_file(descriptor)
    if descriptor.backend == BACKEND_BUILTIN:
        return PatchMeanModel(descriptor)
    if not Path(descriptor.graph_path).is_file():
        raise FileNotFoundError(f"graph file not found: {descriptor.graph_path}")
    return GraphModel(descriptor)
