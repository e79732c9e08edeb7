"""Self-contained ONNX graph loading and CPU execution.

Reads the protobuf wire format directly (no protobuf or onnx runtime
dependency) for the model subset this toolkit consumes: a single-input,
single-output float32 graph built from common CNN inference ops. The
executor evaluates each batch sample independently, so results are
bit-identical regardless of how callers group tensors into batches.

Supported ops: Conv (group=1, dilation=1), BatchNormalization (inference),
Relu, MaxPool, Add, GlobalAveragePool, AveragePool, Flatten, Reshape,
Gemm, Identity.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np

from .errors import GraphFormatError, ShapeMismatchError

# --------------------------------------------------------------------------
# protobuf wire format

_WIRE_VARINT = 0
_WIRE_I64 = 1
_WIRE_LEN = 2
_WIRE_I32 = 5


def _varint(buf: bytes, pos: int) -> tuple[int, int]:
    result = 0
    shift = 0
    while True:
        if pos >= len(buf):
            raise GraphFormatError("truncated varint")
        b = buf[pos]
        pos += 1
        result |= (b & 0x7F) << shift
        if not b & 0x80:
            return result, pos
        shift += 7
        if shift > 70:
            raise GraphFormatError("varint too long")


def _signed(value: int) -> int:
    return value - (1 << 64) if value >= (1 << 63) else value


def _iter_fields(buf: bytes) -> Iterator[tuple[int, int, int | bytes]]:
    """Yield (field_number, wire_type, value) for every field in ``buf``."""
    pos = 0
    while pos < len(buf):
        key, pos = _varint(buf, pos)
        fieldno, wire = key >> 3, key & 7
        if wire == _WIRE_VARINT:
            value, pos = _varint(buf, pos)
        elif wire == _WIRE_I64:
            value = buf[pos:pos + 8]
            pos += 8
        elif wire == _WIRE_LEN:
            length, pos = _varint(buf, pos)
            value = buf[pos:pos + length]
            pos += length
            if len(value) != length:
                raise GraphFormatError("truncated length-delimited field")
        elif wire == _WIRE_I32:
            value = buf[pos:pos + 4]
            pos += 4
        else:
            raise GraphFormatError(f"unsupported wire type {wire}")
        if pos > len(buf):
            raise GraphFormatError("field extends past end of buffer")
        yield fieldno, wire, value


def _repeated_int64(wire: int, value: int | bytes) -> list[int]:
    """A repeated int64 field arrives packed (one blob) or one-by-one."""
    if wire == _WIRE_VARINT:
        return [_signed(value)]
    out = []
    pos = 0
    while pos < len(value):
        v, pos = _varint(value, pos)
        out.append(_signed(v))
    return out


# --------------------------------------------------------------------------
# ONNX message subset

_FLOAT = 1
_INT64 = 7


@dataclass
class Attribute:
    name: str = ""
    i: int = 0
    f: float = 0.0
    s: bytes = b""
    ints: list[int] = field(default_factory=list)
    floats: list[float] = field(default_factory=list)
    tensor: np.ndarray | None = None


@dataclass
class Node:
    op_type: str = ""
    name: str = ""
    inputs: list[str] = field(default_factory=list)
    outputs: list[str] = field(default_factory=list)
    attrs: dict[str, Attribute] = field(default_factory=dict)


@dataclass
class TensorInfo:
    name: str = ""
    shape: list[int | None] = field(default_factory=list)
    elem_type: int = 0


@dataclass
class Graph:
    name: str = ""
    nodes: list[Node] = field(default_factory=list)
    initializers: dict[str, np.ndarray] = field(default_factory=dict)
    inputs: list[TensorInfo] = field(default_factory=list)
    outputs: list[TensorInfo] = field(default_factory=list)


def _parse_tensor(buf: bytes) -> tuple[str, np.ndarray]:
    dims: list[int] = []
    dtype = 0
    raw: bytes | None = None
    float_data: list[float] = []
    int64_data: list[int] = []
    name = ""
    for fieldno, wire, value in _iter_fields(buf):
        if fieldno == 1:
            dims.extend(_repeated_int64(wire, value))
        elif fieldno == 2:
            dtype = value
        elif fieldno == 4:
            if wire == _WIRE_LEN:
                float_data.extend(struct.unpack(f"<{len(value) // 4}f", value))
            else:
                float_data.append(struct.unpack("<f", value)[0])
        elif fieldno == 7:
            int64_data.extend(_repeated_int64(wire, value))
        elif fieldno == 8:
            name = value.decode("utf-8")
        elif fieldno == 9:
            raw = value
    if dtype == _FLOAT:
        if raw is not None:
            arr = np.frombuffer(raw, dtype="<f4").copy()
        else:
            arr = np.asarray(float_data, dtype=np.float32)
    elif dtype == _INT64:
        if raw is not None:
            arr = np.frombuffer(raw, dtype="<i8").copy()
        else:
            arr = np.asarray(int64_data, dtype=np.int64)
    else:
        raise GraphFormatError(f"initializer {name!r}: unsupported data type {dtype}")
    expected = int(np.prod(dims)) if dims else arr.size
    if arr.size != expected:
        raise GraphFormatError(f"initializer {name!r}: data length does not match dims")
    return name, arr.reshape(dims)


def _parse_attribute(buf: bytes) -> Attribute:
    attr = Attribute()
    for fieldno, wire, value in _iter_fields(buf):
        if fieldno == 1:
            attr.name = value.decode("utf-8")
        elif fieldno == 2:
            attr.f = struct.unpack("<f", value)[0]
        elif fieldno == 3:
            attr.i = _signed(value)
        elif fieldno == 4:
            attr.s = value
        elif fieldno == 5:
            attr.tensor = _parse_tensor(value)[1]
        elif fieldno == 7:
            if wire == _WIRE_LEN:
                attr.floats.extend(struct.unpack(f"<{len(value) // 4}f", value))
            else:
                attr.floats.append(struct.unpack("<f", value)[0])
        elif fieldno == 8:
            attr.ints.extend(_repeated_int64(wire, value))
    return attr


def _parse_node(buf: bytes) -> Node:
    node = Node()
    for fieldno, _wire, value in _iter_fields(buf):
        if fieldno == 1:
            node.inputs.append(value.decode("utf-8"))
        elif fieldno == 2:
            node.outputs.append(value.decode("utf-8"))
        elif fieldno == 3:
            node.name = value.decode("utf-8")
        elif fieldno == 4:
            node.op_type = value.decode("utf-8")
        elif fieldno == 5:
            attr = _parse_attribute(value)
            node.attrs[attr.name] = attr
    return node


def _parse_value_info(buf: bytes) -> TensorInfo:
    info = TensorInfo()
    for fieldno, _wire, value in _iter_fields(buf):
        if fieldno == 1:
            info.name = value.decode("utf-8")
        elif fieldno == 2:
            for f2, _w2, v2 in _iter_fields(value):
                if f2 == 1:  # tensor_type
                    for f3, _w3, v3 in _iter_fields(v2):
                        if f3 == 1:
                            info.elem_type = v3
                        elif f3 == 2:  # shape
                            for f4, _w4, v4 in _iter_fields(v3):
                                if f4 == 1:  # dim
                                    info.shape.append(_parse_dimension(v4))
    return info


def _parse_dimension(buf: bytes) -> int | None:
    for fieldno, _wire, value in _iter_fields(buf):
        if fieldno == 1:
            return _signed(value)
    return None  # dim_param or absent: symbolic


def _parse_graph(buf: bytes) -> Graph:
    graph = Graph()
    for fieldno, _wire, value in _iter_fields(buf):
        if fieldno == 1:
            graph.nodes.append(_parse_node(value))
        elif fieldno == 2:
            graph.name = value.decode("utf-8")
        elif fieldno == 5:
            name, arr = _parse_tensor(value)
            graph.initializers[name] = arr
        elif fieldno == 11:
            graph.inputs.append(_parse_value_info(value))
        elif fieldno == 12:
            graph.outputs.append(_parse_value_info(value))
    # Some producers list initializers among the graph inputs; drop them.
    graph.inputs = [i for i in graph.inputs if i.name not in graph.initializers]
    return graph


def load_graph(path: str | Path) -> Graph:
    """Parse an ONNX model file into its graph."""
    try:
        blob = Path(path).read_bytes()
    except OSError as exc:
        raise FileNotFoundError(f"graph file not found: {path}") from exc
    graph: Graph | None = None
    try:
        for fieldno, _wire, value in _iter_fields(blob):
            if fieldno == 7:
                graph = _parse_graph(value)
    except GraphFormatError as exc:
        raise GraphFormatError(f"{path}: {exc}") from exc
    if graph is None:
        raise GraphFormatError(f"{path}: no graph found (not an ONNX model?)")
    if len(graph.inputs) != 1:
        raise GraphFormatError(
            f"{path}: expected exactly one graph input, found {len(graph.inputs)}")
    if len(graph.outputs) != 1:
        raise GraphFormatError(
            f"{path}: expected exactly one graph output, found {len(graph.outputs)}")
    return graph


# --------------------------------------------------------------------------
# execution

def run_graph(graph: Graph, x: np.ndarray) -> np.ndarray:
    """Run a batch (N, ...) through the graph, one sample at a time."""
    x = np.ascontiguousarray(x, dtype=np.float32)
    rows = [_run_single(graph, x[i:i + 1]) for i in range(x.shape[0])]
    return np.concatenate(rows, axis=0) if rows else x


def _run_single(graph: Graph, x: np.ndarray) -> np.ndarray:
    values: dict[str, np.ndarray] = dict(graph.initializers)
    values[graph.inputs[0].name] = x
    for node in graph.nodes:
        op = _OPS.get(node.op_type)
        if op is None:
            raise GraphFormatError(f"unsupported op {node.op_type!r} (node {node.name!r})")
        args = [values[name] for name in node.inputs if name]
        result = op(node, args)
        values[node.outputs[0]] = result
    return values[graph.outputs[0].name]


def _attr_ints(node: Node, name: str, default: list[int]) -> list[int]:
    attr = node.attrs.get(name)
    return list(attr.ints) if attr is not None else default


def _attr_int(node: Node, name: str, default: int) -> int:
    attr = node.attrs.get(name)
    return attr.i if attr is not None else default


def _attr_float(node: Node, name: str, default: float) -> float:
    attr = node.attrs.get(name)
    return attr.f if attr is not None else default


def _windows(x: np.ndarray, kh: int, kw: int, sh: int, sw: int) -> np.ndarray:
    win = np.lib.stride_tricks.sliding_window_view(x, (kh, kw), axis=(2, 3))
    return win[:, :, ::sh, ::sw]


def _op_conv(node: Node, args: list[np.ndarray]) -> np.ndarray:
    x, w = args[0], args[1]
    bias = args[2] if len(args) > 2 else None
    if _attr_int(node, "group", 1) != 1:
        raise GraphFormatError(f"Conv {node.name!r}: grouped convolution not supported")
    if any(d != 1 for d in _attr_ints(node, "dilations", [1, 1])):
        raise GraphFormatError(f"Conv {node.name!r}: dilation not supported")
    sh, sw = _attr_ints(node, "strides", [1, 1])
    pt, pl, pb, pr = _attr_ints(node, "pads", [0, 0, 0, 0])
    n, _c, _h, _w = x.shape
    m, _cin, kh, kw = w.shape
    xp = np.pad(x, ((0, 0), (0, 0), (pt, pb), (pl, pr)))
    win = _windows(xp, kh, kw, sh, sw)
    oh, ow = win.shape[2], win.shape[3]
    cols = win.transpose(0, 2, 3, 1, 4, 5).reshape(n * oh * ow, -1)
    out = cols @ w.reshape(m, -1).T
    if bias is not None:
        out = out + bias
    return out.reshape(n, oh, ow, m).transpose(0, 3, 1, 2)


def _op_batchnorm(node: Node, args: list[np.ndarray]) -> np.ndarray:
    x, scale, bias, mean, var = args
    eps = np.float32(_attr_float(node, "epsilon", 1e-5))
    shape = (1, -1, 1, 1)
    inv = scale / np.sqrt(var + eps)
    return x * inv.reshape(shape) + (bias - mean * inv).reshape(shape)


def _op_relu(node: Node, args: list[np.ndarray]) -> np.ndarray:
    return np.maximum(args[0], np.float32(0))


def _op_maxpool(node: Node, args: list[np.ndarray]) -> np.ndarray:
    x = args[0]
    if _attr_int(node, "ceil_mode", 0) != 0:
        raise GraphFormatError(f"MaxPool {node.name!r}: ceil_mode not supported")
    kh, kw = _attr_ints(node, "kernel_shape", [1, 1])
    sh, sw = _attr_ints(node, "strides", [kh, kw])
    pt, pl, pb, pr = _attr_ints(node, "pads", [0, 0, 0, 0])
    xp = np.pad(x, ((0, 0), (0, 0), (pt, pb), (pl, pr)),
                constant_values=-np.inf)
    return _windows(xp, kh, kw, sh, sw).max(axis=(-2, -1))


def _op_avgpool(node: Node, args: list[np.ndarray]) -> np.ndarray:
    x = args[0]
    kh, kw = _attr_ints(node, "kernel_shape", [1, 1])
    sh, sw = _attr_ints(node, "strides", [kh, kw])
    pt, pl, pb, pr = _attr_ints(node, "pads", [0, 0, 0, 0])
    if (pt, pl, pb, pr) != (0, 0, 0, 0):
        raise GraphFormatError(f"AveragePool {node.name!r}: padding not supported")
    return _windows(x, kh, kw, sh, sw).mean(axis=(-2, -1), dtype=np.float32)


def _op_gap(node: Node, args: list[np.ndarray]) -> np.ndarray:
    return args[0].mean(axis=(2, 3), keepdims=True, dtype=np.float32)


def _op_add(node: Node, args: list[np.ndarray]) -> np.ndarray:
    return args[0] + args[1]


def _op_flatten(node: Node, args: list[np.ndarray]) -> np.ndarray:
    axis = _attr_int(node, "axis", 1)
    x = args[0]
    lead = int(np.prod(x.shape[:axis])) if axis else 1
    return x.reshape(lead, -1)


def _op_reshape(node: Node, args: list[np.ndarray]) -> np.ndarray:
    x, shape = args
    dims = [int(x.shape[i]) if s == 0 else int(s) for i, s in enumerate(shape)]
    return x.reshape(dims)


def _op_gemm(node: Node, args: list[np.ndarray]) -> np.ndarray:
    a, b = args[0], args[1]
    c = args[2] if len(args) > 2 else None
    alpha = np.float32(_attr_float(node, "alpha", 1.0))
    beta = np.float32(_attr_float(node, "beta", 1.0))
    if _attr_int(node, "transA", 0):
        a = a.T
    if _attr_int(node, "transB", 0):
        b = b.T
    out = alpha * (a @ b)
    if c is not None:
        out = out + beta * c
    return out


def _op_identity(node: Node, args: list[np.ndarray]) -> np.ndarray:
    return args[0]


_OPS = {
    "Conv": _op_conv,
    "BatchNormalization": _op_batchnorm,
    "Relu": _op_relu,
    "MaxPool": _op_maxpool,
    "AveragePool": _op_avgpool,
    "GlobalAveragePool": _op_gap,
    "Add": _op_add,
    "Flatten": _op_flatten,
    "Reshape": _op_reshape,
    "Gemm": _op_gemm,
    "Identity": _op_identity,
}


def validate_shapes(graph: Graph, input_height: int, input_width: int,
                    embedding_dim: int, path: str | Path) -> None:
    """Check declared graph shapes against a descriptor's expectations.

    The input must declare (batch, 3, input_height, input_width) and the
    output (batch, embedding_dim); the batch dimension may be symbolic.
    """
    inp, out = graph.inputs[0], graph.outputs[0]
    want_in = [3, input_height, input_width]
    got_in = inp.shape[1:]
    if len(inp.shape) != 4 or got_in != want_in:
        raise ShapeMismatchError(
            f"{path}: graph input {inp.name!r} declares {_fmt(inp.shape)}, "
            f"descriptor expects (batch, 3, {input_height}, {input_width})")
    if len(out.shape) != 2 or out.shape[1] != embedding_dim:
        raise ShapeMismatchError(
            f"{path}: graph output {out.name!r} declares {_fmt(out.shape)}, "
            f"descriptor expects (batch, {embedding_dim})")


def _fmt(shape: list[int | None]) -> str:
    return "(" + ", ".join("batch" if d is None else str(d) for d in shape) + ")"
