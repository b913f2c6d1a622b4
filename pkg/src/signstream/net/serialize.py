"""Model file format.

Layout, all integers little-endian:

    bytes 0..4   magic "SLRM"
    bytes 4..8   format version (unsigned 32-bit)
    bytes 8..12  config blob length (unsigned 32-bit)
    ...          UTF-8 JSON: {"config": ..., "class_ids": [...], "glosses": [...]}
    ...          parameter tensors as raw 32-bit little-endian floats, in
                 parameter_shapes() order, no per-tensor header

Shapes are derived from the embedded config, so the payload length is
fully determined; a short file is truncation and a long one is rejected.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .model import Model, ModelConfig, parameter_shapes

MODEL_MAGIC = b"SLRM"
FORMAT_VERSION = 1

_HEADER = struct.Struct("<4sII")


def save_model(model: Model, path) -> int:
    """Write a model file; returns the serialized size in bytes."""
    meta = {
        "config": model.config.to_dict(),
        "class_ids": list(model.class_ids),
        "glosses": list(model.glosses),
    }
    blob = json.dumps(meta, separators=(",", ":")).encode("utf-8")
    chunks = [_HEADER.pack(MODEL_MAGIC, FORMAT_VERSION, len(blob)), blob]
    for name, _ in parameter_shapes(model.config):
        chunks.append(np.ascontiguousarray(model.params[name], dtype="<f4").tobytes())
    data = b"".join(chunks)
    Path(path).write_bytes(data)
    return len(data)


def load_model(path) -> Model:
    """Read a model file, validating magic, version, and exact length."""
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ValueError(f"model file too short to hold a header: {path}")
    magic, version, blob_len = _HEADER.unpack_from(data)
    if magic != MODEL_MAGIC:
        raise ValueError(f"not a model file (bad magic {magic!r}): {path}")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported model format version {version}, expected {FORMAT_VERSION}")
    body = _HEADER.size
    if len(data) < body + blob_len:
        raise ValueError(f"model file truncated inside the config blob: {path}")
    try:
        meta = json.loads(data[body : body + blob_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ValueError(f"model config blob is not valid JSON: {path}") from exc
    for key in ("config", "class_ids", "glosses"):
        if key not in meta:
            raise ValueError(f"model config blob missing {key!r}: {path}")
    config = ModelConfig.from_dict(meta["config"])

    shapes = parameter_shapes(config)
    offset = body + blob_len
    expected = offset + 4 * sum(int(np.prod(shape)) for _, shape in shapes)
    if len(data) < expected:
        raise ValueError(
            f"model file truncated: {len(data)} bytes, expected {expected}: {path}"
        )
    if len(data) > expected:
        raise ValueError(
            f"model file has {len(data) - expected} trailing bytes: {path}"
        )
    params = {}
    for name, shape in shapes:
        count = int(np.prod(shape))
        arr = np.frombuffer(data, dtype="<f4", count=count, offset=offset)
        params[name] = arr.astype(np.float32).reshape(shape).copy()
        offset += 4 * count
    return Model(
        config,
        params=params,
        class_ids=tuple(meta["class_ids"]),
        glosses=tuple(meta["glosses"]),
    )


def model_file_size(model: Model) -> int:
    """Size in bytes a model file would occupy, without writing it."""
    meta = {
        "config": model.config.to_dict(),
        "class_ids": list(model.class_ids),
        "glosses": list(model.glosses),
    }
    blob = json.dumps(meta, separators=(",", ":")).encode("utf-8")
    return _HEADER.size + len(blob) + 4 * model.param_count
