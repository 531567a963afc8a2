"""Binary checkpoint codec.

Layout (all integers little-endian u32):
    magic "NTGW" | version | config_len | config JSON (UTF-8)
    | n_tensors | records...
Each record: name_len | name UTF-8 | rank | dims[rank] | float32 LE data,
C order. Tensors are written sorted by name so save(load(f)) == f holds
byte for byte.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .config import ModelConfig
from .params import ModelParams

MAGIC = b"NTGW"
VERSION = 1


class CheckpointError(ValueError):
    pass


def checkpoint_bytes(params: ModelParams) -> bytes:
    config_json = json.dumps(
        params.config.to_dict(), sort_keys=True, separators=(",", ":")
    ).encode("utf-8")
    out = bytearray()
    out += MAGIC
    out += struct.pack("<I", VERSION)
    out += struct.pack("<I", len(config_json))
    out += config_json
    out += struct.pack("<I", len(params.tensors))
    for name in sorted(params.tensors):
        arr = np.ascontiguousarray(params.tensors[name], dtype="<f4")
        name_b = name.encode("utf-8")
        out += struct.pack("<I", len(name_b))
        out += name_b
        out += struct.pack("<I", arr.ndim)
        for dim in arr.shape:
            out += struct.pack("<I", dim)
        out += arr.tobytes()
    return bytes(out)


def save_checkpoint(params: ModelParams, path: str) -> None:
    with open(path, "wb") as fh:
        fh.write(checkpoint_bytes(params))


def params_from_bytes(data: bytes) -> ModelParams:
    view = memoryview(data)
    if bytes(view[:4]) != MAGIC:
        raise CheckpointError("bad checkpoint magic")
    pos = 4

    def read_u32() -> int:
        nonlocal pos
        if pos + 4 > len(view):
            raise CheckpointError("truncated checkpoint")
        (value,) = struct.unpack_from("<I", view, pos)
        pos += 4
        return value

    version = read_u32()
    if version != VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    config_len = read_u32()
    if pos + config_len > len(view):
        raise CheckpointError("truncated checkpoint config")
    config = ModelConfig.from_dict(json.loads(bytes(view[pos : pos + config_len])))
    pos += config_len

    n_tensors = read_u32()
    tensors: dict[str, np.ndarray] = {}
    for _ in range(n_tensors):
        name_len = read_u32()
        name = bytes(view[pos : pos + name_len]).decode("utf-8")
        pos += name_len
        rank = read_u32()
        dims = tuple(read_u32() for _ in range(rank))
        count = int(np.prod(dims)) if dims else 1
        nbytes = 4 * count
        if pos + nbytes > len(view):
            raise CheckpointError(f"truncated tensor data for {name!r}")
        arr = np.frombuffer(view, dtype="<f4", count=count, offset=pos)
        pos += nbytes
        tensors[name] = arr.reshape(dims).astype(np.float64)
    if pos != len(view):
        raise CheckpointError("trailing bytes after checkpoint payload")
    return ModelParams(config, tensors)


def load_checkpoint(path: str) -> ModelParams:
    with open(path, "rb") as fh:
        return params_from_bytes(fh.read())
