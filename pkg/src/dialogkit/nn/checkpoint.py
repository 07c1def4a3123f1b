"""Checkpoint format: little-endian binary with a JSON header.

Layout: magic ``DLGK`` | u32 version | u32 header length | header JSON
(name table with shapes, rng seed, free-form meta) | raw float64 payload,
one tensor after another in name-table order.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .params import Param, ParamStore

MAGIC = b"DLGK"
VERSION = 1


class CheckpointError(ValueError):
    pass


def save_params(store: ParamStore, meta: dict | None = None) -> bytes:
    names = store.names()
    header = {
        "seed": store.seed,
        "tensors": [{"name": n, "shape": list(store[n].value.shape)} for n in names],
        "meta": meta or {},
    }
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    out = bytearray()
    out += MAGIC
    out += struct.pack("<II", VERSION, len(header_bytes))
    out += header_bytes
    for n in names:
        out += store[n].value.astype("<f8").tobytes(order="C")
    return bytes(out)


def load_params(blob: bytes) -> tuple[ParamStore, dict]:
    if len(blob) < 12 or blob[:4] != MAGIC:
        raise CheckpointError("corrupt payload: bad magic")
    version, header_len = struct.unpack("<II", blob[4:12])
    if version != VERSION:
        raise CheckpointError(f"version mismatch: file has {version}, reader supports {VERSION}")
    if len(blob) < 12 + header_len:
        raise CheckpointError("corrupt payload: truncated header")
    try:
        header = json.loads(blob[12 : 12 + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointError(f"corrupt payload: unreadable header ({e})") from e
    store = ParamStore(seed=header.get("seed", 0))
    offset = 12 + header_len
    for spec in header["tensors"]:
        shape = tuple(int(s) for s in spec["shape"])
        count = int(np.prod(shape)) if shape else 1
        nbytes = count * 8
        if offset + nbytes > len(blob):
            raise CheckpointError(f"corrupt payload: truncated tensor {spec['name']!r}")
        value = np.frombuffer(blob, dtype="<f8", count=count, offset=offset).reshape(shape).copy()
        store.params[spec["name"]] = Param(spec["name"], value, np.zeros(shape))
        offset += nbytes
    if offset != len(blob):
        raise CheckpointError("corrupt payload: trailing bytes")
    return store, header.get("meta", {})


def params_debug_json(store: ParamStore) -> str:
    """Human-inspectable export; not meant for reloading large models."""
    doc = {
        "seed": store.seed,
        "tensors": {
            n: {"shape": list(p.value.shape), "values": p.value.tolist()}
            for n, p in store.params.items()
        },
    }
    return json.dumps(doc, sort_keys=True)
