"""Binary parameter checkpoints.

Layout (little-endian): 8-byte magic ``b"BENVMLP\\0"``, ``uint32`` version,
``uint32`` layer count, then per layer ``uint32`` group (0 torso, 1 policy,
2 value), ``uint32`` rows, ``uint32`` cols, the weights row-major as
``float64`` and the ``cols`` biases as ``float64``.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from batchenvs.agent.network import GROUPS, MlpParams
from batchenvs.fileio import atomic_write_bytes

MAGIC = b"BENVMLP\0"
VERSION = 1


class CheckpointError(ValueError):
    pass


def dumps(params: MlpParams) -> bytes:
    layers = [(gi, w, b) for gi, g in enumerate(GROUPS) for w, b in getattr(params, g)]
    out = [MAGIC, struct.pack("<II", VERSION, len(layers))]
    for gi, w, b in layers:
        out.append(struct.pack("<III", gi, *w.shape))
        out.append(np.ascontiguousarray(w, dtype="<f8").tobytes())
        out.append(np.ascontiguousarray(b, dtype="<f8").tobytes())
    return b"".join(out)


def loads(data: bytes) -> MlpParams:
    if data[:8] != MAGIC:
        raise CheckpointError("not a parameter checkpoint (bad magic)")
    try:
        version, count = struct.unpack_from("<II", data, 8)
        if version != VERSION:
            raise CheckpointError(f"unsupported checkpoint version {version}")
        pos = 16
        groups: dict[str, list] = {g: [] for g in GROUPS}
        for _ in range(count):
            gi, rows, cols = struct.unpack_from("<III", data, pos)
            pos += 12
            if gi >= len(GROUPS):
                raise CheckpointError(f"bad layer group {gi}")
            nw, nb = rows * cols * 8, cols * 8
            if pos + nw + nb > len(data):
                raise CheckpointError("checkpoint truncated")
            w = np.frombuffer(data, "<f8", rows * cols, pos).reshape(rows, cols).astype(np.float64)
            pos += nw
            b = np.frombuffer(data, "<f8", cols, pos).astype(np.float64)
            pos += nb
            groups[GROUPS[gi]].append((w, b))
    except struct.error:
        raise CheckpointError("checkpoint truncated") from None
    if pos != len(data):
        raise CheckpointError("trailing bytes after the last layer")
    params = MlpParams(**groups)
    if not params.policy or not params.value:
        raise CheckpointError("checkpoint lacks a policy or value head")
    if not all(np.all(np.isfinite(a)) for a in params.arrays()):
        raise CheckpointError("checkpoint holds non-finite values")
    return params


def save(path, params: MlpParams) -> None:
    atomic_write_bytes(path, dumps(params))


def load(path) -> MlpParams:
    return loads(Path(path).read_bytes())
