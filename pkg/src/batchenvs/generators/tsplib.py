"""Reader and writer for a small TSPLIB subset.

A file holds one or more instances, each::

    NAME: example
    DIMENSION: 3
    NODE_COORD_SECTION
    1 0.0 0.0
    2 1.0 0.5
    3 0.5 1.0
    EOF

Header keys are case-insensitive and unknown keys are ignored.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from batchenvs import rng
from batchenvs.errors import InstanceFormatError
from batchenvs.fileio import atomic_write_text


@dataclass
class Instance:
    name: str
    coordinates: np.ndarray


def parse_tsplib(text: str, path=None) -> list[Instance]:
    instances: list[Instance] = []
    name, dim, coords, in_coords = "", None, [], False
    start_line = None

    def finish(lineno):
        nonlocal name, dim, coords, in_coords
        if dim is None:
            raise InstanceFormatError("missing DIMENSION header", line=lineno, path=path)
        if len(coords) != dim:
            raise InstanceFormatError(f"expected {dim} coordinates, found {len(coords)}", line=lineno, path=path)
        instances.append(Instance(name, np.asarray(coords, dtype=np.float64).reshape(dim, 2)))
        name, dim, coords, in_coords = "", None, [], False

    lines = text.splitlines()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if start_line is None:
            start_line = lineno
        upper = line.upper()
        if upper == "EOF":
            finish(lineno)
            start_line = None
            continue
        if in_coords:
            parts = line.split()
            if len(parts) != 3:
                raise InstanceFormatError("coordinate lines need '<index> <x> <y>'", line=lineno, path=path)
            try:
                x, y = float(parts[1]), float(parts[2])
                int(parts[0])
            except ValueError:
                raise InstanceFormatError(f"malformed coordinate line {line!r}", line=lineno, path=path) from None
            if dim is not None and len(coords) >= dim:
                raise InstanceFormatError(f"more than DIMENSION={dim} coordinates", line=lineno, path=path)
            coords.append((x, y))
            continue
        if upper.startswith("NODE_COORD_SECTION"):
            in_coords = True
            continue
        if ":" in line:
            key, value = (s.strip() for s in line.split(":", 1))
        else:
            parts = line.split(None, 1)
            key, value = parts[0], parts[1].strip() if len(parts) > 1 else ""
        key = key.upper()
        if key == "NAME":
            name = value
        elif key == "DIMENSION":
            try:
                dim = int(value)
            except ValueError:
                raise InstanceFormatError(f"DIMENSION must be an integer, got {value!r}", line=lineno, path=path) from None
            if dim < 1:
                raise InstanceFormatError("DIMENSION must be >= 1", line=lineno, path=path)
    if start_line is not None:
        raise InstanceFormatError("missing EOF", line=len(lines), path=path)
    if not instances:
        raise InstanceFormatError("no instances found", path=path)
    return instances


def normalize(coords: np.ndarray) -> np.ndarray:
    """Min-max scale each axis to ``[0, 1]``; a constant axis maps to 0."""
    lo = coords.min(axis=0)
    span = coords.max(axis=0) - lo
    return (coords - lo) / np.where(span > 0, span, 1.0)


def load_instances(path, normalized: bool = True) -> list[np.ndarray]:
    """Coordinates of every instance in a file, or in every ``*.tsp`` file of a directory."""
    path = Path(path)
    files = sorted(path.glob("*.tsp")) if path.is_dir() else [path]
    out = []
    for f in files:
        for inst in parse_tsplib(f.read_text(encoding="utf-8"), path=os.fspath(f)):
            out.append(normalize(inst.coordinates) if normalized else inst.coordinates)
    return out


def subsample(key, coords: np.ndarray, k: int) -> np.ndarray:
    """``k`` distinct cities chosen by ``key``, kept in their original order."""
    n = coords.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"cannot take {k} of {n} cities")
    idx = np.sort(rng.permutation(key, n)[:k])
    return coords[idx]


def format_tsplib(coords, name: str = "instance") -> str:
    coords = np.asarray(coords, dtype=np.float64)
    rows = "".join(f"{i + 1} {x!r} {y!r}\n" for i, (x, y) in enumerate(coords.tolist()))
    return f"NAME: {name}\nTYPE: TSP\nDIMENSION: {coords.shape[0]}\nEDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n{rows}EOF\n"


def write_tsplib(path, coords, name: str = "instance") -> None:
    atomic_write_text(path, format_tsplib(coords, name))
