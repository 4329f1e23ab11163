"""Coordinate samplers for routing instances, all inside the unit square."""

from __future__ import annotations

import numpy as np

from batchenvs import rng
from batchenvs.envs.routing.tsp import uniform_coordinates

__all__ = ["cluster_generate", "compression_generate", "explosion_generate", "uniform_coordinates"]


def _point(p, name: str) -> np.ndarray:
    arr = np.asarray(p, dtype=np.float64)
    if arr.shape != (2,) or not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be a finite 2D point")
    return arr


def cluster_generate(key, n: int, center, radius: float, clip: bool = True) -> np.ndarray:
    """``n`` points uniform over the disk of ``radius`` around ``center``.

    Candidates are drawn from the bounding square and rejected outside the
    disk, one keyed round at a time until ``n`` are accepted.
    """
    if not radius > 0:
        raise ValueError("radius must be positive")
    center = _point(center, "center")
    accepted = []
    count = 0
    round_idx = 0
    while count < n:
        batch = max(2 * (n - count), 8)
        u = rng.uniform(rng.fold_in(key, round_idx), 2 * batch).reshape(batch, 2) * 2.0 - 1.0
        inside = u[np.sum(u * u, axis=1) <= 1.0]
        accepted.append(inside[: n - count])
        count += accepted[-1].shape[0]
        round_idx += 1
    pts = center + radius * (np.concatenate(accepted) if accepted else np.zeros((0, 2)))
    return np.clip(pts, 0.0, 1.0) if clip else pts


def compression_generate(key, n: int, line, thickness: float, clip: bool = True) -> np.ndarray:
    """Points uniform along the segment ``line = (p, q)`` with a uniform
    perpendicular offset in ``[-thickness, thickness]``."""
    p, q = (_point(x, "line endpoint") for x in line)
    if thickness < 0:
        raise ValueError("thickness must be >= 0")
    d = q - p
    length = float(np.hypot(d[0], d[1]))
    if length == 0.0:
        raise ValueError("line endpoints must differ")
    normal = np.array([-d[1], d[0]]) / length
    u = rng.uniform(key, 2 * n).reshape(n, 2)
    offset = (2.0 * u[:, 1] - 1.0) * thickness
    pts = p + u[:, :1] * d + offset[:, None] * normal
    return np.clip(pts, 0.0, 1.0) if clip else pts


def explosion_generate(key, n: int, reference, min_push: float, clip: bool = True) -> np.ndarray:
    """Uniform points each moved ``min_push`` further away from ``reference``.

    Uses the same draws as :func:`uniform_coordinates`, so ``min_push = 0``
    reproduces the uniform instance for the same key. A point sitting exactly
    on the reference is pushed along +x.
    """
    if min_push < 0:
        raise ValueError("min_push must be >= 0")
    reference = _point(reference, "reference")
    pts = uniform_coordinates(key, n)
    if min_push == 0:
        return pts
    v = pts - reference
    dist = np.hypot(v[:, 0], v[:, 1])
    unit = np.where(dist[:, None] > 0, v / np.where(dist > 0, dist, 1.0)[:, None], np.array([1.0, 0.0]))
    pushed = pts + min_push * unit
    return np.clip(pushed, 0.0, 1.0) if clip else pushed
