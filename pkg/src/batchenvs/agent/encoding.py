"""Flat float encodings of batched observations, one per environment family.

* ``maze_grid``: walls, agent one-hot and target one-hot planes, each ``H*W``
  row-major, concatenated (``3*H*W`` values).
* ``maze_egocentric``: walls in a ``(2H-1) x (2W-1)`` window centred on the
  agent (off-grid cells count as walls), then the target one-hot in the same
  window (``2*(2H-1)*(2W-1)`` values).
* ``snake_grid``: the ``(g, g, 5)`` observation grid flattened row-major,
  channel last (``5*g*g`` values).
* ``tsp_cities``: per city, in index order, ``x, y, x - x_cur, y - y_cur,
  distance to current city, distance to the first city, visited flag,
  is-current flag, is-first flag`` (``9*N`` values). Before the first move
  the current and first city are taken to be absent (offsets and distances
  0, flags 0), plus a trailing "tour started" flag.
* ``flat``: every observation entry except ``action_mask``, cast to float and
  concatenated in key order.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

Encoder = Callable[[dict], np.ndarray]


def _one_hot_cells(pos: np.ndarray, h: int, w: int) -> np.ndarray:
    out = np.zeros((pos.shape[0], h * w))
    out[np.arange(pos.shape[0]), pos[:, 0] * w + pos[:, 1]] = 1.0
    return out


def maze_grid(obs: dict) -> np.ndarray:
    walls = np.asarray(obs["walls"])
    b, h, w = walls.shape
    return np.concatenate([
        walls.reshape(b, -1).astype(np.float64),
        _one_hot_cells(np.asarray(obs["agent_position"]), h, w),
        _one_hot_cells(np.asarray(obs["target_position"]), h, w),
    ], axis=1)


def maze_egocentric(obs: dict) -> np.ndarray:
    walls = np.asarray(obs["walls"])
    b, h, w = walls.shape
    agent = np.asarray(obs["agent_position"])
    target = np.asarray(obs["target_position"])
    # window of (2H-1) x (2W-1) cells centred on the agent; off-grid cells count as walls
    padded = np.ones((b, 3 * h - 2, 3 * w - 2), dtype=np.float64)
    padded[:, h - 1: 2 * h - 1, w - 1: 2 * w - 1] = walls
    r = np.arange(2 * h - 1)[None, :, None] + agent[:, 0][:, None, None]
    c = np.arange(2 * w - 1)[None, None, :] + agent[:, 1][:, None, None]
    window = padded[np.arange(b)[:, None, None], r, c]
    goal = np.zeros((b, 2 * h - 1, 2 * w - 1))
    goal[np.arange(b), target[:, 0] - agent[:, 0] + h - 1, target[:, 1] - agent[:, 1] + w - 1] = 1.0
    return np.concatenate([window.reshape(b, -1), goal.reshape(b, -1)], axis=1)


def snake_grid(obs: dict) -> np.ndarray:
    grid = np.asarray(obs["grid"], dtype=np.float64)
    return grid.reshape(grid.shape[0], -1)


def tsp_cities(obs: dict) -> np.ndarray:
    coords = np.asarray(obs["coordinates"], dtype=np.float64)
    b, n, _ = coords.shape
    rows = np.arange(b)
    pos = np.asarray(obs["position"])
    started = pos >= 0
    first = np.asarray(obs["trajectory"])[:, 0]
    cur_xy = coords[rows, np.maximum(pos, 0)]
    first_xy = coords[rows, np.maximum(first, 0)]
    s = started[:, None].astype(np.float64)
    rel = (coords - cur_xy[:, None, :]) * s[:, :, None]
    d_cur = np.linalg.norm(coords - cur_xy[:, None, :], axis=2) * s
    d_first = np.linalg.norm(coords - first_xy[:, None, :], axis=2) * s
    visited = ~np.asarray(obs["action_mask"], dtype=bool)
    is_cur = np.zeros((b, n))
    is_first = np.zeros((b, n))
    is_cur[rows[started], pos[started]] = 1.0
    is_first[rows[started], first[started]] = 1.0
    feats = np.concatenate([coords, rel, d_cur[..., None], d_first[..., None], visited[..., None].astype(np.float64),
                            is_cur[..., None], is_first[..., None]], axis=2)
    return np.concatenate([feats.reshape(b, -1), s], axis=1)


def flat(obs: dict) -> np.ndarray:
    parts = []
    for k in sorted(obs):
        if k == "action_mask":
            continue
        v = np.asarray(obs[k], dtype=np.float64)
        parts.append(v.reshape(v.shape[0], -1))
    return np.concatenate(parts, axis=1)


ENCODERS: dict[str, Encoder] = {
    "maze_grid": maze_grid,
    "maze_egocentric": maze_egocentric,
    "snake_grid": snake_grid,
    "tsp_cities": tsp_cities,
    "flat": flat,
}


def default_encoding(env) -> str:
    return {"Maze": "maze_grid", "Snake": "snake_grid", "TSP": "tsp_cities"}.get(type(env).__name__, "flat")


def get_encoder(name: str) -> Encoder:
    try:
        return ENCODERS[name]
    except KeyError:
        raise ValueError(f"unknown encoding {name!r}; choose from {sorted(ENCODERS)}") from None
