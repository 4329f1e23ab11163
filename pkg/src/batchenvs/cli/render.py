"""Deterministic renders: binary PPM (P6) rasters for grid-like states, SVG for tours.

Raster cells are ``CELL`` pixels square.
"""

from __future__ import annotations

import numpy as np

from batchenvs.envs.logic.game2048 import Game2048State
from batchenvs.envs.logic.rubiks_cube import CubeState
from batchenvs.envs.logic.sliding_tile_puzzle import PuzzleState
from batchenvs.envs.packing.jobshop import JobShopState
from batchenvs.envs.packing.knapsack import KnapsackState
from batchenvs.envs.routing.cvrp import CvrpState
from batchenvs.envs.routing.maze import MazeState
from batchenvs.envs.routing.snake import SnakeState
from batchenvs.envs.routing.tsp import TspState

CELL = 16
SVG_SIZE = 512

WHITE = (255, 255, 255)
BLACK = (0, 0, 0)
GREY = (160, 160, 160)
DARK = (40, 40, 48)
LIGHT = (235, 235, 225)
RED = (220, 40, 40)
BLUE = (40, 90, 220)
GREEN = (60, 170, 70)
DARK_GREEN = (20, 100, 30)
# up, front, right, back, left, down
CUBE_COLOURS = ((255, 255, 255), (0, 155, 72), (183, 18, 52), (0, 70, 173), (255, 88, 0), (255, 213, 0))
PALETTE = tuple(tuple(int(v) for v in c) for c in (
    (230, 25, 75), (60, 180, 75), (255, 225, 25), (0, 130, 200), (245, 130, 48), (145, 30, 180),
    (70, 240, 240), (240, 50, 230), (210, 245, 60), (250, 190, 212), (0, 128, 128), (170, 110, 40),
))


def ppm_bytes(cells: np.ndarray, cell: int = CELL) -> bytes:
    """``cells`` is an ``(rows, cols, 3)`` uint8 colour grid; each becomes a ``cell``-pixel square."""
    cells = np.asarray(cells, dtype=np.uint8)
    img = np.repeat(np.repeat(cells, cell, axis=0), cell, axis=1)
    h, w = img.shape[:2]
    return f"P6\n{w} {h}\n255\n".encode("ascii") + img.tobytes()


def _grid(rows: int, cols: int, colour=LIGHT) -> np.ndarray:
    g = np.empty((rows, cols, 3), dtype=np.uint8)
    g[:] = colour
    return g


def _maze(s: MazeState) -> np.ndarray:
    g = _grid(*s.walls.shape)
    g[s.walls] = DARK
    g[tuple(s.target_position)] = RED
    g[tuple(s.agent_position)] = BLUE
    return g


def _snake(s: SnakeState) -> np.ndarray:
    n = s.body_state.shape[0]
    g = _grid(n, n)
    g[s.body_state > 0] = GREEN
    g[tuple(s.head_position)] = DARK_GREEN
    if s.length < n * n:
        g[tuple(s.fruit_position)] = RED
    return g


def _ramp(t: np.ndarray) -> np.ndarray:
    t = np.clip(t, 0.0, 1.0)[..., None]
    lo, hi = np.array([250, 240, 200]), np.array([200, 60, 20])
    return (lo + (hi - lo) * t).round().astype(np.uint8)


def _game2048(s: Game2048State) -> np.ndarray:
    exps = np.where(s.board > 0, np.log2(np.maximum(s.board, 1)), 0)
    g = _ramp(exps / 11.0)
    g[s.board == 0] = GREY
    return g


def _puzzle(s: PuzzleState) -> np.ndarray:
    n = s.puzzle.shape[0]
    g = _ramp(s.puzzle / max(n * n - 1, 1))
    g[s.puzzle == 0] = BLACK
    return g


def _cube(s: CubeState) -> np.ndarray:
    n = s.cube.shape[-1]
    g = _grid(3 * n, 4 * n, BLACK)
    colours = np.array(CUBE_COLOURS, dtype=np.uint8)
    # unfolded cross: up above front, then left front right back, down below front
    slots = {0: (0, 1), 4: (1, 0), 1: (1, 1), 2: (1, 2), 3: (1, 3), 5: (2, 1)}
    for face, (r, c) in slots.items():
        g[r * n:(r + 1) * n, c * n:(c + 1) * n] = colours[s.cube[face]]
    return g


def _knapsack(s: KnapsackState) -> np.ndarray:
    g = np.zeros((2, s.weights.shape[0], 3), dtype=np.uint8)
    g[0] = _ramp(s.values)
    g[1] = _ramp(s.weights)
    g[:, ~s.packed] //= 3
    return g


def _jobshop(s: JobShopState) -> np.ndarray:
    j, o = s.ops_machine_ids.shape
    g = _grid(j, o, BLACK)
    for job in range(j):
        for op in range(s.num_ops[job]):
            colour = PALETTE[int(s.ops_machine_ids[job, op]) % len(PALETTE)]
            if op < s.op_index[job]:
                colour = tuple(c // 3 for c in colour)
            g[job, op] = colour
    return g


RASTERS = {
    MazeState: _maze,
    SnakeState: _snake,
    Game2048State: _game2048,
    PuzzleState: _puzzle,
    CubeState: _cube,
    KnapsackState: _knapsack,
    JobShopState: _jobshop,
}


def _svg(points: np.ndarray, path: list[int], depot: int | None, close: bool) -> bytes:
    s = SVG_SIZE
    margin = 16
    xy = margin + points * (s - 2 * margin)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{s}" height="{s}" viewBox="0 0 {s} {s}">',
        f'<rect width="{s}" height="{s}" fill="white"/>',
    ]
    if len(path) > 1:
        seq = path + ([path[0]] if close else [])
        pts = " ".join(f"{xy[i, 0]:.3f},{s - xy[i, 1]:.3f}" for i in seq)
        out.append(f'<polyline points="{pts}" fill="none" stroke="#2858dc" stroke-width="2"/>')
    for i, (x, y) in enumerate(xy):
        if i == depot:
            out.append(f'<rect x="{x - 6:.3f}" y="{s - y - 6:.3f}" width="12" height="12" fill="#dc2828"/>')
        else:
            out.append(f'<circle cx="{x:.3f}" cy="{s - y:.3f}" r="4" fill="#282830"/>')
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")


def render(state) -> tuple[bytes, str]:
    """``(file bytes, extension)`` for one (unbatched) state."""
    if isinstance(state, TspState):
        path = [int(c) for c in state.trajectory if c >= 0]
        return _svg(state.coordinates, path, None, bool(state.num_visited == state.visited.shape[0])), "svg"
    if isinstance(state, CvrpState):
        path = [int(c) for c in state.route[: int(state.route_length)]]
        return _svg(state.coordinates, path, 0, False), "svg"
    for cls, fn in RASTERS.items():
        if isinstance(state, cls):
            return ppm_bytes(fn(state)), "ppm"
    raise TypeError(f"no renderer for {type(state).__name__}")
