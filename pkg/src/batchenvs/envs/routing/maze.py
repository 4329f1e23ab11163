"""Grid maze: walk the agent onto the target cell.

Mazes are carved by a randomised depth-first search over the cells with two
even coordinates; the cells between two connected rooms are opened. When a
dimension is even, the trailing row or column is used as dead-end alcoves off
the rooms next to it, so the maze stays a tree over all open cells.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from batchenvs import rng
from batchenvs.api.env import Environment, EnvState
from batchenvs.api.specs import ArraySpec, BoundedArraySpec, CompositeSpec, DiscreteArraySpec

MOVES = np.array([[-1, 0], [0, 1], [1, 0], [0, -1]], dtype=np.int32)  # up, right, down, left


@dataclass
class MazeState(EnvState):
    walls: np.ndarray
    agent_position: np.ndarray
    target_position: np.ndarray
    action_mask: np.ndarray


def _mask(walls: np.ndarray, agent: np.ndarray) -> np.ndarray:
    """``(B, 4)`` moves that stay on the grid and off the walls."""
    n_batch, h, w = walls.shape
    dest = agent[:, None, :] + MOVES
    inside = (dest[..., 0] >= 0) & (dest[..., 0] < h) & (dest[..., 1] >= 0) & (dest[..., 1] < w)
    r = np.clip(dest[..., 0], 0, h - 1)
    c = np.clip(dest[..., 1], 0, w - 1)
    return inside & ~walls[np.arange(n_batch)[:, None], r, c]


def make_state(walls, agent, target) -> MazeState:
    walls = np.asarray(walls, dtype=bool)
    agent = np.asarray(agent, dtype=np.int32)
    return MazeState(
        key=np.zeros(2, np.uint64),
        step_count=np.int32(0),
        done=np.bool_(False),
        walls=walls,
        agent_position=agent,
        target_position=np.asarray(target, dtype=np.int32),
        action_mask=_mask(walls[None], agent[None])[0],
    )


def carve_maze(key, num_rows: int, num_cols: int) -> np.ndarray:
    """Perfect maze as a boolean wall grid (True = wall)."""
    if num_rows < 3 or num_cols < 3:
        raise ValueError("maze dimensions must be >= 3")
    room_rows = (num_rows + 1) // 2
    room_cols = (num_cols + 1) // 2
    walls = np.ones((num_rows, num_cols), dtype=bool)
    # one draw per room visit is enough: each pop/extend uses a single word
    draws = rng.bits(key, 2 * room_rows * room_cols + 2)
    d = 0
    start = (int(draws[d] % np.uint64(room_rows)), int(draws[d + 1] % np.uint64(room_cols)))
    d += 2
    visited = np.zeros((room_rows, room_cols), dtype=bool)
    visited[start] = True
    walls[2 * start[0], 2 * start[1]] = False
    stack = [start]
    while stack:
        r, c = stack[-1]
        options = [
            (r + dr, c + dc)
            for dr, dc in ((-1, 0), (0, 1), (1, 0), (0, -1))
            if 0 <= r + dr < room_rows and 0 <= c + dc < room_cols and not visited[r + dr, c + dc]
        ]
        if not options:
            stack.pop()
            continue
        nr, nc = options[int(draws[d] % np.uint64(len(options)))]
        d += 1
        visited[nr, nc] = True
        walls[2 * nr, 2 * nc] = False
        walls[r + nr, c + nc] = False  # cell between the two rooms
        stack.append((nr, nc))
    if num_rows % 2 == 0:
        walls[num_rows - 1, 0::2] = False
    if num_cols % 2 == 0:
        walls[0::2, num_cols - 1] = False
    return walls


class RandomMazeGenerator:
    """Random perfect maze with agent and target on distinct open cells."""

    def __init__(self, num_rows: int = 10, num_cols: int = 10):
        self.num_rows = num_rows
        self.num_cols = num_cols

    def __call__(self, key) -> MazeState:
        k_maze, k_cells = rng.split(rng.as_key_array(key), 2)
        walls = carve_maze(k_maze, self.num_rows, self.num_cols)
        open_cells = np.argwhere(~walls)
        n_open = open_cells.shape[0]
        w = rng.bits(k_cells, 2)
        a = int(w[0] % np.uint64(n_open))
        t = int(w[1] % np.uint64(n_open - 1))
        t = t + 1 if t >= a else t
        return make_state(walls, open_cells[a], open_cells[t])


class Maze(Environment[MazeState]):
    """Reward 1 and termination on reaching the target; truncated after ``rows*cols`` steps."""

    def __init__(self, num_rows: int = 10, num_cols: int = 10, time_limit: int | None = None, generator=None):
        self.num_rows = num_rows
        self.num_cols = num_cols
        self.time_limit = num_rows * num_cols if time_limit is None else time_limit
        self.generator = generator or RandomMazeGenerator(num_rows, num_cols)

    def observation_spec(self) -> CompositeSpec:
        h, w = self.num_rows, self.num_cols
        return CompositeSpec(
            walls=ArraySpec((h, w), bool, name="walls"),
            agent_position=BoundedArraySpec((2,), np.int32, 0, [h - 1, w - 1], name="agent_position"),
            target_position=BoundedArraySpec((2,), np.int32, 0, [h - 1, w - 1], name="target_position"),
            action_mask=ArraySpec((4,), bool, name="action_mask"),
            step_count=ArraySpec((), np.int32, name="step_count"),
        )

    def action_spec(self) -> DiscreteArraySpec:
        return DiscreteArraySpec(4, name="action")

    def _transition(self, states: MazeState, actions: np.ndarray):
        limit = np.array([self.num_rows - 1, self.num_cols - 1])
        agent = np.clip(states.agent_position + MOVES[actions], 0, limit).astype(np.int32)
        reached = np.all(agent == states.target_position, axis=1)
        new = MazeState(
            states.key,
            states.step_count,
            states.done,
            states.walls,
            agent,
            states.target_position,
            _mask(states.walls, agent),
        )
        return new, reached.astype(np.float64), reached

    def _observe(self, states: MazeState):
        return {
            "walls": states.walls,
            "agent_position": states.agent_position,
            "target_position": states.target_position,
            "action_mask": states.action_mask,
            "step_count": states.step_count,
        }
