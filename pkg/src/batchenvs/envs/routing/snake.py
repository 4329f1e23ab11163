"""Snake on a square grid.

The body is stored as an age grid: ``body_state`` holds 1 at the tail up to
``length`` at the head and 0 elsewhere, which keeps the state fixed-size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from batchenvs import rng
from batchenvs.api.env import Environment, EnvState
from batchenvs.api.specs import ArraySpec, BoundedArraySpec, CompositeSpec, DiscreteArraySpec

MOVES = np.array([[-1, 0], [0, 1], [1, 0], [0, -1]], dtype=np.int32)  # up, right, down, left
OPPOSITE = np.array([2, 3, 0, 1])

# observation channels
HEAD, BODY, TAIL, FRUIT, STEP = range(5)


@dataclass
class SnakeState(EnvState):
    body_state: np.ndarray
    head_position: np.ndarray
    fruit_position: np.ndarray
    length: np.ndarray
    last_action: np.ndarray  # -1 before the first move
    action_mask: np.ndarray


def _mask(length: np.ndarray, last_action: np.ndarray) -> np.ndarray:
    n_batch = length.shape[0]
    mask = np.ones((n_batch, 4), dtype=bool)
    reversing = (length >= 2) & (last_action >= 0)
    rows = np.flatnonzero(reversing)
    mask[rows, OPPOSITE[last_action[rows]]] = False
    return mask


def body_cells(state: SnakeState) -> np.ndarray:
    """Body cells of a single state, head first."""
    cells = np.argwhere(state.body_state > 0)
    order = np.argsort(-state.body_state[cells[:, 0], cells[:, 1]], kind="stable")
    return cells[order]


def make_state(grid_size: int, head, fruit) -> SnakeState:
    body = np.zeros((grid_size, grid_size), dtype=np.int32)
    body[head[0], head[1]] = 1
    length = np.int32(1)
    last = np.int32(-1)
    return SnakeState(
        key=np.zeros(2, np.uint64),
        step_count=np.int32(0),
        done=np.bool_(False),
        body_state=body,
        head_position=np.asarray(head, dtype=np.int32),
        fruit_position=np.asarray(fruit, dtype=np.int32),
        length=length,
        last_action=last,
        action_mask=_mask(np.array([length]), np.array([last]))[0],
    )


class RandomSnakeGenerator:
    """Head and fruit on two distinct uniformly random cells."""

    def __init__(self, grid_size: int = 12):
        self.grid_size = grid_size

    def __call__(self, key) -> SnakeState:
        g = self.grid_size
        w = rng.bits(key, 2)
        head = int(w[0] % np.uint64(g * g))
        fruit = int(w[1] % np.uint64(g * g - 1))
        fruit = fruit + 1 if fruit >= head else fruit
        return make_state(g, divmod(head, g), divmod(fruit, g))


class Snake(Environment[SnakeState]):
    """+1 per fruit; hitting a wall or the body terminates with reward 0.

    Moving into the cell the tail is leaving is allowed. When the snake fills
    the grid no fruit can be placed and the episode terminates (the maximum
    return is ``grid_size**2 - 1``).
    """

    def __init__(self, grid_size: int = 12, time_limit: int | None = None, generator=None):
        if grid_size < 2:
            raise ValueError("grid_size must be >= 2")
        self.grid_size = grid_size
        # g**4 steps is enough for any Hamiltonian tour to eat every fruit
        self.time_limit = grid_size**4 if time_limit is None else time_limit
        self.generator = generator or RandomSnakeGenerator(grid_size)

    def observation_spec(self) -> CompositeSpec:
        g = self.grid_size
        return CompositeSpec(
            grid=BoundedArraySpec((g, g, 5), np.float32, 0.0, 1.0, name="grid"),
            action_mask=ArraySpec((4,), bool, name="action_mask"),
            step_count=ArraySpec((), np.int32, name="step_count"),
        )

    def action_spec(self) -> DiscreteArraySpec:
        return DiscreteArraySpec(4, name="action")

    def _transition(self, states: SnakeState, actions: np.ndarray):
        g = self.grid_size
        n_batch = actions.shape[0]
        rows = np.arange(n_batch)
        target = states.head_position + MOVES[actions]
        off_grid = np.any((target < 0) | (target >= g), axis=1)
        tr = np.clip(target[:, 0], 0, g - 1)
        tc = np.clip(target[:, 1], 0, g - 1)
        eats = ~off_grid & (tr == states.fruit_position[:, 0]) & (tc == states.fruit_position[:, 1])
        occupant = states.body_state[rows, tr, tc]
        # the tail cell (age 1) frees up this step unless the snake grows
        hits_body = ~off_grid & (occupant > 0) & ~((occupant == 1) & ~eats)
        crashed = off_grid | hits_body

        body = np.where(eats[:, None, None], states.body_state, np.maximum(states.body_state - 1, 0))
        length = (states.length + eats).astype(np.int32)
        body[rows, tr, tc] = np.where(crashed, body[rows, tr, tc], length)
        body = np.where(crashed[:, None, None], states.body_state, body)
        length = np.where(crashed, states.length, length).astype(np.int32)
        head = np.where(crashed[:, None], states.head_position, np.stack([tr, tc], axis=1)).astype(np.int32)

        # respawn fruit uniformly on a free cell after eating
        key_pairs = rng.split(states.key, 2)
        draw = rng.bits(key_pairs[:, 1], 1)[:, 0]
        free = (body == 0).reshape(n_batch, -1)
        n_free = free.sum(axis=1)
        k = (draw % np.maximum(n_free, 1).astype(np.uint64)).astype(np.int64)
        slot = np.argmax(free & (np.cumsum(free, axis=1) - 1 == k[:, None]), axis=1)
        new_fruit = np.stack([slot // g, slot % g], axis=1).astype(np.int32)
        fruit = np.where((eats & (n_free > 0))[:, None], new_fruit, states.fruit_position).astype(np.int32)
        filled = eats & (n_free == 0)

        last_action = np.where(crashed, states.last_action, actions).astype(np.int32)
        new = SnakeState(
            key=np.where(eats[:, None], key_pairs[:, 0], states.key),
            step_count=states.step_count,
            done=states.done,
            body_state=body,
            head_position=head,
            fruit_position=fruit,
            length=length,
            last_action=last_action,
            action_mask=_mask(length, last_action),
        )
        return new, eats.astype(np.float64), crashed | filled

    def _observe(self, states: SnakeState):
        g = self.grid_size
        n_batch = states.length.shape[0]
        rows = np.arange(n_batch)
        grid = np.zeros((n_batch, g, g, 5), dtype=np.float32)
        grid[rows, states.head_position[:, 0], states.head_position[:, 1], HEAD] = 1.0
        grid[..., BODY] = states.body_state > 0
        grid[..., TAIL] = states.body_state == 1
        has_fruit = states.length < g * g
        grid[rows, states.fruit_position[:, 0], states.fruit_position[:, 1], FRUIT] = has_fruit
        grid[..., STEP] = (states.step_count / self.time_limit).astype(np.float32)[:, None, None]
        return {"grid": grid, "action_mask": states.action_mask, "step_count": states.step_count}

    def _extras(self, states: SnakeState):
        return {"length": states.length.astype(np.float64)}
