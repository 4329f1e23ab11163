"""2048 on a square board.

Lines are merged through a lookup table indexed by the tile exponents of a
row, so a whole batch of boards moves with a handful of gathers.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from batchenvs import rng
from batchenvs.api.env import Environment, EnvState
from batchenvs.api.specs import ArraySpec, BoundedArraySpec, CompositeSpec, DiscreteArraySpec

UP, RIGHT, DOWN, LEFT = 0, 1, 2, 3
MAX_EXPONENT = 17  # 2**17 is the largest tile a 4x4 board can hold
_BASE = MAX_EXPONENT + 2  # room for a transient 2**18 in the table


@dataclass
class Game2048State(EnvState):
    board: np.ndarray  # tile values, 0 = empty
    score: np.ndarray
    action_mask: np.ndarray


def _merge_exponents(line: tuple[int, ...]) -> tuple[tuple[int, ...], int]:
    tiles = [e for e in line if e]
    out: list[int] = []
    reward = 0
    i = 0
    while i < len(tiles):
        if i + 1 < len(tiles) and tiles[i] == tiles[i + 1]:
            out.append(tiles[i] + 1)
            reward += 1 << (tiles[i] + 1)
            i += 2
        else:
            out.append(tiles[i])
            i += 1
    out += [0] * (len(line) - len(out))
    return tuple(out), reward


@lru_cache(maxsize=None)
def _line_table(size: int) -> tuple[np.ndarray, np.ndarray]:
    """(moved exponents, reward) for every line of ``size`` exponents < _BASE."""
    n = _BASE**size
    moved = np.zeros((n, size), dtype=np.int8)
    reward = np.zeros(n, dtype=np.int64)
    digits = np.indices((_BASE,) * size).reshape(size, -1).T
    for idx, line in enumerate(map(tuple, digits)):
        out, r = _merge_exponents(line)
        moved[idx] = np.minimum(out, _BASE - 1)
        reward[idx] = r
    return moved, reward


def _to_exponents(values: np.ndarray) -> np.ndarray:
    exps = np.zeros(values.shape, dtype=np.int64)
    nz = values > 0
    exps[nz] = np.log2(values[nz]).round().astype(np.int64)
    return exps


def _to_values(exps: np.ndarray) -> np.ndarray:
    return np.where(exps > 0, np.left_shift(1, exps.astype(np.int64)), 0).astype(np.int32)


def shift_and_merge_line(line) -> tuple[list[int], int]:
    """Slide a line toward index 0 and merge equal neighbours once.

    >>> shift_and_merge_line([2, 2, 2, 2])
    ([4, 4, 0, 0], 8)
    """
    values = np.asarray(line, dtype=np.int64)
    size = values.shape[0]
    moved, reward = _line_table(size)
    idx = int(np.dot(_to_exponents(values), _BASE ** np.arange(size - 1, -1, -1)))
    return _to_values(moved[idx].astype(np.int64)).tolist(), int(reward[idx])


def _oriented(boards: np.ndarray, direction: int) -> np.ndarray:
    """View so that moving ``direction`` means sliding every row toward column 0."""
    if direction == LEFT:
        return boards
    if direction == RIGHT:
        return boards[..., ::-1]
    if direction == UP:
        return np.swapaxes(boards, -1, -2)
    return np.swapaxes(boards, -1, -2)[..., ::-1]


def _restore(rows: np.ndarray, direction: int) -> np.ndarray:
    if direction == LEFT:
        return rows
    if direction == RIGHT:
        return rows[..., ::-1]
    if direction == UP:
        return np.swapaxes(rows, -1, -2)
    return np.swapaxes(rows[..., ::-1], -1, -2)


def all_moves(exps: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Boards after each of the four moves: ``(B, 4, n, n)`` exponents and ``(B, 4)`` rewards."""
    size = exps.shape[-1]
    moved_tab, reward_tab = _line_table(size)
    weights = _BASE ** np.arange(size - 1, -1, -1)
    boards = np.empty((exps.shape[0], 4, size, size), dtype=np.int64)
    rewards = np.empty((exps.shape[0], 4), dtype=np.int64)
    for d in range(4):
        rows = _oriented(exps, d)
        idx = rows @ weights
        boards[:, d] = _restore(moved_tab[idx], d)
        rewards[:, d] = reward_tab[idx].sum(axis=1)
    return boards, rewards


def _mask_from_moves(exps: np.ndarray, moved: np.ndarray) -> np.ndarray:
    return np.any(moved != exps[:, None], axis=(2, 3))


def action_mask(board: np.ndarray) -> np.ndarray:
    """Moves that change the board (works on one board or a batch)."""
    single = board.ndim == 2
    exps = _to_exponents(board[None] if single else board)
    moved, _ = all_moves(exps)
    mask = _mask_from_moves(exps, moved)
    return mask[0] if single else mask


def make_state(board: np.ndarray, key=None, score: float = 0.0) -> Game2048State:
    board = np.asarray(board, dtype=np.int32)
    return Game2048State(
        key=np.zeros(2, np.uint64) if key is None else np.asarray(key, np.uint64),
        step_count=np.int32(0),
        done=np.bool_(False),
        board=board,
        score=np.float64(score),
        action_mask=action_mask(board),
    )


class RandomGenerator2048:
    """Empty board with a single tile: 2 with probability 0.9, else 4."""

    def __init__(self, board_size: int = 4):
        self.board_size = board_size

    def __call__(self, key) -> Game2048State:
        n = self.board_size
        w = rng.bits(key, 2)
        cell = int(w[0] % np.uint64(n * n))
        four = (w[1] >> np.uint64(11)).astype(np.float64) / (1 << 53) >= 0.9
        board = np.zeros((n, n), dtype=np.int32)
        board.flat[cell] = 4 if four else 2
        return make_state(board)


class Game2048(Environment[Game2048State]):
    """Slide tiles; a move is legal iff it changes the board.

    After each move one tile spawns on a uniformly random empty cell (2 with
    probability 0.9, else 4). The episode terminates when no move is legal.
    """

    def __init__(self, board_size: int = 4, generator=None):
        if board_size < 2:
            raise ValueError("board_size must be >= 2")
        self.board_size = board_size
        self.generator = generator or RandomGenerator2048(board_size)
        _line_table(board_size)

    def observation_spec(self) -> CompositeSpec:
        n = self.board_size
        return CompositeSpec(
            board=BoundedArraySpec((n, n), np.int32, 0, 1 << (_BASE - 1), name="board"),
            action_mask=ArraySpec((4,), bool, name="action_mask"),
            step_count=ArraySpec((), np.int32, name="step_count"),
        )

    def action_spec(self) -> DiscreteArraySpec:
        return DiscreteArraySpec(4, name="action")

    def _transition(self, states: Game2048State, actions: np.ndarray):
        n_batch = actions.shape[0]
        rows = np.arange(n_batch)
        exps = _to_exponents(states.board)
        moved, rewards = all_moves(exps)
        new_exps = moved[rows, actions]
        reward = rewards[rows, actions].astype(np.float64)

        # spawn on the k-th empty cell (row-major), value 2 w.p. 0.9 else 4
        key_pairs = rng.split(states.key, 2)
        draws = rng.bits(key_pairs[:, 1], 2)
        flat = new_exps.reshape(n_batch, -1)
        empty = flat == 0
        count = empty.sum(axis=1)
        k = (draws[:, 0] % np.maximum(count, 1).astype(np.uint64)).astype(np.int64)
        rank = np.cumsum(empty, axis=1) - 1
        target = empty & (rank == k[:, None])
        four = ((draws[:, 1] >> np.uint64(11)).astype(np.float64) / (1 << 53)) >= 0.9
        spawn = np.where(four, 2, 1)
        flat = np.where(target & (count[:, None] > 0), spawn[:, None], flat)
        new_exps = flat.reshape(new_exps.shape)

        next_moved, _ = all_moves(new_exps)
        mask = _mask_from_moves(new_exps, next_moved)
        new = Game2048State(
            key=key_pairs[:, 0],
            step_count=states.step_count,
            done=states.done,
            board=_to_values(new_exps),
            score=states.score + reward,
            action_mask=mask,
        )
        return new, reward, ~mask.any(axis=1)

    def _observe(self, states: Game2048State):
        return {"board": states.board, "action_mask": states.action_mask, "step_count": states.step_count}

    def _extras(self, states: Game2048State):
        return {"max_tile": states.board.reshape(states.board.shape[0], -1).max(axis=1).astype(np.float64)}
