from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from batchenvs import rng
from batchenvs.api.env import Environment, EnvState
from batchenvs.api.specs import ArraySpec, BoundedArraySpec, CompositeSpec, DiscreteArraySpec

# the action moves the empty slot: up, right, down, left
MOVES = np.array([[-1, 0], [0, 1], [1, 0], [0, -1]], dtype=np.int32)


def solved_puzzle(grid_size: int) -> np.ndarray:
    """Tiles ``1..g*g-1`` in row-major order with the empty slot (0) last."""
    flat = np.arange(1, grid_size * grid_size + 1, dtype=np.int32)
    flat[-1] = 0
    return flat.reshape(grid_size, grid_size)


def _mask(empty: np.ndarray, grid_size: int) -> np.ndarray:
    dest = empty[..., None, :] + MOVES
    return np.all((dest >= 0) & (dest < grid_size), axis=-1)


@dataclass
class PuzzleState(EnvState):
    puzzle: np.ndarray
    empty_tile_position: np.ndarray
    action_mask: np.ndarray


def make_state(puzzle: np.ndarray) -> PuzzleState:
    puzzle = np.asarray(puzzle, dtype=np.int32)
    empty = np.argwhere(puzzle == 0)[0].astype(np.int32)
    return PuzzleState(
        key=np.zeros(2, np.uint64),
        step_count=np.int32(0),
        done=np.bool_(False),
        puzzle=puzzle,
        empty_tile_position=empty,
        action_mask=_mask(empty, puzzle.shape[0]),
    )


def is_solvable(puzzle: np.ndarray) -> bool:
    """Parity test relative to :func:`solved_puzzle` (empty slot bottom-right)."""
    g = puzzle.shape[0]
    tiles = [int(t) for t in puzzle.reshape(-1) if t]
    inversions = sum(1 for i in range(len(tiles)) for j in range(i + 1, len(tiles)) if tiles[i] > tiles[j])
    if g % 2 == 1:
        return inversions % 2 == 0
    empty_row_from_bottom = g - int(np.argwhere(puzzle == 0)[0][0])
    return (inversions + empty_row_from_bottom) % 2 == 1


class RandomWalkGenerator:
    """Solved puzzle followed by ``num_random_moves`` uniformly random legal moves.

    Moving rather than swapping arbitrary tiles keeps every instance solvable.
    """

    def __init__(self, grid_size: int = 5, num_random_moves: int = 100):
        if grid_size < 2:
            raise ValueError("grid_size must be >= 2")
        if num_random_moves < 0:
            raise ValueError("num_random_moves must be >= 0")
        self.grid_size = grid_size
        self.num_random_moves = num_random_moves

    def __call__(self, key) -> PuzzleState:
        g = self.grid_size
        puzzle = solved_puzzle(g)
        r, c = g - 1, g - 1
        draws = rng.bits(key, self.num_random_moves)
        for w in draws:
            legal = [a for a in range(4) if 0 <= r + MOVES[a, 0] < g and 0 <= c + MOVES[a, 1] < g]
            a = legal[int(w % np.uint64(len(legal)))]
            nr, nc = r + MOVES[a, 0], c + MOVES[a, 1]
            puzzle[r, c], puzzle[nr, nc] = puzzle[nr, nc], 0
            r, c = nr, nc
        return make_state(puzzle)


def puzzle_generator(key, grid_size: int = 5, num_shuffle_moves: int = 100) -> PuzzleState:
    return RandomWalkGenerator(grid_size, num_shuffle_moves)(key)


class SlidingTilePuzzle(Environment[PuzzleState]):
    """Slide tiles into the empty slot until the puzzle is sorted.

    Reward is +1 when the moved tile lands on its home cell and -1 when it
    leaves it. ``prop_correctly_placed`` counts the empty slot as a tile.
    """

    def __init__(self, grid_size: int = 5, num_random_moves: int = 100, time_limit: int = 500, generator=None):
        self.grid_size = grid_size
        self.time_limit = time_limit
        self.generator = generator or RandomWalkGenerator(grid_size, num_random_moves)
        self._solved = solved_puzzle(grid_size)

    def observation_spec(self) -> CompositeSpec:
        g = self.grid_size
        return CompositeSpec(
            puzzle=BoundedArraySpec((g, g), np.int32, 0, g * g - 1, name="puzzle"),
            empty_tile_position=BoundedArraySpec((2,), np.int32, 0, g - 1, name="empty_tile_position"),
            action_mask=ArraySpec((4,), bool, name="action_mask"),
            step_count=ArraySpec((), np.int32, name="step_count"),
        )

    def action_spec(self) -> DiscreteArraySpec:
        return DiscreteArraySpec(4, name="action")

    def _transition(self, states: PuzzleState, actions: np.ndarray):
        g = self.grid_size
        rows = np.arange(actions.shape[0])
        empty = states.empty_tile_position
        dest = np.clip(empty + MOVES[actions], 0, g - 1)
        puzzle = states.puzzle.copy()
        tile = puzzle[rows, dest[:, 0], dest[:, 1]]
        puzzle[rows, empty[:, 0], empty[:, 1]] = tile
        puzzle[rows, dest[:, 0], dest[:, 1]] = 0
        was_home = self._solved[dest[:, 0], dest[:, 1]] == tile
        now_home = self._solved[empty[:, 0], empty[:, 1]] == tile
        reward = now_home.astype(np.float64) - was_home.astype(np.float64)
        dest = dest.astype(np.int32)
        new = PuzzleState(states.key, states.step_count, states.done, puzzle, dest, _mask(dest, g))
        solved = np.all(puzzle == self._solved, axis=(1, 2))
        return new, reward, solved

    def _observe(self, states: PuzzleState):
        return {
            "puzzle": states.puzzle,
            "empty_tile_position": states.empty_tile_position,
            "action_mask": states.action_mask,
            "step_count": states.step_count,
        }

    def _extras(self, states: PuzzleState):
        correct = states.puzzle == self._solved
        return {"prop_correctly_placed": correct.reshape(correct.shape[0], -1).mean(axis=1)}
