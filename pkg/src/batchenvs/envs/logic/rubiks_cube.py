"""Rubik's cube of any size, moves as precomputed sticker permutations.

Face order is up, front, right, back, left, down (colour ``i`` starts on
face ``i``). Each face is an ``n x n`` grid seen from outside the cube:

* up: rows run back to front, columns left to right
* front, right, back, left: rows run top to bottom, columns run left to
  right as seen when facing that side
* down: rows run front to back, columns left to right

An action is ``(face, depth, direction)`` with direction 0 = clockwise,
1 = counter-clockwise, 2 = half turn, all as seen looking at ``face``;
``depth`` counts layers inward from that face.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from batchenvs import rng
from batchenvs.api.env import Environment, EnvState
from batchenvs.api.specs import ArraySpec, BoundedArraySpec, CompositeSpec, MultiDiscreteArraySpec
from batchenvs.errors import InvalidActionError

UP, FRONT, RIGHT, BACK, LEFT, DOWN = range(6)
CLOCKWISE, COUNTERCLOCKWISE, HALF_TURN = range(3)
FACE_NAMES = ("U", "F", "R", "B", "L", "D")

# outward normal, then the 3D directions of increasing row / column index
_FACE_FRAMES = {
    UP: ((0, 1, 0), (0, 0, 1), (1, 0, 0)),
    FRONT: ((0, 0, 1), (0, -1, 0), (1, 0, 0)),
    RIGHT: ((1, 0, 0), (0, -1, 0), (0, 0, -1)),
    BACK: ((0, 0, -1), (0, -1, 0), (-1, 0, 0)),
    LEFT: ((-1, 0, 0), (0, -1, 0), (0, 0, 1)),
    DOWN: ((0, -1, 0), (0, 0, -1), (1, 0, 0)),
}


def num_depths(cube_size: int) -> int:
    return max(1, cube_size // 2)


@lru_cache(maxsize=None)
def _sticker_geometry(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Positions (doubled coordinates) and normals of all ``6 n^2`` stickers."""
    pos = np.empty((6, n, n, 3), dtype=np.int64)
    nrm = np.empty((6, n, n, 3), dtype=np.int64)
    offs = np.arange(n) * 2 - (n - 1)
    for face, (normal, down, right) in _FACE_FRAMES.items():
        normal, down, right = map(np.array, (normal, down, right))
        for r in range(n):
            for c in range(n):
                pos[face, r, c] = normal * n + down * offs[r] + right * offs[c]
                nrm[face, r, c] = normal
    return pos.reshape(-1, 3), nrm.reshape(-1, 3)


def _rotate(v: np.ndarray, axis: np.ndarray, direction: int) -> np.ndarray:
    cross = np.cross(axis, v)
    along = (v @ axis)[:, None] * axis
    if direction == CLOCKWISE:  # -90 degrees about the outward normal
        return -cross + along
    if direction == COUNTERCLOCKWISE:
        return cross + along
    return -v + 2 * along


@lru_cache(maxsize=None)
def move_permutations(n: int) -> np.ndarray:
    """``perm[face, depth, direction]`` so that ``new = old.flat[perm]``."""
    pos, nrm = _sticker_geometry(n)
    lookup = {(tuple(p), tuple(q)): i for i, (p, q) in enumerate(zip(pos, nrm))}
    depths = num_depths(n)
    perms = np.empty((6, depths, 3, 6 * n * n), dtype=np.int64)
    for face in range(6):
        axis = np.array(_FACE_FRAMES[face][0])
        comp = pos @ axis
        for d in range(depths):
            layer = (comp == n - 1 - 2 * d) | ((comp == n) if d == 0 else False)
            for direction in range(3):
                p2 = _rotate(pos, axis, direction)
                n2 = _rotate(nrm, axis, direction)
                dest = np.arange(6 * n * n)
                for i in np.flatnonzero(layer):
                    dest[i] = lookup[(tuple(p2[i]), tuple(n2[i]))]
                perm = np.empty_like(dest)
                perm[dest] = np.arange(dest.shape[0])
                perms[face, d, direction] = perm
    return perms


def cube_move(stickers: np.ndarray, face: int, depth: int, direction: int) -> np.ndarray:
    """Apply one turn to a ``(6, n, n)`` sticker array (returns a new array)."""
    n = stickers.shape[-1]
    if not (0 <= face < 6 and 0 <= depth < num_depths(n) and 0 <= direction < 3):
        raise InvalidActionError(f"invalid move (face={face}, depth={depth}, direction={direction}) for n={n}")
    perm = move_permutations(n)[face, depth, direction]
    return stickers.reshape(-1)[perm].reshape(stickers.shape)


def inverse_direction(direction: int) -> int:
    return {CLOCKWISE: COUNTERCLOCKWISE, COUNTERCLOCKWISE: CLOCKWISE, HALF_TURN: HALF_TURN}[direction]


def solved_cube(n: int) -> np.ndarray:
    return np.repeat(np.arange(6, dtype=np.int8), n * n).reshape(6, n, n)


def is_solved(stickers: np.ndarray) -> np.ndarray:
    """Per-cube check that every face is one colour; accepts ``(..., 6, n, n)``."""
    flat = stickers.reshape(stickers.shape[:-2] + (-1,))
    return np.all(flat == flat[..., :1], axis=(-2, -1))


@dataclass
class CubeState(EnvState):
    cube: np.ndarray
    action_mask: np.ndarray


def make_state(cube: np.ndarray) -> CubeState:
    n = cube.shape[-1]
    return CubeState(
        key=np.zeros(2, np.uint64),
        step_count=np.int32(0),
        done=np.bool_(False),
        cube=np.asarray(cube, dtype=np.int8),
        action_mask=np.ones((6, num_depths(n), 3), dtype=bool),
    )


class ScramblingGenerator:
    """Solved cube followed by ``num_scrambles`` uniformly random moves."""

    def __init__(self, cube_size: int = 3, num_scrambles: int = 100):
        self.cube_size = cube_size
        self.num_scrambles = num_scrambles

    def sample_scramble(self, key) -> np.ndarray:
        """The ``(num_scrambles, 3)`` moves applied for ``key``."""
        n_act = 6 * num_depths(self.cube_size) * 3
        flat = rng.bits(key, self.num_scrambles) % np.uint64(n_act)
        return np.stack(np.unravel_index(flat.astype(np.int64), (6, num_depths(self.cube_size), 3)), axis=-1)

    def __call__(self, key) -> CubeState:
        perms = move_permutations(self.cube_size)
        cube = solved_cube(self.cube_size).reshape(-1)
        for f, d, r in self.sample_scramble(key):
            cube = cube[perms[f, d, r]]
        return make_state(cube.reshape(6, self.cube_size, self.cube_size))


class RubiksCube(Environment[CubeState]):
    """Reward 1 and termination when every face is one colour."""

    def __init__(self, cube_size: int = 3, num_scrambles: int = 100, time_limit: int = 200, generator=None):
        if cube_size < 2:
            raise ValueError("cube_size must be >= 2")
        self.cube_size = cube_size
        self.time_limit = time_limit
        self.generator = generator or ScramblingGenerator(cube_size, num_scrambles)
        self._flat_perms = move_permutations(cube_size).reshape(-1, 6 * cube_size**2)

    def observation_spec(self) -> CompositeSpec:
        n = self.cube_size
        return CompositeSpec(
            cube=BoundedArraySpec((6, n, n), np.int8, 0, 5, name="cube"),
            action_mask=ArraySpec((6, num_depths(n), 3), bool, name="action_mask"),
            step_count=ArraySpec((), np.int32, name="step_count"),
        )

    def action_spec(self) -> MultiDiscreteArraySpec:
        return MultiDiscreteArraySpec([6, num_depths(self.cube_size), 3], name="action")

    def flat_to_action(self, flat):
        dims = (6, num_depths(self.cube_size), 3)
        return np.stack(np.unravel_index(np.asarray(flat, dtype=np.int64), dims), axis=-1).astype(np.int32)

    def _action_valid(self, states, actions):
        return states.action_mask[np.arange(actions.shape[0]), actions[:, 0], actions[:, 1], actions[:, 2]]

    def _transition(self, states: CubeState, actions: np.ndarray):
        n_batch = actions.shape[0]
        depths = num_depths(self.cube_size)
        flat_action = (actions[:, 0] * depths + actions[:, 1]) * 3 + actions[:, 2]
        flat = states.cube.reshape(n_batch, -1)
        cube = np.take_along_axis(flat, self._flat_perms[flat_action], axis=1).reshape(states.cube.shape)
        solved = is_solved(cube)
        new = CubeState(states.key, states.step_count, states.done, cube, states.action_mask)
        return new, solved.astype(np.float64), solved

    def _observe(self, states: CubeState):
        return {"cube": states.cube, "action_mask": states.action_mask, "step_count": states.step_count}

    def _extras(self, states: CubeState):
        return {"solved": is_solved(states.cube).astype(np.float64)}
