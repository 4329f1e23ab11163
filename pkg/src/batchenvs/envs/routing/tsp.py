"""Travelling salesman: visit every city once and return to the start."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from batchenvs import rng
from batchenvs.api.env import Environment, EnvState
from batchenvs.api.specs import ArraySpec, BoundedArraySpec, CompositeSpec, DiscreteArraySpec


@dataclass
class TspState(EnvState):
    coordinates: np.ndarray
    position: np.ndarray  # -1 before the first city is chosen
    visited: np.ndarray
    trajectory: np.ndarray  # visited cities in order, padded with -1
    num_visited: np.ndarray
    tour_length: np.ndarray  # length of the open path so far
    action_mask: np.ndarray


def tour_length(coordinates, order) -> float:
    """Closed tour length visiting ``coordinates`` in ``order``."""
    coords = np.asarray(coordinates, dtype=np.float64)
    order = np.asarray(order, dtype=np.int64)
    n = coords.shape[0]
    if order.shape != (n,) or not np.array_equal(np.sort(order), np.arange(n)):
        raise ValueError(f"order must be a permutation of 0..{n - 1}")
    pts = coords[order]
    return float(np.linalg.norm(pts - np.roll(pts, -1, axis=0), axis=1).sum())


def make_state(coordinates) -> TspState:
    coords = np.asarray(coordinates, dtype=np.float64)
    n = coords.shape[0]
    if coords.ndim != 2 or coords.shape[1] != 2 or n < 2:
        raise ValueError("coordinates must have shape (N, 2) with N >= 2")
    return TspState(
        key=np.zeros(2, np.uint64),
        step_count=np.int32(0),
        done=np.bool_(False),
        coordinates=coords,
        position=np.int32(-1),
        visited=np.zeros(n, dtype=bool),
        trajectory=np.full(n, -1, dtype=np.int32),
        num_visited=np.int32(0),
        tour_length=np.float64(0.0),
        action_mask=np.ones(n, dtype=bool),
    )


def uniform_coordinates(key, num_cities: int) -> np.ndarray:
    """``(num_cities, 2)`` i.i.d. uniform points in the unit square."""
    return rng.uniform(key, 2 * num_cities).reshape(num_cities, 2)


class UniformGenerator:
    """Cities drawn uniformly from the unit square."""

    def __init__(self, num_cities: int = 20):
        if num_cities < 2:
            raise ValueError("num_cities must be >= 2")
        self.num_cities = num_cities

    def __call__(self, key) -> TspState:
        return make_state(uniform_coordinates(key, self.num_cities))


class TSP(Environment[TspState]):
    """Action = next city. Reward is ``-tour length`` when the tour closes.

    With ``dense=True`` every step instead pays the length of the edge it
    adds, and the final step also pays the closing edge; episode returns are
    identical up to float summation order.
    """

    def __init__(self, num_cities: int = 20, dense: bool = False, generator=None):
        self.num_cities = num_cities
        self.dense = dense
        self.time_limit = None
        self.generator = generator or UniformGenerator(num_cities)

    def observation_spec(self) -> CompositeSpec:
        n = self.num_cities
        return CompositeSpec(
            coordinates=BoundedArraySpec((n, 2), np.float64, 0.0, 1.0, name="coordinates"),
            position=BoundedArraySpec((), np.int32, -1, n - 1, name="position"),
            trajectory=BoundedArraySpec((n,), np.int32, -1, n - 1, name="trajectory"),
            action_mask=ArraySpec((n,), bool, name="action_mask"),
            step_count=ArraySpec((), np.int32, name="step_count"),
        )

    def action_spec(self) -> DiscreteArraySpec:
        return DiscreteArraySpec(self.num_cities, name="action")

    def _transition(self, states: TspState, actions: np.ndarray):
        n_batch, n = states.visited.shape
        rows = np.arange(n_batch)
        started = states.position >= 0
        prev = np.where(started, states.position, actions)
        edge = np.linalg.norm(states.coordinates[rows, actions] - states.coordinates[rows, prev], axis=1)
        tour = states.tour_length + edge

        visited = states.visited.copy()
        visited[rows, actions] = True
        trajectory = states.trajectory.copy()
        slot = np.minimum(states.num_visited, n - 1)
        trajectory[rows, slot] = actions
        num_visited = np.count_nonzero(visited, axis=1).astype(np.int32)
        finished = num_visited == n

        first = trajectory[:, 0].clip(0)
        closing = np.linalg.norm(states.coordinates[rows, first] - states.coordinates[rows, actions], axis=1)
        if self.dense:
            reward = -(edge + np.where(finished, closing, 0.0))
        else:
            reward = np.where(finished, -(tour + closing), 0.0)

        new = TspState(
            key=states.key,
            step_count=states.step_count,
            done=states.done,
            coordinates=states.coordinates,
            position=actions.astype(np.int32),
            visited=visited,
            trajectory=trajectory,
            num_visited=num_visited,
            tour_length=np.where(finished, tour + closing, tour),
            action_mask=~visited,
        )
        return new, reward, finished

    def _observe(self, states: TspState):
        return {
            "coordinates": states.coordinates,
            "position": states.position,
            "trajectory": states.trajectory,
            "action_mask": states.action_mask,
            "step_count": states.step_count,
        }

    def _extras(self, states: TspState):
        return {"tour_length": states.tour_length.astype(np.float64)}
