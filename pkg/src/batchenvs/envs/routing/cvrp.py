"""Capacitated vehicle routing with a single vehicle that refills at the depot.

Node 0 is the depot; nodes ``1..N`` are customers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from batchenvs import rng
from batchenvs.api.env import Environment, EnvState
from batchenvs.api.specs import ArraySpec, BoundedArraySpec, CompositeSpec, DiscreteArraySpec

DEPOT = 0


@dataclass
class CvrpState(EnvState):
    coordinates: np.ndarray  # (N + 1, 2), depot first
    demands: np.ndarray  # (N + 1,), 0 for the depot
    capacity: np.ndarray
    remaining_capacity: np.ndarray
    visited: np.ndarray  # (N + 1,), the depot counts as visited
    position: np.ndarray
    route: np.ndarray  # nodes in order, starting at the depot, padded with -1
    route_length: np.ndarray  # number of valid route entries
    distance: np.ndarray  # length travelled so far
    action_mask: np.ndarray


def _mask(visited, demands, remaining, position) -> np.ndarray:
    mask = ~visited & (demands <= remaining[..., None])
    mask[..., DEPOT] = position != DEPOT
    return mask


def route_distance(coordinates, route) -> float:
    """Length of the path through ``route`` (node indices, no implicit closing)."""
    pts = np.asarray(coordinates, dtype=np.float64)[np.asarray(route, dtype=np.int64)]
    return float(np.linalg.norm(np.diff(pts, axis=0), axis=1).sum())


def make_state(coordinates, demands, capacity: int) -> CvrpState:
    """``coordinates`` includes the depot at index 0; ``demands`` covers customers only."""
    coords = np.asarray(coordinates, dtype=np.float64)
    n = coords.shape[0] - 1
    dem = np.concatenate([[0], np.asarray(demands, dtype=np.int32)]).astype(np.int32)
    if n < 1 or dem.shape[0] != n + 1:
        raise ValueError("need at least one customer and one demand per customer")
    if np.any(dem[1:] < 1) or np.any(dem > capacity):
        raise ValueError("demands must lie in [1, capacity]")
    visited = np.zeros(n + 1, dtype=bool)
    visited[DEPOT] = True
    route = np.full(2 * n + 1, -1, dtype=np.int32)
    route[0] = DEPOT
    cap = np.int32(capacity)
    return CvrpState(
        key=np.zeros(2, np.uint64),
        step_count=np.int32(0),
        done=np.bool_(False),
        coordinates=coords,
        demands=dem,
        capacity=cap,
        remaining_capacity=cap,
        visited=visited,
        position=np.int32(DEPOT),
        route=route,
        route_length=np.int32(1),
        distance=np.float64(0.0),
        action_mask=_mask(visited, dem, cap, np.int32(DEPOT)),
    )


class UniformCvrpGenerator:
    """Uniform depot and customers in the unit square, integer demands in ``[1, max_demand]``."""

    def __init__(self, num_customers: int = 20, capacity: int = 30, max_demand: int = 9):
        if num_customers < 1:
            raise ValueError("num_customers must be >= 1")
        if not 1 <= max_demand <= capacity:
            raise ValueError("need 1 <= max_demand <= capacity")
        self.num_customers = num_customers
        self.capacity = capacity
        self.max_demand = max_demand

    def __call__(self, key) -> CvrpState:
        k_xy, k_dem = rng.split(rng.as_key_array(key), 2)
        n = self.num_customers
        coords = rng.uniform(k_xy, 2 * (n + 1)).reshape(n + 1, 2)
        demands = rng.randint(k_dem, 1, self.max_demand + 1, count=n)
        return make_state(coords, demands, self.capacity)


class CVRP(Environment[CvrpState]):
    """Action = next node (0 = depot). Reward is ``-route length`` on completion.

    A customer is valid when unvisited and its demand fits the remaining
    capacity; the depot is valid whenever the vehicle is elsewhere. The
    episode ends when every customer is served and the vehicle is back at the
    depot. ``dense=True`` pays each edge length as it is driven.
    """

    def __init__(self, num_customers: int = 20, capacity: int = 30, max_demand: int = 9, dense: bool = False,
                 generator=None):
        self.num_customers = num_customers
        self.capacity = capacity
        self.dense = dense
        self.time_limit = None
        self.generator = generator or UniformCvrpGenerator(num_customers, capacity, max_demand)

    def observation_spec(self) -> CompositeSpec:
        n = self.num_customers + 1
        return CompositeSpec(
            coordinates=BoundedArraySpec((n, 2), np.float64, 0.0, 1.0, name="coordinates"),
            demands=BoundedArraySpec((n,), np.int32, 0, self.capacity, name="demands"),
            position=BoundedArraySpec((), np.int32, 0, n - 1, name="position"),
            remaining_capacity=BoundedArraySpec((), np.int32, 0, self.capacity, name="remaining_capacity"),
            action_mask=ArraySpec((n,), bool, name="action_mask"),
            step_count=ArraySpec((), np.int32, name="step_count"),
        )

    def action_spec(self) -> DiscreteArraySpec:
        return DiscreteArraySpec(self.num_customers + 1, name="action")

    def _transition(self, states: CvrpState, actions: np.ndarray):
        n_batch = actions.shape[0]
        rows = np.arange(n_batch)
        coords = states.coordinates
        edge = np.linalg.norm(coords[rows, actions] - coords[rows, states.position], axis=1)
        distance = states.distance + edge

        at_depot = actions == DEPOT
        visited = states.visited.copy()
        visited[rows, actions] = True
        remaining = np.where(
            at_depot, states.capacity, states.remaining_capacity - states.demands[rows, actions]
        ).astype(np.int32)
        route = states.route.copy()
        slot = np.minimum(states.route_length, route.shape[1] - 1)
        route[rows, slot] = actions
        route_length = np.minimum(states.route_length + 1, route.shape[1]).astype(np.int32)
        position = actions.astype(np.int32)
        finished = visited.all(axis=1) & at_depot

        if self.dense:
            reward = -edge
        else:
            reward = np.where(finished, -distance, 0.0)
        new = CvrpState(
            key=states.key,
            step_count=states.step_count,
            done=states.done,
            coordinates=coords,
            demands=states.demands,
            capacity=states.capacity,
            remaining_capacity=remaining,
            visited=visited,
            position=position,
            route=route,
            route_length=route_length,
            distance=distance,
            action_mask=_mask(visited, states.demands, remaining, position),
        )
        return new, reward, finished

    def _observe(self, states: CvrpState):
        return {
            "coordinates": states.coordinates,
            "demands": states.demands,
            "position": states.position,
            "remaining_capacity": states.remaining_capacity,
            "action_mask": states.action_mask,
            "step_count": states.step_count,
        }

    def _extras(self, states: CvrpState):
        return {"distance": states.distance.astype(np.float64)}
