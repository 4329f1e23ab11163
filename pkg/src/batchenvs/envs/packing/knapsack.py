from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from batchenvs import rng
from batchenvs.api.env import Environment, EnvState
from batchenvs.api.specs import ArraySpec, BoundedArraySpec, CompositeSpec, DiscreteArraySpec


@dataclass
class KnapsackState(EnvState):
    weights: np.ndarray
    values: np.ndarray
    packed: np.ndarray
    remaining_budget: np.ndarray
    action_mask: np.ndarray


def _mask(weights, packed, budget) -> np.ndarray:
    return ~packed & (weights <= budget[..., None])


def make_state(weights, values, capacity: float) -> KnapsackState:
    weights = np.asarray(weights, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if weights.shape != values.shape or weights.ndim != 1 or weights.shape[0] < 1:
        raise ValueError("weights and values must be matching non-empty vectors")
    if capacity <= 0:
        raise ValueError("capacity must be positive")
    packed = np.zeros(weights.shape, dtype=bool)
    budget = np.float64(capacity)
    return KnapsackState(
        key=np.zeros(2, np.uint64),
        step_count=np.int32(0),
        done=np.bool_(False),
        weights=weights,
        values=values,
        packed=packed,
        remaining_budget=budget,
        action_mask=_mask(weights, packed, budget),
    )


class RandomKnapsackGenerator:
    """Weights and values i.i.d. uniform in the unit interval."""

    def __init__(self, num_items: int = 50, total_budget: float = 12.5):
        if num_items < 1:
            raise ValueError("num_items must be >= 1")
        if total_budget <= 0:
            raise ValueError("total_budget must be positive")
        self.num_items = num_items
        self.total_budget = total_budget

    def __call__(self, key) -> KnapsackState:
        u = rng.uniform(key, 2 * self.num_items)
        # shift exact zeros into the open interval
        u = np.where(u == 0.0, np.finfo(np.float64).tiny, u)
        return make_state(u[: self.num_items], u[self.num_items:], self.total_budget)


def knapsack_generator(key, num_items: int = 50, total_budget: float = 12.5) -> KnapsackState:
    return RandomKnapsackGenerator(num_items, total_budget)(key)


class Knapsack(Environment[KnapsackState]):
    """Pack items one at a time; each packed item pays its value.

    The episode terminates once no unpacked item fits the remaining budget.
    """

    def __init__(self, num_items: int = 50, total_budget: float = 12.5, generator=None):
        self.num_items = num_items
        self.total_budget = total_budget
        self.time_limit = None
        self.generator = generator or RandomKnapsackGenerator(num_items, total_budget)

    def observation_spec(self) -> CompositeSpec:
        n = self.num_items
        return CompositeSpec(
            weights=BoundedArraySpec((n,), np.float64, 0.0, 1.0, name="weights"),
            values=BoundedArraySpec((n,), np.float64, 0.0, 1.0, name="values"),
            packed=ArraySpec((n,), bool, name="packed"),
            action_mask=ArraySpec((n,), bool, name="action_mask"),
            step_count=ArraySpec((), np.int32, name="step_count"),
        )

    def action_spec(self) -> DiscreteArraySpec:
        return DiscreteArraySpec(self.num_items, name="action")

    def _transition(self, states: KnapsackState, actions: np.ndarray):
        rows = np.arange(actions.shape[0])
        packed = states.packed.copy()
        packed[rows, actions] = True
        budget = states.remaining_budget - states.weights[rows, actions]
        mask = _mask(states.weights, packed, budget)
        new = KnapsackState(states.key, states.step_count, states.done, states.weights, states.values, packed,
                            budget, mask)
        return new, states.values[rows, actions], ~mask.any(axis=1)

    def _observe(self, states: KnapsackState):
        return {
            "weights": states.weights,
            "values": states.values,
            "packed": states.packed,
            "action_mask": states.action_mask,
            "step_count": states.step_count,
        }

    def _extras(self, states: KnapsackState):
        return {"packed_value": np.where(states.packed, states.values, 0.0).sum(axis=1)}
