"""The environment contract: pure ``reset``/``step`` over explicit states.

Every environment implements its dynamics once, vectorised over a leading
batch axis (``_transition``, ``_observe``, ``_extras``). The single-state
``step`` runs that code on a batch of one, so batched and unbatched stepping
share one code path and agree bit for bit.
"""

from __future__ import annotations

import abc
import dataclasses
from dataclasses import dataclass
from typing import Any, Callable, Generic, TypeVar

import numpy as np

from batchenvs import rng
from batchenvs.api import tree
from batchenvs.api.specs import CompositeSpec, Spec
from batchenvs.api.types import StepType, TimeStep
from batchenvs.errors import ContractViolationError, InvalidActionError


@dataclass
class EnvState:
    """Fields common to every environment state.

    ``key`` is a ``uint64[2]`` array, ``done`` marks a state that emitted
    LAST and must be reset before it can be stepped again.
    """

    key: np.ndarray
    step_count: np.ndarray
    done: np.ndarray


S = TypeVar("S", bound=EnvState)

Generator = Callable[[np.ndarray], Any]


class Environment(abc.ABC, Generic[S]):
    """Base class for all environments.

    Subclasses provide ``generator`` (key -> initial state), the specs, and
    the batched hooks ``_transition``, ``_observe`` and ``_extras``.
    """

    time_limit: int | None = None
    generator: Generator

    # -- public API -----------------------------------------------------

    def reset(self, key) -> tuple[S, TimeStep]:
        key_arr = rng.as_key_array(key)
        children = rng.split(key_arr, 2)
        state = self.generator(children[1])
        state = dataclasses.replace(
            state,
            key=children[0].copy(),
            step_count=np.int32(0),
            done=np.bool_(False),
        )
        batch = tree.batch_of_one(state)
        ts = TimeStep(
            step_type=StepType.FIRST,
            reward=0.0,
            discount=1.0,
            observation={k: v[0] for k, v in self._observe(batch).items()},
            extras={k: float(v[0]) for k, v in self._extras(batch).items()},
        )
        return state, ts

    def step(self, state: S, action) -> tuple[S, TimeStep]:
        batch = tree.batch_of_one(state)
        actions = np.asarray(action)[None]
        new, ts = self.step_batch(batch, actions, _single=True)
        return tree.unbatch(new, 0), ts.index(0)

    def step_batch(self, states: S, actions, active: np.ndarray | None = None, _single: bool = False):
        """Step ``B`` states at once.

        ``active`` (bool[B]) freezes the entries where it is false: their state
        is returned unchanged and their action is not checked. Frozen entries
        are still computed and then discarded, matching a vectorised select.
        """
        n = tree.batch_size(states)
        actions = np.asarray(actions)
        act_mask = np.ones(n, dtype=bool) if active is None else np.asarray(active, dtype=bool)
        bad_done = np.asarray(states.done) & act_mask
        if bad_done.any():
            raise ContractViolationError(
                "cannot step a state that already ended; reset it first",
                None if _single else int(np.argmax(bad_done)),
            )
        actions = self._check_actions(states, actions, act_mask, _single)

        new, reward, terminated = self._transition(states, actions)
        step_count = (states.step_count + 1).astype(np.int32)
        if self.time_limit is not None:
            truncated = ~terminated & (step_count >= self.time_limit)
        else:
            truncated = np.zeros(n, dtype=bool)
        done = terminated | truncated
        new = dataclasses.replace(new, step_count=step_count, done=done)
        reward = np.asarray(reward, dtype=np.float64)
        discount = np.where(terminated, 0.0, 1.0)
        step_type = np.where(done, StepType.LAST, StepType.MID).astype(np.int8)

        if active is not None and not act_mask.all():
            new = tree.select(act_mask, new, states)
            reward = np.where(act_mask, reward, 0.0)
            discount = np.where(act_mask, discount, 0.0)
            step_type = np.where(act_mask, step_type, np.int8(StepType.LAST)).astype(np.int8)

        ts = TimeStep(step_type, reward, discount, self._observe(new), self._extras(new))
        return new, ts

    @abc.abstractmethod
    def observation_spec(self) -> CompositeSpec: ...

    @abc.abstractmethod
    def action_spec(self) -> Spec: ...

    # -- action helpers used by policies and the batch engine -----------

    @property
    def action_shape(self) -> tuple[int, ...]:
        return tuple(self.action_spec().shape)

    @property
    def num_flat_actions(self) -> int:
        """Size of the flattened discrete action space."""
        spec = self.action_spec()
        if hasattr(spec, "num_values"):
            return int(np.prod(spec.num_values))
        raise NotImplementedError

    def flat_action_mask(self, observation: dict[str, np.ndarray]) -> np.ndarray:
        mask = observation["action_mask"]
        return mask.reshape(mask.shape[0], -1)

    def flat_to_action(self, flat: np.ndarray) -> np.ndarray:
        return np.asarray(flat, dtype=np.int32)

    def first_valid_actions(self, observation: dict[str, np.ndarray]) -> np.ndarray:
        """Lowest-index valid action per entry (index 0 when none is valid)."""
        return self.flat_to_action(np.argmax(self.flat_action_mask(observation), axis=1))

    def random_valid_actions(self, observation: dict[str, np.ndarray], keys: np.ndarray) -> np.ndarray:
        """Uniform sample over the valid actions of each entry."""
        mask = self.flat_action_mask(observation)
        return self.flat_to_action(rng.choice_index(keys, mask.astype(np.float64)))

    # -- hooks ------------------------------------------------------------

    @abc.abstractmethod
    def _transition(self, states: S, actions: np.ndarray) -> tuple[S, np.ndarray, np.ndarray]:
        """Return ``(next_states, reward[B], terminated[B])``.

        Must tolerate any in-range action without raising: frozen entries are
        computed with whatever action the caller supplied.
        """

    @abc.abstractmethod
    def _observe(self, states: S) -> dict[str, np.ndarray]: ...

    def _extras(self, states: S) -> dict[str, np.ndarray]:
        return {}

    def _action_valid(self, states: S, actions: np.ndarray) -> np.ndarray:
        """Mask lookup for scalar discrete actions; override for other layouts."""
        mask = states.action_mask
        idx = np.arange(actions.shape[0])
        return mask[idx, actions]

    def _check_actions(self, states: S, actions: np.ndarray, active: np.ndarray, single: bool) -> np.ndarray:
        n = active.shape[0]
        shape = (n,) + self.action_shape
        where = (lambda i: None) if single else (lambda i: int(i))
        if actions.shape != shape:
            raise InvalidActionError(f"action shape {actions.shape[1:]} != expected {shape[1:]}")
        if actions.dtype.kind not in "iu":
            raise InvalidActionError(f"actions must be integers, got dtype {actions.dtype}")
        spec = self.action_spec()
        hi = np.asarray(spec.maximum)
        in_range = (actions >= 0) & (actions <= hi)
        in_range = in_range.reshape(n, -1).all(axis=1)
        bad = active & ~in_range
        if bad.any():
            i = int(np.argmax(bad))
            raise InvalidActionError(f"action {actions[i].tolist()} outside the action spec", where(i))
        actions = actions.astype(np.int64)
        valid = self._action_valid(states, actions)
        bad = active & ~valid
        if bad.any():
            i = int(np.argmax(bad))
            raise InvalidActionError(f"action {actions[i].tolist()} is masked as invalid", where(i))
        return actions

    def __repr__(self) -> str:
        return f"{type(self).__name__}()"
