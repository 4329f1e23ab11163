"""Data-parallel stepping of ``B`` environments stored as one batched state.

States are structure-of-arrays dataclasses (every field has a leading batch
axis). A step runs the environment's vectorised transition over contiguous
chunks of the batch on a thread pool; entries that end are then reset one by
one, so reset cost is paid only for the entries that need it.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from batchenvs import rng
from batchenvs.api import tree
from batchenvs.api.env import Environment
from batchenvs.api.types import StepType, TimeStep, stack_timesteps
from batchenvs.api.wrappers import auto_reset_key
from batchenvs.errors import ContractViolationError, InvalidActionError

THREADS_ENV_VAR = "BATCHENVS_NUM_THREADS"


def default_num_workers() -> int:
    """``$BATCHENVS_NUM_THREADS`` if set, else the number of hardware threads."""
    value = os.environ.get(THREADS_ENV_VAR)
    if value:
        n = int(value)
        if n < 1:
            raise ValueError(f"{THREADS_ENV_VAR} must be >= 1, got {value!r}")
        return n
    return os.cpu_count() or 1


@dataclass
class BatchSlab:
    """``B`` environment states plus the timestep they last emitted."""

    env_id: str
    states: object
    timestep: TimeStep

    @property
    def batch_size(self) -> int:
        return tree.batch_size(self.states)

    @property
    def done(self) -> np.ndarray:
        """Entries that ended and await a reset (never set when auto-resetting)."""
        return np.asarray(self.states.done)

    @property
    def keys(self) -> np.ndarray:
        return self.states.key


def _concat_timesteps(parts: list[TimeStep]) -> TimeStep:
    if len(parts) == 1:
        return parts[0]
    return TimeStep(
        step_type=np.concatenate([p.step_type for p in parts]),
        reward=np.concatenate([p.reward for p in parts]),
        discount=np.concatenate([p.discount for p in parts]),
        observation={k: np.concatenate([p.observation[k] for p in parts]) for k in parts[0].observation},
        extras={k: np.concatenate([p.extras[k] for p in parts]) for k in parts[0].extras},
    )


class BatchEngine:
    """Steps a batch of one environment type.

    ``num_workers`` threads each take a contiguous chunk of at least
    ``min_chunk`` entries. Results do not depend on the partition.
    ``reset_calls`` counts single-entry resets; ``on_reset`` (if given) is
    called with the batch indices reset by each step.
    """

    def __init__(self, env: Environment, num_workers: int | None = None, auto_reset: bool = True,
                 min_chunk: int = 64, on_reset: Callable[[np.ndarray], None] | None = None):
        self.env = env
        self.env_id = getattr(env, "env_id", type(env).__name__)
        self.num_workers = default_num_workers() if num_workers is None else int(num_workers)
        if self.num_workers < 1:
            raise ValueError("num_workers must be >= 1")
        self.auto_reset = auto_reset
        self.min_chunk = max(1, int(min_chunk))
        self.on_reset = on_reset
        self.reset_calls = 0
        self._pool: ThreadPoolExecutor | None = None

    # -- lifecycle ----------------------------------------------------------

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown(wait=True)
            self._pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def _chunks(self, n: int) -> list[tuple[int, int]]:
        workers = min(self.num_workers, max(1, n // self.min_chunk))
        bounds = np.linspace(0, n, workers + 1).astype(int)
        return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]

    def _map(self, fn, chunks):
        if len(chunks) == 1:
            return [fn(*chunks[0])]
        if self._pool is None:
            self._pool = ThreadPoolExecutor(max_workers=self.num_workers, thread_name_prefix="batchenvs")
        return list(self._pool.map(lambda c: fn(*c), chunks))

    # -- batch operations ---------------------------------------------------

    def reset(self, key, batch_size: int) -> BatchSlab:
        """Entry ``i`` is ``env.reset(split(key, B)[i])``."""
        if batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        keys = rng.split(rng.as_key_array(key), batch_size)

        def work(a, b):
            return [self.env.reset(keys[i]) for i in range(a, b)]

        pairs = [p for part in self._map(work, self._chunks(batch_size)) for p in part]
        states = tree.stack([s for s, _ in pairs])
        return BatchSlab(self.env_id, states, stack_timesteps([t for _, t in pairs]))

    def step(self, slab: BatchSlab, actions, active: np.ndarray | None = None) -> tuple[BatchSlab, TimeStep]:
        """Step every entry; with auto-reset, entries emitting LAST restart.

        A restarted entry's timestep keeps LAST with the terminal reward,
        discount and extras, and carries the new episode's first observation.
        Errors name the offending global batch index.
        """
        states = slab.states
        actions = np.asarray(actions)
        n = tree.batch_size(states)
        if actions.shape[:1] != (n,):
            raise InvalidActionError(f"expected {n} actions, got array of shape {actions.shape}")

        def work(a, b):
            part = tree.slice_batch(states, a, b)
            act = None if active is None else np.asarray(active)[a:b]
            try:
                return self.env.step_batch(part, actions[a:b], act)
            except (InvalidActionError, ContractViolationError) as exc:
                idx = None if exc.batch_index is None else exc.batch_index + a
                msg = str(exc).split(": ", 1)[1] if exc.batch_index is not None else str(exc)
                raise type(exc)(msg, idx) from None

        results = self._map(work, self._chunks(n))
        new = tree.concat([r[0] for r in results])
        ts = _concat_timesteps([r[1] for r in results])

        if self.auto_reset:
            ended = np.asarray(ts.step_type) == StepType.LAST
            if active is not None:
                ended &= np.asarray(active, dtype=bool)
            idx = np.flatnonzero(ended)
            if idx.size:
                new, ts = self._reset_entries(new, ts, idx)
        return BatchSlab(slab.env_id, new, ts), ts

    def _reset_entries(self, states, ts: TimeStep, idx: np.ndarray):
        pairs = [self.env.reset(auto_reset_key(states.key[i])) for i in idx]
        self.reset_calls += len(idx)
        if self.on_reset is not None:
            self.on_reset(idx)
        states = tree.scatter(states, idx, tree.stack([s for s, _ in pairs]))
        obs = {}
        for k, v in ts.observation.items():
            v = v.copy()
            v[idx] = np.stack([t.observation[k] for _, t in pairs])
            obs[k] = v
        return states, TimeStep(ts.step_type, ts.reward, ts.discount, obs, ts.extras)

    # -- rollouts -------------------------------------------------------------

    def rollout(self, slab: BatchSlab, policy, num_steps: int, key) -> tuple[BatchSlab, "Trajectory"]:
        """Auto-resetting rollout of ``num_steps`` batched steps.

        ``policy(observation, keys)`` maps a batched observation and ``B`` keys
        to ``B`` actions; step ``t`` uses ``split(fold_in(key, t), B)``.
        """
        key = rng.as_key_array(key)
        b = slab.batch_size
        obs_t, act_t, rew_t, disc_t, type_t = [], [], [], [], []
        for t in range(num_steps):
            obs = slab.timestep.observation
            actions = np.asarray(policy(obs, rng.split(rng.fold_in(key, t), b)))
            slab, ts = self.step(slab, actions)
            obs_t.append(obs)
            act_t.append(actions)
            rew_t.append(ts.reward)
            disc_t.append(ts.discount)
            type_t.append(ts.step_type)
        return slab, Trajectory.from_steps(obs_t, act_t, rew_t, disc_t, type_t, slab.timestep.observation, b)


@dataclass
class Trajectory:
    """Time-major ``(T, B, ...)`` arrays.

    ``observations[t]`` is what the policy saw before ``actions[t]``;
    ``final_observation`` is the observation after the last step.
    """

    observations: dict[str, np.ndarray]
    actions: np.ndarray
    rewards: np.ndarray
    discounts: np.ndarray
    step_types: np.ndarray
    final_observation: dict[str, np.ndarray]

    @property
    def num_steps(self) -> int:
        return self.rewards.shape[0]

    @classmethod
    def from_steps(cls, obs, actions, rewards, discounts, step_types, final_obs, batch_size: int) -> "Trajectory":
        if not rewards:
            empty = np.zeros((0, batch_size))
            return cls({k: v[None][:0] for k, v in final_obs.items()}, np.zeros((0, batch_size), np.int32),
                       empty, empty.copy(), np.zeros((0, batch_size), np.int8), final_obs)
        return cls(
            observations={k: np.stack([o[k] for o in obs]) for k in obs[0]},
            actions=np.stack(actions),
            rewards=np.stack(rewards),
            discounts=np.stack(discounts),
            step_types=np.stack(step_types),
            final_observation=final_obs,
        )


def random_policy(env: Environment):
    """Uniform choice among the valid actions of each entry."""
    return lambda obs, keys: env.random_valid_actions(obs, keys)


def first_valid_policy(env: Environment):
    return lambda obs, keys: env.first_valid_actions(obs)


def rollout(env: Environment, key, policy, num_steps: int, batch_size: int, num_workers: int | None = None):
    """Reset ``batch_size`` entries with ``split(key)[0]`` and roll out with ``split(key)[1]``.

    Returns ``(final_slab, trajectory)``.
    """
    k_reset, k_act = rng.split(rng.as_key_array(key), 2)
    with BatchEngine(env, num_workers=num_workers) as engine:
        slab = engine.reset(k_reset, batch_size)
        return engine.rollout(slab, policy, num_steps, k_act)
