from __future__ import annotations

import numpy as np

from batchenvs import rng
from batchenvs.api.env import Environment
from batchenvs.api.types import TimeStep


def auto_reset_key(state_key: np.ndarray) -> np.ndarray:
    """Key used to restart an episode that just ended in a state with ``state_key``.

    Shared by :class:`AutoResetWrapper` and the batch engine so both restart
    episodes identically.
    """
    return rng.split(np.asarray(state_key, dtype=np.uint64), 2)[1]


class AutoResetWrapper:
    """Restart episodes as soon as they end.

    When the inner step emits LAST the wrapper resets with a key split from
    the terminal state's key. The returned timestep keeps LAST, the terminal
    reward, discount and extras, but carries the fresh episode's first
    observation; the returned state is the fresh state, so the next call
    continues the new episode.
    """

    def __init__(self, env: Environment):
        self.env = env
        self.reset_calls = 0

    def __getattr__(self, name):
        return getattr(self.env, name)

    @property
    def unwrapped(self) -> Environment:
        return self.env

    def reset(self, key):
        return self.env.reset(key)

    def step(self, state, action):
        state, ts = self.env.step(state, action)
        if ts.last():
            self.reset_calls += 1
            state, first = self.env.reset(auto_reset_key(state.key))
            ts = TimeStep(ts.step_type, ts.reward, ts.discount, first.observation, ts.extras)
        return state, ts

    def __repr__(self) -> str:
        return f"AutoResetWrapper({self.env!r})"


def auto_reset_wrap(env: Environment) -> AutoResetWrapper:
    return AutoResetWrapper(env)
