from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any

import numpy as np


class StepType(enum.IntEnum):
    FIRST = 0
    MID = 1
    LAST = 2


@dataclass
class TimeStep:
    """What the agent sees after a reset or step.

    For a single environment ``step_type`` is a :class:`StepType` and
    ``reward``/``discount`` are floats. Batched timesteps hold arrays with a
    leading batch axis in every field, including each observation entry and
    each ``extras`` value.
    """

    step_type: Any
    reward: Any
    discount: Any
    observation: dict[str, np.ndarray]
    extras: dict[str, Any] = field(default_factory=dict)

    def first(self):
        return np.asarray(self.step_type) == StepType.FIRST

    def mid(self):
        return np.asarray(self.step_type) == StepType.MID

    def last(self):
        return np.asarray(self.step_type) == StepType.LAST

    @property
    def batched(self) -> bool:
        return np.ndim(self.step_type) > 0

    def index(self, i: int) -> "TimeStep":
        """Entry ``i`` of a batched timestep, as a single-environment timestep."""
        return TimeStep(
            step_type=StepType(int(self.step_type[i])),
            reward=float(self.reward[i]),
            discount=float(self.discount[i]),
            observation={k: v[i] for k, v in self.observation.items()},
            extras={k: float(v[i]) for k, v in self.extras.items()},
        )


def stack_timesteps(steps: list[TimeStep]) -> TimeStep:
    """Stack single-environment timesteps into a batched one."""
    return TimeStep(
        step_type=np.array([int(s.step_type) for s in steps], dtype=np.int8),
        reward=np.array([s.reward for s in steps], dtype=np.float64),
        discount=np.array([s.discount for s in steps], dtype=np.float64),
        observation={k: np.stack([s.observation[k] for s in steps]) for k in steps[0].observation},
        extras={k: np.array([s.extras[k] for s in steps], dtype=np.float64) for k in steps[0].extras},
    )


def timesteps_equal(a: TimeStep, b: TimeStep) -> bool:
    """Bitwise equality of two timesteps (dtypes included)."""
    if int(np.sum(np.asarray(a.step_type) != np.asarray(b.step_type))):
        return False
    for x, y in ((a.reward, b.reward), (a.discount, b.discount)):
        if not _arrays_equal(np.asarray(x), np.asarray(y)):
            return False
    if a.observation.keys() != b.observation.keys() or a.extras.keys() != b.extras.keys():
        return False
    for k in a.observation:
        if not _arrays_equal(np.asarray(a.observation[k]), np.asarray(b.observation[k])):
            return False
    for k in a.extras:
        if not _arrays_equal(np.asarray(a.extras[k]), np.asarray(b.extras[k])):
            return False
    return True


def _arrays_equal(x: np.ndarray, y: np.ndarray) -> bool:
    if x.shape != y.shape:
        return False
    if x.dtype.kind == "f" or y.dtype.kind == "f":
        # bit-level comparison so that -0.0 != 0.0 and NaN == NaN are honoured
        return x.astype(np.float64).tobytes() == y.astype(np.float64).tobytes()
    return bool(np.array_equal(x, y))
