"""Batched, deterministic reinforcement-learning environments."""

from batchenvs import rng
from batchenvs.api import (
    AutoResetWrapper,
    Environment,
    EnvState,
    StepType,
    TimeStep,
    auto_reset_wrap,
    make,
    registry,
)

__version__ = "0.1.0"

__all__ = [
    "AutoResetWrapper",
    "EnvState",
    "Environment",
    "StepType",
    "TimeStep",
    "auto_reset_wrap",
    "make",
    "registry",
    "rng",
]
