from batchenvs.api.env import Environment, EnvState
from batchenvs.api.registry import EnvDescriptor, Registry, make, register, registry
from batchenvs.api.specs import (
    ArraySpec,
    BoundedArraySpec,
    CompositeSpec,
    DiscreteArraySpec,
    MultiDiscreteArraySpec,
    Spec,
    SpecCheck,
)
from batchenvs.api.types import StepType, TimeStep
from batchenvs.api.wrappers import AutoResetWrapper, auto_reset_wrap

__all__ = [
    "ArraySpec",
    "AutoResetWrapper",
    "BoundedArraySpec",
    "CompositeSpec",
    "DiscreteArraySpec",
    "EnvDescriptor",
    "EnvState",
    "Environment",
    "MultiDiscreteArraySpec",
    "Registry",
    "Spec",
    "SpecCheck",
    "StepType",
    "TimeStep",
    "auto_reset_wrap",
    "make",
    "register",
    "registry",
]
