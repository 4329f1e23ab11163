"""Versioned registry of environment configurations."""

from __future__ import annotations

import difflib
import re
from dataclasses import dataclass, field
from typing import Any, Callable

from batchenvs.errors import EnvNotFoundError, RegistryConflictError

_ID_RE = re.compile(r"^(?P<name>[A-Za-z0-9][A-Za-z0-9_\-]*?)-v(?P<version>\d+)$")


def parse_env_id(env_id: str) -> tuple[str, int]:
    """Split ``"Name-vN"`` into ``("Name", N)``."""
    m = _ID_RE.match(env_id)
    if not m:
        raise ValueError(f"malformed environment id {env_id!r}; expected '<Name>-v<N>'")
    return m.group("name"), int(m.group("version"))


@dataclass(frozen=True)
class EnvDescriptor:
    id: str
    builder: Callable[..., Any]
    default_params: dict[str, Any] = field(default_factory=dict)
    category: str = ""
    objective: str = ""

    def __post_init__(self):
        parse_env_id(self.id)


class Registry:
    def __init__(self):
        self._entries: dict[str, EnvDescriptor] = {}

    def register(self, desc: EnvDescriptor) -> None:
        if desc.id in self._entries:
            raise RegistryConflictError(f"environment {desc.id!r} is already registered")
        self._entries[desc.id] = desc

    def get(self, env_id: str) -> EnvDescriptor:
        try:
            return self._entries[env_id]
        except KeyError:
            close = difflib.get_close_matches(env_id, list(self._entries), n=3, cutoff=0.5)
            raise EnvNotFoundError(env_id, close) from None

    def make(self, env_id: str, **overrides):
        desc = self.get(env_id)
        params = {**desc.default_params, **overrides}
        env = desc.builder(**params)
        env.env_id = env_id
        return env

    def ids(self) -> list[str]:
        return list(self._entries)

    def __contains__(self, env_id: str) -> bool:
        return env_id in self._entries

    def __iter__(self):
        return iter(self._entries.values())

    def __len__(self) -> int:
        return len(self._entries)


registry = Registry()


def register(desc: EnvDescriptor | None = None, **kwargs) -> None:
    """Register on the global registry: ``register(EnvDescriptor(...))`` or keywords."""
    registry.register(desc if desc is not None else EnvDescriptor(**kwargs))


def make(env_id: str, **overrides):
    """Build a registered environment, overriding any default parameter by name."""
    from batchenvs import envs  # noqa: F401  (ensures the standard ids are registered)

    return registry.make(env_id, **overrides)
