"""Training configuration and its flat ``key = value`` file format.

Lines are ``key = value``; ``#`` starts a comment. Keys prefixed with
``env.`` are passed to the environment constructor, e.g. ``env.num_rows = 6``.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any


class ConfigError(ValueError):
    pass


@dataclass
class TrainConfig:
    env_id: str = "Maze-v0"
    env_params: dict[str, Any] = field(default_factory=dict)
    encoding: str = ""  # empty: the environment's default encoding
    batch_size: int = 64
    rollout_length: int = 10
    gamma: float = 0.99
    lam: float = 0.95
    learning_rate: float = 0.01
    c_pg: float = 1.0
    c_v: float = 0.5
    c_ent: float = 0.01
    epochs: int = 10
    learner_steps_per_epoch: int = 100
    eval_episodes: int = 256
    seed: int = 0
    hidden: tuple[int, ...] = (128, 128)
    shared_torso: bool = False
    max_grad_norm: float = 0.0  # 0 disables clipping

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        checks = [
            ("gamma", 0.0 <= self.gamma <= 1.0, "must lie in [0, 1]"),
            ("lam", 0.0 <= self.lam <= 1.0, "must lie in [0, 1]"),
            ("learning_rate", self.learning_rate > 0, "must be positive"),
            ("c_pg", self.c_pg >= 0, "must be >= 0"),
            ("c_v", self.c_v >= 0, "must be >= 0"),
            ("c_ent", self.c_ent >= 0, "must be >= 0"),
            ("batch_size", self.batch_size >= 1, "must be >= 1"),
            ("rollout_length", self.rollout_length >= 1, "must be >= 1"),
            ("epochs", self.epochs >= 0, "must be >= 0"),
            ("learner_steps_per_epoch", self.learner_steps_per_epoch >= 0, "must be >= 0"),
            ("eval_episodes", self.eval_episodes >= 1, "must be >= 1"),
            ("hidden", all(h >= 1 for h in self.hidden), "widths must be >= 1"),
            ("max_grad_norm", self.max_grad_norm >= 0, "must be >= 0"),
        ]
        for name, ok, why in checks:
            if not ok:
                raise ConfigError(f"{name} {why} (got {getattr(self, name)!r})")


def parse_scalar(text: str) -> Any:
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def _convert(name: str, raw: str, ftype) -> Any:
    try:
        if name == "hidden":
            return tuple(int(x) for x in raw.replace(" ", "").split(",") if x)
        if ftype in ("bool", bool):
            low = raw.lower()
            if low not in ("true", "false", "1", "0"):
                raise ValueError(raw)
            return low in ("true", "1")
        if ftype in ("int", int):
            return int(raw)
        if ftype in ("float", float):
            return float(raw)
        return raw
    except ValueError:
        raise ConfigError(f"{name}: cannot parse {raw!r}") from None


def parse_config(text: str) -> TrainConfig:
    types = {f.name: f.type for f in dataclasses.fields(TrainConfig)}
    values: dict[str, Any] = {}
    env_params: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key.startswith("env."):
            env_params[key[4:]] = parse_scalar(raw)
        elif key in types and key != "env_params":
            values[key] = _convert(key, raw, types[key])
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
    return TrainConfig(env_params=env_params, **values)


def load_config(path) -> TrainConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


def format_config(cfg: TrainConfig) -> str:
    lines = []
    for f in dataclasses.fields(cfg):
        v = getattr(cfg, f.name)
        if f.name == "env_params":
            continue
        if f.name == "hidden":
            v = ",".join(str(h) for h in v)
        elif isinstance(v, bool):
            v = "true" if v else "false"
        lines.append(f"{f.name} = {v}")
    lines += [f"env.{k} = {v}" for k, v in cfg.env_params.items()]
    return "\n".join(lines) + "\n"
