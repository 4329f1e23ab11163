"""Declarative descriptions of observation and action structure.

Leaves are :class:`ArraySpec`, :class:`BoundedArraySpec`,
:class:`DiscreteArraySpec` and :class:`MultiDiscreteArraySpec`; a
:class:`CompositeSpec` nests named children and matches a mapping.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from typing import Any

import numpy as np


@dataclass(frozen=True)
class SpecCheck:
    """Outcome of :meth:`Spec.validate`; truthy when the value conforms."""

    ok: bool
    path: str = ""
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


_PASS = SpecCheck(True)


def _fail(path: str, reason: str) -> SpecCheck:
    return SpecCheck(False, path or "<root>", reason)


def _kind_compatible(value, dtype: np.dtype) -> bool:
    # numpy values must carry the exact dtype; python scalars/lists only need a
    # matching kind (int for integer specs, float or int for float specs)
    if isinstance(value, (np.ndarray, np.generic)):
        return value.dtype == dtype
    arr = np.asarray(value)
    if dtype.kind == "b":
        return arr.dtype.kind == "b"
    if dtype.kind in "iu":
        return arr.dtype.kind in "iu"
    if dtype.kind == "f":
        return arr.dtype.kind in "iuf"
    return arr.dtype == dtype


class Spec:
    name: str = ""

    def validate(self, value: Any, path: str = "") -> SpecCheck:
        raise NotImplementedError

    def generate_value(self) -> Any:
        raise NotImplementedError


@dataclass(frozen=True)
class ArraySpec(Spec):
    shape: tuple[int, ...]
    dtype: Any
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "shape", tuple(int(s) for s in self.shape))
        object.__setattr__(self, "dtype", np.dtype(self.dtype))

    def _check_array(self, value, path: str) -> tuple[SpecCheck, np.ndarray | None]:
        if isinstance(value, Mapping):
            return _fail(path, "expected an array, got a mapping"), None
        arr = np.asarray(value)
        if arr.shape != self.shape:
            return _fail(path, f"shape {arr.shape} != expected {self.shape}"), None
        if not _kind_compatible(value, self.dtype):
            return _fail(path, f"dtype {arr.dtype} incompatible with {self.dtype}"), None
        return _PASS, arr

    def validate(self, value, path: str = "") -> SpecCheck:
        check, _ = self._check_array(value, path)
        return check

    def generate_value(self) -> np.ndarray:
        return np.zeros(self.shape, dtype=self.dtype)


@dataclass(frozen=True)
class BoundedArraySpec(ArraySpec):
    minimum: Any = None
    maximum: Any = None

    def __init__(self, shape, dtype, minimum, maximum, name: str = ""):
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "dtype", dtype)
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "minimum", minimum)
        object.__setattr__(self, "maximum", maximum)
        self.__post_init__()

    def __post_init__(self):
        super().__post_init__()
        lo = np.broadcast_to(np.asarray(self.minimum, dtype=self.dtype), self.shape)
        hi = np.broadcast_to(np.asarray(self.maximum, dtype=self.dtype), self.shape)
        if np.any(lo > hi):
            raise ValueError(f"spec {self.name!r}: minimum exceeds maximum")
        object.__setattr__(self, "minimum", lo)
        object.__setattr__(self, "maximum", hi)

    def validate(self, value, path: str = "") -> SpecCheck:
        check, arr = self._check_array(value, path)
        if not check:
            return check
        if np.any(np.isnan(arr)) if arr.dtype.kind == "f" else False:
            return _fail(path, "value contains NaN")
        if np.any(arr < self.minimum):
            return _fail(path, "value below minimum")
        if np.any(arr > self.maximum):
            return _fail(path, "value above maximum")
        return _PASS

    def generate_value(self) -> np.ndarray:
        return np.array(self.minimum, dtype=self.dtype, copy=True)

    def __eq__(self, other):
        return (
            type(other) is type(self)
            and self.shape == other.shape
            and self.dtype == other.dtype
            and np.array_equal(self.minimum, other.minimum)
            and np.array_equal(self.maximum, other.maximum)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class DiscreteArraySpec(BoundedArraySpec):
    """Integers in ``[0, num_values)``; scalar shape by default."""

    num_values: int = 1

    def __init__(self, num_values: int, dtype=np.int32, shape=(), name: str = ""):
        if int(num_values) < 1:
            raise ValueError("num_values must be >= 1")
        object.__setattr__(self, "num_values", int(num_values))
        object.__setattr__(self, "shape", tuple(shape))
        object.__setattr__(self, "dtype", np.dtype(dtype))
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "minimum", 0)
        object.__setattr__(self, "maximum", int(num_values) - 1)
        BoundedArraySpec.__post_init__(self)

    def validate(self, value, path: str = "") -> SpecCheck:
        check, arr = self._check_array(value, path)
        if not check:
            return check
        if np.any(arr < 0) or np.any(arr >= self.num_values):
            return _fail(path, f"out of range [0, {self.num_values})")
        return _PASS

    def generate_value(self):
        return np.zeros(self.shape, dtype=self.dtype)


@dataclass(frozen=True, eq=False)
class MultiDiscreteArraySpec(BoundedArraySpec):
    """Elementwise discrete values: entry ``i`` lies in ``[0, num_values[i])``."""

    num_values: Any = None

    def __init__(self, num_values, dtype=np.int32, name: str = ""):
        nv = np.asarray(num_values, dtype=np.int64)
        if np.any(nv < 1):
            raise ValueError("every num_values entry must be >= 1")
        object.__setattr__(self, "num_values", nv)
        object.__setattr__(self, "shape", nv.shape)
        object.__setattr__(self, "dtype", np.dtype(dtype))
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "minimum", np.zeros_like(nv))
        object.__setattr__(self, "maximum", nv - 1)
        BoundedArraySpec.__post_init__(self)

    def validate(self, value, path: str = "") -> SpecCheck:
        check, arr = self._check_array(value, path)
        if not check:
            return check
        if np.any(arr < 0) or np.any(arr >= self.num_values):
            return _fail(path, f"out of range {self.num_values.tolist()}")
        return _PASS


class CompositeSpec(Spec):
    """Ordered named children; validates mappings with exactly those keys."""

    def __init__(self, children: Mapping[str, Spec] | None = None, name: str = "", **kwargs: Spec):
        merged = dict(children or {})
        for k, v in kwargs.items():
            if k in merged:
                raise ValueError(f"duplicate child name {k!r}")
            merged[k] = v
        self.children: dict[str, Spec] = merged
        self.name = name

    def __getitem__(self, key: str) -> Spec:
        return self.children[key]

    def __iter__(self):
        return iter(self.children)

    def __len__(self) -> int:
        return len(self.children)

    def validate(self, value, path: str = "") -> SpecCheck:
        if not isinstance(value, Mapping):
            return _fail(path, f"expected a mapping, got {type(value).__name__}")
        for key, child in self.children.items():
            child_path = f"{path}.{key}" if path else key
            if key not in value:
                return _fail(child_path, "missing child")
            check = child.validate(value[key], child_path)
            if not check:
                return check
        extra = [k for k in value if k not in self.children]
        if extra:
            return _fail(f"{path}.{extra[0]}" if path else str(extra[0]), "unexpected child")
        return _PASS

    def generate_value(self) -> dict[str, Any]:
        return {k: child.generate_value() for k, child in self.children.items()}

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={v!r}" for k, v in self.children.items())
        return f"CompositeSpec({inner})"
