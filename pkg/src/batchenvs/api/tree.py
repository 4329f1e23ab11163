"""Field-wise helpers for dataclass states whose fields are numpy arrays.

A batched state is the same dataclass with a leading batch axis on every
field (structure of arrays).
"""

from __future__ import annotations

import dataclasses
from typing import Callable, Sequence, TypeVar

import numpy as np

T = TypeVar("T")


def _fields(obj) -> list[str]:
    return [f.name for f in dataclasses.fields(obj)]


def tree_map(fn: Callable, first: T, *rest: T) -> T:
    values = {}
    for name in _fields(first):
        values[name] = fn(getattr(first, name), *(getattr(r, name) for r in rest))
    return type(first)(**values)


def batch_of_one(state: T) -> T:
    return tree_map(lambda x: np.asarray(x)[None], state)


def unbatch(states: T, i: int) -> T:
    """Entry ``i`` of a batched state; scalar fields become numpy scalars."""
    return tree_map(lambda x: x[i].copy() if isinstance(x[i], np.ndarray) else x[i], states)


def stack(states: Sequence[T]) -> T:
    first = states[0]
    values = {n: np.stack([np.asarray(getattr(s, n)) for s in states]) for n in _fields(first)}
    return type(first)(**values)


def concat(batches: Sequence[T]) -> T:
    if len(batches) == 1:
        return batches[0]
    first = batches[0]
    values = {n: np.concatenate([getattr(b, n) for b in batches]) for n in _fields(first)}
    return type(first)(**values)


def slice_batch(states: T, start: int, stop: int) -> T:
    return tree_map(lambda x: x[start:stop], states)


def take(states: T, idx) -> T:
    return tree_map(lambda x: x[idx], states)


def select(mask: np.ndarray, on_true: T, on_false: T) -> T:
    """Per-entry choice between two batched states."""

    def pick(a, b):
        m = mask.reshape(mask.shape + (1,) * (a.ndim - 1))
        return np.where(m, a, b)

    return tree_map(pick, on_true, on_false)


def scatter(states: T, idx, updates: T) -> T:
    """Copy of ``states`` with entries ``idx`` replaced by ``updates``."""

    def put(a, u):
        out = a.copy()
        out[idx] = u
        return out

    return tree_map(put, states, updates)


def batch_size(states) -> int:
    return int(np.shape(getattr(states, _fields(states)[0]))[0])


def states_equal(a, b) -> bool:
    """Bitwise equality, dtypes included."""
    if type(a) is not type(b):
        return False
    for name in _fields(a):
        x, y = np.asarray(getattr(a, name)), np.asarray(getattr(b, name))
        if x.dtype != y.dtype or x.shape != y.shape or x.tobytes() != y.tobytes():
            return False
    return True
