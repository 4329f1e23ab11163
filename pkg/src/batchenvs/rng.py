"""Splittable counter-based randomness built on Threefry-2x64-20.

A key is a pair of 64-bit words. Every derived quantity (child keys, folded
keys, random bits) is one Threefry block evaluated at a counter that encodes
the request, so results depend only on the key and the arguments, never on
call order or thread layout.

All functions accept either an :class:`RngKey` or a ``uint64`` array whose
last axis has length 2. The array form broadcasts over leading axes, which is
how batched environments draw per-entry randomness in one call.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

MASK64 = (1 << 64) - 1

_ROTATIONS = (16, 42, 12, 31, 16, 32, 24, 21)
_PARITY = np.uint64(0x1BD11BDAA9FC1A22)

# Second counter word tags the kind of request so split, fold_in and bit
# streams never evaluate the same block.
_TAG_SPLIT = 0x53504C4954000000
_TAG_FOLD = 0x464F4C4400000000
_TAG_BITS = 0x4249545300000000

_U64 = np.uint64


@dataclass(frozen=True)
class RngKey:
    """Opaque 128-bit key with value semantics."""

    hi: int
    lo: int

    def __post_init__(self):
        if not (0 <= self.hi <= MASK64 and 0 <= self.lo <= MASK64):
            raise ValueError("key words must be unsigned 64-bit integers")

    def to_array(self) -> np.ndarray:
        return np.array([self.hi, self.lo], dtype=np.uint64)

    @classmethod
    def from_array(cls, arr) -> "RngKey":
        arr = np.asarray(arr, dtype=np.uint64)
        if arr.shape != (2,):
            raise ValueError(f"expected key array of shape (2,), got {arr.shape}")
        return cls(int(arr[0]), int(arr[1]))

    def __repr__(self) -> str:
        return f"RngKey(0x{self.hi:016x}, 0x{self.lo:016x})"


KeyLike = Union[RngKey, np.ndarray]


def key(seed: int) -> RngKey:
    """Build a key from an integer seed (low 128 bits are used)."""
    seed = int(seed) & ((1 << 128) - 1)
    return RngKey(seed >> 64, seed & MASK64)


def as_key_array(k: KeyLike) -> np.ndarray:
    if isinstance(k, RngKey):
        return k.to_array()
    arr = np.asarray(k)
    if arr.dtype != np.uint64 or arr.shape[-1:] != (2,):
        raise TypeError("key arrays must be uint64 with a trailing axis of size 2")
    return arr


def _rotl(x: np.ndarray, r: int) -> np.ndarray:
    return (x << _U64(r)) | (x >> _U64(64 - r))


_PARITY_INT = int(_PARITY)
_SMALL = 16  # below this many blocks plain integer arithmetic beats numpy call overhead


def _threefry_int(k0: int, k1: int, c0: int, c1: int) -> tuple[int, int]:
    ks = (k0, k1, k0 ^ k1 ^ _PARITY_INT)
    x0 = (c0 + k0) & MASK64
    x1 = (c1 + k1) & MASK64
    for r in range(20):
        x0 = (x0 + x1) & MASK64
        rot = _ROTATIONS[r % 8]
        x1 = (((x1 << rot) | (x1 >> (64 - rot))) & MASK64) ^ x0
        if r % 4 == 3:
            s = r // 4 + 1
            x0 = (x0 + ks[s % 3]) & MASK64
            x1 = (x1 + ks[(s + 1) % 3] + s) & MASK64
    return x0, x1


def threefry2x64(k0, k1, c0, c1) -> tuple[np.ndarray, np.ndarray]:
    """Threefry-2x64 with 20 rounds; all inputs broadcast as uint64 arrays."""
    k0 = np.atleast_1d(np.asarray(k0, dtype=np.uint64))
    k1 = np.atleast_1d(np.asarray(k1, dtype=np.uint64))
    c0 = np.atleast_1d(np.asarray(c0, dtype=np.uint64))
    c1 = np.atleast_1d(np.asarray(c1, dtype=np.uint64))
    shape = np.broadcast_shapes(k0.shape, k1.shape, c0.shape, c1.shape)
    size = int(np.prod(shape))
    if size <= _SMALL:
        args = [a.ravel().tolist() for a in np.broadcast_arrays(k0, k1, c0, c1)]
        out = [_threefry_int(*vals) for vals in zip(*args)]
        x0 = np.array([o[0] for o in out], dtype=np.uint64).reshape(shape)
        x1 = np.array([o[1] for o in out], dtype=np.uint64).reshape(shape)
        return x0, x1
    ks = (k0, k1, k0 ^ k1 ^ _PARITY)
    x0 = c0 + k0
    x1 = c1 + k1
    for r in range(20):
        x0 = x0 + x1
        x1 = _rotl(x1, _ROTATIONS[r % 8]) ^ x0
        if r % 4 == 3:
            s = r // 4 + 1
            x0 = x0 + ks[s % 3]
            x1 = x1 + ks[(s + 1) % 3] + _U64(s)
    return x0, x1


def _block(keys: np.ndarray, c0, tag: int) -> np.ndarray:
    """Evaluate blocks for ``keys[..., None, :]`` at counters ``(c0, tag)``.

    Returns an array of shape ``keys.shape[:-1] + c0.shape + (2,)``.
    """
    c0 = np.asarray(c0, dtype=np.uint64)
    lead = keys.shape[:-1]
    k0 = keys[..., 0].reshape(lead + (1,) * c0.ndim)
    k1 = keys[..., 1].reshape(lead + (1,) * c0.ndim)
    shape = lead + c0.shape
    x0, x1 = threefry2x64(k0, k1, c0, _U64(tag))
    out = np.empty(shape + (2,), dtype=np.uint64)
    out[..., 0] = x0.reshape(shape)
    out[..., 1] = x1.reshape(shape)
    return out


def _wrap(arr: np.ndarray, like: KeyLike):
    if isinstance(like, RngKey):
        return RngKey.from_array(arr)
    return arr


def split(k: KeyLike, n: int = 2):
    """Derive ``n`` child keys.

    For an :class:`RngKey` returns a list of keys; for a key array of shape
    ``(..., 2)`` returns an array of shape ``(..., n, 2)``.
    """
    if n < 1:
        raise ValueError(f"split needs n >= 1, got {n}")
    arr = as_key_array(k)
    out = _block(arr, np.arange(n, dtype=np.uint64), _TAG_SPLIT)
    if isinstance(k, RngKey):
        return [RngKey.from_array(row) for row in out]
    return out


def fold_in(k: KeyLike, data) -> KeyLike:
    """Mix an integer into a key. ``data`` is taken modulo 2**64."""
    arr = as_key_array(k)
    if isinstance(data, (int, np.integer)):
        d = np.uint64(int(data) & MASK64)
    else:
        d = np.asarray(data).astype(np.uint64)
    lead = arr.shape[:-1]
    x0, x1 = threefry2x64(arr[..., 0], arr[..., 1], d, _U64(_TAG_FOLD))
    out = np.stack([x0.reshape(np.broadcast_shapes(lead, np.shape(d))),
                    x1.reshape(np.broadcast_shapes(lead, np.shape(d)))], axis=-1)
    return _wrap(out, k)


def bits(k: KeyLike, count: int) -> np.ndarray:
    """``count`` raw 64-bit words per key: shape ``(..., count)``."""
    if count < 0:
        raise ValueError("count must be non-negative")
    arr = as_key_array(k)
    nblocks = (count + 1) // 2
    words = _block(arr, np.arange(nblocks, dtype=np.uint64), _TAG_BITS)
    words = words.reshape(arr.shape[:-1] + (2 * nblocks,))
    return words[..., :count]


def _unit(words: np.ndarray) -> np.ndarray:
    # top 53 bits -> double in [0, 1)
    return (words >> _U64(11)).astype(np.float64) * (1.0 / (1 << 53))


def uniform(k: KeyLike, count: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    """``count`` doubles in ``[lo, hi)`` per key."""
    if not lo < hi:
        raise ValueError(f"uniform needs lo < hi, got [{lo}, {hi})")
    u = _unit(bits(k, count))
    if lo == 0.0 and hi == 1.0:
        return u
    out = lo + (hi - lo) * u
    return np.minimum(out, np.nextafter(hi, lo))


def randint(k: KeyLike, lo: int, hi_exclusive: int, count: int | None = None):
    """Integers in ``[lo, hi_exclusive)`` by modulo reduction of a 64-bit draw.

    The modulo bias is below ``span / 2**64``, i.e. negligible for spans
    under ``2**32``. With ``count=None`` a scalar key yields a Python int.
    """
    span = int(hi_exclusive) - int(lo)
    if span <= 0:
        raise ValueError(f"randint needs a non-empty range, got [{lo}, {hi_exclusive})")
    if span > MASK64:
        raise ValueError("range wider than 2**64 is not supported")
    n = 1 if count is None else count
    w = bits(k, n) % _U64(span)
    vals = w.astype(np.int64) + np.int64(lo) if span < (1 << 63) else None
    if vals is None:
        vals = np.vectorize(lambda v: int(v) + int(lo), otypes=[object])(w)
    if count is None:
        vals = vals[..., 0]
        if vals.ndim == 0:
            return int(vals)
    return vals


def permutation(k: KeyLike, n: int) -> np.ndarray:
    """A uniformly random permutation of ``0..n-1`` per key (argsort of draws)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return np.argsort(bits(k, n), axis=-1, kind="stable").astype(np.int64)


def choice_index(k: KeyLike, weights: np.ndarray) -> np.ndarray:
    """Sample an index with probability proportional to non-negative ``weights``.

    ``weights`` has shape ``(..., m)`` matching the leading key axes; entries
    with zero weight are never selected.
    """
    w = np.asarray(weights, dtype=np.float64)
    cum = np.cumsum(w, axis=-1)
    total = cum[..., -1:]
    u = uniform(k, 1)[..., :1] * total
    idx = np.sum(cum <= u, axis=-1)
    # guard the u == total rounding edge: fall back to the last positive weight
    last_pos = w.shape[-1] - 1 - np.argmax((w > 0)[..., ::-1], axis=-1)
    return np.minimum(idx, last_pos)
