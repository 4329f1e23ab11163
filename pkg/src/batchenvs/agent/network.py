"""Dense policy/value networks with a hand-written backward pass.

Parameters are three groups of ``(W, b)`` layers: an optional shared torso,
a policy branch ending in one logit per action and a value branch ending in
one unit. Hidden layers use ReLU; the last layer of each branch is linear.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from batchenvs import rng

GROUPS = ("torso", "policy", "value")


@dataclass
class MlpParams:
    torso: list[tuple[np.ndarray, np.ndarray]] = field(default_factory=list)
    policy: list[tuple[np.ndarray, np.ndarray]] = field(default_factory=list)
    value: list[tuple[np.ndarray, np.ndarray]] = field(default_factory=list)

    @property
    def shared(self) -> bool:
        return bool(self.torso)

    @property
    def input_dim(self) -> int:
        first = (self.torso or self.policy)[0][0]
        return first.shape[0]

    @property
    def num_actions(self) -> int:
        return self.policy[-1][0].shape[1]

    def arrays(self) -> list[np.ndarray]:
        """All arrays in a fixed order (group, layer, weight then bias)."""
        return [a for g in GROUPS for layer in getattr(self, g) for a in layer]

    def map(self, fn) -> "MlpParams":
        return MlpParams(**{g: [(fn(w), fn(b)) for w, b in getattr(self, g)] for g in GROUPS})

    def combine(self, other: "MlpParams", fn) -> "MlpParams":
        return MlpParams(**{
            g: [(fn(w, w2), fn(b, b2)) for (w, b), (w2, b2) in zip(getattr(self, g), getattr(other, g))]
            for g in GROUPS
        })

    def copy(self) -> "MlpParams":
        return self.map(np.copy)

    def flat(self) -> np.ndarray:
        return np.concatenate([a.reshape(-1) for a in self.arrays()])

    def with_flat(self, vector: np.ndarray) -> "MlpParams":
        out, pos = {}, 0
        for g in GROUPS:
            layers = []
            for w, b in getattr(self, g):
                w2 = vector[pos: pos + w.size].reshape(w.shape)
                pos += w.size
                b2 = vector[pos: pos + b.size].reshape(b.shape)
                pos += b.size
                layers.append((w2.copy(), b2.copy()))
            out[g] = layers
        return MlpParams(**out)

    def equals(self, other: "MlpParams") -> bool:
        a, b = self.arrays(), other.arrays()
        return len(a) == len(b) and all(x.shape == y.shape and x.tobytes() == y.tobytes() for x, y in zip(a, b))


def _init_layer(key, fan_in: int, fan_out: int, scale: float) -> tuple[np.ndarray, np.ndarray]:
    bound = scale * np.sqrt(6.0 / (fan_in + fan_out))
    w = rng.uniform(key, fan_in * fan_out, -bound, bound).reshape(fan_in, fan_out)
    return w, np.zeros(fan_out)


def init_mlp(key, input_dim: int, num_actions: int, hidden=(128, 128), shared: bool = False) -> MlpParams:
    """Glorot-uniform weights and zero biases."""
    hidden = list(hidden)
    keys = iter(rng.split(rng.as_key_array(key), 3 * (len(hidden) + 1)))

    def branch(dims, last_scale):
        layers = []
        for i, (a, b) in enumerate(zip(dims[:-1], dims[1:])):
            scale = last_scale if i == len(dims) - 2 else 1.0
            layers.append(_init_layer(next(keys), a, b, scale))
        return layers

    if shared and hidden:
        torso = branch([input_dim] + hidden, 1.0)
        return MlpParams(torso, branch([hidden[-1], num_actions], 1.0), branch([hidden[-1], 1], 1.0))
    return MlpParams([], branch([input_dim] + hidden + [num_actions], 1.0), branch([input_dim] + hidden + [1], 1.0))


def _dense(layers, x, relu_last: bool, cache: list | None):
    h = x
    for i, (w, b) in enumerate(layers):
        z = h @ w + b
        last = i == len(layers) - 1
        out = np.maximum(z, 0.0) if (relu_last or not last) else z
        if cache is not None:
            cache.append((h, z, relu_last or not last))
        h = out
    return h


def mlp_forward(params: MlpParams, x: np.ndarray, cache: dict | None = None) -> tuple[np.ndarray, np.ndarray]:
    """``(logits (B, A), values (B,))`` for encoded observations ``x (B, D)``."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != params.input_dim:
        raise ValueError(f"expected input of shape (B, {params.input_dim}), got {x.shape}")
    caches = {g: [] for g in GROUPS} if cache is not None else None
    h = _dense(params.torso, x, True, None if caches is None else caches["torso"])
    logits = _dense(params.policy, h, False, None if caches is None else caches["policy"])
    values = _dense(params.value, h, False, None if caches is None else caches["value"])[:, 0]
    if cache is not None:
        cache.update(caches)
    return logits, values


def _dense_backward(layers, layer_cache, grad_out):
    grads = [None] * len(layers)
    g = grad_out
    for i in range(len(layers) - 1, -1, -1):
        w, _ = layers[i]
        h_in, z, relu = layer_cache[i]
        if relu:
            g = g * (z > 0)
        grads[i] = (h_in.T @ g, g.sum(axis=0))
        g = g @ w.T
    return grads, g


def mlp_backward(params: MlpParams, cache: dict, d_logits: np.ndarray, d_values: np.ndarray) -> MlpParams:
    """Parameter gradients given loss gradients w.r.t. the logits and values."""
    gp, dh_p = _dense_backward(params.policy, cache["policy"], d_logits)
    gv, dh_v = _dense_backward(params.value, cache["value"], d_values[:, None])
    gt = []
    if params.torso:
        gt, _ = _dense_backward(params.torso, cache["torso"], dh_p + dh_v)
    return MlpParams(gt, gp, gv)
