"""Categorical distributions restricted to the valid actions."""

from __future__ import annotations

import numpy as np

from batchenvs import rng
from batchenvs.errors import ContractViolationError


def masked_log_softmax(logits: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Log-probabilities with ``-inf`` on invalid actions."""
    mask = np.asarray(mask, dtype=bool)
    if not np.all(mask.any(axis=-1)):
        raise ContractViolationError("action mask has no valid action")
    z = np.where(mask, logits, -np.inf)
    zmax = z.max(axis=-1, keepdims=True)
    shifted = z - zmax
    lse = np.log(np.sum(np.where(mask, np.exp(np.where(mask, shifted, 0.0)), 0.0), axis=-1, keepdims=True))
    return np.where(mask, shifted - lse, -np.inf)


def masked_entropy(logp: np.ndarray, mask: np.ndarray) -> np.ndarray:
    p = np.where(mask, np.exp(np.where(mask, logp, 0.0)), 0.0)
    return -np.sum(np.where(mask, p * np.where(mask, logp, 0.0), 0.0), axis=-1)


def masked_categorical(logits, mask, key):
    """Sample from softmax(logits) over the valid entries.

    Works on one row (``logits (A,)``, one key) or a batch (``(B, A)``,
    keys ``(B, 2)``). Returns ``(action, log_prob, entropy)``; invalid
    entries have probability exactly 0 and the entropy covers the valid
    support only.
    """
    logits = np.asarray(logits, dtype=np.float64)
    mask = np.asarray(mask, dtype=bool)
    single = logits.ndim == 1
    if single:
        logits, mask = logits[None], mask[None]
        key = rng.as_key_array(key)[None]
    logp = masked_log_softmax(logits, mask)
    probs = np.where(mask, np.exp(np.where(mask, logp, 0.0)), 0.0)
    action = rng.choice_index(rng.as_key_array(key), probs)
    rows = np.arange(logits.shape[0])
    log_prob = logp[rows, action]
    entropy = masked_entropy(logp, mask)
    if single:
        return int(action[0]), float(log_prob[0]), float(entropy[0])
    return action, log_prob, entropy


def masked_greedy(logits, mask) -> np.ndarray:
    return np.argmax(np.where(np.asarray(mask, dtype=bool), logits, -np.inf), axis=-1)
