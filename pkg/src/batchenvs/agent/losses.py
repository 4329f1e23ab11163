"""Advantage estimation and the three-term actor-critic loss with exact gradients."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from batchenvs.agent.distributions import masked_entropy, masked_log_softmax
from batchenvs.agent.network import MlpParams, mlp_backward, mlp_forward


def compute_advantages(rewards, discounts, values, bootstrap_value, gamma: float, lam: float):
    """Generalised advantage estimates over time-major ``(n, B)`` arrays.

    ``discounts`` are the per-step continuation flags ``d_t`` (0 or 1):
    ``delta_t = r_t + gamma * d_t * V_{t+1} - V_t`` and
    ``A_t = delta_t + gamma * lam * d_t * A_{t+1}``. Returns
    ``(advantages, value_targets = advantages + values)``.
    """
    r = np.asarray(rewards, dtype=np.float64)
    d = np.asarray(discounts, dtype=np.float64)
    v = np.asarray(values, dtype=np.float64)
    boot = np.asarray(bootstrap_value, dtype=np.float64)
    if not (r.shape == d.shape == v.shape) or boot.shape != r.shape[1:]:
        raise ValueError(f"shape mismatch: rewards {r.shape}, discounts {d.shape}, values {v.shape}, "
                         f"bootstrap {boot.shape}")
    adv = np.zeros_like(r)
    next_v = boot
    next_a = np.zeros_like(boot)
    for t in range(r.shape[0] - 1, -1, -1):
        delta = r[t] + gamma * d[t] * next_v - v[t]
        next_a = delta + gamma * lam * d[t] * next_a
        adv[t] = next_a
        next_v = v[t]
    return adv, adv + v


@dataclass
class LossBatch:
    """Flattened training batch; advantages and targets are constants."""

    inputs: np.ndarray  # (N, D)
    actions: np.ndarray  # (N,)
    masks: np.ndarray  # (N, A)
    advantages: np.ndarray  # (N,)
    targets: np.ndarray  # (N,)


@dataclass
class LossTerms:
    total: float
    pg_loss: float
    v_loss: float
    entropy: float  # mean entropy (the loss adds -c_ent * entropy)


def a2c_loss(params: MlpParams, batch: LossBatch, c_pg: float, c_v: float, c_ent: float,
             with_grads: bool = True) -> tuple[LossTerms, MlpParams | None]:
    """``c_pg*mean(-A log pi(a)) + c_v*mean((V - target)^2) + c_ent*mean(-H)`` and its gradient."""
    cache: dict | None = {} if with_grads else None
    logits, values = mlp_forward(params, batch.inputs, cache)
    n = logits.shape[0]
    rows = np.arange(n)
    mask = np.asarray(batch.masks, dtype=bool)
    logp = masked_log_softmax(logits, mask)
    logp_a = logp[rows, batch.actions]
    ent = masked_entropy(logp, mask)
    diff = values - batch.targets

    pg = float(np.mean(-batch.advantages * logp_a))
    vl = float(np.mean(diff**2))
    mean_ent = float(np.mean(ent))
    terms = LossTerms(c_pg * pg + c_v * vl - c_ent * mean_ent, pg, vl, mean_ent)
    if not with_grads:
        return terms, None

    probs = np.where(mask, np.exp(np.where(mask, logp, 0.0)), 0.0)
    safe_logp = np.where(mask, logp, 0.0)
    onehot = np.zeros_like(probs)
    onehot[rows, batch.actions] = 1.0
    d_logits = (c_pg / n) * (-batch.advantages[:, None]) * (onehot - probs)
    # d(-H)/dz_j = p_j (log p_j + H)
    d_logits += (c_ent / n) * probs * (safe_logp + ent[:, None])
    d_logits = np.where(mask, d_logits, 0.0)
    d_values = (c_v / n) * 2.0 * diff
    return terms, mlp_backward(params, cache, d_logits, d_values)


def sgd_step(params: MlpParams, grads: MlpParams, learning_rate: float) -> MlpParams:
    return params.combine(grads, lambda p, g: p - learning_rate * g)
