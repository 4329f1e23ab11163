"""Central finite-difference check of the actor-critic loss gradient."""

from __future__ import annotations

import numpy as np

from batchenvs import make, rng
from batchenvs.agent.encoding import maze_grid
from batchenvs.agent.losses import LossBatch, a2c_loss, compute_advantages
from batchenvs.agent.network import init_mlp, mlp_forward
from batchenvs.batch.engine import BatchEngine, random_policy


def three_step_batch(params, seed=0, batch_size=4):
    """Encoded 3-step Maze rollouts with GAE targets computed from ``params``."""
    env = make("Maze-v0", num_rows=4, num_cols=4)
    k_reset, k_act = rng.split(rng.key(seed).to_array(), 2)
    with BatchEngine(env, num_workers=1) as engine:
        slab = engine.reset(k_reset, batch_size)
        slab, traj = engine.rollout(slab, random_policy(env), 3, k_act)
    x = np.concatenate([maze_grid({k: v[t] for k, v in traj.observations.items()}) for t in range(3)])
    masks = traj.observations["action_mask"].reshape(3 * batch_size, -1)
    _, values = mlp_forward(params, x)
    _, boot = mlp_forward(params, maze_grid(traj.final_observation))
    conts = (traj.step_types != 2).astype(np.float64)
    adv, targets = compute_advantages(traj.rewards, conts, values.reshape(3, batch_size), boot, 0.9, 0.8)
    # randomise the advantages so the policy term is never trivially zero
    adv = adv + rng.uniform(rng.key(seed + 99), adv.size, -1.0, 1.0).reshape(adv.shape)
    return LossBatch(x, traj.actions.reshape(-1).astype(np.int64), masks, adv.reshape(-1), targets.reshape(-1))


def max_relative_error(shared: bool, seed: int = 0, h: float = 1e-5, coeffs=(1.0, 0.5, 0.01)) -> float:
    params = init_mlp(rng.key(seed), 48, 4, hidden=(8, 8), shared=shared)
    # nonzero biases so every branch is exercised
    params = params.with_flat(params.flat() + rng.uniform(rng.key(seed + 1), params.flat().size, -0.1, 0.1))
    batch = three_step_batch(params, seed)
    _, grads = a2c_loss(params, batch, *coeffs)
    g = grads.flat()
    theta = params.flat()
    worst = 0.0
    for i in range(theta.size):
        e = np.zeros_like(theta)
        e[i] = h
        up, _ = a2c_loss(params.with_flat(theta + e), batch, *coeffs, with_grads=False)
        dn, _ = a2c_loss(params.with_flat(theta - e), batch, *coeffs, with_grads=False)
        fd = (up.total - dn.total) / (2 * h)
        denom = max(abs(fd), abs(g[i]), 1e-8)
        worst = max(worst, abs(fd - g[i]) / denom)
    return worst
