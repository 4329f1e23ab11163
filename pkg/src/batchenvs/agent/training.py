"""Single-process actor-critic training loop and policy evaluation."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from batchenvs import rng
from batchenvs.agent.config import TrainConfig
from batchenvs.agent.distributions import masked_categorical, masked_greedy
from batchenvs.agent.encoding import default_encoding, get_encoder
from batchenvs.agent.losses import LossBatch, a2c_loss, compute_advantages, sgd_step
from batchenvs.agent.network import MlpParams, init_mlp, mlp_forward
from batchenvs.api.registry import make
from batchenvs.api.types import StepType
from batchenvs.batch.engine import BatchEngine

CURVE_HEADER = ("epoch", "env_steps", "mean_return", "stderr", "pg_loss", "v_loss", "entropy")


@dataclass
class EpochRecord:
    epoch: int
    env_steps: int
    mean_return: float  # stochastic policy
    stderr: float
    greedy_return: float
    greedy_stderr: float
    pg_loss: float
    v_loss: float
    entropy: float


@dataclass
class TrainResult:
    config: TrainConfig
    params: MlpParams
    records: list[EpochRecord] = field(default_factory=list)
    losses: list[float] = field(default_factory=list)  # total loss per learner step


def _mean_stderr(x: np.ndarray) -> tuple[float, float]:
    x = np.asarray(x, dtype=np.float64)
    if x.size < 2:
        return float(x.mean()), 0.0
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size))


def build_env(cfg: TrainConfig):
    return make(cfg.env_id, **cfg.env_params)


def flat_mask(env, obs) -> np.ndarray:
    return env.flat_action_mask(obs).astype(bool)


def policy_actions(env, params, encoder, obs, keys, greedy: bool, active=None) -> np.ndarray:
    """Sample (or take the greedy) action for every active entry; inactive entries get 0."""
    mask = flat_mask(env, obs)
    b = mask.shape[0]
    active = np.ones(b, dtype=bool) if active is None else active
    flat_act = np.zeros(b, dtype=np.int64)
    if active.any():
        sub = {k: v[active] for k, v in obs.items()}
        logits, _ = mlp_forward(params, encoder(sub))
        if greedy:
            flat_act[active] = masked_greedy(logits, mask[active])
        else:
            flat_act[active] = masked_categorical(logits, mask[active], keys[active])[0]
    return env.flat_to_action(flat_act)


def run_episodes(env, act_fn, episodes: int, key, num_workers: int | None = 1) -> np.ndarray:
    """Returns of ``episodes`` parallel episodes, each run until it ends.

    ``act_fn(observation, keys, active)`` picks the batched actions.
    """
    k_reset, k_act = rng.split(rng.as_key_array(key), 2)
    with BatchEngine(env, num_workers=num_workers, auto_reset=False) as engine:
        slab = engine.reset(k_reset, episodes)
        returns = np.zeros(episodes)
        t = 0
        while not slab.done.all():
            active = ~slab.done
            keys = rng.split(rng.fold_in(k_act, t), episodes)
            actions = act_fn(slab.timestep.observation, keys, active)
            slab, ts = engine.step(slab, actions, active)
            returns += np.where(active, ts.reward, 0.0)
            t += 1
    return returns


def evaluate(env, params: MlpParams, encoder, episodes: int, key, greedy: bool) -> np.ndarray:
    return run_episodes(env, lambda o, k, a: policy_actions(env, params, encoder, o, k, greedy, a), episodes, key)


def random_baseline(env_or_id, episodes: int, key, **env_params) -> tuple[float, float]:
    """Mean return and its standard error under the uniform valid-action policy."""
    env = make(env_or_id, **env_params) if isinstance(env_or_id, str) else env_or_id
    returns = run_episodes(env, lambda o, k, a: env.random_valid_actions(o, k), episodes, key)
    return _mean_stderr(returns)


def _clip(grads: MlpParams, max_norm: float) -> MlpParams:
    if max_norm <= 0:
        return grads
    norm = float(np.sqrt(sum(float(np.sum(g * g)) for g in grads.arrays())))
    if norm <= max_norm:
        return grads
    scale = max_norm / norm
    return grads.map(lambda g: g * scale)


def train(cfg: TrainConfig, progress=None) -> TrainResult:
    """Alternate evaluation and learning for ``cfg.epochs`` epochs.

    Record ``e`` evaluates the parameters after ``e`` epochs of training (so
    there are ``epochs + 1`` records) and reports the mean loss terms of the
    epoch that preceded it. Rollouts auto-reset and continue across learner
    steps. Bootstrapping stops at every LAST step, including truncations,
    because the following observation already belongs to the next episode.
    """
    env = build_env(cfg)
    if not hasattr(env.action_spec(), "num_values") or type(env).__name__ == "JobShop":
        raise ValueError(f"{cfg.env_id} has no flat categorical action space for this agent")
    encoder = get_encoder(cfg.encoding or default_encoding(env))
    root = rng.key(cfg.seed)
    k_init, k_reset, k_roll, k_eval = rng.split(rng.as_key_array(root), 4)

    probe_state, probe_ts = env.reset(k_reset)
    input_dim = encoder({k: np.asarray(v)[None] for k, v in probe_ts.observation.items()}).shape[1]
    params = init_mlp(k_init, input_dim, env.num_flat_actions, cfg.hidden, cfg.shared_torso)
    result = TrainResult(cfg, params)

    engine = BatchEngine(env, num_workers=1)
    slab = engine.reset(k_reset, cfg.batch_size)
    env_steps = 0
    learner_step = 0
    epoch_terms = (0.0, 0.0, 0.0)
    n, b = cfg.rollout_length, cfg.batch_size

    for epoch in range(cfg.epochs + 1):
        stoch = evaluate(env, params, encoder, cfg.eval_episodes, k_eval, greedy=False)
        greedy = evaluate(env, params, encoder, cfg.eval_episodes, k_eval, greedy=True)
        ms, ss = _mean_stderr(stoch)
        mg, sg = _mean_stderr(greedy)
        rec = EpochRecord(epoch, env_steps, ms, ss, mg, sg, *epoch_terms)
        result.records.append(rec)
        if progress is not None:
            progress(rec)
        if epoch == cfg.epochs:
            break

        sums = np.zeros(3)
        for _ in range(cfg.learner_steps_per_epoch):
            step_key = rng.fold_in(k_roll, learner_step)
            inputs, masks, actions, values, rewards, conts = [], [], [], [], [], []
            for t in range(n):
                obs = slab.timestep.observation
                x = encoder(obs)
                mask = flat_mask(env, obs)
                logits, v = mlp_forward(params, x)
                a, _, _ = masked_categorical(logits, mask, rng.split(rng.fold_in(step_key, t), b))
                slab, ts = engine.step(slab, env.flat_to_action(a))
                inputs.append(x)
                masks.append(mask)
                actions.append(a)
                values.append(v)
                rewards.append(ts.reward)
                conts.append(np.where(np.asarray(ts.step_type) == StepType.LAST, 0.0, 1.0))
            _, boot = mlp_forward(params, encoder(slab.timestep.observation))
            adv, targets = compute_advantages(np.stack(rewards), np.stack(conts), np.stack(values), boot,
                                              cfg.gamma, cfg.lam)
            batch = LossBatch(np.concatenate(inputs), np.concatenate(actions), np.concatenate(masks),
                              adv.reshape(-1), targets.reshape(-1))
            terms, grads = a2c_loss(params, batch, cfg.c_pg, cfg.c_v, cfg.c_ent)
            params = sgd_step(params, _clip(grads, cfg.max_grad_norm), cfg.learning_rate)
            result.losses.append(terms.total)
            sums += (terms.pg_loss, terms.v_loss, terms.entropy)
            env_steps += n * b
            learner_step += 1
        steps = max(cfg.learner_steps_per_epoch, 1)
        epoch_terms = tuple(float(s / steps) for s in sums)
    engine.close()
    result.params = params
    return result


def curve_csv(records: list[EpochRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CURVE_HEADER)
    for r in records:
        w.writerow([r.epoch, r.env_steps, repr(r.mean_return), repr(r.stderr), repr(r.pg_loss), repr(r.v_loss),
                    repr(r.entropy)])
    return buf.getvalue()
