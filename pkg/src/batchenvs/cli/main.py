"""Entry point for the ``batchenvs`` command.

Exit codes: 0 on success, 2 for usage errors (bad flags, unknown ids,
malformed configs), 3 for failures while running.
"""

from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from batchenvs import rng
from batchenvs.api.registry import make, registry
from batchenvs.api.wrappers import auto_reset_key
from batchenvs.batch.engine import THREADS_ENV_VAR
from batchenvs.batch.throughput import reports_to_csv, run_throughput_epoch, write_reports
from batchenvs.cli.render import render
from batchenvs.errors import EnvNotFoundError
from batchenvs.fileio import atomic_write_bytes, atomic_write_text

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RUNTIME = 3
DEFAULT_BATCH_SIZES = (1, 8, 64, 512, 4096)


class UsageError(Exception):
    pass


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {v}")
    return v


def _non_negative_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected an integer >= 0, got {v}")
    return v


def _int_list(text: str) -> list[int]:
    return [_positive_int(t) for t in text.split(",") if t.strip()]


def _id_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _param(text: str) -> tuple[str, object]:
    from batchenvs.agent.config import parse_scalar

    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    name, raw = (s.strip() for s in text.split("=", 1))
    return name, parse_scalar(raw)


def _check_env(env_id: str) -> None:
    from batchenvs import envs  # noqa: F401

    try:
        registry.get(env_id)
    except EnvNotFoundError as e:
        raise UsageError(str(e)) from None


def _make(env_id: str, params):
    _check_env(env_id)
    try:
        return make(env_id, **dict(params or []))
    except TypeError as e:
        raise UsageError(f"bad parameters for {env_id}: {e}") from None


def bundled_config(name: str) -> Path | None:
    """Path of a config shipped with the package (``maze6``, ``snake6``, ``tsp5``)."""
    ref = resources.files("batchenvs") / "configs" / f"{name}.cfg"
    return Path(str(ref)) if ref.is_file() else None


# list

def cmd_list(args, out) -> int:
    from batchenvs import envs  # noqa: F401

    rows = [("id", "category", "defaults", "objective")]
    for desc in registry:
        defaults = ",".join(f"{k}={v}" for k, v in desc.default_params.items())
        rows.append((desc.id, desc.category, defaults, desc.objective))
    widths = [max(len(r[i]) for r in rows) for i in range(3)]
    for r in rows:
        out.write("  ".join(c.ljust(w) for c, w in zip(r[:3], widths)) + "  " + r[3] + "\n")
    return EXIT_OK


# bench

def cmd_bench(args, out) -> int:
    for env_id in args.envs:
        _check_env(env_id)
    reports = []
    for env_id in args.envs:
        for b in args.batch_sizes:
            rep = run_throughput_epoch(env_id, b, steps_per_block=args.steps_per_block, blocks=args.blocks,
                                       seed=args.seed, num_workers=args.threads)
            reports.append(rep)
            out.write(f"{env_id} B={b} steps/s={rep.steps_per_second:.1f}\n")
    if args.out:
        write_reports(reports, args.out, args.json)
    else:
        out.write(reports_to_csv(reports))
    return EXIT_OK


# rollout

def _checkpoint_policy(env, path: str, encoding: str):
    from batchenvs.agent import default_encoding, get_encoder, load_checkpoint, masked_greedy, mlp_forward

    params = load_checkpoint(path)
    encoder = get_encoder(encoding or default_encoding(env))

    def act(obs, key):
        batched = {k: np.asarray(v)[None] for k, v in obs.items()}
        logits, _ = mlp_forward(params, encoder(batched))
        flat = masked_greedy(logits, env.flat_action_mask(batched).astype(bool))
        return env.flat_to_action(flat)[0]

    return act


def _random_policy(env):
    def act(obs, key):
        batched = {k: np.asarray(v)[None] for k, v in obs.items()}
        return env.random_valid_actions(batched, rng.as_key_array(key)[None])[0]

    return act


def _write_frame(directory: Path, index: int, state) -> None:
    data, ext = render(state)
    atomic_write_bytes(directory / f"frame_{index:05d}.{ext}", data)


def cmd_rollout(args, out) -> int:
    env = _make(args.env, args.param)
    if args.policy == "random":
        policy = _random_policy(env)
    else:
        if not Path(args.policy).is_file():
            raise UsageError(f"checkpoint not found: {args.policy}")
        policy = _checkpoint_policy(env, args.policy, args.encoding)
    frames = Path(args.frames) if args.frames else None
    if frames is not None:
        frames.mkdir(parents=True, exist_ok=True)

    k_reset, k_act = rng.split(rng.as_key_array(rng.key(args.seed)), 2)
    state, ts = env.reset(k_reset)
    if frames is not None:
        _write_frame(frames, 0, state)
    returns, current = [], 0.0
    for t in range(args.steps):
        action = policy(ts.observation, rng.fold_in(k_act, t))
        state, ts = env.step(state, action)
        current += float(ts.reward)
        if frames is not None:
            _write_frame(frames, t + 1, state)
        if ts.last():
            returns.append(current)
            current = 0.0
            state, ts = env.reset(auto_reset_key(state.key))
    for i, r in enumerate(returns):
        out.write(f"episode {i} return {r!r}\n")
    out.write(f"completed {len(returns)} episodes in {args.steps} steps; unfinished return {current!r}\n")
    if returns:
        out.write(f"mean return {float(np.mean(returns))!r}\n")
    return EXIT_OK


# train

def cmd_train(args, out) -> int:
    from batchenvs.agent import ConfigError, curve_csv, load_config, save_checkpoint, train
    from batchenvs.agent.config import format_config

    path = Path(args.config)
    if not path.is_file():
        path = bundled_config(args.config)
        if path is None:
            raise UsageError(f"config not found: {args.config}")
    try:
        cfg = load_config(path)
        if args.env:
            cfg = type(cfg)(**{**cfg.__dict__, "env_id": args.env})
    except ConfigError as e:
        raise UsageError(f"config error: {e}") from None
    _check_env(cfg.env_id)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    def progress(r):
        out.write(f"epoch {r.epoch} env_steps {r.env_steps} return {r.mean_return:.4f} "
                  f"greedy {r.greedy_return:.4f}\n")
        out.flush()

    result = train(cfg, progress)
    atomic_write_text(outdir / "curve.csv", curve_csv(result.records))
    atomic_write_text(outdir / "config.cfg", format_config(cfg))
    save_checkpoint(outdir / "params.ckpt", result.params)
    out.write(f"wrote {outdir / 'curve.csv'} and {outdir / 'params.ckpt'}\n")
    return EXIT_OK


# render-demo

def cmd_render_demo(args, out) -> int:
    env = _make(args.env, args.param)
    state, _ = env.reset(rng.key(args.seed))
    data, ext = render(state)
    target = Path(args.out)
    if target.suffix == "":
        target.mkdir(parents=True, exist_ok=True)
        target = target / f"{args.env}_seed{args.seed}.{ext}"
    atomic_write_bytes(target, data)
    out.write(f"{target}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="batchenvs", description="Batched combinatorial environments.")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="list registered environments")

    b = sub.add_parser("bench", help="measure batched step throughput")
    b.add_argument("--envs", type=_id_list, required=True, help="comma-separated environment ids")
    b.add_argument("--batch-sizes", type=_int_list, default=list(DEFAULT_BATCH_SIZES))
    b.add_argument("--steps-per-block", type=_positive_int, default=50)
    b.add_argument("--blocks", type=_positive_int, default=500)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--threads", type=_positive_int, default=None,
                   help=f"worker threads (default: ${THREADS_ENV_VAR} or the hardware thread count)")
    b.add_argument("--out", help="CSV output path (default: print to stdout)")
    b.add_argument("--json", help="optional JSON output path")

    r = sub.add_parser("rollout", help="run a policy and optionally write frames")
    r.add_argument("--env", required=True)
    r.add_argument("--policy", default="random", help="'random' or a checkpoint path (greedy play)")
    r.add_argument("--encoding", default="", help="observation encoding for checkpoint policies")
    r.add_argument("--steps", type=_non_negative_int, default=100)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--frames", help="directory for frame_00000... images")
    r.add_argument("--param", type=_param, action="append", help="environment parameter override name=value")

    t = sub.add_parser("train", help="train the actor-critic agent")
    t.add_argument("--config", required=True, help="config file path or bundled config name")
    t.add_argument("--env", help="override the config's env_id")
    t.add_argument("--out", required=True, help="output directory")

    d = sub.add_parser("render-demo", help="render one reset state")
    d.add_argument("--env", required=True)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--out", default=".", help="output file, or a directory to name the file in")
    d.add_argument("--param", type=_param, action="append", help="environment parameter override name=value")
    return p


COMMANDS = {
    "list": cmd_list,
    "bench": cmd_bench,
    "rollout": cmd_rollout,
    "train": cmd_train,
    "render-demo": cmd_render_demo,
}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as e:
        err.write(f"batchenvs {args.command}: {e}\n")
        return EXIT_USAGE
    except Exception as e:  # noqa: BLE001
        err.write(f"batchenvs {args.command}: error: {type(e).__name__}: {e}\n")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
