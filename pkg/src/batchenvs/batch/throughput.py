"""Step-throughput measurement.

An epoch is ``blocks`` blocks of ``steps_per_block`` batched steps. Every
block restarts from the same freshly reset batch; episodes are not reset
within a block, so entries that end are frozen (still computed, result
discarded) and keep counting as steps. One untimed warm-up epoch precedes the
timed one, and only the ``step`` calls are timed.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import time
from dataclasses import asdict, dataclass

import numpy as np

from batchenvs import rng
from batchenvs.api.registry import make
from batchenvs.batch.engine import BatchEngine
from batchenvs.fileio import atomic_write_text

CSV_HEADER = ("env_id", "batch_size", "steps_per_sec", "wall_time_s")


@dataclass
class ThroughputReport:
    env_id: str
    batch_size: int
    steps_per_block: int
    blocks: int
    steps_per_second: float
    epoch_wall_time: float
    warmup_excluded: bool
    digest: str  # hash of every reward emitted in the timed epoch

    @property
    def total_steps(self) -> int:
        return self.steps_per_block * self.blocks * self.batch_size


def _run_epoch(engine: BatchEngine, initial, steps_per_block: int, blocks: int) -> tuple[float, str]:
    env = engine.env
    digest = hashlib.sha256()
    elapsed = 0.0
    for _ in range(blocks):
        slab = initial
        for _ in range(steps_per_block):
            actions = env.first_valid_actions(slab.timestep.observation)
            active = ~slab.done
            t0 = time.perf_counter()
            slab, ts = engine.step(slab, actions, active)
            elapsed += time.perf_counter() - t0
            digest.update(np.ascontiguousarray(ts.reward).tobytes())
    return elapsed, digest.hexdigest()


def run_throughput_epoch(env_id: str, batch_size: int, steps_per_block: int = 50, blocks: int = 500,
                         seed: int = 0, num_workers: int | None = None, env=None) -> ThroughputReport:
    if batch_size < 1 or steps_per_block < 1 or blocks < 1:
        raise ValueError("batch_size, steps_per_block and blocks must be >= 1")
    env = make(env_id) if env is None else env
    with BatchEngine(env, num_workers=num_workers, auto_reset=False) as engine:
        initial = engine.reset(rng.key(seed), batch_size)
        _run_epoch(engine, initial, steps_per_block, blocks)  # warm-up
        wall, digest = _run_epoch(engine, initial, steps_per_block, blocks)
    total = steps_per_block * blocks * batch_size
    return ThroughputReport(env_id, batch_size, steps_per_block, blocks, total / wall, wall, True, digest)


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in reports:
        writer.writerow([r.env_id, r.batch_size, f"{r.steps_per_second:.6g}", f"{r.epoch_wall_time:.6f}"])
    return buf.getvalue()


def write_reports(reports, csv_path, json_path=None) -> None:
    atomic_write_text(csv_path, reports_to_csv(reports))
    if json_path is not None:
        atomic_write_text(json_path, json.dumps([asdict(r) for r in reports], indent=2) + "\n")
