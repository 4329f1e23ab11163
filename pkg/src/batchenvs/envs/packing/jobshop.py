"""Job-shop scheduling in unit time steps.

Each job is an ordered list of operations, each needing one machine for a
number of steps. Every step the agent hands each machine a job (or the no-op
``num_jobs``); the clock then advances by one unit.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from batchenvs import rng
from batchenvs.api.env import Environment, EnvState
from batchenvs.api.specs import ArraySpec, BoundedArraySpec, CompositeSpec, MultiDiscreteArraySpec
from batchenvs.errors import InstanceFormatError


@dataclass
class JobShopState(EnvState):
    ops_machine_ids: np.ndarray  # (J, O), -1 pads jobs with fewer operations
    ops_durations: np.ndarray  # (J, O), 0 on padding
    num_ops: np.ndarray  # (J,)
    op_index: np.ndarray  # (J,) current (running or next) operation per job
    job_busy: np.ndarray  # (J,)
    machine_job: np.ndarray  # (M,) job being processed, -1 when idle
    machine_remaining: np.ndarray  # (M,) steps left on the current operation
    action_mask: np.ndarray  # (M, J + 1), last column is the no-op


def _mask(ops_machine_ids, num_ops, op_index, job_busy, machine_job) -> np.ndarray:
    n_machines = machine_job.shape[-1]
    o = ops_machine_ids.shape[-1]
    pending = op_index < num_ops
    next_machine = np.take_along_axis(ops_machine_ids, np.minimum(op_index, o - 1)[..., None], axis=-1)[..., 0]
    ready = pending & ~job_busy
    machines = np.arange(n_machines)
    assignable = (
        ready[..., None, :]
        & (next_machine[..., None, :] == machines[:, None])
        & (machine_job[..., :, None] < 0)
    )
    noop = np.ones(assignable.shape[:-1] + (1,), dtype=bool)
    return np.concatenate([assignable, noop], axis=-1)


def make_state(machine_ids, durations, num_machines: int | None = None, max_num_ops: int | None = None) -> JobShopState:
    """Build a state from ragged per-job lists of machine ids and durations.

    The operation axis is padded to ``max_num_ops`` (default: the longest job).
    """
    if len(machine_ids) != len(durations) or not machine_ids:
        raise ValueError("need one machine list and one duration list per job, at least one job")
    lengths = [len(m) for m in machine_ids]
    if any(n < 1 for n in lengths) or any(len(m) != len(d) for m, d in zip(machine_ids, durations)):
        raise ValueError("every job needs >= 1 operation with matching machine/duration entries")
    n_jobs, n_ops = len(lengths), max(lengths)
    if max_num_ops is not None:
        if max_num_ops < n_ops:
            raise ValueError(f"a job has {n_ops} operations, more than max_num_ops={max_num_ops}")
        n_ops = max_num_ops
    ids = np.full((n_jobs, n_ops), -1, dtype=np.int32)
    durs = np.zeros((n_jobs, n_ops), dtype=np.int32)
    for j, (m, d) in enumerate(zip(machine_ids, durations)):
        ids[j, : len(m)] = m
        durs[j, : len(d)] = d
    if num_machines is None:
        num_machines = int(ids.max()) + 1
    real = ids >= 0
    if np.any(ids[real] >= num_machines) or np.any(durs[real] < 1):
        raise ValueError("machine ids must be < num_machines and durations >= 1")
    num_ops = np.asarray(lengths, dtype=np.int32)
    op_index = np.zeros(n_jobs, dtype=np.int32)
    job_busy = np.zeros(n_jobs, dtype=bool)
    machine_job = np.full(num_machines, -1, dtype=np.int32)
    return JobShopState(
        key=np.zeros(2, np.uint64),
        step_count=np.int32(0),
        done=np.bool_(False),
        ops_machine_ids=ids,
        ops_durations=durs,
        num_ops=num_ops,
        op_index=op_index,
        job_busy=job_busy,
        machine_job=machine_job,
        machine_remaining=np.zeros(num_machines, dtype=np.int32),
        action_mask=_mask(ids, num_ops, op_index, job_busy, machine_job),
    )


def instance_lists(state: JobShopState) -> tuple[list[list[int]], list[list[int]]]:
    ids, durs = [], []
    for j, n in enumerate(state.num_ops):
        ids.append(state.ops_machine_ids[j, :n].tolist())
        durs.append(state.ops_durations[j, :n].tolist())
    return ids, durs


def format_instance(state: JobShopState) -> str:
    """One job per line as ``machine duration`` pairs."""
    ids, durs = instance_lists(state)
    return "".join(" ".join(f"{m} {d}" for m, d in zip(mi, di)) + "\n" for mi, di in zip(ids, durs))


def parse_instance(text: str, num_machines: int | None = None, path=None) -> JobShopState:
    machine_ids, durations = [], []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            nums = [int(tok) for tok in line.split()]
        except ValueError as exc:
            raise InstanceFormatError(f"non-integer token: {exc}", line=lineno, path=path) from None
        if len(nums) % 2:
            raise InstanceFormatError("expected machine/duration pairs", line=lineno, path=path)
        if any(v < 0 for v in nums[0::2]) or any(v < 1 for v in nums[1::2]):
            raise InstanceFormatError("machine ids must be >= 0 and durations >= 1", line=lineno, path=path)
        machine_ids.append(nums[0::2])
        durations.append(nums[1::2])
    if not machine_ids:
        raise InstanceFormatError("no jobs found", path=path)
    return make_state(machine_ids, durations, num_machines)


def load_instance(path, num_machines: int | None = None) -> JobShopState:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read(), num_machines, path=os.fspath(path))


class RandomJobShopGenerator:
    """Operation counts in ``[1, max_num_ops]``, uniform machines and durations in ``[1, max_op_duration]``."""

    def __init__(self, num_jobs: int = 5, num_machines: int = 4, max_num_ops: int = 4, max_op_duration: int = 6):
        if min(num_jobs, num_machines, max_num_ops, max_op_duration) < 1:
            raise ValueError("all job-shop sizes must be >= 1")
        self.num_jobs = num_jobs
        self.num_machines = num_machines
        self.max_num_ops = max_num_ops
        self.max_op_duration = max_op_duration

    def __call__(self, key) -> JobShopState:
        k_len, k_mach, k_dur = rng.split(rng.as_key_array(key), 3)
        j, o = self.num_jobs, self.max_num_ops
        lengths = rng.randint(k_len, 1, o + 1, count=j)
        machines = rng.randint(k_mach, 0, self.num_machines, count=j * o).reshape(j, o)
        durs = rng.randint(k_dur, 1, self.max_op_duration + 1, count=j * o).reshape(j, o)
        return make_state(
            [machines[i, : lengths[i]].tolist() for i in range(j)],
            [durs[i, : lengths[i]].tolist() for i in range(j)],
            self.num_machines,
            self.max_num_ops,
        )


class JobShop(Environment[JobShopState]):
    """Reward -1 per step until every operation has finished (return = -makespan).

    ``action[m]`` is a job id or the no-op ``num_jobs``. A job may be started
    on machine ``m`` only if the machine and the job are idle and the job's
    next operation needs ``m``; a job id may appear at most once per action.
    """

    def __init__(self, num_jobs: int = 5, num_machines: int = 4, max_num_ops: int = 4, max_op_duration: int = 6,
                 time_limit: int | None = None, generator=None):
        self.num_jobs = num_jobs
        self.num_machines = num_machines
        self.max_num_ops = max_num_ops
        self.max_op_duration = max_op_duration
        # running every operation back to back always fits in this horizon
        self.time_limit = num_jobs * max_num_ops * max_op_duration if time_limit is None else time_limit
        self.generator = generator or RandomJobShopGenerator(num_jobs, num_machines, max_num_ops, max_op_duration)

    @property
    def no_op(self) -> int:
        return self.num_jobs

    def observation_spec(self) -> CompositeSpec:
        j, m, o = self.num_jobs, self.num_machines, self.max_num_ops
        return CompositeSpec(
            ops_machine_ids=BoundedArraySpec((j, o), np.int32, -1, m - 1, name="ops_machine_ids"),
            ops_durations=BoundedArraySpec((j, o), np.int32, 0, self.max_op_duration, name="ops_durations"),
            op_index=BoundedArraySpec((j,), np.int32, 0, o, name="op_index"),
            machine_job=BoundedArraySpec((m,), np.int32, -1, j - 1, name="machine_job"),
            machine_remaining=BoundedArraySpec((m,), np.int32, 0, self.max_op_duration, name="machine_remaining"),
            action_mask=ArraySpec((m, j + 1), bool, name="action_mask"),
            step_count=ArraySpec((), np.int32, name="step_count"),
        )

    def action_spec(self) -> MultiDiscreteArraySpec:
        return MultiDiscreteArraySpec([self.num_jobs + 1] * self.num_machines, name="action")

    @property
    def num_flat_actions(self) -> int:
        raise NotImplementedError("JobShop actions are per-machine vectors, not a flat categorical")

    def _action_valid(self, states: JobShopState, actions: np.ndarray) -> np.ndarray:
        n_batch, n_machines = actions.shape
        rows = np.arange(n_batch)[:, None]
        ok = states.action_mask[rows, np.arange(n_machines), actions].all(axis=1)
        jobs = np.sort(np.where(actions < self.num_jobs, actions, -1 - np.arange(n_machines)), axis=1)
        distinct = np.all(np.diff(jobs, axis=1) != 0, axis=1)
        return ok & distinct

    def first_valid_actions(self, observation) -> np.ndarray:
        """Each machine takes the lowest-index job it may start, else the no-op."""
        return np.argmax(observation["action_mask"], axis=-1).astype(np.int32)

    def random_valid_actions(self, observation, keys) -> np.ndarray:
        """Independent uniform choice per machine over its valid jobs and the no-op.

        A job's next operation needs exactly one machine, so per-machine
        choices never collide.
        """
        mask = observation["action_mask"]
        machine_keys = rng.split(keys, self.num_machines)
        return rng.choice_index(machine_keys, mask.astype(np.float64)).astype(np.int32)

    def _transition(self, states: JobShopState, actions: np.ndarray):
        n_batch, n_machines = actions.shape
        rows = np.arange(n_batch)[:, None]
        o = states.ops_machine_ids.shape[2]
        starts = (actions < self.num_jobs) & (states.machine_job < 0)
        job = np.minimum(actions, self.num_jobs - 1)
        dur = states.ops_durations[rows, job, np.minimum(states.op_index[rows, job], o - 1)]
        machine_job = np.where(starts, job, states.machine_job)
        remaining = np.where(starts, dur, states.machine_remaining)
        job_busy = states.job_busy.copy()
        np.logical_or.at(job_busy, (np.broadcast_to(rows, job.shape)[starts], job[starts]), True)

        running = machine_job >= 0
        remaining = np.where(running, remaining - 1, remaining).clip(0).astype(np.int32)
        finishing = running & (remaining == 0)
        op_index = states.op_index.copy()
        fin_rows = np.broadcast_to(rows, job.shape)[finishing]
        fin_jobs = machine_job[finishing]
        np.add.at(op_index, (fin_rows, fin_jobs), 1)
        job_busy[fin_rows, fin_jobs] = False
        machine_job = np.where(finishing, -1, machine_job).astype(np.int32)

        complete = np.all(op_index >= states.num_ops, axis=1)
        new = JobShopState(
            key=states.key,
            step_count=states.step_count,
            done=states.done,
            ops_machine_ids=states.ops_machine_ids,
            ops_durations=states.ops_durations,
            num_ops=states.num_ops,
            op_index=op_index,
            job_busy=job_busy,
            machine_job=machine_job,
            machine_remaining=remaining,
            action_mask=_mask(states.ops_machine_ids, states.num_ops, op_index, job_busy, machine_job),
        )
        return new, np.full(n_batch, -1.0), complete

    def _observe(self, states: JobShopState):
        return {
            "ops_machine_ids": states.ops_machine_ids,
            "ops_durations": states.ops_durations,
            "op_index": states.op_index,
            "machine_job": states.machine_job,
            "machine_remaining": states.machine_remaining,
            "action_mask": states.action_mask,
            "step_count": states.step_count,
        }
