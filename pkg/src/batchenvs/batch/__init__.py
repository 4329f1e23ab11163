from batchenvs.batch.engine import (
    THREADS_ENV_VAR,
    BatchEngine,
    BatchSlab,
    Trajectory,
    default_num_workers,
    first_valid_policy,
    random_policy,
    rollout,
)
from batchenvs.batch.throughput import ThroughputReport, reports_to_csv, run_throughput_epoch, write_reports

__all__ = [
    "THREADS_ENV_VAR",
    "BatchEngine",
    "BatchSlab",
    "ThroughputReport",
    "Trajectory",
    "default_num_workers",
    "first_valid_policy",
    "random_policy",
    "reports_to_csv",
    "rollout",
    "run_throughput_epoch",
    "write_reports",
]
