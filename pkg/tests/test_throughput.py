import json

import pytest

from batchenvs.batch.throughput import CSV_HEADER, reports_to_csv, run_throughput_epoch, write_reports
from batchenvs.envs import STANDARD_ENVS


def test_report_identity():
    rep = run_throughput_epoch("Snake-v1", 4, steps_per_block=5, blocks=3)
    assert rep.total_steps == 5 * 3 * 4
    assert rep.steps_per_second * rep.epoch_wall_time == pytest.approx(rep.total_steps, rel=1e-9)
    assert rep.warmup_excluded


@pytest.mark.parametrize("env_id", [d.id for d in STANDARD_ENVS])
def test_step_outputs_are_deterministic(env_id):
    a = run_throughput_epoch(env_id, 3, steps_per_block=4, blocks=2, seed=1)
    b = run_throughput_epoch(env_id, 3, steps_per_block=4, blocks=2, seed=1, num_workers=2)
    assert a.digest == b.digest


def test_more_entries_more_throughput():
    small = run_throughput_epoch("Snake-v1", 1, steps_per_block=50, blocks=4)
    large = run_throughput_epoch("Snake-v1", 512, steps_per_block=50, blocks=4)
    assert large.steps_per_second > small.steps_per_second


def test_bad_arguments():
    with pytest.raises(ValueError):
        run_throughput_epoch("Snake-v1", 0)
    with pytest.raises(LookupError):
        run_throughput_epoch("Snek-v1", 1)


def test_csv_and_json(tmp_path):
    reps = [run_throughput_epoch("Maze-v0", b, steps_per_block=2, blocks=2) for b in (1, 2)]
    text = reports_to_csv(reps)
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert [line.split(",")[:2] for line in lines[1:]] == [["Maze-v0", "1"], ["Maze-v0", "2"]]
    write_reports(reps, tmp_path / "b.csv", tmp_path / "b.json")
    assert (tmp_path / "b.csv").read_text() == text
    records = json.loads((tmp_path / "b.json").read_text())
    assert [r["batch_size"] for r in records] == [1, 2]
