import numpy as np
import pytest

from batchenvs import rng
from batchenvs.envs.packing.jobshop import (
    JobShop, RandomJobShopGenerator, format_instance, instance_lists, load_instance, make_state, parse_instance,
)
from batchenvs.errors import InstanceFormatError, InvalidActionError
from oracles import jobshop_brute_force
from search import best_return


def test_three_by_two_hand_instance():
    machines = [[0, 1], [1, 0], [0]]
    durations = [[2, 1], [1, 2], [1]]
    s = make_state(machines, durations, num_machines=2)
    opt = jobshop_brute_force(machines, durations)
    assert opt == 5  # machine 0 carries 2 + 2 + 1 units of work
    assert best_return(JobShop(3, 2, 2, 2), s) == -opt


@pytest.mark.parametrize("seed", range(6))
def test_best_return_equals_brute_force_3x2(seed):
    gen = RandomJobShopGenerator(3, 2, 2, 3)
    s = gen(rng.key(seed))
    machines, durations = instance_lists(s)
    env = JobShop(3, 2, 2, 3)
    assert best_return(env, s) == -jobshop_brute_force(machines, durations)


def test_step_mechanics_and_makespan():
    env = JobShop(2, 2, 2, 3)
    s = make_state([[0, 1], [1]], [[2, 1], [3]], num_machines=2)
    assert s.action_mask.tolist() == [[True, False, True], [False, True, True]]
    s, ts = env.step(s, np.array([0, 1], dtype=np.int32))
    assert s.machine_job.tolist() == [0, 1] and s.machine_remaining.tolist() == [1, 2]
    assert ts.reward == -1.0
    # machines are busy: only the no-op is allowed
    with pytest.raises(InvalidActionError):
        env.step(s, np.array([1, 2], dtype=np.int32))
    s, ts = env.step(s, np.array([2, 2], dtype=np.int32))
    assert s.op_index.tolist() == [1, 0]
    # job 0 now needs machine 1, still running job 1 for one more step
    s, ts = env.step(s, np.array([2, 2], dtype=np.int32))
    s, ts = env.step(s, np.array([2, 0], dtype=np.int32))
    assert ts.last() and ts.discount == 0.0 and s.step_count == 4


def test_duplicate_job_in_one_action_is_invalid():
    env = JobShop(1, 2, 2, 2)
    s = make_state([[0, 1]], [[1, 1]], num_machines=2)
    with pytest.raises(InvalidActionError):
        env.step(s, np.array([0, 0], dtype=np.int32))


def test_random_play_completes_with_negative_makespan():
    env = JobShop()
    s, ts = env.reset(rng.key(4))
    keys = rng.split(rng.key(5).to_array(), env.time_limit)
    total, t = 0.0, 0
    while not ts.last():
        obs = {k: np.asarray(v)[None] for k, v in ts.observation.items()}
        s, ts = env.step(s, env.random_valid_actions(obs, keys[t][None])[0])
        total += ts.reward
        t += 1
    assert ts.discount == 0.0
    assert total == -t
    assert np.all(s.op_index == s.num_ops)


def test_instance_text_round_trip(tmp_path):
    s = RandomJobShopGenerator(4, 3, 3, 5)(rng.key(2))
    text = format_instance(s)
    again = parse_instance(text, num_machines=3)
    assert instance_lists(again) == instance_lists(s)
    path = tmp_path / "inst.txt"
    path.write_text("# comment line\n" + text)
    assert instance_lists(load_instance(path, 3)) == instance_lists(s)


@pytest.mark.parametrize("text,line", [("0 1\n0 x\n", 2), ("0 1 2\n", 1), ("0 0\n", 1), ("", None)])
def test_instance_parse_errors(text, line):
    with pytest.raises(InstanceFormatError) as err:
        parse_instance(text)
    assert err.value.line == line


def test_generator_shapes():
    s = RandomJobShopGenerator(5, 4, 4, 6)(rng.key(0))
    assert s.ops_machine_ids.shape == (5, 4)
    assert np.all((s.num_ops >= 1) & (s.num_ops <= 4))
    real = s.ops_machine_ids >= 0
    assert np.all(s.ops_durations[real] >= 1) and np.all(s.ops_durations[~real] == 0)
