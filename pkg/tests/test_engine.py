import numpy as np
import pytest

from batchenvs import make, rng
from batchenvs.api import tree
from batchenvs.api.registry import registry
from batchenvs.batch.engine import THREADS_ENV_VAR, BatchEngine, default_num_workers, first_valid_policy, rollout
from batchenvs.errors import ContractViolationError, InvalidActionError
from engine_checks import batch_of_one_matches_wrapper, reset_frugality, same_key_same_trajectory, thread_invariant

ENV_IDS = registry.ids()


@pytest.mark.parametrize("env_id", ENV_IDS)
def test_same_key_same_trajectory(env_id):
    assert same_key_same_trajectory(env_id, steps=60)


@pytest.mark.parametrize("env_id", ENV_IDS)
def test_batch_of_one_matches_auto_reset_wrapper(env_id):
    assert batch_of_one_matches_wrapper(env_id, steps=60)


@pytest.mark.parametrize("env_id", ["Snake-v1", "Maze-v0", "JobShop-v0", "TSP-v1"])
def test_thread_count_does_not_change_results(env_id):
    assert thread_invariant(env_id, steps=30)


@pytest.mark.parametrize("env_id", ["Maze-v0", "Snake-v1", "Knapsack-v1"])
def test_resets_only_terminated_entries(env_id):
    ok, quiet, total = reset_frugality(env_id, steps=80)
    assert ok and total > 0


def test_no_termination_no_reset():
    env = make("TSP-v1", num_cities=10)
    with BatchEngine(env, num_workers=1) as engine:
        slab = engine.reset(rng.key(0), 16)
        for _ in range(9):
            slab, ts = engine.step(slab, env.first_valid_actions(slab.timestep.observation))
            assert engine.reset_calls == 0
        slab, ts = engine.step(slab, env.first_valid_actions(slab.timestep.observation))
        assert engine.reset_calls == 16 and ts.last().all()
        # the emitted observation already belongs to the fresh episodes
        assert (slab.timestep.observation["position"] == -1).all()


def test_reset_entry_matches_single_reset():
    env = make("Snake-v1")
    with BatchEngine(env, num_workers=2, min_chunk=1) as engine:
        slab = engine.reset(rng.key(4), 5)
    keys = rng.split(rng.key(4).to_array(), 5)
    single, _ = env.reset(keys[3])
    assert tree.states_equal(tree.unbatch(slab.states, 3), single)


def test_inactive_entries_are_frozen():
    env = make("Maze-v0")
    with BatchEngine(env, num_workers=1, auto_reset=False) as engine:
        slab = engine.reset(rng.key(1), 4)
        active = np.array([True, False, True, False])
        actions = env.first_valid_actions(slab.timestep.observation)
        new, ts = engine.step(slab, actions, active)
    for i in (1, 3):
        assert tree.states_equal(tree.unbatch(new.states, i), tree.unbatch(slab.states, i))
        assert ts.reward[i] == 0.0
    assert (new.states.step_count[[0, 2]] == 1).all()


def test_errors_name_global_batch_index():
    env = make("Maze-v0")
    with BatchEngine(env, num_workers=4, min_chunk=1) as engine:
        slab = engine.reset(rng.key(2), 8)
        actions = env.first_valid_actions(slab.timestep.observation)
        mask = slab.timestep.observation["action_mask"]
        actions[6] = int(np.flatnonzero(~mask[6])[0])
        with pytest.raises(InvalidActionError) as err:
            engine.step(slab, actions)
        assert err.value.batch_index == 6
        with pytest.raises(InvalidActionError):
            engine.step(slab, actions[:5])


def test_stepping_a_finished_state_is_a_contract_violation():
    env = make("TSP-v1", num_cities=2)
    with BatchEngine(env, num_workers=1, auto_reset=False) as engine:
        slab = engine.reset(rng.key(0), 3)
        for _ in range(2):
            slab, ts = engine.step(slab, env.first_valid_actions(slab.timestep.observation))
        assert slab.done.all()
        with pytest.raises(ContractViolationError) as err:
            engine.step(slab, env.first_valid_actions(slab.timestep.observation))
        assert err.value.batch_index == 0


def test_rollout_shapes_and_empty():
    env = make("Snake-v1", grid_size=6)
    slab, traj = rollout(env, rng.key(0), first_valid_policy(env), 12, 5, num_workers=1)
    assert traj.rewards.shape == (12, 5) and traj.observations["grid"].shape == (12, 5, 6, 6, 5)
    slab, traj = rollout(env, rng.key(0), first_valid_policy(env), 0, 5, num_workers=1)
    assert traj.num_steps == 0


def test_thread_env_var(monkeypatch):
    monkeypatch.setenv(THREADS_ENV_VAR, "3")
    assert default_num_workers() == 3
    monkeypatch.setenv(THREADS_ENV_VAR, "0")
    with pytest.raises(ValueError):
        default_num_workers()
    monkeypatch.delenv(THREADS_ENV_VAR)
    assert default_num_workers() >= 1
