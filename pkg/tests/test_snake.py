import numpy as np
import pytest

from batchenvs import rng
from batchenvs.envs.routing.snake import Snake, body_cells, make_state
from batchenvs.errors import InvalidActionError
from helpers import hamiltonian_cycle, play_snake_hamiltonian

UP, RIGHT, DOWN, LEFT = range(4)


@pytest.mark.parametrize("g", [2, 4, 6])
def test_hamiltonian_cycle_is_valid(g):
    cyc = hamiltonian_cycle(g)
    assert len(set(cyc)) == g * g
    for (r, c), (r2, c2) in zip(cyc, cyc[1:] + cyc[:1]):
        assert abs(r - r2) + abs(c - c2) == 1


@pytest.mark.parametrize("seed", range(4))
def test_hamiltonian_play_fills_4x4(seed):
    env = Snake(4)
    state, ts = env.reset(rng.key(seed))
    state, ts, total = play_snake_hamiltonian(env, state, ts)
    assert total == 15.0
    assert state.length == 16 and ts.discount == 0.0


def test_eating_grows_and_respawns_fruit_on_free_cell():
    env = Snake(5)
    state = make_state(5, (2, 2), (2, 3))
    state = type(state)(**{**state.__dict__, "key": rng.key(1).to_array()})
    state, ts = env.step(state, RIGHT)
    assert ts.reward == 1.0 and state.length == 2
    assert [tuple(c) for c in body_cells(state)] == [(2, 3), (2, 2)]
    assert state.body_state[tuple(state.fruit_position)] == 0
    # reversing into the neck is masked once the snake has length 2
    assert state.action_mask.tolist() == [True, True, True, False]
    with pytest.raises(InvalidActionError):
        env.step(state, LEFT)


def test_wall_crash_terminates_with_zero_reward():
    env = Snake(4)
    state = make_state(4, (0, 0), (3, 3))
    state, ts = env.step(state, UP)
    assert ts.last() and ts.reward == 0.0 and ts.discount == 0.0


def test_moving_into_vacating_tail_is_allowed():
    env = Snake(4)
    # build a length-4 snake in a 2x2 loop: head (0,1), body (1,1), (1,0), tail (0,0)
    state = make_state(4, (0, 0), (3, 3))
    body = np.zeros((4, 4), dtype=np.int32)
    body[0, 0], body[1, 0], body[1, 1], body[0, 1] = 1, 2, 3, 4
    state = type(state)(**{**state.__dict__, "body_state": body, "head_position": np.array([0, 1], np.int32),
                           "length": np.int32(4), "last_action": np.int32(UP)})
    state, ts = env.step(state, LEFT)
    assert not ts.last()
    assert tuple(state.head_position) == (0, 0)
    assert state.body_state[0, 0] == 4 and state.body_state[1, 0] == 1


def test_self_collision():
    env = Snake(4)
    state = make_state(4, (0, 0), (3, 3))
    body = np.zeros((4, 4), dtype=np.int32)
    # tail (0,0) -> (0,1) -> (0,2) -> (1,2) -> head (1,1)
    body[0, 0], body[0, 1], body[0, 2], body[1, 2], body[1, 1] = 1, 2, 3, 4, 5
    state = type(state)(**{**state.__dict__, "body_state": body, "head_position": np.array([1, 1], np.int32),
                           "length": np.int32(5), "last_action": np.int32(LEFT)})
    state, ts = env.step(state, UP)  # (0,1) is body, not the tail
    assert ts.last() and ts.reward == 0.0


def test_observation_channels():
    env = Snake(6)
    state, ts = env.reset(rng.key(3))
    grid = ts.observation["grid"]
    assert grid.shape == (6, 6, 5) and grid.dtype == np.float32
    assert grid[..., 0].sum() == 1 and grid[..., 3].sum() == 1
    assert env.observation_spec().validate(ts.observation)
