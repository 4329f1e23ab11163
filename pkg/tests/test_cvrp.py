import numpy as np
import pytest

from batchenvs import rng
from batchenvs.envs.routing.cvrp import CVRP, DEPOT, UniformCvrpGenerator, make_state, route_distance
from batchenvs.errors import InvalidActionError
from oracles import cvrp_brute_force
from search import best_return


@pytest.mark.parametrize("n,capacity,max_demand", [(2, 5, 4), (3, 6, 4), (4, 8, 5), (5, 10, 6)])
def test_best_return_equals_brute_force(n, capacity, max_demand):
    gen = UniformCvrpGenerator(n, capacity, max_demand)
    env = CVRP(n, capacity, max_demand)
    for seed in range(2):
        s = gen(rng.key(seed))
        best = best_return(env, s)
        opt = cvrp_brute_force(s.coordinates.tolist(), s.demands[1:].tolist(), capacity)
        assert best == pytest.approx(-opt, rel=1e-9)


def test_capacity_forces_return_to_depot():
    coords = [[0.5, 0.5], [0.0, 0.0], [1.0, 1.0]]
    env = CVRP(2, capacity=5, max_demand=5)
    s = make_state(coords, [3, 3], 5)
    assert s.action_mask.tolist() == [False, True, True]
    s, ts = env.step(s, 1)
    assert s.remaining_capacity == 2
    assert s.action_mask.tolist() == [True, False, False]
    with pytest.raises(InvalidActionError):
        env.step(s, 2)
    s, ts = env.step(s, DEPOT)
    assert s.remaining_capacity == 5 and ts.reward == 0.0
    s, ts = env.step(s, 2)
    s, ts = env.step(s, DEPOT)
    assert ts.last() and ts.discount == 0.0
    want = route_distance(coords, [0, 1, 0, 2, 0])
    assert ts.reward == pytest.approx(-want)
    assert s.route[: s.route_length].tolist() == [0, 1, 0, 2, 0]


def test_dense_and_sparse_returns_agree():
    gen = UniformCvrpGenerator(6, 10, 5)
    s0 = gen(rng.key(3))
    totals = []
    for dense in (False, True):
        env = CVRP(6, 10, 5, dense=dense)
        s, ts = s0, None
        total = 0.0
        while ts is None or not ts.last():
            a = int(np.flatnonzero(s.action_mask)[0])
            s, ts = env.step(s, a)
            total += ts.reward
        totals.append(total)
        assert ts.extras["distance"] == pytest.approx(-total)
    assert totals[0] == pytest.approx(totals[1], rel=1e-12)


def test_demands_validated():
    with pytest.raises(ValueError):
        make_state([[0, 0], [1, 1]], [6], 5)
    with pytest.raises(ValueError):
        make_state([[0, 0], [1, 1]], [0], 5)


def test_generator_ranges():
    s = UniformCvrpGenerator(30, 30, 9)(rng.key(0))
    assert s.demands[0] == 0
    assert s.demands[1:].min() >= 1 and s.demands.max() <= 9
    assert s.visited.tolist() == [True] + [False] * 30
