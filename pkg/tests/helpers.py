"""Scripted policies shared by the environment tests and the acceptance suite."""

from __future__ import annotations

from collections import deque

import numpy as np

DIRS = {(-1, 0): 0, (0, 1): 1, (1, 0): 2, (0, -1): 3}  # up, right, down, left


def hamiltonian_cycle(g: int) -> list[tuple[int, int]]:
    """A closed tour of every cell of an even ``g x g`` grid through adjacent cells."""
    if g % 2:
        raise ValueError("needs an even grid size")
    cells = [(0, c) for c in range(g)]
    for r in range(1, g):
        cols = range(g - 1, 0, -1) if r % 2 else range(1, g)
        cells += [(r, c) for c in cols]
    cells += [(r, 0) for r in range(g - 1, 0, -1)]
    return cells


def hamiltonian_policy(g: int) -> dict[tuple[int, int], int]:
    """Action that moves from each cell to its successor on the cycle."""
    cycle = hamiltonian_cycle(g)
    nxt = {}
    for i, (r, c) in enumerate(cycle):
        r2, c2 = cycle[(i + 1) % len(cycle)]
        nxt[(r, c)] = DIRS[(r2 - r, c2 - c)]
    return nxt


def play_snake_hamiltonian(env, state, ts):
    policy = hamiltonian_policy(env.grid_size)
    total = 0.0
    while not ts.last():
        state, ts = env.step(state, policy[tuple(int(v) for v in state.head_position)])
        total += ts.reward
    return state, ts, total


def maze_distances(walls: np.ndarray, target) -> np.ndarray:
    """BFS distance from every open cell to ``target`` (-1 where unreachable)."""
    h, w = walls.shape
    d = np.full((h, w), -1, dtype=np.int64)
    t = tuple(int(v) for v in target)
    d[t] = 0
    q = deque([t])
    while q:
        r, c = q.popleft()
        for dr, dc in DIRS:
            nr, nc = r + dr, c + dc
            if 0 <= nr < h and 0 <= nc < w and not walls[nr, nc] and d[nr, nc] < 0:
                d[nr, nc] = d[r, c] + 1
                q.append((nr, nc))
    return d


def maze_shortest_action(walls, agent, target) -> int:
    d = maze_distances(walls, target)
    r, c = (int(v) for v in agent)
    for (dr, dc), a in DIRS.items():
        nr, nc = r + dr, c + dc
        if 0 <= nr < walls.shape[0] and 0 <= nc < walls.shape[1] and d[nr, nc] == d[r, c] - 1 and d[nr, nc] >= 0:
            return a
    raise ValueError("target unreachable")
