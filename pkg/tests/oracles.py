"""Independent reference implementations used as test oracles.

Nothing here imports the package's dynamics. Each oracle is the slowest
obvious way to get the right answer: pure-Python Threefry, exhaustive
search, breadth-first search, or a direct transcription of the rules.
"""

from __future__ import annotations

import itertools
import math
from collections import deque

M64 = (1 << 64) - 1

TAG_SPLIT = 0x53504C4954000000
TAG_FOLD = 0x464F4C4400000000
TAG_BITS = 0x4249545300000000


# randomness

def threefry2x64_20(ctr, key):
    """Threefry-2x64 with 20 rounds; ``ctr`` and ``key`` are pairs of ints."""
    rot = [16, 42, 12, 31, 16, 32, 24, 21]
    ks = [key[0], key[1], 0x1BD11BDAA9FC1A22 ^ key[0] ^ key[1]]
    x = [(ctr[0] + ks[0]) & M64, (ctr[1] + ks[1]) & M64]
    for r in range(20):
        x[0] = (x[0] + x[1]) & M64
        x[1] = ((x[1] << rot[r % 8]) | (x[1] >> (64 - rot[r % 8]))) & M64
        x[1] ^= x[0]
        if r % 4 == 3:
            inj = r // 4 + 1
            x[0] = (x[0] + ks[inj % 3]) & M64
            x[1] = (x[1] + ks[(inj + 1) % 3] + inj) & M64
    return x[0], x[1]


def ref_split(k, n):
    return [threefry2x64_20((i, TAG_SPLIT), k) for i in range(n)]


def ref_fold_in(k, data):
    return threefry2x64_20((data & M64, TAG_FOLD), k)


def ref_bits(k, count):
    out = []
    for i in range((count + 1) // 2):
        out.extend(threefry2x64_20((i, TAG_BITS), k))
    return out[:count]


def ref_uniform(k, count):
    return [(w >> 11) / float(1 << 53) for w in ref_bits(k, count)]


# 2048

def ref_slide_left(line):
    """Slide one row toward index 0, merging each pair of equal neighbours once."""
    tiles = [t for t in line if t]
    out, score, i = [], 0, 0
    while i < len(tiles):
        if i + 1 < len(tiles) and tiles[i] == tiles[i + 1]:
            out.append(2 * tiles[i])
            score += 2 * tiles[i]
            i += 2
        else:
            out.append(tiles[i])
            i += 1
    return out + [0] * (len(line) - len(out)), score


# sliding tile puzzle

def bfs_distances(goal) -> dict[tuple[int, ...], int]:
    """Blank-move distance to ``goal`` for every configuration reachable from it.

    Moves are reversible, so this is also the set of solvable configurations.
    Configurations are flattened row-major tuples with 0 for the blank.
    """
    g = len(goal)
    start = tuple(v for row in goal for v in row)
    dist = {start: 0}
    frontier = deque([start])
    while frontier:
        s = frontier.popleft()
        z = s.index(0)
        r, c = divmod(z, g)
        for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            nr, nc = r + dr, c + dc
            if 0 <= nr < g and 0 <= nc < g:
                t = list(s)
                t[z], t[nr * g + nc] = t[nr * g + nc], 0
                t = tuple(t)
                if t not in dist:
                    dist[t] = dist[s] + 1
                    frontier.append(t)
    return dist


# routing

def dist(a, b) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def tsp_brute_force(coords) -> float:
    """Shortest closed tour by enumerating all orders that start at city 0."""
    n = len(coords)
    best = math.inf
    for perm in itertools.permutations(range(1, n)):
        order = (0,) + perm
        length = sum(dist(coords[order[i]], coords[order[(i + 1) % n]]) for i in range(n))
        best = min(best, length)
    return best


def cvrp_brute_force(coords, demands, capacity) -> float:
    """Shortest depot-refilled route serving every customer.

    ``coords[0]`` is the depot, ``demands`` covers customers ``1..N``. Every
    customer order is tried together with every set of depot returns between
    consecutive customers; infeasible splits are skipped.
    """
    n = len(demands)
    best = math.inf
    for perm in itertools.permutations(range(1, n + 1)):
        for cuts in itertools.product((False, True), repeat=n - 1):
            route, load, ok = [0], 0, True
            for i, c in enumerate(perm):
                if i > 0 and cuts[i - 1]:
                    route.append(0)
                    load = 0
                load += demands[c - 1]
                if load > capacity:
                    ok = False
                    break
                route.append(c)
            if not ok:
                continue
            route.append(0)
            best = min(best, sum(dist(coords[a], coords[b]) for a, b in zip(route, route[1:])))
    return best


# packing

def knapsack_brute_force(weights, values, capacity) -> float:
    """Best total value over all subsets that fit."""
    best = 0.0
    n = len(weights)
    for mask in range(1 << n):
        w = sum(weights[i] for i in range(n) if mask >> i & 1)
        if w <= capacity:
            best = max(best, sum(values[i] for i in range(n) if mask >> i & 1))
    return best


def jobshop_brute_force(machines, durations) -> int:
    """Minimum makespan by enumerating operation sequences.

    Each machine processes its operations in the order they appear in the
    sequence; a semi-active schedule starts every operation as early as its
    job and machine allow. Enumerating all interleavings of the jobs' operation
    lists covers every semi-active schedule, and an optimal schedule is always
    semi-active.
    """
    jobs = len(machines)
    counts = [len(m) for m in machines]
    tokens = [j for j in range(jobs) for _ in range(counts[j])]
    best = math.inf
    for seq in set(itertools.permutations(tokens)):
        nxt = [0] * jobs
        job_free = [0] * jobs
        mach_free: dict[int, int] = {}
        for j in seq:
            o = nxt[j]
            m = machines[j][o]
            start = max(job_free[j], mach_free.get(m, 0))
            end = start + durations[j][o]
            job_free[j] = end
            mach_free[m] = end
            nxt[j] += 1
        best = min(best, max(job_free))
    return int(best)
