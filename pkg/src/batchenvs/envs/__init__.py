"""The standard environments and their registered configurations."""

from batchenvs.api.registry import EnvDescriptor, registry
from batchenvs.envs.logic import Game2048, RubiksCube, SlidingTilePuzzle
from batchenvs.envs.packing import JobShop, Knapsack
from batchenvs.envs.routing import CVRP, TSP, Maze, Snake

STANDARD_ENVS = (
    EnvDescriptor("Game2048-v1", Game2048, {"board_size": 4}, "logic", "merge tiles to maximise the summed merges"),
    EnvDescriptor(
        "RubiksCube-v0", RubiksCube, {"cube_size": 3, "num_scrambles": 100, "time_limit": 200}, "logic",
        "turn faces until every face shows one colour",
    ),
    EnvDescriptor(
        "RubiksCube-partly-scrambled-v0", RubiksCube, {"cube_size": 3, "num_scrambles": 3, "time_limit": 20},
        "logic", "solve a cube scrambled by three random turns",
    ),
    EnvDescriptor(
        "SlidingTilePuzzle-v0", SlidingTilePuzzle, {"grid_size": 5, "num_random_moves": 100, "time_limit": 500},
        "logic", "slide tiles into sorted order",
    ),
    EnvDescriptor("Maze-v0", Maze, {"num_rows": 10, "num_cols": 10}, "routing", "walk the agent to the target"),
    EnvDescriptor("Snake-v1", Snake, {"grid_size": 12}, "routing", "eat as many fruits as possible without crashing"),
    EnvDescriptor("TSP-v1", TSP, {"num_cities": 20}, "routing", "shortest closed tour visiting every city once"),
    EnvDescriptor(
        "CVRP-v1", CVRP, {"num_customers": 20, "capacity": 30, "max_demand": 9}, "routing",
        "shortest depot-refilled route serving every customer",
    ),
    EnvDescriptor(
        "Knapsack-v1", Knapsack, {"num_items": 50, "total_budget": 12.5}, "packing",
        "maximise packed value within the weight budget",
    ),
    EnvDescriptor(
        "JobShop-v0", JobShop, {"num_jobs": 5, "num_machines": 4, "max_num_ops": 4, "max_op_duration": 6},
        "packing", "schedule every operation to minimise the makespan",
    ),
)

for _desc in STANDARD_ENVS:
    if _desc.id not in registry:
        registry.register(_desc)

__all__ = ["CVRP", "TSP", "Game2048", "JobShop", "Knapsack", "Maze", "RubiksCube", "SlidingTilePuzzle", "Snake"]
