from batchenvs.envs.routing.cvrp import CVRP
from batchenvs.envs.routing.maze import Maze
from batchenvs.envs.routing.snake import Snake
from batchenvs.envs.routing.tsp import TSP, tour_length

__all__ = ["CVRP", "Maze", "Snake", "TSP", "tour_length"]
