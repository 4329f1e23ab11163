from batchenvs.envs.logic.game2048 import Game2048
from batchenvs.envs.logic.rubiks_cube import RubiksCube
from batchenvs.envs.logic.sliding_tile_puzzle import SlidingTilePuzzle

__all__ = ["Game2048", "RubiksCube", "SlidingTilePuzzle"]
