from batchenvs.envs.packing.jobshop import JobShop
from batchenvs.envs.packing.knapsack import Knapsack

__all__ = ["JobShop", "Knapsack"]
