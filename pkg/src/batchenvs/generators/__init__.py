"""Initial-state generators: TSP coordinate distributions, mixtures and file instances."""

from batchenvs.envs.routing.tsp import UniformGenerator
from batchenvs.generators.coords import cluster_generate, compression_generate, explosion_generate, uniform_coordinates
from batchenvs.generators.tsp import (
    ClusterGenerator,
    CompressionGenerator,
    ExplosionGenerator,
    FileGenerator,
    GeneratorSpec,
    MixtureGenerator,
    mixture_reset,
    standard_mixture,
)
from batchenvs.generators.tsplib import load_instances, parse_tsplib, subsample, write_tsplib

__all__ = [
    "ClusterGenerator",
    "CompressionGenerator",
    "ExplosionGenerator",
    "FileGenerator",
    "GeneratorSpec",
    "MixtureGenerator",
    "UniformGenerator",
    "cluster_generate",
    "compression_generate",
    "explosion_generate",
    "load_instances",
    "mixture_reset",
    "parse_tsplib",
    "standard_mixture",
    "subsample",
    "uniform_coordinates",
    "write_tsplib",
]
