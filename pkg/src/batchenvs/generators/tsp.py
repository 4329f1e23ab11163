"""Initial-state generators for TSP.

All generators return :class:`~batchenvs.envs.routing.tsp.TspState`, so the
environment steps their instances with the same code whatever the source.
Parameters left as ``None`` are drawn per instance from the key.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from batchenvs import rng
from batchenvs.envs.routing.tsp import TspState, UniformGenerator, make_state
from batchenvs.generators import coords as C
from batchenvs.generators.tsplib import load_instances, subsample

DEFAULT_RADIUS = 0.15
DEFAULT_THICKNESS = 0.02
DEFAULT_MIN_PUSH = 0.3


def _check_n(num_cities: int) -> int:
    if num_cities < 2:
        raise ValueError("num_cities must be >= 2")
    return num_cities


class ClusterGenerator:
    def __init__(self, num_cities: int = 20, center=None, radius: float = DEFAULT_RADIUS):
        if not radius > 0:
            raise ValueError("radius must be positive")
        self.num_cities = _check_n(num_cities)
        self.center = center
        self.radius = radius

    def __call__(self, key) -> TspState:
        k_param, k_pts = rng.split(rng.as_key_array(key), 2)
        center = rng.uniform(k_param, 2) if self.center is None else self.center
        return make_state(C.cluster_generate(k_pts, self.num_cities, center, self.radius))


class CompressionGenerator:
    def __init__(self, num_cities: int = 20, line=None, thickness: float = DEFAULT_THICKNESS):
        self.num_cities = _check_n(num_cities)
        self.line = line
        self.thickness = thickness

    def __call__(self, key) -> TspState:
        k_param, k_pts = rng.split(rng.as_key_array(key), 2)
        if self.line is None:
            # redraw in the (measure-zero) case of coincident endpoints
            i = 0
            while True:
                ends = rng.uniform(rng.fold_in(k_param, i), 4).reshape(2, 2)
                if not np.array_equal(ends[0], ends[1]):
                    break
                i += 1
            line = (ends[0], ends[1])
        else:
            line = self.line
        return make_state(C.compression_generate(k_pts, self.num_cities, line, self.thickness))


class ExplosionGenerator:
    """Same point draws as :class:`UniformGenerator`, pushed away from a reference."""

    def __init__(self, num_cities: int = 20, reference=None, min_push: float = DEFAULT_MIN_PUSH):
        self.num_cities = _check_n(num_cities)
        self.reference = reference
        self.min_push = min_push

    def __call__(self, key) -> TspState:
        key = rng.as_key_array(key)
        # the reference comes from a folded key so the point draws match UniformGenerator(key)
        ref = rng.uniform(rng.fold_in(key, 0), 2) if self.reference is None else self.reference
        return make_state(C.explosion_generate(key, self.num_cities, ref, self.min_push))


class FileGenerator:
    """Uniformly picks one loaded instance and subsamples ``num_cities`` of its cities."""

    def __init__(self, instances: Sequence[np.ndarray] | str, num_cities: int | None = None):
        if isinstance(instances, (str, bytes)) or hasattr(instances, "__fspath__"):
            instances = load_instances(instances)
        self.instances = [np.asarray(x, dtype=np.float64) for x in instances]
        if not self.instances:
            raise ValueError("no instances given")
        self.num_cities = num_cities

    def __call__(self, key) -> TspState:
        k_pick, k_sub = rng.split(rng.as_key_array(key), 2)
        inst = self.instances[rng.randint(k_pick, 0, len(self.instances))]
        k = inst.shape[0] if self.num_cities is None else self.num_cities
        return make_state(subsample(k_sub, inst, k))


class MixtureGenerator:
    """Pick a component with probability proportional to its weight, then generate.

    The key is split into a selection key and a generation key; the chosen
    component receives the generation key ``split(key, 2)[1]``.
    """

    def __init__(self, generators: Sequence[Any], weights: Sequence[float] | None = None):
        weights = [1.0] * len(generators) if weights is None else list(weights)
        if len(generators) != len(weights) or not generators:
            raise ValueError("need the same positive number of generators and weights")
        w = np.asarray(weights, dtype=np.float64)
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise ValueError("mixture weights must be positive and finite")
        self.generators = list(generators)
        self.weights = w

    def select(self, key) -> int:
        k_sel = rng.split(rng.as_key_array(key), 2)[0]
        return int(rng.choice_index(k_sel, self.weights))

    def __call__(self, key) -> TspState:
        k_gen = rng.split(rng.as_key_array(key), 2)[1]
        return self.generators[self.select(key)](k_gen)


def mixture_reset(key, generators: Sequence[Any], weights: Sequence[float]) -> TspState:
    return MixtureGenerator(generators, weights)(key)


KINDS = ("uniform", "cluster", "compression", "explosion", "from_file", "mixture")


@dataclass
class GeneratorSpec:
    """Declarative description of a TSP generator.

    ``params`` holds kind-specific values: ``center``/``radius`` (cluster),
    ``line``/``thickness`` (compression), ``reference``/``min_push``
    (explosion), ``path`` (from_file), ``components``/``weights`` (mixture,
    components being further ``GeneratorSpec`` values).
    """

    kind: str
    num_cities: int = 20
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}; expected one of {KINDS}")
        _check_n(self.num_cities)

    def build(self):
        p, n = self.params, self.num_cities
        if self.kind == "uniform":
            return UniformGenerator(n)
        if self.kind == "cluster":
            return ClusterGenerator(n, p.get("center"), p.get("radius", DEFAULT_RADIUS))
        if self.kind == "compression":
            return CompressionGenerator(n, p.get("line"), p.get("thickness", DEFAULT_THICKNESS))
        if self.kind == "explosion":
            return ExplosionGenerator(n, p.get("reference"), p.get("min_push", DEFAULT_MIN_PUSH))
        if self.kind == "from_file":
            return FileGenerator(p["path"], n)
        comps = [c.build() if isinstance(c, GeneratorSpec) else c for c in p["components"]]
        return MixtureGenerator(comps, p.get("weights"))


def standard_mixture(num_cities: int = 20) -> MixtureGenerator:
    """Equal mixture of the uniform, cluster, compression and explosion generators."""
    return MixtureGenerator(
        [UniformGenerator(num_cities), ClusterGenerator(num_cities), CompressionGenerator(num_cities),
         ExplosionGenerator(num_cities)],
        [1.0, 1.0, 1.0, 1.0],
    )
