# SPDX-License-Identifier: LGPL-3.0-or-later
# Copyright (C) 2026 pyvalagg contributors

"""Synthetic populations with planted clusters.

Cluster centers are drawn uniformly (matrix entries in the interval, weights
Dirichlet on the simplex) and rejection-sampled until every pair of matrix
centers is at least ``separation`` apart in Frobenius distance. Members are
their center plus uniform noise, projected back onto the feasible sets and
pulled off the simplex boundary. Each agent's cluster label is stored in
``meta["cluster"]``.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .constants import SYNTH_INTERIOR_MIX, SYNTH_MAX_RETRIES
from .core import Interval, Population, ValueSystem
from .exceptions import SynthesisError
from .geometry import project_box, project_simplex

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SynthSpec:
    clusters: int
    per_cluster: int
    n_values: int
    n_alternatives: int
    interval: Interval
    separation: float
    noise: float
    seed: int = 0
    weight_noise: Optional[float] = None     # default: noise scaled to the unit simplex
    weight_separation: float = 0.0           # min Euclidean distance between weight centers
    concentration: float = 1.0               # Dirichlet parameter of weight centers

    def __post_init__(self):
        if self.clusters < 1 or self.per_cluster < 1:
            raise ValueError("clusters and per_cluster must be at least 1")
        if self.n_values < 2:
            raise ValueError("n_values must be at least 2 for weights inside (0, 1)")
        if self.n_alternatives < 1:
            raise ValueError("n_alternatives must be at least 1")
        if not self.interval.is_valid():
            raise ValueError(f"invalid interval [{self.interval.lo}, {self.interval.hi}]")
        if not self.separation > 0:
            raise ValueError(f"separation must be > 0, got {self.separation}")
        if self.noise < 0 or (self.weight_noise is not None and self.weight_noise < 0):
            raise ValueError("noise must be >= 0")
        if self.weight_separation < 0:
            raise ValueError("weight_separation must be >= 0")
        if not self.concentration > 0:
            raise ValueError("concentration must be > 0")

    @property
    def n_agents(self) -> int:
        return self.clusters * self.per_cluster

    @property
    def box_diameter(self) -> float:
        """Largest Frobenius distance between two matrices in the box."""
        return self.interval.width * math.sqrt(self.n_alternatives * self.n_values)

    @property
    def effective_weight_noise(self) -> float:
        if self.weight_noise is not None:
            return self.weight_noise
        return self.noise / self.interval.width


def _sample_separated(rng: np.random.Generator, count: int, min_dist: float, draw,
                      what: str) -> List[np.ndarray]:
    centers: List[np.ndarray] = []
    retries = 0
    while len(centers) < count:
        candidate = draw()
        if all(np.linalg.norm(candidate - c) >= min_dist for c in centers):
            centers.append(candidate)
            continue
        retries += 1
        if retries > SYNTH_MAX_RETRIES:
            raise SynthesisError(f"could not place {count} {what} centers {min_dist} apart "
                                 f"within {SYNTH_MAX_RETRIES} retries")
    logger.debug(f"Placed {count} {what} centers after {retries} rejections")
    return centers


def _interior(w: np.ndarray) -> np.ndarray:
    """Mix toward the barycenter when a weight sits on the simplex boundary."""
    if np.all(w > 0) and np.all(w < 1):
        return w
    return (1.0 - SYNTH_INTERIOR_MIX) * w + SYNTH_INTERIOR_MIX / w.size


def generate_population(spec: SynthSpec) -> Population:
    """Deterministic for a given spec (seed included)."""
    if spec.separation > spec.box_diameter:
        raise SynthesisError(f"separation {spec.separation} exceeds the box diameter "
                             f"{spec.box_diameter:.6g}")
    if spec.weight_separation > math.sqrt(2.0):
        raise SynthesisError(f"weight separation {spec.weight_separation} exceeds the simplex "
                             f"diameter sqrt(2)")

    rng = np.random.default_rng(spec.seed)
    lo, hi = spec.interval.lo, spec.interval.hi
    shape = (spec.n_alternatives, spec.n_values)
    alpha = np.full(spec.n_values, spec.concentration)

    x_centers = _sample_separated(rng, spec.clusters, spec.separation,
                                  lambda: rng.uniform(lo, hi, size=shape), "matrix")
    w_centers = _sample_separated(rng, spec.clusters, spec.weight_separation,
                                  lambda: rng.dirichlet(alpha), "weight")

    wn = spec.effective_weight_noise
    agents = []
    for k in range(spec.clusters):
        for m in range(spec.per_cluster):
            x = project_box(x_centers[k] + rng.uniform(-spec.noise, spec.noise, size=shape),
                            spec.interval)
            w = project_simplex(w_centers[k] + rng.uniform(-wn, wn, size=spec.n_values))
            w = _interior(w)
            agents.append(ValueSystem(f"c{k}-{m}", x, w / w.sum(), meta={"cluster": k}))

    pop = Population(
        values=tuple(f"v{j + 1}" for j in range(spec.n_values)),
        alternatives=tuple(f"o{k + 1}" for k in range(spec.n_alternatives)),
        interval=spec.interval,
        agents=tuple(agents),
    )
    logger.info(f"Generated {len(pop)} agents in {spec.clusters} cluster(s) "
                f"(separation {spec.separation}, noise {spec.noise}, seed {spec.seed})")
    return pop


def planted_labels(pop: Population) -> List[int]:
    """Cluster label of every agent, from its metadata."""
    return [int(a.meta["cluster"]) for a in pop.agents]
