# SPDX-License-Identifier: LGPL-3.0-or-later
# Copyright (C) 2026 pyvalagg contributors

"""Distances, projections onto the feasible sets, and quartile-based
confidence-bound derivation.

Decision matrices are compared with the Frobenius distance, weight vectors with
the Euclidean distance. Projections are taken in the same norms: entrywise
clamping for the interval box, sort-and-threshold for the closed simplex.
"""

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.spatial.distance import pdist

from .constants import BOUND_LEVELS, FEASIBILITY_TOL, MAX_BOUND_MARGIN
from .core import ConfidenceBounds, DecisionMatrix, Interval, Population, WeightVector
from .exceptions import BoundsError, ShapeError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PairwiseDistances:
    """Sorted Frobenius / Euclidean distances over all unordered agent pairs."""

    matrix_distances: np.ndarray
    weight_distances: np.ndarray

    @property
    def n_pairs(self) -> int:
        return int(self.matrix_distances.size)


def frobenius_distance(a: DecisionMatrix, b: DecisionMatrix) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ShapeError(f"matrix shapes differ: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def euclidean_distance(a: WeightVector, b: WeightVector) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ShapeError(f"vector lengths differ: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def project_box(m: np.ndarray, interval: Interval) -> np.ndarray:
    """Frobenius projection onto M(I): entrywise clamp to [lo, hi].

    Works on a single matrix or on any stack of them.
    """
    return np.clip(np.asarray(m, dtype=float), interval.lo, interval.hi)


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the closed probability simplex.

    Sort-and-threshold: with u sorted descending, the threshold is
    (sum(u[:rho+1]) - 1) / (rho + 1) for the largest rho such that
    u[rho] exceeds it. The last axis indexes values, so a stack of
    weight vectors (n x |V|) is projected row by row. Rows already on the
    simplex (to FEASIBILITY_TOL) come back unchanged.
    """
    v = np.asarray(v, dtype=float)
    if v.shape[-1] < 1:
        raise ShapeError("cannot project an empty vector")
    n_val = v.shape[-1]
    feasible = np.all(v >= 0, axis=-1) & (np.abs(v.sum(axis=-1) - 1.0) <= FEASIBILITY_TOL)
    u = -np.sort(-v, axis=-1)
    css = np.cumsum(u, axis=-1) - 1.0
    ind = np.arange(1, n_val + 1)
    active = u - css / ind > 0
    # index of the last active coordinate; coordinate 0 is always active
    rho = n_val - 1 - np.argmax(active[..., ::-1], axis=-1)
    theta = np.take_along_axis(css, rho[..., None], axis=-1) / (rho[..., None] + 1)
    return np.where(feasible[..., None], v, np.maximum(v - theta, 0.0))


def quantile(data: Sequence[float], q: float) -> float:
    """Linear-interpolation quantile: position q * (n - 1) in the sorted data."""
    arr = np.asarray(data, dtype=float)
    if arr.size == 0:
        raise ValueError("quantile of empty data")
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must be in [0, 1], got {q}")
    return float(np.quantile(arr, q, method="linear"))


def pairwise_distances(pop: Population) -> PairwiseDistances:
    """All n(n-1)/2 pairwise distances between the agents' original systems."""
    n = len(pop)
    flat = pop.matrices.reshape(n, -1)
    dx = np.sort(pdist(flat, metric="euclidean"))
    dw = np.sort(pdist(pop.weight_matrix, metric="euclidean"))
    return PairwiseDistances(matrix_distances=dx, weight_distances=dw)


def derive_confidence_bounds(pop: Population, level: str) -> ConfidenceBounds:
    """Global bound pair from the quartiles (or maxima) of the pairwise distances."""
    if level not in BOUND_LEVELS:
        raise BoundsError(f"unknown bound level {level!r}; expected one of {sorted(BOUND_LEVELS)}")
    if len(pop) < 2:
        raise BoundsError(f"deriving bounds needs at least 2 agents, got {len(pop)}")

    q = BOUND_LEVELS[level]
    dists = pairwise_distances(pop)
    bounds = ConfidenceBounds(
        gamma_x=quantile(dists.matrix_distances, q),
        gamma_omega=quantile(dists.weight_distances, q),
    )
    if bounds.is_degenerate:
        logger.warning(f"Degenerate bounds at level {level}: ({bounds.gamma_x}, "
                       f"{bounds.gamma_omega}); bounds must be > 0 to build a network")
    else:
        logger.info(f"Derived {level} bounds over {dists.n_pairs} pairs: "
                    f"gamma_x={bounds.gamma_x:.6g}, gamma_omega={bounds.gamma_omega:.6g}")
    return bounds


def run_bounds(pop: Population, level: str) -> ConfidenceBounds:
    """Bounds used for a run at ``level``.

    Edges need a distance strictly below the bound, so at "max" the maxima
    are widened by MAX_BOUND_MARGIN (relative) to keep the farthest pair
    connected.
    """
    bounds = derive_confidence_bounds(pop, level)
    if level == "max":
        bounds = ConfidenceBounds(bounds.gamma_x * (1.0 + MAX_BOUND_MARGIN),
                                  bounds.gamma_omega * (1.0 + MAX_BOUND_MARGIN))
    return bounds
