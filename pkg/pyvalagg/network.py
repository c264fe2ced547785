# SPDX-License-Identifier: LGPL-3.0-or-later
# Copyright (C) 2026 pyvalagg contributors

"""Undirected dynamic communication graph.

Handles initial edge construction from confidence bounds, mixing-parameter
selection, bounded-confidence neighbor updates with pluggable discovery, and
connected components. Edges use strict "<" against min(gamma_i, gamma_j) for
both the matrix and the weight distance; a distance equal to the bound gives
no edge.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import cached_property
from typing import FrozenSet, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _cc
from scipy.spatial.distance import pdist, squareform

from .constants import EPSILON_AUTO
from .core import Population
from .exceptions import BoundsError, MixingError

logger = logging.getLogger(__name__)

EpsilonMode = Union[str, float]


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph on agents 0..n-1, stored as a boolean adjacency."""

    adjacency: np.ndarray

    def __post_init__(self):
        adj = np.array(self.adjacency, dtype=bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError(f"adjacency must be square, got {adj.shape}")
        if np.any(np.diag(adj)):
            raise ValueError("graph must not contain self-loops")
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency must be symmetric")
        adj.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(np.zeros((n, n), dtype=bool))

    @classmethod
    def from_edges(cls, n: int, edges: Sequence[Tuple[int, int]]) -> "Graph":
        adj = np.zeros((n, n), dtype=bool)
        for i, j in edges:
            if i == j:
                raise ValueError(f"self-loop on agent {i}")
            adj[i, j] = adj[j, i] = True
        return cls(adj)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return np.array_equal(self.adjacency, other.adjacency)

    __hash__ = None  # type: ignore[assignment]

    @property
    def n(self) -> int:
        return int(self.adjacency.shape[0])

    @cached_property
    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    @property
    def edge_count(self) -> int:
        return int(self.degrees.sum()) // 2

    @cached_property
    def edges(self) -> FrozenSet[Tuple[int, int]]:
        """Unordered pairs as (i, j) with i < j."""
        i, j = np.nonzero(np.triu(self.adjacency, k=1))
        return frozenset(zip(i.tolist(), j.tolist()))

    def neighbors(self, i: int) -> Tuple[int, ...]:
        return tuple(np.flatnonzero(self.adjacency[i]).tolist())


@dataclass(frozen=True)
class MixingParameter:
    """Uniform edge weight eps; agent i keeps self-weight 1 - deg_i * eps."""

    epsilon: float

    def self_weights(self, g: Graph) -> np.ndarray:
        return 1.0 - g.degrees * self.epsilon


class DiscoveryStrategy(ABC):
    """Supplies the newly discovered neighbor candidates N_new,i(t).

    ``discover`` returns an n x n boolean matrix whose row i marks the
    candidates of agent i. It may be asymmetric: update_neighbors tests each
    unordered pair once.
    """

    name = "custom"

    @abstractmethod
    def discover(self, t: int, x: np.ndarray, omega: np.ndarray) -> np.ndarray:
        """Candidate matrix for round t given stacked iterates."""


class FullAccess(DiscoveryStrategy):
    """Every agent can reach every other agent: N_new,i(t) = Ag minus {i}."""

    name = "full"

    def discover(self, t: int, x: np.ndarray, omega: np.ndarray) -> np.ndarray:
        n = x.shape[0]
        return ~np.eye(n, dtype=bool)


class NoDiscovery(DiscoveryStrategy):
    """Only existing edges are re-tested; the graph can shrink but never grow."""

    name = "none"

    def discover(self, t: int, x: np.ndarray, omega: np.ndarray) -> np.ndarray:
        n = x.shape[0]
        return np.zeros((n, n), dtype=bool)


class FixedCandidates(DiscoveryStrategy):
    """Static candidate lists, e.g. a known contact network."""

    name = "fixed"

    def __init__(self, candidates: Mapping[int, Sequence[int]]):
        self.candidates = {int(i): tuple(int(j) for j in js) for i, js in candidates.items()}

    def discover(self, t: int, x: np.ndarray, omega: np.ndarray) -> np.ndarray:
        n = x.shape[0]
        mask = np.zeros((n, n), dtype=bool)
        for i, js in self.candidates.items():
            for j in js:
                if not (0 <= i < n and 0 <= j < n):
                    raise IndexError(f"candidate pair ({i}, {j}) outside 0..{n - 1}")
                if i != j:
                    mask[i, j] = True
        return mask


def pairwise_distance_matrices(x: np.ndarray, omega: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Square Frobenius (n x n) and Euclidean (n x n) distance matrices of stacked iterates."""
    n = x.shape[0]
    if n < 2:
        return np.zeros((n, n)), np.zeros((n, n))
    dx = squareform(pdist(x.reshape(n, -1), metric="euclidean"))
    dw = squareform(pdist(omega, metric="euclidean"))
    return dx, dw


def retain_edges(candidates: np.ndarray, dx: np.ndarray, dw: np.ndarray,
                 gamma_x: np.ndarray, gamma_omega: np.ndarray) -> np.ndarray:
    """Keep candidate pairs whose distances are strictly inside both min bounds."""
    within = ((dx < np.minimum.outer(gamma_x, gamma_x))
              & (dw < np.minimum.outer(gamma_omega, gamma_omega)))
    adj = candidates & within
    np.fill_diagonal(adj, False)
    return adj


def _checked_bounds(pop: Population) -> Tuple[np.ndarray, np.ndarray]:
    gx, gw = pop.bound_arrays()
    missing = [a.agent_id for a in pop.agents if a.bounds is None]
    if missing:
        raise BoundsError(f"agents without confidence bounds: {missing}")
    bad = [a.agent_id for a in pop.agents if a.bounds.is_degenerate]
    if bad:
        raise BoundsError(f"agents with non-positive or non-finite bounds: {bad}")
    return gx, gw


def initial_edges(pop: Population) -> Graph:
    """Connect agents whose original systems lie within both agents' bounds."""
    gx, gw = _checked_bounds(pop)
    n = len(pop)
    dx, dw = pairwise_distance_matrices(pop.matrices, pop.weight_matrix)
    g = Graph(retain_edges(~np.eye(n, dtype=bool), dx, dw, gx, gw))
    logger.info(f"Initial graph: {n} agents, {g.edge_count} edges, max degree {g.max_degree}")
    return g


def compute_epsilon(g: Graph, mode: EpsilonMode = EPSILON_AUTO) -> MixingParameter:
    """Mixing parameter for the current graph.

    auto: 1 / (max_degree + 1). fixed: the given value, checked against
    0 < eps < 1 / max_degree. Edgeless graphs get eps = 0 in both modes.
    """
    dmax = g.max_degree
    if mode == EPSILON_AUTO:
        eps = 1.0 / (dmax + 1) if dmax >= 1 else 0.0
        return MixingParameter(eps)

    try:
        value = float(mode)
    except (TypeError, ValueError):
        raise MixingError(f"epsilon mode must be 'auto' or a number, got {mode!r}")
    if not 0.0 < value < 1.0:
        raise MixingError(f"fixed epsilon {value} must lie in (0, 1)")
    if dmax == 0:
        return MixingParameter(0.0)
    if value * dmax >= 1.0:
        raise MixingError(f"fixed epsilon {value} violates eps < 1/max_degree = {1.0 / dmax:.6g}")
    return MixingParameter(value)


def update_neighbors(x: np.ndarray, omega: np.ndarray, graph: Graph,
                     gamma_x: np.ndarray, gamma_omega: np.ndarray,
                     discovery: DiscoveryStrategy, t: int = 0,
                     distances: Optional[Tuple[np.ndarray, np.ndarray]] = None) -> Graph:
    """Graph at t+1 from the iterates at t.

    Candidates are the current edges plus discovered pairs (symmetrized);
    a candidate survives iff both distances are strictly below the smaller
    of the two agents' bounds. ``distances`` may pass in the square distance
    matrices of (x, omega) when the caller already has them.
    """
    found = discovery.discover(t, x, omega)
    candidates = graph.adjacency | found | found.T
    dx, dw = distances if distances is not None else pairwise_distance_matrices(x, omega)
    return Graph(retain_edges(candidates, dx, dw, gamma_x, gamma_omega))


def component_labels(g: Graph) -> Tuple[int, np.ndarray]:
    if g.n == 0:
        return 0, np.zeros(0, dtype=int)
    return _cc(csr_matrix(g.adjacency), directed=False)


def connected_components(g: Graph) -> List[Tuple[int, ...]]:
    """Components as sorted index tuples, ordered by their smallest member."""
    count, labels = component_labels(g)
    blocks = [tuple(np.flatnonzero(labels == c).tolist()) for c in range(count)]
    return sorted(blocks, key=lambda b: b[0])
