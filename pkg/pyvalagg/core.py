# SPDX-License-Identifier: LGPL-3.0-or-later
# Copyright (C) 2026 pyvalagg contributors

"""Domain types for value systems, populations and partitions.

A value system pairs a decision matrix (rows = alternatives, columns = values,
entries inside the population's evaluation interval) with a weight vector on
the probability simplex. All types are immutable once built: arrays are copied
and flagged read-only, so they can be shared across threads.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .constants import WEIGHT_SUM_TOL

logger = logging.getLogger(__name__)

# Aliases for readability; the arrays themselves carry the shape.
DecisionMatrix = np.ndarray   # |A| x |V|
WeightVector = np.ndarray     # |V|


def _frozen_array(data: Any) -> np.ndarray:
    arr = np.array(data, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Interval:
    """Compact evaluation interval [lo, hi]."""

    lo: float
    hi: float

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def is_valid(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi) and self.lo < self.hi


@dataclass(frozen=True)
class ConfidenceBounds:
    """Per-agent acceptance radii: Frobenius for matrices, Euclidean for weights."""

    gamma_x: float
    gamma_omega: float

    @property
    def is_degenerate(self) -> bool:
        """True when either bound is not strictly positive and finite."""
        return not (
            math.isfinite(self.gamma_x) and math.isfinite(self.gamma_omega)
            and self.gamma_x > 0 and self.gamma_omega > 0
        )


@dataclass(frozen=True, eq=False)
class ValueSystem:
    """One agent's decision matrix, weight vector and optional bounds."""

    agent_id: str
    matrix: DecisionMatrix
    weights: WeightVector
    bounds: Optional[ConfidenceBounds] = None
    meta: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "agent_id", str(self.agent_id))
        object.__setattr__(self, "matrix", _frozen_array(self.matrix))
        object.__setattr__(self, "weights", _frozen_array(self.weights))
        object.__setattr__(self, "meta", dict(self.meta))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ValueSystem):
            return NotImplemented
        return (
            self.agent_id == other.agent_id
            and self.matrix.shape == other.matrix.shape
            and np.array_equal(self.matrix, other.matrix)
            and self.weights.shape == other.weights.shape
            and np.array_equal(self.weights, other.weights)
            and self.bounds == other.bounds
            and self.meta == other.meta
        )

    __hash__ = None  # type: ignore[assignment]

    def with_bounds(self, bounds: Optional[ConfidenceBounds]) -> "ValueSystem":
        return replace(self, bounds=bounds)


@dataclass(frozen=True)
class Population:
    """Shared labels, evaluation interval and every agent's value system."""

    values: Tuple[str, ...]
    alternatives: Tuple[str, ...]
    interval: Interval
    agents: Tuple[ValueSystem, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(str(v) for v in self.values))
        object.__setattr__(self, "alternatives", tuple(str(a) for a in self.alternatives))
        object.__setattr__(self, "agents", tuple(self.agents))

    def __len__(self) -> int:
        return len(self.agents)

    def __iter__(self) -> Iterator[ValueSystem]:
        return iter(self.agents)

    @property
    def shape(self) -> Tuple[int, int]:
        """(|A|, |V|) expected for every decision matrix."""
        return len(self.alternatives), len(self.values)

    @property
    def agent_ids(self) -> List[str]:
        return [a.agent_id for a in self.agents]

    @cached_property
    def matrices(self) -> np.ndarray:
        """Stacked decision matrices, n x |A| x |V| (read-only)."""
        return _frozen_array([a.matrix for a in self.agents])

    @cached_property
    def weight_matrix(self) -> np.ndarray:
        """Stacked weight vectors, n x |V| (read-only)."""
        return _frozen_array([a.weights for a in self.agents])

    @property
    def has_bounds(self) -> bool:
        return all(a.bounds is not None for a in self.agents)

    def bound_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        """Per-agent (gamma_x, gamma_omega) arrays; agents without bounds give NaN."""
        gx = np.array([a.bounds.gamma_x if a.bounds else np.nan for a in self.agents])
        gw = np.array([a.bounds.gamma_omega if a.bounds else np.nan for a in self.agents])
        return gx, gw

    def with_bounds(self, bounds: ConfidenceBounds) -> "Population":
        """Copy with the same global bounds assigned to every agent."""
        return replace(self, agents=tuple(a.with_bounds(bounds) for a in self.agents))

    def subset(self, indices: Sequence[int]) -> List[ValueSystem]:
        return [self.agents[i] for i in indices]


@dataclass(frozen=True)
class Violation:
    """One invariant violation, located by agent id and field path."""

    path: str
    message: str
    agent_id: Optional[str] = None

    def __str__(self) -> str:
        who = f"agent {self.agent_id!r} " if self.agent_id is not None else ""
        return f"{who}{self.path}: {self.message}"


@dataclass(frozen=True, eq=False)
class Group:
    """One block of a partition and its agreed value system."""

    group_id: int
    members: Tuple[int, ...]
    x_star: DecisionMatrix
    omega_star: WeightVector
    oracle_x_star: Optional[DecisionMatrix] = None
    oracle_omega_star: Optional[WeightVector] = None

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(int(m) for m in self.members))
        object.__setattr__(self, "x_star", _frozen_array(self.x_star))
        object.__setattr__(self, "omega_star", _frozen_array(self.omega_star))
        if self.oracle_x_star is not None:
            object.__setattr__(self, "oracle_x_star", _frozen_array(self.oracle_x_star))
        if self.oracle_omega_star is not None:
            object.__setattr__(self, "oracle_omega_star", _frozen_array(self.oracle_omega_star))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Group):
            return NotImplemented

        def same(a: Optional[np.ndarray], b: Optional[np.ndarray]) -> bool:
            if a is None or b is None:
                return a is None and b is None
            return a.shape == b.shape and np.array_equal(a, b)

        return (
            self.group_id == other.group_id
            and self.members == other.members
            and same(self.x_star, other.x_star)
            and same(self.omega_star, other.omega_star)
            and same(self.oracle_x_star, other.oracle_x_star)
            and same(self.oracle_omega_star, other.oracle_omega_star)
        )

    __hash__ = None  # type: ignore[assignment]

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def max_oracle_gap(self) -> Optional[float]:
        """Largest entrywise gap between the agreed system and the oracle optimum."""
        if self.oracle_x_star is None or self.oracle_omega_star is None:
            return None
        return float(max(
            np.max(np.abs(self.x_star - self.oracle_x_star)),
            np.max(np.abs(self.omega_star - self.oracle_omega_star)),
        ))


@dataclass(frozen=True)
class Partition:
    """Disjoint covering grouping of agent indices with agreed systems."""

    groups: Tuple[Group, ...]

    def __post_init__(self):
        object.__setattr__(self, "groups", tuple(self.groups))

    def __len__(self) -> int:
        return len(self.groups)

    def __iter__(self) -> Iterator[Group]:
        return iter(self.groups)

    @property
    def blocks(self) -> List[Tuple[int, ...]]:
        return [g.members for g in self.groups]

    @property
    def n_agents(self) -> int:
        return sum(g.size for g in self.groups)

    def group_of(self, agent_index: int) -> Group:
        for g in self.groups:
            if agent_index in g.members:
                return g
        raise KeyError(f"agent index {agent_index} is in no group")

    def membership(self) -> np.ndarray:
        """Array mapping agent index -> position of its group in ``groups``."""
        labels = np.full(self.n_agents, -1, dtype=int)
        for pos, g in enumerate(self.groups):
            labels[list(g.members)] = pos
        return labels


def validate_population(pop: Population) -> List[Violation]:
    """Return every invariant violation of ``pop``; an empty list means valid.

    Pure and idempotent: nothing is repaired here (see fileio for the
    renormalization applied at ingest).
    """
    violations: List[Violation] = []
    n_alt, n_val = pop.shape

    if not pop.interval.is_valid():
        violations.append(Violation(
            "interval",
            f"interval [{pop.interval.lo}, {pop.interval.hi}] must be finite with lo < hi"))
    if n_val < 1:
        violations.append(Violation("values", "population must define at least one value"))
    if n_alt < 1:
        violations.append(Violation("alternatives",
                                    "population must define at least one alternative"))
    if len(set(pop.values)) != n_val:
        violations.append(Violation("values", "value names must be unique"))
    if len(set(pop.alternatives)) != n_alt:
        violations.append(Violation("alternatives", "alternative names must be unique"))
    if len(pop.agents) < 1:
        violations.append(Violation("agents", "population must contain at least one agent"))

    seen = set()
    for idx, agent in enumerate(pop.agents):
        base = f"agents[{idx}]"
        aid = agent.agent_id
        if aid in seen:
            violations.append(Violation(f"{base}.id", f"duplicate agent id {aid!r}", aid))
        seen.add(aid)
        violations.extend(_validate_matrix(agent, base, (n_alt, n_val), pop.interval))
        violations.extend(_validate_weights(agent, base, n_val))
        if agent.bounds is not None and agent.bounds.is_degenerate:
            violations.append(Violation(
                f"{base}.bounds",
                f"bounds ({agent.bounds.gamma_x}, {agent.bounds.gamma_omega}) "
                "must be finite and > 0",
                aid))

    return violations


def _validate_matrix(agent: ValueSystem, base: str, shape: Tuple[int, int],
                     interval: Interval) -> List[Violation]:
    m = agent.matrix
    if m.shape != shape:
        return [Violation(f"{base}.matrix",
                          f"matrix shape {m.shape} does not match |A| x |V| = {shape}",
                          agent.agent_id)]
    if not np.all(np.isfinite(m)):
        return [Violation(f"{base}.matrix", "matrix has non-finite entries", agent.agent_id)]
    outside = np.argwhere((m < interval.lo) | (m > interval.hi))
    if len(outside):
        cells = ", ".join(f"({k},{j})={m[k, j]:g}" for k, j in outside)
        return [Violation(f"{base}.matrix",
                          f"entry out of interval [{interval.lo:g}, {interval.hi:g}]: {cells}",
                          agent.agent_id)]
    return []


def _validate_weights(agent: ValueSystem, base: str, n_val: int) -> List[Violation]:
    w = agent.weights
    if w.shape != (n_val,):
        return [Violation(f"{base}.weights",
                          f"weights length {w.size} does not match |V| = {n_val}",
                          agent.agent_id)]
    if not np.all(np.isfinite(w)):
        return [Violation(f"{base}.weights", "weights have non-finite entries", agent.agent_id)]
    found = []
    bad = np.flatnonzero((w <= 0) | (w >= 1))
    if len(bad):
        found.append(Violation(f"{base}.weights",
                               f"weights must lie in (0, 1): indices {bad.tolist()}",
                               agent.agent_id))
    total = float(np.sum(w))
    if abs(total - 1.0) > WEIGHT_SUM_TOL:
        found.append(Violation(f"{base}.weights", f"weights sum {total:.12g} != 1",
                               agent.agent_id))
    return found
