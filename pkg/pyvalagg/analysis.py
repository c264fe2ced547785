# SPDX-License-Identifier: LGPL-3.0-or-later
# Copyright (C) 2026 pyvalagg contributors

"""Post-run statistics.

utility_report evaluates every agent's own utilities at the agreed system of
its group. partition_summary describes the grouping with within-group
distances between the agents' ORIGINAL value systems, pooled over all
within-group pairs of all groups. bound_sweep repeats a run per bound level.
"""

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .constants import BOUND_LEVELS, DISTANCE_POOLING, EPSILON_AUTO
from .core import ConfidenceBounds, Partition, Population
from .exceptions import ValidationError
from .geometry import euclidean_distance, frobenius_distance, quantile, run_bounds
from .network import DiscoveryStrategy, EpsilonMode
from .solver import RunResult, StepsizeSchedule, StoppingConfig, run_aggregation
from .utility import matrix_utility, weight_utility

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AgentUtility:
    agent_id: str
    group: int
    matrix_utility: float
    weight_utility: float


@dataclass(frozen=True)
class DistributionSummary:
    minimum: float
    maximum: float
    mean: float
    q1: float
    median: float
    q3: float

    @classmethod
    def of(cls, data: Sequence[float]) -> "DistributionSummary":
        arr = np.asarray(data, dtype=float)
        return cls(
            minimum=float(arr.min()),
            maximum=float(arr.max()),
            mean=float(arr.mean()),
            q1=quantile(arr, 0.25),
            median=quantile(arr, 0.5),
            q3=quantile(arr, 0.75),
        )

    @property
    def spread(self) -> float:
        return self.maximum - self.minimum


@dataclass(frozen=True)
class GroupUtility:
    """Mean member utilities of one group."""

    group_id: int
    size: int
    mean_matrix_utility: float
    mean_weight_utility: float


@dataclass(frozen=True)
class UtilityReport:
    agents: Tuple[AgentUtility, ...]
    matrix_summary: DistributionSummary
    weight_summary: DistributionSummary
    groups: Tuple[GroupUtility, ...]

    @property
    def matrix_utilities(self) -> np.ndarray:
        return np.array([a.matrix_utility for a in self.agents])

    @property
    def weight_utilities(self) -> np.ndarray:
        return np.array([a.weight_utility for a in self.agents])

    def plot_data(self) -> Dict[str, List[float]]:
        """Sorted utilities per distribution, ready for a violin or strip plot."""
        return {
            "matrix": sorted(self.matrix_utilities.tolist()),
            "weights": sorted(self.weight_utilities.tolist()),
        }


@dataclass(frozen=True)
class PartitionSummary:
    group_count: int
    sizes: Tuple[int, ...]
    avg_matrix_distance: Optional[float]
    avg_weight_distance: Optional[float]
    pooling: str = DISTANCE_POOLING

    @property
    def pair_count(self) -> int:
        return sum(s * (s - 1) // 2 for s in self.sizes)


def _check_covers(pop: Population, partition: Partition) -> None:
    members = sorted(m for g in partition for m in g.members)
    if members != list(range(len(pop))):
        raise ValidationError([], f"partition covers {len(members)} indices, "
                                  f"population has {len(pop)} agents")


def utility_report(pop: Population, partition: Partition) -> UtilityReport:
    _check_covers(pop, partition)
    rows: List[AgentUtility] = [None] * len(pop)  # type: ignore[list-item]
    groups = []
    for g in partition:
        mu, wu = [], []
        for i in g.members:
            agent = pop.agents[i]
            row = AgentUtility(agent.agent_id, g.group_id,
                               matrix_utility(agent, g.x_star), weight_utility(agent, g.omega_star))
            rows[i] = row
            mu.append(row.matrix_utility)
            wu.append(row.weight_utility)
        groups.append(GroupUtility(g.group_id, g.size, float(np.mean(mu)), float(np.mean(wu))))

    report = UtilityReport(
        agents=tuple(rows),
        matrix_summary=DistributionSummary.of([r.matrix_utility for r in rows]),
        weight_summary=DistributionSummary.of([r.weight_utility for r in rows]),
        groups=tuple(groups),
    )
    logger.debug(f"Utility report: mean matrix {report.matrix_summary.mean:.6g}, "
                 f"mean weight {report.weight_summary.mean:.6g}")
    return report


def partition_summary(pop: Population, partition: Partition) -> PartitionSummary:
    _check_covers(pop, partition)
    dx: List[float] = []
    dw: List[float] = []
    for g in partition:
        for i, j in combinations(g.members, 2):
            a, b = pop.agents[i], pop.agents[j]
            dx.append(frobenius_distance(a.matrix, b.matrix))
            dw.append(euclidean_distance(a.weights, b.weights))
    return PartitionSummary(
        group_count=len(partition),
        sizes=tuple(g.size for g in partition),
        avg_matrix_distance=float(np.mean(dx)) if dx else None,
        avg_weight_distance=float(np.mean(dw)) if dw else None,
    )


@dataclass(frozen=True, eq=False)
class SweepEntry:
    level: str
    bounds: ConfidenceBounds
    result: RunResult
    summary: PartitionSummary


def bound_sweep(
    pop: Population,
    levels: Sequence[str] = tuple(BOUND_LEVELS),
    discovery: Optional[DiscoveryStrategy] = None,
    schedule: Optional[StepsizeSchedule] = None,
    stopping: Optional[StoppingConfig] = None,
    epsilon_mode: EpsilonMode = EPSILON_AUTO,
) -> List[SweepEntry]:
    """Run the aggregation once per global bound level and summarize each partition."""
    entries = []
    for level in levels:
        bounds = run_bounds(pop, level)
        result = run_aggregation(pop.with_bounds(bounds), discovery, schedule, stopping,
                                 epsilon_mode)
        summary = partition_summary(pop, result.partition)
        logger.info(f"Level {level}: {summary.group_count} group(s), "
                    f"converged={result.converged} after {result.iterations} iterations")
        entries.append(SweepEntry(level, bounds, result, summary))
    return entries
