# SPDX-License-Identifier: LGPL-3.0-or-later
# Copyright (C) 2026 pyvalagg contributors

"""pyvalagg - aggregation of individual value systems into group agreements.

Agents hold a decision matrix (alternatives x values) and a weight vector over
values. They run projected decentralized gradient ascent on their own
utilities while averaging with neighbors on a bounded-confidence network that
rewires every round. Connected components of the final network are the
groups; each group's common limit is its agreed value system, which can then
rank the alternatives with TOPSIS.
"""

__version__ = "1.0.0"
__license__ = "LGPL-3.0-or-later"

from .core import (
    ConfidenceBounds, Group, Interval, Partition, Population, ValueSystem, Violation,
    validate_population,
)
from .geometry import (
    derive_confidence_bounds, euclidean_distance, frobenius_distance, pairwise_distances,
    project_box, project_simplex, quantile, run_bounds,
)
from .utility import (
    matrix_utility, matrix_utility_gradient, weight_utility, weight_utility_gradient,
)
from .network import (
    DiscoveryStrategy, FixedCandidates, FullAccess, Graph, MixingParameter, NoDiscovery,
    compute_epsilon, connected_components, initial_edges, update_neighbors,
)
from .solver import (
    AgentState, IterationRecord, RunResult, StepsizeSchedule, StoppingConfig,
    extract_partition, run_aggregation, step, stepsize,
)
from .oracle import (
    GroupOptimum, brute_force_weights_grid, group_optimum, group_optimum_matrix,
    group_optimum_weights,
)
from .mcdm import Ranking, ranking_notation, topsis_rank, value_order
from .analysis import (
    PartitionSummary, UtilityReport, bound_sweep, partition_summary, utility_report,
)
from .exceptions import (
    BoundaryWeightWarning, BoundsError, FormatError, MixingError, NonFiniteError,
    OracleError, ShapeError, SynthesisError, ValAggException, ValidationError,
)

__all__ = [
    "ConfidenceBounds", "Group", "Interval", "Partition", "Population", "ValueSystem",
    "Violation", "validate_population",
    "derive_confidence_bounds", "euclidean_distance", "frobenius_distance",
    "pairwise_distances", "project_box", "project_simplex", "quantile", "run_bounds",
    "matrix_utility", "matrix_utility_gradient", "weight_utility", "weight_utility_gradient",
    "DiscoveryStrategy", "FixedCandidates", "FullAccess", "Graph", "MixingParameter",
    "NoDiscovery", "compute_epsilon", "connected_components", "initial_edges",
    "update_neighbors",
    "AgentState", "IterationRecord", "RunResult", "StepsizeSchedule", "StoppingConfig",
    "extract_partition", "run_aggregation", "step", "stepsize",
    "GroupOptimum", "brute_force_weights_grid", "group_optimum", "group_optimum_matrix",
    "group_optimum_weights",
    "Ranking", "ranking_notation", "topsis_rank", "value_order",
    "PartitionSummary", "UtilityReport", "bound_sweep", "partition_summary", "utility_report",
    "BoundaryWeightWarning", "BoundsError", "FormatError", "MixingError", "NonFiniteError",
    "OracleError", "ShapeError", "SynthesisError", "ValAggException", "ValidationError",
]
