# SPDX-License-Identifier: LGPL-3.0-or-later
# Copyright (C) 2026 pyvalagg contributors

"""Shared constants for value-system validation, the decentralized solver,
bound derivation, ranking, file formats and the command-line front end.

References:
- Value system: (V, A, X, Omega) with X in M_{|A|x|V|}(I), Omega on the simplex
- Projected decentralized gradient ascent with bounded-confidence rewiring
- TOPSIS with vector normalization, benefit criteria only
"""

# Ingest tolerances
WEIGHT_SUM_TOL      = 1e-9   # |sum(weights) - 1| accepted as-is
WEIGHT_RENORM_TOL   = 1e-6   # below this, weights are divided by their sum
FEASIBILITY_TOL     = 1e-12  # box / simplex membership of iterates

# Stepsize schedule alpha(t) = alpha0 / (t + 1) ** decay
DEFAULT_ALPHA0      = 0.1
DEFAULT_DECAY       = 1.0
MIN_DECAY           = 0.5    # exclusive: square-summability
MAX_DECAY           = 1.0    # inclusive: divergent sum

# Stopping
DEFAULT_TOL_X           = 1e-6
DEFAULT_TOL_OMEGA       = 1e-6
DEFAULT_STABLE_WINDOW   = 50
DEFAULT_MAX_ITERS       = 100000
DEFAULT_CONSENSUS_TOL   = 1e-4
DEFAULT_LOG_EVERY       = 1000   # iterations between DEBUG progress lines

# Confidence-bound levels (quantile of the pairwise-distance multisets)
BOUND_LEVELS = {
    "q1":  0.25,
    "q2":  0.5,
    "q3":  0.75,
    "max": 1.0,
}
MAX_BOUND_MARGIN    = 1e-9   # relative margin added at level "max" (strict "<")
BOUNDS_FROM_FILE    = "file"
DEFAULT_BOUND_LEVEL = "max"  # used when no --bounds is given and the file lacks bounds

# Mixing
EPSILON_AUTO        = "auto"

# Discovery strategy names (CLI)
DISCOVERY_FULL      = "full"
DISCOVERY_NONE      = "none"

# Ranking
DEFAULT_TIE_TOL     = 1e-9
RANK_PREFIX         = "<"    # ASCII rendering of "strictly preferred"
RANK_TIE            = "~"    # ASCII rendering of "indifferent"

# Oracle
BRUTE_FORCE_MAX_VALUES  = 3
BRUTE_FORCE_MAX_RES     = 1e-2

# Synthetic populations
SYNTH_MAX_RETRIES   = 10000
SYNTH_INTERIOR_MIX  = 1e-6   # pull boundary weights back into the open simplex

# File formats
POPULATION_FORMAT   = "pyvalagg-population"
RESULT_FORMAT       = "pyvalagg-result"
FORMAT_VERSION      = 1
DISTANCE_POOLING    = "pooled-pairs"
TRACE_COLUMNS = (
    "t",
    "alpha",
    "epsilon",
    "edge_count",
    "component_count",
    "max_dx",
    "max_domega",
    "max_consensus_residual",
)
TRACE_DELIMITER     = ","

# Exit codes
EXIT_OK             = 0
EXIT_NOT_CONVERGED  = 2
EXIT_VALIDATION     = 3
EXIT_IO             = 4
