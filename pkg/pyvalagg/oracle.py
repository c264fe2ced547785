# SPDX-License-Identifier: LGPL-3.0-or-later
# Copyright (C) 2026 pyvalagg contributors

"""Closed-form group optima used to check the decentralized solver.

The summed utilities are separable concave quadratics. For matrices every
entry is maximized independently by a weighted mean with weights
(1 - w_i,j)^-2. For weight vectors the same weighted means are shifted by a
Lagrange multiplier so the result sums to 1, with an active set that pins
negative coordinates at 0.
"""

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .constants import BRUTE_FORCE_MAX_RES, BRUTE_FORCE_MAX_VALUES
from .core import DecisionMatrix, Interval, ValueSystem, WeightVector
from .exceptions import OracleError
from .geometry import project_box
from .utility import matrix_utility_many, sensitivity, weight_utility_many

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GroupOptimum:
    """Maximizers of the summed utilities and the summed utility at them."""

    x_star: DecisionMatrix
    omega_star: WeightVector
    objective: float


def _stack(members: Sequence[ValueSystem]):
    if not members:
        raise OracleError("group optimum of an empty member list")
    xs = np.stack([m.matrix for m in members])
    ws = np.stack([m.weights for m in members])
    return xs, ws


def group_optimum_matrix(members: Sequence[ValueSystem], interval: Interval) -> DecisionMatrix:
    """Entrywise weighted mean of the members' matrices, clamped to the box.

    The mean is a convex combination of feasible entries, so the clamp is a
    no-op up to rounding.
    """
    xs, ws = _stack(members)
    s = sensitivity(ws)[:, None, :]          # n x 1 x V
    x_star = np.sum(s * xs, axis=0) / np.sum(s, axis=0)
    return project_box(x_star, interval)


def group_optimum_weights(members: Sequence[ValueSystem]) -> WeightVector:
    """Weighted least squares on the simplex via KKT with an active set."""
    _, ws = _stack(members)
    s = sensitivity(ws)                       # n x V
    total = s.sum(axis=0)                     # W_j
    mean = np.sum(s * ws, axis=0) / total     # unconstrained per-coordinate optimum
    half_inv = 1.0 / (2.0 * total)

    free = np.ones(ws.shape[1], dtype=bool)
    omega = np.zeros(ws.shape[1])
    # each pass pins at least one coordinate, so |V| passes suffice
    for _ in range(ws.shape[1]):
        lam = (mean[free].sum() - 1.0) / half_inv[free].sum()
        omega = np.zeros(ws.shape[1])
        omega[free] = mean[free] - lam * half_inv[free]
        negative = free & (omega < 0)
        if not negative.any():
            break
        free &= ~negative
        logger.debug(f"Active set pinned coordinates {np.flatnonzero(negative).tolist()} at 0")
    omega = np.maximum(omega, 0.0)
    return omega / omega.sum()


def group_objective(members: Sequence[ValueSystem], x: DecisionMatrix,
                    omega: WeightVector) -> float:
    """Sum of the members' matrix and weight utilities at (x, omega)."""
    xs, ws = _stack(members)
    return float(matrix_utility_many(xs, ws, x).sum() + weight_utility_many(ws, omega).sum())


def group_optimum(members: Sequence[ValueSystem], interval: Interval) -> GroupOptimum:
    x_star = group_optimum_matrix(members, interval)
    omega_star = group_optimum_weights(members)
    return GroupOptimum(x_star, omega_star, group_objective(members, x_star, omega_star))


def simplex_grid(n_values: int, resolution: float) -> np.ndarray:
    """All simplex points whose coordinates are multiples of ``resolution`` (|V| <= 3)."""
    steps = int(round(1.0 / resolution))
    if n_values == 1:
        return np.ones((1, 1))
    if n_values == 2:
        k = np.arange(steps + 1)
        return np.column_stack([k, steps - k]) / steps
    i, j = np.meshgrid(np.arange(steps + 1), np.arange(steps + 1), indexing="ij")
    keep = i + j <= steps
    i, j = i[keep], j[keep]
    return np.column_stack([i, j, steps - i - j]) / steps


def brute_force_weights_grid(members: Sequence[ValueSystem], resolution: float) -> WeightVector:
    """Grid point of the simplex maximizing the summed weight utility (test oracle)."""
    _, ws = _stack(members)
    n_values = ws.shape[1]
    if n_values > BRUTE_FORCE_MAX_VALUES:
        raise OracleError(f"brute force supports |V| <= {BRUTE_FORCE_MAX_VALUES}, got {n_values}")
    if not 0 < resolution <= BRUTE_FORCE_MAX_RES:
        raise OracleError(f"resolution must be in (0, {BRUTE_FORCE_MAX_RES}], got {resolution}")

    grid = simplex_grid(n_values, resolution)
    score = np.zeros(len(grid))
    for w in ws:
        score += weight_utility_many(w, grid)
    return grid[int(np.argmax(score))]
