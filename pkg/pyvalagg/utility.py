# SPDX-License-Identifier: LGPL-3.0-or-later
# Copyright (C) 2026 pyvalagg contributors

"""Individual utilities for decision matrices and weight vectors, and their
exact ascent gradients.

Both utilities are negated squared errors scaled per value by 1 / (1 - w_j),
where w is the owner's own weight vector: the more an agent weighs a value,
the faster its utility drops when that value's column (or weight) moves.

The ``*_many`` kernels broadcast over a leading agent axis and are what the
solver calls every round; the single-owner functions wrap them.
"""

import numpy as np

from .core import DecisionMatrix, ValueSystem, WeightVector
from .exceptions import ShapeError


def sensitivity(weights: np.ndarray) -> np.ndarray:
    """Per-value curvature factor (1 - w_j)^-2 of an owner (or stack of owners)."""
    return (1.0 - np.asarray(weights, dtype=float)) ** -2


def matrix_utility_many(own_x: np.ndarray, own_w: np.ndarray, cand: np.ndarray) -> np.ndarray:
    """u^X for each owner in a stack: own_x n x A x V, own_w n x V, cand n x A x V."""
    diff = cand - own_x
    return -np.sum(diff * diff * sensitivity(own_w)[..., None, :], axis=(-2, -1))


def matrix_gradient_many(own_x: np.ndarray, own_w: np.ndarray, cand: np.ndarray) -> np.ndarray:
    return -2.0 * (cand - own_x) * sensitivity(own_w)[..., None, :]


def weight_utility_many(own_w: np.ndarray, cand: np.ndarray) -> np.ndarray:
    diff = cand - own_w
    return -np.sum(diff * diff * sensitivity(own_w), axis=-1)


def weight_gradient_many(own_w: np.ndarray, cand: np.ndarray) -> np.ndarray:
    return -2.0 * (cand - own_w) * sensitivity(own_w)


def _check_matrix(owner: ValueSystem, candidate: np.ndarray) -> np.ndarray:
    candidate = np.asarray(candidate, dtype=float)
    if candidate.shape != owner.matrix.shape:
        raise ShapeError(f"candidate shape {candidate.shape} does not match "
                         f"agent {owner.agent_id!r} matrix {owner.matrix.shape}")
    if owner.weights.shape != (candidate.shape[1],):
        raise ShapeError(f"agent {owner.agent_id!r} has {owner.weights.size} weights "
                         f"for {candidate.shape[1]} values")
    return candidate


def _check_weights(owner: ValueSystem, candidate: np.ndarray) -> np.ndarray:
    candidate = np.asarray(candidate, dtype=float)
    if candidate.shape != owner.weights.shape:
        raise ShapeError(f"candidate length {candidate.shape} does not match "
                         f"agent {owner.agent_id!r} weights {owner.weights.shape}")
    return candidate


def matrix_utility(owner: ValueSystem, candidate: DecisionMatrix) -> float:
    """-sum_jk ((x_kj - x_i,kj) / (1 - w_i,j))^2; zero only at the owner's matrix."""
    candidate = _check_matrix(owner, candidate)
    return float(matrix_utility_many(owner.matrix, owner.weights, candidate))


def matrix_utility_gradient(owner: ValueSystem, candidate: DecisionMatrix) -> np.ndarray:
    """Ascent gradient: entry (k, j) = -2 (x_kj - x_i,kj) / (1 - w_i,j)^2."""
    candidate = _check_matrix(owner, candidate)
    return matrix_gradient_many(owner.matrix, owner.weights, candidate)


def weight_utility(owner: ValueSystem, candidate: WeightVector) -> float:
    """-sum_j ((w_j - w_i,j) / (1 - w_i,j))^2; zero only at the owner's weights."""
    candidate = _check_weights(owner, candidate)
    return float(weight_utility_many(owner.weights, candidate))


def weight_utility_gradient(owner: ValueSystem, candidate: WeightVector) -> np.ndarray:
    """Ascent gradient: component j = -2 (w_j - w_i,j) / (1 - w_i,j)^2."""
    candidate = _check_weights(owner, candidate)
    return weight_gradient_many(owner.weights, candidate)
