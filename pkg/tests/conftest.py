# SPDX-License-Identifier: LGPL-3.0-or-later
# Copyright (C) 2026 pyvalagg contributors

"""Shared fixtures: the four-friends population, fixture paths, random populations."""

import os

import numpy as np
import pytest

from pyvalagg.core import ConfidenceBounds, Interval, Population, ValueSystem

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")

# Four friends choosing between a private car (PC) and car sharing (CS)
# under power (P), tradition (T) and safety (S) values, scored 1..7.
EXAMPLE1_MATRICES = [
    [[7, 7, 7], [1, 1, 1]],
    [[6, 3, 3], [2, 5, 5]],
    [[2, 1, 3], [6, 7, 3]],
    [[1, 1, 1], [7, 7, 7]],
]
EXAMPLE1_WEIGHTS = [
    [0.4, 0.4, 0.2],
    [0.2, 0.2, 0.6],
    [0.5, 0.2, 0.3],
    [0.3, 0.3, 0.4],
]


def build_population(matrices, weights, interval=(1.0, 7.0), bounds=None, values=None,
                     alternatives=None, ids=None):
    matrices = [np.asarray(m, dtype=float) for m in matrices]
    n_alt, n_val = matrices[0].shape
    ids = ids or [str(i + 1) for i in range(len(matrices))]
    agents = tuple(ValueSystem(aid, m, w, bounds) for aid, m, w in zip(ids, matrices, weights))
    return Population(
        values=tuple(values or [f"v{j + 1}" for j in range(n_val)]),
        alternatives=tuple(alternatives or [f"o{k + 1}" for k in range(n_alt)]),
        interval=Interval(*interval),
        agents=agents,
    )


@pytest.fixture
def fixture_path():
    def _path(name):
        return os.path.join(FIXTURES, name)
    return _path


@pytest.fixture
def example1():
    return build_population(EXAMPLE1_MATRICES, EXAMPLE1_WEIGHTS,
                            values=["P", "T", "S"], alternatives=["PC", "CS"])


@pytest.fixture
def example1_narrow(example1):
    """Per-agent bounds (7, 0.3): only friends 3 and 4 start connected."""
    return example1.with_bounds(ConfidenceBounds(7.0, 0.3))


@pytest.fixture
def make_population():
    return build_population


@pytest.fixture
def random_population():
    """Factory for random populations on [0, 1] with every weight below ``max_weight``."""
    def _make(rng, n, n_alt, n_val, max_weight=0.5, concentration=8.0):
        matrices = rng.uniform(0.0, 1.0, size=(n, n_alt, n_val))
        weights = []
        while len(weights) < n:
            w = rng.dirichlet(np.full(n_val, concentration))
            if w.max() < max_weight:
                weights.append(w)
        return build_population(matrices, weights, interval=(0.0, 1.0))
    return _make
