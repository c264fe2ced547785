# SPDX-License-Identifier: LGPL-3.0-or-later
# Copyright (C) 2026 pyvalagg contributors

"""TOPSIS ranking of alternatives under an agreed value system.

Every value is a benefit criterion. Columns are vector-normalized, scaled by
the weights, and each alternative is scored by its relative closeness
d- / (d+ + d-) to the ideal point.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .constants import DEFAULT_TIE_TOL, RANK_PREFIX, RANK_TIE
from .exceptions import ShapeError


@dataclass(frozen=True, eq=False)
class Ranking:
    """Alternatives ordered best to worst; each entry is a tie group of indices."""

    groups: Tuple[Tuple[int, ...], ...]
    closeness: np.ndarray

    @property
    def order(self) -> List[int]:
        """Flat best-to-worst order, ties broken by index."""
        return [k for g in self.groups for k in g]

    def __len__(self) -> int:
        return len(self.groups)


def _tie_groups(scores: np.ndarray, tie_tol: float) -> Tuple[Tuple[int, ...], ...]:
    """Descending tie groups; a score joins a group within tie_tol of its leader."""
    order = sorted(range(len(scores)), key=lambda k: (-scores[k], k))
    groups: List[List[int]] = []
    for k in order:
        if groups and scores[groups[-1][0]] - scores[k] <= tie_tol:
            groups[-1].append(k)
        else:
            groups.append([k])
    return tuple(tuple(sorted(g)) for g in groups)


def topsis_rank(x: np.ndarray, omega: np.ndarray, tie_tol: float = DEFAULT_TIE_TOL) -> Ranking:
    x = np.asarray(x, dtype=float)
    omega = np.asarray(omega, dtype=float)
    if x.ndim != 2 or x.shape[0] < 1:
        raise ShapeError(f"decision matrix must be |A| x |V| with |A| >= 1, got {x.shape}")
    if omega.shape != (x.shape[1],):
        raise ShapeError(f"{omega.size} weights for {x.shape[1]} values")

    norms = np.linalg.norm(x, axis=0)
    safe = np.where(norms > 0, norms, 1.0)
    v = np.where(norms > 0, x / safe, 0.0) * omega

    ideal = v.max(axis=0)
    anti = v.min(axis=0)
    d_plus = np.linalg.norm(v - ideal, axis=1)
    d_minus = np.linalg.norm(v - anti, axis=1)
    total = d_plus + d_minus
    with np.errstate(invalid="ignore", divide="ignore"):
        closeness = np.where(total > 0, d_minus / np.where(total > 0, total, 1.0), 0.5)

    closeness.setflags(write=False)
    return Ranking(groups=_tie_groups(closeness, tie_tol), closeness=closeness)


def ranking_notation(ranking: Ranking, names: Optional[Sequence[str]] = None) -> str:
    """Worst-to-best string such as "o2 < o1" or "o1 ~ o2"."""
    def label(k: int) -> str:
        return names[k] if names is not None else f"o{k + 1}"

    parts = [f" {RANK_TIE} ".join(label(k) for k in g) for g in reversed(ranking.groups)]
    return f" {RANK_PREFIX} ".join(parts)


def value_order(omega: np.ndarray, value_names: Sequence[str],
                tie_tol: float = DEFAULT_TIE_TOL) -> str:
    """Values from least to most weighted, in the ranking notation."""
    omega = np.asarray(omega, dtype=float)
    if omega.shape != (len(value_names),):
        raise ShapeError(f"{omega.size} weights for {len(value_names)} value names")
    groups = _tie_groups(omega, tie_tol)
    return ranking_notation(Ranking(groups=groups, closeness=omega), value_names)
