# SPDX-License-Identifier: LGPL-3.0-or-later
# Copyright (C) 2026 pyvalagg contributors

"""Projected decentralized gradient ascent over the bounded-confidence graph.

Every round is synchronous: all agents read the iterates of round t, then
write round t+1. Each update is

    X_i <- P_box[ X_i + eps * sum_{j in N_i} (X_j - X_i) + alpha(t) * grad u^X_i(X_i) ]
    W_i <- P_simplex[ W_i + eps * sum_{j in N_i} (W_j - W_i) + alpha(t) * grad u^W_i(W_i) ]

followed by a neighbor update on the new iterates. The run stops once update
norms, the edge set and the within-component consensus residual have all
been quiet for ``stable_window`` consecutive rounds.
"""

import logging
import warnings
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from .constants import (
    DEFAULT_ALPHA0, DEFAULT_CONSENSUS_TOL, DEFAULT_DECAY, DEFAULT_LOG_EVERY,
    DEFAULT_MAX_ITERS, DEFAULT_STABLE_WINDOW, DEFAULT_TOL_OMEGA, DEFAULT_TOL_X,
    EPSILON_AUTO, FEASIBILITY_TOL, MAX_DECAY, MIN_DECAY,
)
from .core import Group, Partition, Population, validate_population
from .exceptions import BoundaryWeightWarning, MixingError, NonFiniteError, ValidationError
from .geometry import project_box, project_simplex
from .network import (
    DiscoveryStrategy, EpsilonMode, FullAccess, Graph, MixingParameter,
    component_labels, compute_epsilon, connected_components, initial_edges,
    pairwise_distance_matrices, update_neighbors,
)
from .oracle import group_optimum_matrix, group_optimum_weights
from .utility import matrix_gradient_many, weight_gradient_many

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StepsizeSchedule:
    """alpha(t) = alpha0 / (t + 1) ** decay, decay in (0.5, 1]."""

    alpha0: float = DEFAULT_ALPHA0
    decay: float = DEFAULT_DECAY

    def __post_init__(self):
        if not (np.isfinite(self.alpha0) and self.alpha0 > 0):
            raise ValueError(f"alpha0 must be > 0, got {self.alpha0}")
        if not MIN_DECAY < self.decay <= MAX_DECAY:
            raise ValueError(f"decay must be in ({MIN_DECAY}, {MAX_DECAY}], got {self.decay}")

    def __call__(self, t: int) -> float:
        return stepsize(self, t)


def stepsize(schedule: StepsizeSchedule, t: int) -> float:
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    return schedule.alpha0 / (t + 1) ** schedule.decay


@dataclass(frozen=True)
class StoppingConfig:
    tol_x: float = DEFAULT_TOL_X
    tol_omega: float = DEFAULT_TOL_OMEGA
    stable_window: int = DEFAULT_STABLE_WINDOW
    max_iters: int = DEFAULT_MAX_ITERS
    consensus_tol: float = DEFAULT_CONSENSUS_TOL

    def __post_init__(self):
        for name in ("tol_x", "tol_omega", "consensus_tol"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be > 0, got {value}")
        if self.stable_window < 1:
            raise ValueError("stable_window must be at least 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")


@dataclass(frozen=True, eq=False)
class AgentState:
    """One agent's iterates X_i(t), W_i(t) and neighbor set N_i(t)."""

    x: np.ndarray
    omega: np.ndarray
    neighbors: Tuple[int, ...]


@dataclass(frozen=True)
class IterationRecord:
    """One trace row; fields follow the trace file columns."""

    t: int
    alpha: float
    epsilon: float
    edge_count: int
    component_count: int
    max_dx: float
    max_domega: float
    max_consensus_residual: float

    def as_row(self) -> Tuple:
        return (self.t, self.alpha, self.epsilon, self.edge_count, self.component_count,
                self.max_dx, self.max_domega, self.max_consensus_residual)


@dataclass(frozen=True, eq=False)
class RunResult:
    final_states: Tuple[AgentState, ...]
    final_graph: Graph
    partition: Partition
    iterations: int
    converged: bool
    trace: Optional[List[IterationRecord]] = field(default=None)

    @property
    def group_count(self) -> int:
        return len(self.partition)


def step(x: np.ndarray, omega: np.ndarray, graph: Graph, epsilon: MixingParameter,
         alpha_t: float, pop: Population, t: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """One synchronous round on stacked iterates (n x |A| x |V|, n x |V|).

    Raises MixingError if eps breaks the degree bound of ``graph`` and
    NonFiniteError if any gradient or update stops being finite.
    """
    eps = epsilon.epsilon
    if graph.max_degree >= 1 and not (0 < eps and eps * graph.max_degree < 1):
        raise MixingError(f"epsilon {eps} violates eps * max_degree < 1 "
                          f"(max_degree {graph.max_degree})")

    grad_x = matrix_gradient_many(pop.matrices, pop.weight_matrix, x)
    grad_w = weight_gradient_many(pop.weight_matrix, omega)
    if not (np.all(np.isfinite(grad_x)) and np.all(np.isfinite(grad_w))):
        raise NonFiniteError("non-finite utility gradient", t)

    n = x.shape[0]
    flat = x.reshape(n, -1)
    if graph.edge_count:
        adj = graph.adjacency.astype(float)
        deg = graph.degrees[:, None]
        mix_x = eps * (adj @ flat - deg * flat)
        mix_w = eps * (adj @ omega - deg * omega)
    else:
        mix_x = np.zeros_like(flat)
        mix_w = np.zeros_like(omega)

    raw_x = x + mix_x.reshape(x.shape) + alpha_t * grad_x
    raw_w = omega + mix_w + alpha_t * grad_w
    if not (np.all(np.isfinite(raw_x)) and np.all(np.isfinite(raw_w))):
        raise NonFiniteError("non-finite update", t)
    return project_box(raw_x, pop.interval), project_simplex(raw_w)


def _consensus_residual(graph: Graph, dx: np.ndarray, dw: np.ndarray) -> Tuple[float, float]:
    """Largest matrix and weight distance across any edge."""
    if not graph.edge_count:
        return 0.0, 0.0
    adj = graph.adjacency
    return float(dx[adj].max()), float(dw[adj].max())


def _check_feasible(x: np.ndarray, omega: np.ndarray, pop: Population, t: int) -> None:
    lo, hi = pop.interval.lo, pop.interval.hi
    if np.any(x < lo - FEASIBILITY_TOL) or np.any(x > hi + FEASIBILITY_TOL):
        raise AssertionError(f"matrix iterate left the box at iteration {t}")
    off_simplex = np.abs(omega.sum(axis=1) - 1) > FEASIBILITY_TOL * 10
    if np.any(omega < -FEASIBILITY_TOL) or np.any(off_simplex):
        raise AssertionError(f"weight iterate left the simplex at iteration {t}")


def run_aggregation(
    pop: Population,
    discovery: Optional[DiscoveryStrategy] = None,
    schedule: Optional[StepsizeSchedule] = None,
    stopping: Optional[StoppingConfig] = None,
    epsilon_mode: EpsilonMode = EPSILON_AUTO,
    trace: bool = False,
    on_iteration: Optional[Callable[[IterationRecord], None]] = None,
) -> RunResult:
    """Run the decentralized aggregation until it settles or hits max_iters.

    Agents start at their own value systems on the graph from initial_edges.
    ``on_iteration`` receives every trace record as it is produced (the CLI
    streams the trace file through it); records are collected on the result
    only when ``trace`` is set.
    """
    discovery = discovery if discovery is not None else FullAccess()
    schedule = schedule if schedule is not None else StepsizeSchedule()
    stopping = stopping if stopping is not None else StoppingConfig()

    violations = validate_population(pop)
    if violations:
        raise ValidationError(violations)

    graph = initial_edges(pop)
    gamma_x, gamma_w = pop.bound_arrays()
    x = np.array(pop.matrices, dtype=float)
    omega = np.array(pop.weight_matrix, dtype=float)
    n = len(pop)

    logger.info(f"Starting aggregation: n={n}, shape={pop.shape}, discovery={discovery.name}, "
                f"alpha0={schedule.alpha0}, decay={schedule.decay}, epsilon={epsilon_mode}, "
                f"max_iters={stopping.max_iters}")

    records: Optional[List[IterationRecord]] = [] if trace else None
    want_records = trace or on_iteration is not None
    stable = 0
    converged = False
    t = 0
    for t in range(stopping.max_iters):
        eps = compute_epsilon(graph, epsilon_mode)
        alpha = stepsize(schedule, t)

        new_x, new_w = step(x, omega, graph, eps, alpha, pop, t)
        _check_feasible(new_x, new_w, pop, t)

        max_dx = float(np.max(np.linalg.norm((new_x - x).reshape(n, -1), axis=1)))
        max_dw = float(np.max(np.linalg.norm(new_w - omega, axis=1)))

        distances = pairwise_distance_matrices(new_x, new_w)
        new_graph = update_neighbors(new_x, new_w, graph, gamma_x, gamma_w, discovery, t, distances)
        same_edges = new_graph == graph
        res_x, res_w = _consensus_residual(new_graph, *distances)

        x, omega, graph = new_x, new_w, new_graph

        if want_records:
            record = IterationRecord(
                t=t, alpha=alpha, epsilon=eps.epsilon, edge_count=graph.edge_count,
                component_count=component_labels(graph)[0], max_dx=max_dx, max_domega=max_dw,
                max_consensus_residual=max(res_x, res_w),
            )
            if records is not None:
                records.append(record)
            if on_iteration is not None:
                on_iteration(record)

        quiet = (max_dx <= stopping.tol_x and max_dw <= stopping.tol_omega and same_edges
                 and res_x <= stopping.consensus_tol and res_w <= stopping.consensus_tol)
        stable = stable + 1 if quiet else 0

        if t % DEFAULT_LOG_EVERY == 0:
            logger.debug(f"t={t} alpha={alpha:.3g} eps={eps.epsilon:.3g} edges={graph.edge_count} "
                         f"dx={max_dx:.3g} dw={max_dw:.3g} residual={max(res_x, res_w):.3g}")

        if stable >= stopping.stable_window:
            converged = True
            break

    iterations = t + 1
    partition = extract_partition(graph, x, omega, pop)
    states = tuple(AgentState(x=x[i].copy(), omega=omega[i].copy(), neighbors=graph.neighbors(i))
                   for i in range(n))
    if converged:
        logger.info(f"Converged after {iterations} iterations: {len(partition)} group(s)")
    else:
        logger.warning(f"No convergence within {stopping.max_iters} iterations; "
                       f"reporting {len(partition)} group(s) of the last graph")
    return RunResult(final_states=states, final_graph=graph, partition=partition,
                     iterations=iterations, converged=converged, trace=records)


def extract_partition(graph: Graph, x: np.ndarray, omega: np.ndarray, pop: Population,
                      with_oracle: bool = True) -> Partition:
    """Components of ``graph`` with the projected member-mean as agreed system.

    Each group also carries the closed-form optimum of its members for
    comparison. Singletons report their original system, not their last
    iterate.
    """
    groups = []
    for gid, members in enumerate(connected_components(graph), start=1):
        idx = list(members)
        if len(idx) == 1:
            x_star = pop.agents[idx[0]].matrix.copy()
            omega_star = pop.agents[idx[0]].weights.copy()
        else:
            x_star = project_box(x[idx].mean(axis=0), pop.interval)
            omega_star = project_simplex(omega[idx].mean(axis=0))
        if np.any(omega_star <= 0):
            zeros = np.flatnonzero(omega_star <= 0).tolist()
            msg = f"group {gid}: agreed weights have zero components at values {zeros}"
            logger.warning(msg)
            warnings.warn(msg, BoundaryWeightWarning, stacklevel=2)
        oracle_x = oracle_w = None
        if with_oracle:
            members_vs = pop.subset(idx)
            oracle_x = group_optimum_matrix(members_vs, pop.interval)
            oracle_w = group_optimum_weights(members_vs)
        groups.append(Group(group_id=gid, members=members, x_star=x_star, omega_star=omega_star,
                            oracle_x_star=oracle_x, oracle_omega_star=oracle_w))
    return Partition(tuple(groups))
