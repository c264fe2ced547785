# SPDX-License-Identifier: LGPL-3.0-or-later
# Copyright (C) 2026 pyvalagg contributors

"""Tests for the stepsize schedule, the synchronous step and full runs."""

import numpy as np
import pytest

from pyvalagg.analysis import utility_report
from pyvalagg.core import ConfidenceBounds
from pyvalagg.exceptions import BoundaryWeightWarning, MixingError, NonFiniteError, ValidationError
from pyvalagg.network import Graph, MixingParameter, NoDiscovery
from pyvalagg.oracle import group_optimum_matrix, group_optimum_weights
from pyvalagg.solver import (
    StepsizeSchedule, StoppingConfig, extract_partition, run_aggregation, step, stepsize,
)

FAST = StepsizeSchedule(alpha0=0.2)
LOOSE = StoppingConfig(consensus_tol=2e-3, max_iters=50000)


@pytest.mark.parametrize("alpha0,decay,t,expected", [
    (0.1, 1.0, 0, 0.1),
    (0.1, 1.0, 9, 0.01),
    (0.5, 0.6, 0, 0.5),
])
def test_stepsize_examples(alpha0, decay, t, expected):
    assert stepsize(StepsizeSchedule(alpha0, decay), t) == pytest.approx(expected)


def test_stepsize_is_strictly_decreasing():
    s = StepsizeSchedule(0.3, 0.75)
    values = [s(t) for t in range(200)]
    assert all(a > b for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("alpha0,decay", [(0.0, 1.0), (-1.0, 1.0), (0.1, 0.5), (0.1, 1.2)])
def test_schedule_validation(alpha0, decay):
    with pytest.raises(ValueError):
        StepsizeSchedule(alpha0, decay)


def test_stopping_validation():
    with pytest.raises(ValueError):
        StoppingConfig(tol_x=0)
    with pytest.raises(ValueError):
        StoppingConfig(stable_window=0)
    with pytest.raises(ValueError):
        StoppingConfig(max_iters=0)


def test_step_averages_connected_pair(example1_narrow):
    pop = example1_narrow
    g = Graph.from_edges(4, [(2, 3)])
    x, w = step(pop.matrices, pop.weight_matrix, g, MixingParameter(0.5), 0.1, pop)
    assert x[2, 0, 0] == pytest.approx(1.5)
    assert x[3, 0, 0] == pytest.approx(1.5)
    np.testing.assert_allclose(w[2], [0.4, 0.25, 0.35])
    np.testing.assert_allclose(w[3], [0.4, 0.25, 0.35])
    # isolated friends sit at their own optimum
    np.testing.assert_array_equal(x[:2], pop.matrices[:2])
    np.testing.assert_array_equal(w[:2], pop.weight_matrix[:2])


def test_step_rejects_bad_epsilon(example1_narrow):
    pop = example1_narrow
    g = Graph.from_edges(4, [(2, 3)])
    with pytest.raises(MixingError):
        step(pop.matrices, pop.weight_matrix, g, MixingParameter(1.0), 0.1, pop)


def test_step_projects_back_onto_feasible_sets(example1):
    rng = np.random.default_rng(9)
    x = rng.uniform(1, 7, size=(4, 2, 3))
    w = rng.dirichlet(np.ones(3), size=4)
    new_x, new_w = step(x, w, Graph.empty(4), MixingParameter(0.0), 5.0, example1)
    assert np.all(new_x >= 1) and np.all(new_x <= 7)
    assert np.all(new_w >= 0)
    np.testing.assert_allclose(new_w.sum(axis=1), 1.0, atol=1e-12)


def test_step_non_finite(example1):
    x = np.array(example1.matrices)
    x[0, 0, 0] = np.nan
    with pytest.raises(NonFiniteError) as exc:
        step(x, example1.weight_matrix, Graph.empty(4), MixingParameter(0.0), 0.1, example1, t=17)
    assert exc.value.iteration == 17


def test_single_agent_converges_immediately(make_population):
    pop = make_population([[[2, 3, 4]]], [[0.2, 0.3, 0.5]], bounds=ConfidenceBounds(1.0, 1.0))
    result = run_aggregation(pop)
    assert result.converged
    assert result.iterations == StoppingConfig().stable_window
    assert result.partition.blocks == [(0,)]
    g = result.partition.groups[0]
    np.testing.assert_array_equal(g.x_star, pop.agents[0].matrix)
    np.testing.assert_array_equal(g.omega_star, pop.agents[0].weights)


def test_identical_component_is_a_fixed_point(make_population):
    m = [[2.0, 5.0], [3.0, 1.0]]
    pop = make_population([m, m, m], [[0.25, 0.75]] * 3, bounds=ConfidenceBounds(1.0, 0.1))
    result = run_aggregation(pop, stopping=StoppingConfig(stable_window=10), trace=True)
    assert result.converged
    assert result.iterations == 10
    assert len(result.partition) == 1
    for state in result.final_states:
        np.testing.assert_array_equal(state.x, m)
        np.testing.assert_array_equal(state.omega, [0.25, 0.75])
    assert all(r.max_dx == 0 and r.max_domega == 0 for r in result.trace)


def test_narrow_bounds_no_discovery_partition(example1_narrow):
    result = run_aggregation(example1_narrow, NoDiscovery(), FAST, LOOSE)
    assert result.converged
    assert result.partition.blocks == [(0,), (1,), (2, 3)]
    assert result.final_graph.edges == {(2, 3)}
    assert result.final_states[2].neighbors == (3,)

    pair = result.partition.groups[2]
    members = example1_narrow.subset([2, 3])
    np.testing.assert_allclose(pair.x_star, group_optimum_matrix(members, example1_narrow.interval),
                               atol=1e-2)
    np.testing.assert_allclose(pair.omega_star, group_optimum_weights(members), atol=1e-2)
    assert pair.max_oracle_gap < 1e-2

    # singletons keep their own systems exactly
    for idx in (0, 1):
        g = result.partition.groups[idx]
        np.testing.assert_array_equal(g.x_star, example1_narrow.agents[idx].matrix)
        np.testing.assert_array_equal(g.omega_star, example1_narrow.agents[idx].weights)


def test_agent_cut_off_mid_run_reports_its_own_system(make_population):
    # the pair meets at the midpoint, then the gradients push it apart
    pop = make_population([[[1.0, 4.0]], [[1.8, 4.5]]], [[0.8, 0.2], [0.8, 0.2]],
                          interval=(0.0, 10.0), bounds=ConfidenceBounds(1.0, 0.5))
    result = run_aggregation(pop, NoDiscovery(), trace=True)
    assert result.trace[0].edge_count == 1
    assert result.trace[1].edge_count == 0
    assert result.converged
    assert result.partition.blocks == [(0,), (1,)]

    for g, agent in zip(result.partition, pop):
        np.testing.assert_array_equal(g.x_star, agent.matrix)
        np.testing.assert_array_equal(g.omega_star, agent.weights)
    report = utility_report(pop, result.partition)
    assert np.all(report.matrix_utilities == 0)
    assert np.all(report.weight_utilities == 0)


def test_run_trace_and_feasibility(example1_narrow):
    seen = []
    result = run_aggregation(example1_narrow, NoDiscovery(), FAST, LOOSE, trace=True,
                             on_iteration=seen.append)
    assert len(result.trace) == result.iterations == len(seen)
    assert [r.t for r in result.trace] == list(range(result.iterations))
    assert all(r.epsilon == 0.5 for r in result.trace)
    assert all(r.component_count == 3 for r in result.trace)
    for state in result.final_states:
        assert np.all(state.x >= 1) and np.all(state.x <= 7)
        assert state.omega.sum() == pytest.approx(1.0, abs=1e-12)


def test_runs_are_deterministic(example1_narrow):
    a = run_aggregation(example1_narrow, NoDiscovery(), FAST, LOOSE, trace=True)
    b = run_aggregation(example1_narrow, NoDiscovery(), FAST, LOOSE, trace=True)
    assert [r.as_row() for r in a.trace] == [r.as_row() for r in b.trace]
    assert a.partition == b.partition


def test_max_iters_without_convergence(example1_narrow):
    result = run_aggregation(example1_narrow, NoDiscovery(), stopping=StoppingConfig(max_iters=5))
    assert not result.converged
    assert result.iterations == 5
    assert result.partition.blocks == [(0,), (1,), (2, 3)]


def test_invalid_population_rejected(make_population):
    pop = make_population([[[8.0, 1.0]]], [[0.5, 0.5]], bounds=ConfidenceBounds(1.0, 1.0))
    with pytest.raises(ValidationError):
        run_aggregation(pop)


def test_fixed_epsilon_violation_raises(example1):
    from pyvalagg.geometry import run_bounds
    pop = example1.with_bounds(run_bounds(example1, "max"))
    with pytest.raises(MixingError):
        run_aggregation(pop, epsilon_mode=0.5)


def test_extract_partition_empty_graph(example1):
    part = extract_partition(Graph.empty(4), example1.matrices, example1.weight_matrix, example1)
    assert part.blocks == [(0,), (1,), (2,), (3,)]
    for g, agent in zip(part, example1):
        np.testing.assert_array_equal(g.x_star, agent.matrix)
        np.testing.assert_array_equal(g.omega_star, agent.weights)
        assert g.max_oracle_gap == pytest.approx(0.0, abs=1e-12)
    assert [g.group_id for g in part] == [1, 2, 3, 4]


def test_extract_partition_warns_on_boundary_weights(example1):
    omega = np.array(example1.weight_matrix)
    omega[0] = [0.0, 0.5, 0.5]
    with pytest.warns(BoundaryWeightWarning):
        extract_partition(Graph.empty(4), example1.matrices, omega, example1)
