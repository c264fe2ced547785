# SPDX-License-Identifier: LGPL-3.0-or-later
# Copyright (C) 2026 pyvalagg contributors

"""End-to-end runs: the four friends, random groups against the closed form,
planted clusters, and larger sweeps (marked slow)."""

import time

import numpy as np
import pytest

from pyvalagg.analysis import bound_sweep, partition_summary, utility_report
from pyvalagg.core import ConfidenceBounds, Interval
from pyvalagg.geometry import run_bounds
from pyvalagg.mcdm import ranking_notation, topsis_rank
from pyvalagg.network import NoDiscovery
from pyvalagg.oracle import group_optimum_matrix, group_optimum_weights
from pyvalagg.solver import StepsizeSchedule, StoppingConfig, run_aggregation
from pyvalagg.synth import SynthSpec, generate_population, planted_labels


def _check_single_group(pop, result, atol=1e-2):
    assert result.converged
    assert result.group_count == 1
    group = result.partition.groups[0]
    assert group.members == tuple(range(len(pop)))
    np.testing.assert_allclose(group.x_star, group_optimum_matrix(pop.agents, pop.interval),
                               atol=atol)
    np.testing.assert_allclose(group.omega_star, group_optimum_weights(pop.agents), atol=atol)
    assert group.max_oracle_gap < atol
    return group


def test_example1_consensus_at_max_bounds(example1):
    pop = example1.with_bounds(run_bounds(example1, "max"))
    result = run_aggregation(pop, schedule=StepsizeSchedule(alpha0=0.2),
                             stopping=StoppingConfig(consensus_tol=2e-3))
    group = _check_single_group(pop, result)
    assert group.x_star[0, 2] == pytest.approx(3.0551, abs=1e-2)

    summary = partition_summary(example1, result.partition)
    assert summary.avg_matrix_distance == pytest.approx(9.0308, abs=1e-4)
    assert summary.avg_weight_distance == pytest.approx(0.31566, abs=1e-5)

    # TOPSIS on the agreed system ranks CS strictly above PC
    ranking = topsis_rank(group.x_star, group.omega_star)
    assert ranking_notation(ranking, pop.alternatives) == "PC < CS"


@pytest.mark.slow
def test_example1_consensus_with_slower_decay(example1):
    pop = example1.with_bounds(run_bounds(example1, "max"))
    result = run_aggregation(pop, schedule=StepsizeSchedule(alpha0=0.2, decay=0.75),
                             stopping=StoppingConfig(consensus_tol=2e-3, max_iters=300000))
    group = _check_single_group(pop, result)
    assert group.x_star[0, 2] == pytest.approx(3.0551, abs=1e-2)


def test_example1_narrow_bounds_keep_three_groups(example1_narrow):
    result = run_aggregation(example1_narrow, NoDiscovery(), StepsizeSchedule(alpha0=0.2),
                             StoppingConfig(consensus_tol=2e-3))
    assert result.converged
    assert result.partition.blocks == [(0,), (1,), (2, 3)]

    report = utility_report(example1_narrow, result.partition)
    assert report.agents[0].matrix_utility == 0
    assert report.agents[1].weight_utility == 0
    assert report.agents[2].matrix_utility < 0

    summary = partition_summary(example1_narrow, result.partition)
    assert summary.avg_matrix_distance == pytest.approx(4.690, abs=1e-3)
    assert summary.avg_weight_distance == pytest.approx(0.2449, abs=1e-4)


def test_random_groups_reach_the_closed_form_optimum(random_population):
    rng = np.random.default_rng(2026)
    for _ in range(8):
        pop = random_population(rng, int(rng.integers(2, 7)), int(rng.integers(1, 4)),
                                int(rng.integers(3, 5)))
        pop = pop.with_bounds(run_bounds(pop, "max"))
        result = run_aggregation(pop, schedule=StepsizeSchedule(alpha0=0.25),
                                 stopping=StoppingConfig(consensus_tol=1e-3, max_iters=200000))
        _check_single_group(pop, result)


@pytest.mark.slow
def test_random_groups_reach_the_closed_form_optimum_tightly(random_population):
    rng = np.random.default_rng(2027)
    for _ in range(50):
        pop = random_population(rng, int(rng.integers(2, 11)), int(rng.integers(1, 5)),
                                int(rng.integers(3, 5)))
        pop = pop.with_bounds(run_bounds(pop, "max"))
        result = run_aggregation(pop, schedule=StepsizeSchedule(alpha0=0.25),
                                 stopping=StoppingConfig(tol_x=1e-8, tol_omega=1e-8,
                                                         max_iters=1_000_000))
        _check_single_group(pop, result, atol=1e-3)


def _cluster_spec(clusters, per_cluster, seed):
    return SynthSpec(clusters=clusters, per_cluster=per_cluster, n_values=3, n_alternatives=2,
                     interval=Interval(1.0, 7.0), separation=6.0, noise=0.3, seed=seed,
                     weight_noise=0.02, weight_separation=0.3, concentration=5.0)


def _assert_recovers(pop, result):
    labels = planted_labels(pop)
    assert result.converged
    assert result.group_count == len(set(labels))
    for group in result.partition:
        assert len({labels[i] for i in group.members}) == 1


@pytest.mark.parametrize("seed", [1, 2])
def test_planted_clusters_recovered_at_q1(seed):
    pop = generate_population(_cluster_spec(3, 4, seed))
    pop = pop.with_bounds(run_bounds(pop, "q1"))
    result = run_aggregation(pop, schedule=StepsizeSchedule(alpha0=0.1),
                             stopping=StoppingConfig(consensus_tol=1e-3))
    _assert_recovers(pop, result)


@pytest.mark.parametrize("seed", [4, 5])
def test_two_planted_clusters_with_explicit_bounds(seed):
    pop = generate_population(_cluster_spec(2, 5, seed))
    pop = pop.with_bounds(ConfidenceBounds(3.0, 0.2))
    result = run_aggregation(pop, schedule=StepsizeSchedule(alpha0=0.2),
                             stopping=StoppingConfig(consensus_tol=1e-3))
    _assert_recovers(pop, result)
    for group in result.partition:
        members = pop.subset(group.members)
        np.testing.assert_allclose(group.omega_star, group_optimum_weights(members), atol=1e-2)


@pytest.mark.slow
def test_bound_level_trend():
    spec = SynthSpec(clusters=4, per_cluster=50, n_values=3, n_alternatives=2,
                     interval=Interval(1.0, 7.0), separation=8.0, noise=1.0, seed=42,
                     weight_noise=0.05, weight_separation=0.4, concentration=5.0)
    pop = generate_population(spec)
    entries = bound_sweep(pop, stopping=StoppingConfig(max_iters=3000))
    assert [e.level for e in entries] == ["q1", "q2", "q3", "max"]
    by_level = {e.level: e for e in entries}

    counts = [e.summary.group_count for e in entries]
    assert counts == sorted(counts, reverse=True)
    assert counts[-1] == 1
    assert counts[0] > 1
    for name in ("avg_matrix_distance", "avg_weight_distance"):
        values = [getattr(e.summary, name) for e in entries]
        present = [v for v in values if v is not None]
        assert present == sorted(present)

    q1 = utility_report(pop, by_level["q1"].result.partition)
    single = utility_report(pop, by_level["max"].result.partition)
    assert q1.matrix_summary.mean > single.matrix_summary.mean
    assert q1.weight_summary.mean > single.weight_summary.mean
    assert q1.matrix_summary.spread < single.matrix_summary.spread
    assert q1.weight_summary.spread < single.weight_summary.spread


@pytest.mark.slow
def test_five_hundred_agents_finish_quickly():
    spec = SynthSpec(clusters=5, per_cluster=100, n_values=5, n_alternatives=6,
                     interval=Interval(1.0, 7.0), separation=8.0, noise=0.5, seed=3)
    pop = generate_population(spec)
    pop = pop.with_bounds(run_bounds(pop, "q2"))
    start = time.perf_counter()
    result = run_aggregation(pop, stopping=StoppingConfig(max_iters=2000))
    elapsed = time.perf_counter() - start
    assert result.iterations <= 2000
    assert result.partition.n_agents == 500
    assert elapsed < 120.0
