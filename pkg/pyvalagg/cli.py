# SPDX-License-Identifier: LGPL-3.0-or-later
# Copyright (C) 2026 pyvalagg contributors

"""Command-line front end.

Subcommands: bounds, aggregate, rank, synth, report, sweep. Each ``cmd_*``
takes the parsed arguments and returns a process exit status.
"""

import argparse
import json
import logging
import sys
from typing import List, Optional, Sequence

from .analysis import bound_sweep, partition_summary, utility_report
from .config import DISCOVERY_STRATEGIES, RunConfig, resolve_bounds
from .constants import (
    BOUND_LEVELS, BOUNDS_FROM_FILE, DEFAULT_ALPHA0, DEFAULT_BOUND_LEVEL, DEFAULT_CONSENSUS_TOL,
    DEFAULT_DECAY, DEFAULT_MAX_ITERS, DEFAULT_STABLE_WINDOW, DEFAULT_TIE_TOL, DEFAULT_TOL_OMEGA,
    DEFAULT_TOL_X, DISCOVERY_FULL, EPSILON_AUTO, EXIT_IO, EXIT_NOT_CONVERGED, EXIT_OK,
    EXIT_VALIDATION,
)
from .core import Interval, Population
from .exceptions import (
    BoundsError, FormatError, MixingError, NonFiniteError, SynthesisError, ValidationError,
)
from .fileio import (
    ResultDocument, TraceWriter, default_metadata, dump_population, dump_result, load_result,
    parse_population,
)
from .geometry import derive_confidence_bounds, run_bounds
from .mcdm import ranking_notation, topsis_rank
from .solver import run_aggregation
from .synth import SynthSpec, generate_population

logger = logging.getLogger("pyvalagg.cli")

VALIDATION_ERRORS = (ValidationError, FormatError, BoundsError, MixingError,
                     SynthesisError, NonFiniteError, ValueError)


def _add_run_arguments(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--population", "-p", required=True,
        help="Population file (JSON)"
    )
    p.add_argument(
        "--discovery", choices=sorted(DISCOVERY_STRATEGIES), default=DISCOVERY_FULL,
        help="Neighbor discovery strategy (default: full)"
    )
    p.add_argument(
        "--epsilon", default=EPSILON_AUTO,
        help="Mixing parameter: 'auto' (1/(max degree + 1)) or a fixed value (default: auto)"
    )
    p.add_argument(
        "--alpha0", type=float, default=DEFAULT_ALPHA0,
        help=f"Initial stepsize (default: {DEFAULT_ALPHA0})"
    )
    p.add_argument(
        "--decay", type=float, default=DEFAULT_DECAY,
        help=f"Stepsize decay exponent in (0.5, 1] (default: {DEFAULT_DECAY})"
    )
    p.add_argument(
        "--tol-x", type=float, default=DEFAULT_TOL_X,
        help=f"Matrix update tolerance (default: {DEFAULT_TOL_X})"
    )
    p.add_argument(
        "--tol-omega", type=float, default=DEFAULT_TOL_OMEGA,
        help=f"Weight update tolerance (default: {DEFAULT_TOL_OMEGA})"
    )
    p.add_argument(
        "--consensus-tol", type=float, default=DEFAULT_CONSENSUS_TOL,
        help=f"Largest distance across an edge at convergence (default: {DEFAULT_CONSENSUS_TOL})"
    )
    p.add_argument(
        "--stable-window", type=int, default=DEFAULT_STABLE_WINDOW,
        help=f"Consecutive quiet iterations required (default: {DEFAULT_STABLE_WINDOW})"
    )
    p.add_argument(
        "--max-iters", type=int, default=DEFAULT_MAX_ITERS,
        help=f"Iteration cap (default: {DEFAULT_MAX_ITERS})"
    )
    p.add_argument(
        "--seed", type=int, default=0,
        help="Random seed (default: 0)"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pyvalagg",
        description="pyvalagg - aggregate value systems into group agreements over a "
                    "bounded-confidence network"
    )
    parser.add_argument(
        "--debug", action="store_true",
        help="Enable debug logging"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="Derive global confidence bounds from pairwise distances")
    p.add_argument("--population", "-p", required=True, help="Population file (JSON)")
    p.add_argument("--bounds", choices=sorted(BOUND_LEVELS), default="q2",
                   help="Quantile level (default: q2)")

    p = sub.add_parser("aggregate", help="Run the decentralized aggregation")
    _add_run_arguments(p)
    p.add_argument("--bounds", choices=sorted(BOUND_LEVELS) + [BOUNDS_FROM_FILE], default=None,
                   help="Global bound level, or 'file' for per-agent bounds (default: the "
                        f"file's bounds when every agent has them, else {DEFAULT_BOUND_LEVEL})")
    p.add_argument("--output", "-o", required=True, help="Result file to write")
    p.add_argument("--trace", default=None, help="Write a per-iteration CSV trace here")

    p = sub.add_parser("sweep", help="Aggregate once per bound level and tabulate the partitions")
    _add_run_arguments(p)
    p.add_argument("--levels", nargs="+", choices=sorted(BOUND_LEVELS),
                   default=list(BOUND_LEVELS), help="Bound levels (default: all)")

    p = sub.add_parser("rank", help="TOPSIS rankings from the agreed systems of a result")
    p.add_argument("--result", "-r", required=True, help="Result file")
    p.add_argument("--group", "-g", type=int, action="append", default=None,
                   help="Group id to rank (repeatable; default: all groups)")
    p.add_argument("--tie-tol", type=float, default=DEFAULT_TIE_TOL,
                   help=f"Closeness tie tolerance (default: {DEFAULT_TIE_TOL})")

    p = sub.add_parser("synth", help="Generate a synthetic clustered population")
    p.add_argument("--clusters", type=int, required=True, help="Number of planted clusters")
    p.add_argument("--per-cluster", type=int, required=True, help="Agents per cluster")
    p.add_argument("--values", type=int, default=3, help="|V| (default: 3)")
    p.add_argument("--alternatives", type=int, default=2, help="|A| (default: 2)")
    p.add_argument("--interval", type=float, nargs=2, default=[1.0, 7.0], metavar=("LO", "HI"),
                   help="Evaluation interval (default: 1 7)")
    p.add_argument("--separation", type=float, required=True,
                   help="Minimum Frobenius distance between matrix centers")
    p.add_argument("--noise", type=float, default=0.0, help="Within-cluster matrix noise")
    p.add_argument("--weight-noise", type=float, default=None,
                   help="Within-cluster weight noise (default: noise / interval width)")
    p.add_argument("--weight-separation", type=float, default=0.0,
                   help="Minimum Euclidean distance between weight centers (default: 0)")
    p.add_argument("--concentration", type=float, default=1.0,
                   help="Dirichlet parameter of weight centers (default: 1, uniform)")
    p.add_argument("--seed", type=int, default=0, help="Random seed (default: 0)")
    p.add_argument("--output", "-o", required=True, help="Population file to write")

    p = sub.add_parser("report", help="Utility distributions and partition statistics")
    p.add_argument("--result", "-r", required=True, help="Result file")
    p.add_argument("--output", "-o", default=None, help="Also write the report as JSON here")

    return parser


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def _with_run_bounds(pop: Population, level: str) -> Population:
    if level == BOUNDS_FROM_FILE:
        if not pop.has_bounds:
            missing = [a.agent_id for a in pop.agents if a.bounds is None]
            raise BoundsError(f"--bounds file but agents {missing} have no bounds")
        return pop
    return pop.with_bounds(run_bounds(pop, level))


def cmd_bounds(args: argparse.Namespace) -> int:
    pop = parse_population(args.population)
    b = derive_confidence_bounds(pop, args.bounds)
    print(f"gamma_x = {b.gamma_x:.6g}, gamma_omega = {b.gamma_omega:.6g}")
    return EXIT_OK


def cmd_aggregate(args: argparse.Namespace) -> int:
    pop = parse_population(args.population)
    config = RunConfig.from_args(args, bounds=resolve_bounds(args.bounds, pop))
    pop = _with_run_bounds(pop, config.bounds)

    kwargs = dict(discovery=config.discovery_strategy(), schedule=config.schedule(),
                  stopping=config.stopping(), epsilon_mode=config.epsilon)
    if config.trace:
        with TraceWriter(config.trace) as writer:
            result = run_aggregation(pop, on_iteration=writer, **kwargs)
    else:
        result = run_aggregation(pop, **kwargs)

    doc = ResultDocument(config=config.to_dict(), converged=result.converged,
                         iterations=result.iterations, population=pop,
                         partition=result.partition, metadata=default_metadata())
    dump_result(doc, args.output)

    print(f"{'Converged' if result.converged else 'Not converged'} after {result.iterations} "
          f"iterations: {len(result.partition)} group(s)")
    for g in result.partition:
        ids = ", ".join(pop.agent_ids[i] for i in g.members)
        print(f"  P{g.group_id}: {{{ids}}}")
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def cmd_rank(args: argparse.Namespace) -> int:
    doc = load_result(args.result)
    by_id = {g.group_id: g for g in doc.partition}
    wanted: List[int] = args.group if args.group else sorted(by_id)
    missing = [gid for gid in wanted if gid not in by_id]
    if missing:
        logger.error(f"{args.result}: no group(s) {missing}; available: {sorted(by_id)}")
        return EXIT_VALIDATION
    for gid in wanted:
        g = by_id[gid]
        ranking = topsis_rank(g.x_star, g.omega_star, args.tie_tol)
        print(f"P{gid}: {ranking_notation(ranking, doc.population.alternatives)}")
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    spec = SynthSpec(
        clusters=args.clusters,
        per_cluster=args.per_cluster,
        n_values=args.values,
        n_alternatives=args.alternatives,
        interval=Interval(args.interval[0], args.interval[1]),
        separation=args.separation,
        noise=args.noise,
        seed=args.seed,
        weight_noise=args.weight_noise,
        weight_separation=args.weight_separation,
        concentration=args.concentration,
    )
    dump_population(generate_population(spec), args.output)
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    doc = load_result(args.result)
    pop = doc.population
    report = utility_report(pop, doc.partition)
    summary = partition_summary(pop, doc.partition)

    print(f"{'agent':<16} {'group':>5} {'u_matrix':>14} {'u_weights':>14}")
    for a in report.agents:
        print(f"{a.agent_id:<16} {a.group:>5} {a.matrix_utility:>14.6g} {a.weight_utility:>14.6g}")
    print()
    for name, s in (("matrix", report.matrix_summary), ("weights", report.weight_summary)):
        print(f"{name:<8} min={s.minimum:.6g} q1={s.q1:.6g} median={s.median:.6g} "
              f"q3={s.q3:.6g} max={s.maximum:.6g} mean={s.mean:.6g}")
    print()
    print(f"groups: {summary.group_count}  sizes: {list(summary.sizes)}")
    print(f"avg matrix distance: {_fmt_optional(summary.avg_matrix_distance)}  "
          f"avg weight distance: {_fmt_optional(summary.avg_weight_distance)}  "
          f"({summary.pooling})")

    if args.output:
        machine = {
            "utilities": [vars(a) for a in report.agents],
            "matrix_summary": vars(report.matrix_summary),
            "weight_summary": vars(report.weight_summary),
            "groups": [vars(g) for g in report.groups],
            "plot_data": report.plot_data(),
            "partition_summary": {**vars(summary), "sizes": list(summary.sizes)},
        }
        with open(args.output, "w", encoding="utf-8") as f:
            json.dump(machine, f, indent=2)
            f.write("\n")
        logger.info(f"Wrote report to {args.output}")
    return EXIT_OK


def _fmt_optional(value: Optional[float]) -> str:
    return "n/a" if value is None else f"{value:.6g}"


def cmd_sweep(args: argparse.Namespace) -> int:
    config = RunConfig(
        discovery=args.discovery, epsilon=args.epsilon, alpha0=args.alpha0, decay=args.decay,
        tol_x=args.tol_x, tol_omega=args.tol_omega, consensus_tol=args.consensus_tol,
        stable_window=args.stable_window, max_iters=args.max_iters, seed=args.seed,
    )
    pop = parse_population(args.population)
    entries = bound_sweep(pop, args.levels, config.discovery_strategy(), config.schedule(),
                          config.stopping(), config.epsilon)

    print(f"{'level':<6} {'gamma_x':>10} {'gamma_omega':>12} {'groups':>7} "
          f"{'avg d_X':>10} {'avg d_W':>10} {'converged':>10}")
    for e in entries:
        s = e.summary
        print(f"{e.level:<6} {e.bounds.gamma_x:>10.6g} {e.bounds.gamma_omega:>12.6g} "
              f"{s.group_count:>7} {_fmt_optional(s.avg_matrix_distance):>10} "
              f"{_fmt_optional(s.avg_weight_distance):>10} {str(e.result.converged):>10}")
    return EXIT_OK if all(e.result.converged for e in entries) else EXIT_NOT_CONVERGED


COMMANDS = {
    "bounds": cmd_bounds,
    "aggregate": cmd_aggregate,
    "sweep": cmd_sweep,
    "rank": cmd_rank,
    "synth": cmd_synth,
    "report": cmd_report,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = parse_args(argv)

    logging.basicConfig(
        level=logging.INFO,
        format='%(asctime)s [%(levelname)s] %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )
    if args.debug:
        logging.getLogger("pyvalagg").setLevel(logging.DEBUG)

    try:
        return COMMANDS[args.command](args)
    except VALIDATION_ERRORS as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_VALIDATION
    except OSError as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
