# SPDX-License-Identifier: LGPL-3.0-or-later
# Copyright (C) 2026 pyvalagg contributors

"""Population, result and trace files.

Population and result files are JSON documents; floats are written with
Python's shortest round-trip repr, so identical runs give identical bytes and
parse -> dump -> parse returns equal objects. Trace files are CSV with the
fixed TRACE_COLUMNS header.
"""

import csv
import json
import logging
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, TextIO

import numpy as np

from .analysis import partition_summary, utility_report
from .constants import (
    DISTANCE_POOLING, FORMAT_VERSION, MAX_BOUND_MARGIN, POPULATION_FORMAT, RESULT_FORMAT,
    TRACE_COLUMNS, TRACE_DELIMITER, WEIGHT_RENORM_TOL, WEIGHT_SUM_TOL,
)
from .core import (
    ConfidenceBounds, Group, Interval, Partition, Population, ValueSystem, validate_population,
)
from .exceptions import FormatError, ValidationError
from .mcdm import value_order
from .solver import IterationRecord

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------- population

def _require(doc: Dict[str, Any], key: str, where: str) -> Any:
    if not isinstance(doc, dict):
        raise FormatError(f"{where or 'document'} must be an object")
    if key not in doc:
        raise FormatError(f"missing field {where + '.' if where else ''}{key}")
    return doc[key]


def _array(data: Any, ndim: int, where: str) -> np.ndarray:
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError):
        raise FormatError(f"{where} must be {'a matrix' if ndim == 2 else 'a list'} of numbers")
    if arr.ndim != ndim:
        raise FormatError(f"{where} must have {ndim} dimension(s), got {arr.ndim}")
    return arr


def _renormalized(weights: np.ndarray, agent_id: str) -> np.ndarray:
    """Divide by the sum when it is off by more than WEIGHT_SUM_TOL but under WEIGHT_RENORM_TOL."""
    if weights.size == 0 or not np.all(np.isfinite(weights)):
        return weights
    total = float(weights.sum())
    if WEIGHT_SUM_TOL < abs(total - 1.0) < WEIGHT_RENORM_TOL:
        logger.warning(f"Agent {agent_id!r}: weights sum to {total!r}, renormalizing")
        return weights / total
    return weights


def population_from_dict(doc: Dict[str, Any], renormalize: bool = True) -> Population:
    """Build a Population from the JSON data model (no validation)."""
    values = _require(doc, "values", "")
    alternatives = _require(doc, "alternatives", "")
    interval = _array(_require(doc, "interval", ""), 1, "interval")
    if interval.size != 2:
        raise FormatError(f"interval must be [lo, hi], got {interval.size} numbers")
    raw_agents = _require(doc, "agents", "")
    if not isinstance(raw_agents, list):
        raise FormatError("agents must be a list")

    agents = []
    for idx, raw in enumerate(raw_agents):
        where = f"agents[{idx}]"
        aid = str(_require(raw, "id", where))
        matrix = _array(_require(raw, "matrix", where), 2, f"{where}.matrix")
        weights = _array(_require(raw, "weights", where), 1, f"{where}.weights")
        if renormalize:
            weights = _renormalized(weights, aid)
        bounds = None
        if raw.get("bounds") is not None:
            b = raw["bounds"]
            try:
                bounds = ConfidenceBounds(float(_require(b, "matrix", f"{where}.bounds")),
                                          float(_require(b, "weights", f"{where}.bounds")))
            except (TypeError, ValueError):
                raise FormatError(f"{where}.bounds must hold numbers")
        meta = raw.get("meta") or {}
        if not isinstance(meta, dict):
            raise FormatError(f"{where}.meta must be an object")
        agents.append(ValueSystem(aid, matrix, weights, bounds, meta))

    return Population(
        values=tuple(values),
        alternatives=tuple(alternatives),
        interval=Interval(float(interval[0]), float(interval[1])),
        agents=tuple(agents),
    )


def population_to_dict(pop: Population) -> Dict[str, Any]:
    agents = []
    for a in pop.agents:
        entry: Dict[str, Any] = {"id": a.agent_id, "matrix": a.matrix.tolist(),
                                 "weights": a.weights.tolist()}
        if a.bounds is not None:
            entry["bounds"] = {"matrix": a.bounds.gamma_x, "weights": a.bounds.gamma_omega}
        if a.meta:
            entry["meta"] = a.meta
        agents.append(entry)
    return {
        "format": POPULATION_FORMAT,
        "version": FORMAT_VERSION,
        "values": list(pop.values),
        "alternatives": list(pop.alternatives),
        "interval": [pop.interval.lo, pop.interval.hi],
        "agents": agents,
    }


def _load_json(path: str) -> Any:
    # FileNotFoundError and other OSErrors propagate
    with open(path, "r", encoding="utf-8") as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise FormatError(f"malformed JSON: {e}", path)


def _write_json(path: str, doc: Dict[str, Any]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=2, allow_nan=False)
        f.write("\n")


def parse_population(path: str) -> Population:
    """Read and validate a population file.

    Raises FormatError for malformed documents and ValidationError listing
    every invariant violation.
    """
    doc = _load_json(path)
    try:
        pop = population_from_dict(doc)
    except FormatError as e:
        raise FormatError(str(e), path)
    violations = validate_population(pop)
    if violations:
        for v in violations:
            logger.error(f"{path}: {v}")
        raise ValidationError(violations)
    logger.info(f"Loaded {len(pop)} agents from {path} (|A|={len(pop.alternatives)}, "
                f"|V|={len(pop.values)})")
    return pop


def dump_population(pop: Population, path: str) -> None:
    _write_json(path, population_to_dict(pop))
    logger.info(f"Wrote population of {len(pop)} agents to {path}")


# ---------------------------------------------------------------- results

@dataclass(frozen=True)
class ResultDocument:
    """Everything a result file holds; the report sections are derived on dump."""

    config: Dict[str, Any]
    converged: bool
    iterations: int
    population: Population
    partition: Partition
    metadata: Dict[str, Any] = field(default_factory=dict)


def default_metadata() -> Dict[str, Any]:
    return {"max_bound_margin": MAX_BOUND_MARGIN, "distance_pooling": DISTANCE_POOLING}


def _optional_list(arr: Optional[np.ndarray]) -> Optional[List[Any]]:
    return arr.tolist() if arr is not None else None


def result_to_dict(result: ResultDocument) -> Dict[str, Any]:
    pop = result.population
    ids = pop.agent_ids
    groups = []
    for g in result.partition:
        groups.append({
            "group_id": g.group_id,
            "member_ids": [ids[i] for i in g.members],
            "x_star": g.x_star.tolist(),
            "omega_star": g.omega_star.tolist(),
            "oracle_x_star": _optional_list(g.oracle_x_star),
            "oracle_omega_star": _optional_list(g.oracle_omega_star),
            "max_oracle_gap": g.max_oracle_gap,
            "value_order": value_order(g.omega_star, pop.values),
        })

    report = utility_report(pop, result.partition)
    summary = partition_summary(pop, result.partition)
    return {
        "format": RESULT_FORMAT,
        "version": FORMAT_VERSION,
        "config": result.config,
        "converged": result.converged,
        "iterations": result.iterations,
        "metadata": result.metadata,
        "population": population_to_dict(pop),
        "partition": groups,
        "report": {
            "utilities": [
                {"agent_id": a.agent_id, "group": a.group,
                 "matrix_utility": a.matrix_utility, "weight_utility": a.weight_utility}
                for a in report.agents
            ],
            "matrix_summary": vars(report.matrix_summary),
            "weight_summary": vars(report.weight_summary),
            "groups": [vars(g) for g in report.groups],
            "plot_data": report.plot_data(),
            "partition_summary": {
                "group_count": summary.group_count,
                "sizes": list(summary.sizes),
                "avg_matrix_distance": summary.avg_matrix_distance,
                "avg_weight_distance": summary.avg_weight_distance,
                "pooling": summary.pooling,
            },
        },
    }


def result_from_dict(doc: Dict[str, Any]) -> ResultDocument:
    if doc.get("format") != RESULT_FORMAT:
        raise FormatError(f"not a result document (format {doc.get('format')!r})")
    pop = population_from_dict(_require(doc, "population", ""), renormalize=False)
    index = {aid: i for i, aid in enumerate(pop.agent_ids)}

    groups = []
    for k, raw in enumerate(_require(doc, "partition", "")):
        where = f"partition[{k}]"
        try:
            members = tuple(index[aid] for aid in _require(raw, "member_ids", where))
        except KeyError as e:
            raise FormatError(f"{where}: unknown agent id {e.args[0]!r}")
        oracle_x = raw.get("oracle_x_star")
        oracle_w = raw.get("oracle_omega_star")
        groups.append(Group(
            group_id=int(_require(raw, "group_id", where)),
            members=members,
            x_star=_array(_require(raw, "x_star", where), 2, f"{where}.x_star"),
            omega_star=_array(_require(raw, "omega_star", where), 1, f"{where}.omega_star"),
            oracle_x_star=(_array(oracle_x, 2, f"{where}.oracle_x_star")
                           if oracle_x is not None else None),
            oracle_omega_star=(_array(oracle_w, 1, f"{where}.oracle_omega_star")
                               if oracle_w is not None else None),
        ))

    return ResultDocument(
        config=dict(doc.get("config") or {}),
        converged=bool(_require(doc, "converged", "")),
        iterations=int(_require(doc, "iterations", "")),
        population=pop,
        partition=Partition(tuple(groups)),
        metadata=dict(doc.get("metadata") or {}),
    )


def dump_result(result: ResultDocument, path: str) -> None:
    _write_json(path, result_to_dict(result))
    logger.info(f"Wrote result with {len(result.partition)} group(s) to {path}")


def load_result(path: str) -> ResultDocument:
    doc = _load_json(path)
    try:
        return result_from_dict(doc)
    except FormatError as e:
        raise FormatError(str(e), path)
    except AttributeError:
        raise FormatError("result document must be an object", path)


# ---------------------------------------------------------------- traces

class TraceWriter:
    """Streams IterationRecords to a CSV file; use as a context manager.

    Rows go to ``<path>.part`` first. A clean exit renames it to ``path``;
    an exception deletes it, so a failed run leaves no trace file behind.
    """

    def __init__(self, path: str):
        self.path = path
        self.partial_path = path + ".part"
        self._file: Optional[TextIO] = None
        self._writer: Any = None
        self.rows = 0

    def __enter__(self) -> "TraceWriter":
        self._file = open(self.partial_path, "w", encoding="utf-8", newline="")
        self._writer = csv.writer(self._file, delimiter=TRACE_DELIMITER, lineterminator="\n")
        self._writer.writerow(TRACE_COLUMNS)
        return self

    def write(self, record: IterationRecord) -> None:
        if self._writer is None:
            raise RuntimeError("TraceWriter is not open")
        self._writer.writerow(record.as_row())
        self.rows += 1

    __call__ = write

    def __exit__(self, exc_type, exc, tb) -> None:
        if self._file is None:
            return
        self._file.close()
        self._file = None
        self._writer = None
        if exc_type is not None:
            os.remove(self.partial_path)
            logger.warning(f"Run failed; discarded partial trace {self.partial_path}")
            return
        os.replace(self.partial_path, self.path)
        logger.info(f"Wrote {self.rows} trace rows to {self.path}")


def read_trace(path: str) -> List[Dict[str, str]]:
    with open(path, "r", encoding="utf-8", newline="") as f:
        return list(csv.DictReader(f, delimiter=TRACE_DELIMITER))
