# SPDX-License-Identifier: LGPL-3.0-or-later
# Copyright (C) 2026 pyvalagg contributors

"""Tests for population, result and trace files."""

import json
import logging

import numpy as np
import pytest

from pyvalagg.constants import TRACE_COLUMNS
from pyvalagg.core import ConfidenceBounds
from pyvalagg.exceptions import FormatError, ValidationError
from pyvalagg.fileio import (
    ResultDocument, TraceWriter, default_metadata, dump_population, dump_result, load_result,
    parse_population, population_from_dict, population_to_dict, read_trace, result_to_dict,
)
from pyvalagg.network import Graph
from pyvalagg.solver import IterationRecord, extract_partition


def _write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc) if not isinstance(doc, str) else doc, encoding="utf-8")
    return str(path)


def _pair_result(pop):
    part = extract_partition(Graph.from_edges(4, [(2, 3)]), pop.matrices, pop.weight_matrix, pop)
    return ResultDocument(config={"bounds": "file", "alpha0": 0.2}, converged=True, iterations=321,
                          population=pop, partition=part, metadata=default_metadata())


def test_parse_example1(fixture_path, example1):
    assert parse_population(fixture_path("example1.json")) == example1


def test_population_round_trip(tmp_path, example1_narrow):
    pop = example1_narrow
    path = str(tmp_path / "pop.json")
    dump_population(pop, path)
    assert parse_population(path) == pop
    doc = json.loads((tmp_path / "pop.json").read_text())
    assert doc["format"] == "pyvalagg-population"
    assert doc["agents"][0]["bounds"] == {"matrix": 7.0, "weights": 0.3}
    assert "meta" not in doc["agents"][0]


def test_meta_survives(example1):
    doc = population_to_dict(example1)
    doc["agents"][0]["meta"] = {"cluster": 2}
    assert population_from_dict(doc).agents[0].meta == {"cluster": 2}


def test_malformed_json(tmp_path):
    path = _write(tmp_path, "bad.json", "{not json")
    with pytest.raises(FormatError) as exc:
        parse_population(path)
    assert path in str(exc.value)


def test_missing_field(tmp_path, fixture_path):
    doc = json.loads(open(fixture_path("example1.json")).read())
    del doc["agents"][1]["weights"]
    with pytest.raises(FormatError, match=r"agents\[1\]\.weights"):
        parse_population(_write(tmp_path, "p.json", doc))


def test_non_numeric_matrix(example1):
    doc = population_to_dict(example1)
    doc["agents"][0]["matrix"] = [["a", "b", "c"], [1, 1, 1]]
    with pytest.raises(FormatError):
        population_from_dict(doc)


def test_missing_file(tmp_path):
    with pytest.raises(OSError):
        parse_population(str(tmp_path / "nope.json"))


def test_validation_errors_are_collected(tmp_path, example1):
    doc = population_to_dict(example1)
    doc["agents"][0]["weights"] = [0.5, 0.5, 0.1]
    doc["agents"][2]["matrix"][0][0] = 9
    with pytest.raises(ValidationError) as exc:
        parse_population(_write(tmp_path, "p.json", doc))
    assert len(exc.value.violations) == 2


def test_tiny_weight_drift_is_renormalized(tmp_path, example1, caplog):
    doc = population_to_dict(example1)
    doc["agents"][1]["weights"] = [0.2, 0.2, 0.6000005]
    with caplog.at_level(logging.WARNING, logger="pyvalagg.fileio"):
        pop = parse_population(_write(tmp_path, "p.json", doc))
    assert pop.agents[1].weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert "renormalizing" in caplog.text


def test_result_round_trip(tmp_path, example1):
    result = _pair_result(example1)
    path = str(tmp_path / "result.json")
    dump_result(result, path)
    loaded = load_result(path)
    assert loaded.partition == result.partition
    assert loaded.population == result.population
    assert loaded.config == result.config
    assert (loaded.converged, loaded.iterations) == (True, 321)
    assert loaded.metadata["distance_pooling"] == "pooled-pairs"


def test_result_report_sections(example1):
    doc = result_to_dict(_pair_result(example1))
    assert doc["format"] == "pyvalagg-result"
    assert [g["member_ids"] for g in doc["partition"]] == [["1"], ["2"], ["3", "4"]]
    assert doc["partition"][0]["value_order"] == "S < P ~ T"
    assert doc["report"]["partition_summary"]["group_count"] == 3
    assert len(doc["report"]["utilities"]) == 4
    assert doc["report"]["plot_data"]["matrix"][-1] == 0.0
    assert set(doc["report"]["matrix_summary"]) == {"minimum", "maximum", "mean",
                                                    "q1", "median", "q3"}


def test_result_output_is_deterministic(tmp_path, example1):
    a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    dump_result(_pair_result(example1), a)
    dump_result(_pair_result(example1), b)
    assert open(a, "rb").read() == open(b, "rb").read()


def test_load_fixture_result(fixture_path):
    result = load_result(fixture_path("dominance_result.json"))
    assert len(result.partition) == 1
    np.testing.assert_array_equal(result.partition.groups[0].x_star, [[5.0, 5.0], [1.0, 1.0]])
    assert result.partition.groups[0].oracle_x_star is None


def test_load_result_rejects_other_documents(tmp_path, fixture_path):
    with pytest.raises(FormatError):
        load_result(fixture_path("example1.json"))
    with pytest.raises(FormatError):
        load_result(_write(tmp_path, "list.json", [1, 2]))


def test_unknown_member_id(tmp_path, example1):
    doc = result_to_dict(_pair_result(example1))
    doc["partition"][0]["member_ids"] = ["ghost"]
    with pytest.raises(FormatError, match="ghost"):
        load_result(_write(tmp_path, "r.json", doc))


def test_trace_writer(tmp_path):
    path = str(tmp_path / "trace.csv")
    records = [IterationRecord(t, 0.1 / (t + 1), 0.5, 1, 3, 0.25, 0.125, 0.0) for t in range(3)]
    with TraceWriter(path) as writer:
        for r in records:
            writer(r)
    assert writer.rows == 3
    rows = read_trace(path)
    assert tuple(rows[0]) == TRACE_COLUMNS
    assert [int(r["t"]) for r in rows] == [0, 1, 2]
    assert float(rows[1]["alpha"]) == 0.05
    assert open(path).readline() == ",".join(TRACE_COLUMNS) + "\n"


def test_trace_writer_must_be_open(tmp_path):
    writer = TraceWriter(str(tmp_path / "t.csv"))
    with pytest.raises(RuntimeError):
        writer.write(IterationRecord(0, 0.1, 0.0, 0, 1, 0.0, 0.0, 0.0))


def test_bounds_round_trip_through_dict(example1):
    pop = example1.with_bounds(ConfidenceBounds(2.5, 0.125))
    assert population_from_dict(population_to_dict(pop)) == pop


def test_trace_writer_discards_rows_on_error(tmp_path):
    path = tmp_path / "trace.csv"
    with pytest.raises(KeyError):
        with TraceWriter(str(path)) as writer:
            writer(IterationRecord(0, 0.1, 0.5, 1, 3, 0.25, 0.125, 0.0))
            assert (tmp_path / "trace.csv.part").exists()
            raise KeyError("stop")
    assert not path.exists()
    assert not (tmp_path / "trace.csv.part").exists()
