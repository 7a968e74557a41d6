"""Tests for the grid-sweep verification harness."""

import json
import math

import pytest

from humbert_series.errors import ConfigError, DomainError
from humbert_series.kernels import EvalOutcome, SeriesControl
from humbert_series.verify import (
    CSV_COLUMNS,
    FunctionId,
    GridSpec,
    Status,
    VerificationRecord,
    csv_report,
    evaluate,
    grid_spec_from_dict,
    json_report,
    load_grid_spec,
    parse_scalar,
    rel_err,
    run_grid,
    summarize,
)
from humbert_series.workers import create_executor


def phi3_spec(points, methods=("direct", "series2f1"), b=(1.0,), c=(2.0,), **kwargs):
    return GridSpec(
        function_id=FunctionId.PHI3,
        representation_ids=tuple(methods),
        parameter_values={"b": tuple(complex(v) for v in b), "c": tuple(complex(v) for v in c)},
        points=tuple((complex(x), complex(y)) for x, y in points),
        **kwargs,
    )


def record(status, pairwise, x=0.5, y=0.25):
    return VerificationRecord(
        function_id=FunctionId.PHI3,
        params={"b": 1 + 0j, "c": 2 + 0j},
        x=complex(x),
        y=complex(y),
        outcomes={},
        pairwise_rel_err=pairwise,
        status=status,
    )


class TestEvaluate:
    """Test method dispatch."""

    def test_direct(self):
        outcome = evaluate("phi3", "direct", {"b": 1, "c": 2}, 1, 0)
        assert abs(outcome.value - (math.e - 1)) <= 1e-14

    def test_enum_function_id(self):
        outcome = evaluate(FunctionId.PHI3, "direct", {"b": 1, "c": 2}, 1, 0)
        assert abs(outcome.value - (math.e - 1)) <= 1e-14

    def test_method_not_applicable(self):
        with pytest.raises(ConfigError):
            evaluate("PHI3", "phi3shift", {"b": 1, "c": 2}, 1, 0)

    def test_unknown_function(self):
        with pytest.raises(ConfigError):
            evaluate("phi9", "direct", {"b": 1, "c": 2}, 1, 0)

    def test_missing_parameter(self):
        with pytest.raises(ConfigError):
            evaluate("PSI2", "direct", {"b": 1, "c": 2}, 1, 0)

    def test_off_locus(self):
        with pytest.raises(DomainError):
            evaluate("PHI3", "diag2f2", {"b": 1, "c": 2}, 0.5, 0.5)

    def test_on_locus(self):
        outcome = evaluate("PSI2", "equalargs3f3", {"a": 1, "b": 1, "c": 2}, 0.5, 0.5)
        assert outcome.converged


class TestRunGrid:
    """Test record production and status assignment."""

    def test_single_point_passes(self):
        records = run_grid(phi3_spec([(0.5, 0.25)]), gate=1e-8)
        assert len(records) == 1
        assert records[0].status is Status.PASS
        assert set(records[0].pairwise_rel_err) == {"direct:series2f1"}
        assert records[0].max_rel_err <= 1e-8

    def test_zero_x_skipped_for_domain(self):
        records = run_grid(phi3_spec([(0.0, 0.25)]), gate=1e-8)
        assert records[0].status is Status.SKIPPED_DOMAIN
        assert "series2f1" in records[0].note

    def test_pole_skipped(self):
        records = run_grid(phi3_spec([(0.5, 0.25)], c=(0.0,)), gate=1e-8)
        assert records[0].status is Status.SKIPPED_POLE

    def test_shift_off_slice_skipped(self):
        spec = GridSpec(
            function_id=FunctionId.PSI2,
            representation_ids=("direct", "phi3shift"),
            parameter_values={"a": (1 + 0j,), "b": (2 + 0j,), "c": (3 + 0j,)},
            points=((0.5 + 0j, 0.5 + 0j),),
        )
        assert run_grid(spec, gate=1e-8)[0].status is Status.SKIPPED_DOMAIN

    def test_skipped_record_keeps_converged_pairs(self):
        spec = GridSpec(
            function_id=FunctionId.PSI2,
            representation_ids=("direct", "series2f1", "phi3shift"),
            parameter_values={"a": (1 + 0j,), "b": (2 + 0j,), "c": (3 + 0j,)},
            points=((0.5 + 0j, 0.5 + 0j),),
        )
        result = run_grid(spec, gate=1e-8)[0]
        assert result.status is Status.SKIPPED_DOMAIN
        assert "phi3shift" in result.note
        assert set(result.outcomes) == {"direct", "series2f1"}
        assert set(result.pairwise_rel_err) == {"direct:series2f1"}
        assert result.pairwise_rel_err["direct:series2f1"] <= 1e-8

    def test_skipped_records_stay_out_of_summary(self):
        spec = GridSpec(
            function_id=FunctionId.PSI2,
            representation_ids=("direct", "series2f1", "phi3shift"),
            parameter_values={"a": (1 + 0j,), "b": (1 + 0j, 2 + 0j), "c": (3 + 0j,)},
            points=((0.5 + 0j, 0.5 + 0j),),
        )
        records = run_grid(spec, gate=1e-8)
        assert [r.status for r in records] == [Status.PASS, Status.SKIPPED_DOMAIN]
        summary = summarize(records)
        assert summary["skipped"] == 1
        assert summary["max_rel_err"] == records[0].max_rel_err

    def test_not_converged_fails(self):
        spec = phi3_spec([(2.0, 2.0)], ctrl=SeriesControl(max_terms=2))
        result = run_grid(spec, gate=1e-8)[0]
        assert result.status is Status.FAIL
        assert "did not converge" in result.note
        assert result.outcomes["direct"].converged is False

    def test_tight_gate_fails_on_cancelling_point(self):
        spec = phi3_spec([(-1.0, 1.0)], methods=("direct", "series2f1", "diag2f2", "gaussterms"),
                         b=(2.5,), c=(1.5,))
        result = run_grid(spec, gate=1e-16)[0]
        assert result.status is Status.FAIL
        assert len(result.pairwise_rel_err) == 6

    def test_record_order(self):
        spec = phi3_spec([(0.5, 0.25), (1.0, 1.0)], b=(1.0, 1.5), c=(2.0, 2.5))
        records = run_grid(spec, gate=1e-8)
        order = [(r.params["b"].real, r.params["c"].real, r.x.real) for r in records]
        assert order == [
            (1.0, 2.0, 0.5), (1.0, 2.0, 1.0), (1.0, 2.5, 0.5), (1.0, 2.5, 1.0),
            (1.5, 2.0, 0.5), (1.5, 2.0, 1.0), (1.5, 2.5, 0.5), (1.5, 2.5, 1.0),
        ]

    def test_workers_do_not_change_report(self):
        points = [(0.5, 0.25), (-1.0, 0.5), (1.0, 3.0), (0.0, 1.0)]
        serial = run_grid(phi3_spec(points, b=(0.5, 2.5), workers=1), gate=1e-8)
        threaded = run_grid(phi3_spec(points, b=(0.5, 2.5), workers=4), gate=1e-8)
        assert json_report(serial) == json_report(threaded)

    def test_empty_points_rejected(self):
        with pytest.raises(ConfigError):
            run_grid(phi3_spec([]), gate=1e-8)

    def test_bad_gate_rejected(self):
        with pytest.raises(ConfigError):
            run_grid(phi3_spec([(0.5, 0.25)]), gate=0)

    def test_inapplicable_representation_rejected(self):
        with pytest.raises(ConfigError):
            run_grid(phi3_spec([(0.5, 0.25)], methods=("direct", "equalargs3f3")), gate=1e-8)


class TestSummarize:
    """Test summary statistics."""

    def test_counts_and_worst_point(self):
        records = [
            record(Status.PASS, {"direct:series2f1": 1e-12}),
            record(Status.FAIL, {"direct:series2f1": 3e-6}, x=1.0, y=2.0),
            record(Status.SKIPPED_DOMAIN, {}),
            record(Status.SKIPPED_POLE, {}),
        ]
        summary = summarize(records)
        assert summary["total"] == 4
        assert summary["pass"] == 1
        assert summary["fail"] == 1
        assert summary["skipped"] == 2
        assert summary["max_rel_err"] == 3e-6
        assert summary["argmax_point"]["x"] == {"re": 1.0, "im": 0.0}
        assert summary["argmax_point"]["y"] == {"re": 2.0, "im": 0.0}

    def test_empty(self):
        summary = summarize([])
        assert summary == {"total": 0, "pass": 0, "fail": 0, "skipped": 0,
                           "max_rel_err": 0.0, "argmax_point": None}

    def test_only_skipped(self):
        summary = summarize([record(Status.SKIPPED_DOMAIN, {})])
        assert summary["max_rel_err"] == 0.0
        assert summary["argmax_point"] is None

    def test_rel_err_is_symmetric(self):
        assert rel_err(1.0, 1.0 + 1e-10) == rel_err(1.0 + 1e-10, 1.0)
        assert rel_err(0.0, 0.0) == 0.0


class TestReports:
    """Test JSON and CSV rendering."""

    def test_json_report_shape(self):
        records = run_grid(phi3_spec([(0.5, 0.25), (0.0, 0.25)]), gate=1e-8)
        report = json.loads(json_report(records))
        assert set(report) == {"summary", "records"}
        assert report["summary"]["total"] == 2
        assert report["records"][0]["status"] == "PASS"
        assert report["records"][1]["status"] == "SKIPPED(domain)"
        assert set(report["records"][0]["outcomes"]) == {"direct", "series2f1"}

    def test_json_report_is_deterministic(self):
        spec = phi3_spec([(0.5, 0.25), (1.0, 1.0)])
        assert json_report(run_grid(spec, gate=1e-8)) == json_report(run_grid(spec, gate=1e-8))

    def test_csv_rows(self):
        records = run_grid(phi3_spec([(0.5, 0.25), (0.0, 0.25)]), gate=1e-8)
        lines = csv_report(records).splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 3
        first = lines[1].split(",")
        assert first[0] == "PHI3"
        assert first[1] == "direct:series2f1"
        assert first[2:5] == ["", "1.0", "2.0"]
        assert first[-1] == "PASS"
        skipped = lines[2].split(",")
        assert skipped[1] == ""
        assert skipped[-2] == ""
        assert skipped[-1] == "SKIPPED(domain)"


class TestSpecFiles:
    """Test grid spec loading and validation."""

    def valid(self, **overrides):
        data = {
            "function": "phi3",
            "representations": ["direct", "series2f1"],
            "params": {"b": [1, 1.5], "c": 2},
            "points": [[0.5, 0.25], [[1, 0.5], {"re": 0.25, "im": 0}]],
            "gate": 1e-9,
        }
        data.update(overrides)
        return data

    def test_valid_spec(self):
        spec, gate = grid_spec_from_dict(self.valid(ctrl={"max_terms": 300}, workers=2))
        assert spec.function_id is FunctionId.PHI3
        assert spec.parameter_values["b"] == (1 + 0j, 1.5 + 0j)
        assert spec.parameter_values["c"] == (2 + 0j,)
        assert spec.points[1] == (1 + 0.5j, 0.25 + 0j)
        assert spec.ctrl == SeriesControl(max_terms=300)
        assert spec.workers == 2
        assert gate == 1e-9

    def test_default_gate(self):
        data = self.valid()
        del data["gate"]
        assert grid_spec_from_dict(data)[1] == 1e-8

    @pytest.mark.parametrize("overrides", [
        {"function": "phi9"},
        {"points": []},
        {"points": [[0.5]]},
        {"representations": []},
        {"representations": ["direct", "direct"]},
        {"params": {"b": [1]}},
        {"gate": -1},
        {"gate": True},
        {"workers": 0},
        {"workers": 1.5},
        {"ctrl": {"tolerance": 1e-10}},
        {"ctrl": {"rel_tol": 0}},
    ])
    def test_invalid_spec(self, overrides):
        with pytest.raises(ConfigError):
            grid_spec_from_dict(self.valid(**overrides))

    def test_missing_function(self):
        data = self.valid()
        del data["function"]
        with pytest.raises(ConfigError):
            grid_spec_from_dict(data)

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "grid.json"
        path.write_text(json.dumps(self.valid()))
        spec, gate = load_grid_spec(str(path))
        assert len(spec.points) == 2

    def test_invalid_json_file(self, tmp_path):
        path = tmp_path / "grid.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError):
            load_grid_spec(str(path))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_grid_spec(str(tmp_path / "absent.json"))

    @pytest.mark.parametrize("raw, expected", [
        (1.5, 1.5 + 0j),
        (2, 2 + 0j),
        ("1+2j", 1 + 2j),
        ([0.5, -1], 0.5 - 1j),
        ({"re": 3, "im": 4}, 3 + 4j),
        ({"re": 3}, 3 + 0j),
    ])
    def test_parse_scalar(self, raw, expected):
        assert parse_scalar(raw) == expected

    @pytest.mark.parametrize("raw", [True, "abc", [1, 2, 3], {"im": 1}, None])
    def test_parse_scalar_rejects(self, raw):
        with pytest.raises(ConfigError):
            parse_scalar(raw)


class TestWorkers:
    """Test executor creation."""

    def test_map_preserves_order(self):
        with create_executor(3) as executor:
            assert list(executor.map(lambda n: n * n, range(10))) == [n * n for n in range(10)]

    @pytest.mark.parametrize("workers", [0, -2, 1.5, "4"])
    def test_invalid_worker_count(self, workers):
        with pytest.raises(ConfigError):
            create_executor(workers)
