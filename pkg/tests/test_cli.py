"""Tests for the CLI module."""

import json
import math

import pytest

from humbert_series.cli import (
    build_control,
    format_plain,
    main,
    parse_args,
    parse_assignments,
    parse_point,
    parse_rational_params,
)
from humbert_series.errors import ConfigError
from humbert_series.kernels import DEFAULT_CONTROL


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("HUMBERT_REL_TOL", "HUMBERT_MAX_TERMS", "HUMBERT_SMALL_RUN", "HUMBERT_WORKERS"):
        monkeypatch.delenv(name, raising=False)


def write_spec(path, **overrides):
    data = {
        "function": "PHI3",
        "representations": ["direct", "series2f1"],
        "params": {"b": [1, 1.5], "c": [2, 3.25]},
        "points": [[0.5, 0.25], [1, 1], [-0.25, 0.5], [0, 1]],
        "gate": 1e-8,
    }
    data.update(overrides)
    path.write_text(json.dumps(data))
    return str(path)


class TestParseArgs:
    """Test argument parsing."""

    def test_eval_defaults(self):
        args = parse_args(["eval", "--function", "PHI3", "--params", "b=1,c=2", "--x", "1", "--y", "0"])
        assert args.command == "eval"
        assert args.function == "phi3"
        assert args.method == "direct"
        assert args.format == "plain"
        assert args.rel_tol is None
        assert args.verbose is False

    def test_eval_series_flags(self):
        args = parse_args(["--verbose", "eval", "--function", "psi2", "--params", "a=1,b=1,c=2",
                           "--x=-0.5,0.1", "--y", "0.25", "--method", "series2f1",
                           "--rel-tol", "1e-12", "--max-terms", "100", "--small-run", "2",
                           "--format", "json"])
        assert args.verbose is True
        assert args.x == "-0.5,0.1"
        assert args.method == "series2f1"
        assert args.rel_tol == 1e-12
        assert args.max_terms == 100
        assert args.small_run == 2

    def test_verify(self):
        args = parse_args(["verify", "--spec", "grid.json", "--format", "csv", "--workers", "4"])
        assert args.spec == "grid.json"
        assert args.format == "csv"
        assert args.workers == 4
        assert args.out is None
        assert args.gate is None

    def test_oracle_defaults(self):
        args = parse_args(["oracle", "--identity", "EQ15", "--params", "b=1,c=2"])
        assert args.identity == "eq15"
        assert args.deg == 8
        assert args.deg_t is None
        assert args.printed is False

    def test_unknown_method_rejected(self):
        with pytest.raises(SystemExit):
            parse_args(["eval", "--function", "phi3", "--params", "b=1,c=2", "--x", "1",
                        "--method", "magic"])

    def test_command_required(self):
        with pytest.raises(SystemExit):
            parse_args([])


class TestInputParsing:
    """Test parameter and coordinate parsing."""

    def test_assignments(self):
        assert parse_assignments("a=1.5, B=2,c=1+2j") == {"a": "1.5", "b": "2", "c": "1+2j"}

    @pytest.mark.parametrize("text", ["a", "a=", "=1", "a=1,b"])
    def test_bad_assignment(self, text):
        with pytest.raises(ConfigError):
            parse_assignments(text)

    def test_point(self):
        assert parse_point("0.5") == 0.5 + 0j
        assert parse_point("-0.5, 0.1") == -0.5 + 0.1j

    @pytest.mark.parametrize("text", ["abc", "1,2,3", ""])
    def test_bad_point(self, text):
        with pytest.raises(ConfigError):
            parse_point(text)

    def test_rational_params(self):
        from fractions import Fraction
        assert parse_rational_params("b=1/2,c=5/2") == {"b": Fraction(1, 2), "c": Fraction(5, 2)}
        with pytest.raises(ConfigError):
            parse_rational_params("b=1/0")

    def test_format_plain(self):
        assert format_plain(complex(math.e - 1)) == "1.71828182845905"
        assert format_plain(1.5 - 2j) == "1.5-2j"


class TestBuildControl:
    """Test series control resolution from flags and environment."""

    def test_defaults(self):
        args = parse_args(["eval", "--function", "phi3", "--params", "b=1,c=2", "--x", "1"])
        assert build_control(args) == DEFAULT_CONTROL

    def test_environment(self, monkeypatch):
        monkeypatch.setenv("HUMBERT_MAX_TERMS", "77")
        monkeypatch.setenv("HUMBERT_REL_TOL", "1e-10")
        args = parse_args(["eval", "--function", "phi3", "--params", "b=1,c=2", "--x", "1"])
        ctrl = build_control(args)
        assert ctrl.max_terms == 77
        assert ctrl.rel_tol == 1e-10

    def test_flag_beats_environment(self, monkeypatch):
        monkeypatch.setenv("HUMBERT_MAX_TERMS", "77")
        args = parse_args(["eval", "--function", "phi3", "--params", "b=1,c=2", "--x", "1",
                           "--max-terms", "40"])
        assert build_control(args).max_terms == 40

    def test_bad_environment_value(self, monkeypatch):
        monkeypatch.setenv("HUMBERT_SMALL_RUN", "three")
        args = parse_args(["eval", "--function", "phi3", "--params", "b=1,c=2", "--x", "1"])
        with pytest.raises(ConfigError):
            build_control(args)


class TestEvalCommand:
    """Test the eval subcommand end to end."""

    def test_plain_value(self, capsys):
        code = main(["eval", "--function", "phi3", "--params", "b=1,c=2", "--x", "1", "--y", "0"])
        assert code == 0
        value = float(capsys.readouterr().out.strip())
        assert abs(value - (math.e - 1)) <= 1e-12 * (math.e - 1)

    def test_json_schema(self, capsys):
        code = main(["eval", "--function", "psi2", "--params", "a=1,b=1,c=2", "--x", "0.5",
                     "--y", "0.25", "--method", "series2f1", "--format", "json"])
        assert code == 0
        data = json.loads(capsys.readouterr().out)
        assert set(data) == {"function", "params", "x", "y", "method", "value",
                             "terms", "est_error", "converged"}
        assert data["function"] == "psi2"
        assert data["method"] == "series2f1"
        assert data["params"]["a"] == {"re": 1.0, "im": 0.0}
        assert data["converged"] is True
        assert data["terms"] > 0
        assert data["est_error"] >= 0.0

    def test_locus_method_without_y(self, capsys):
        code = main(["eval", "--function", "phi3", "--params", "b=1,c=2", "--x", "0.25",
                     "--method", "gaussterms", "--format", "json"])
        assert code == 0
        data = json.loads(capsys.readouterr().out)
        assert data["y"] == {"re": 0.0625, "im": 0.0}

    def test_missing_y(self, capsys):
        code = main(["eval", "--function", "phi3", "--params", "b=1,c=2", "--x", "1"])
        assert code == 2
        assert "--y is required" in capsys.readouterr().err

    def test_pole_json_error(self, capsys):
        code = main(["eval", "--function", "phi3", "--params", "b=1,c=0", "--x", "1", "--y", "0",
                     "--format", "json"])
        assert code == 2
        data = json.loads(capsys.readouterr().out)
        assert data["success"] is False
        assert "pole" in data["error"]

    def test_small_x_is_domain_error(self, capsys):
        code = main(["eval", "--function", "phi3", "--params", "b=1,c=2", "--x", "0", "--y", "1",
                     "--method", "series2f1"])
        assert code == 2

    def test_not_converged(self, capsys):
        code = main(["eval", "--function", "phi3", "--params", "b=1,c=2", "--x", "5", "--y", "5",
                     "--max-terms", "2"])
        assert code == 3
        assert "did not converge" in capsys.readouterr().err

    def test_not_converged_from_environment(self, monkeypatch, capsys):
        monkeypatch.setenv("HUMBERT_MAX_TERMS", "2")
        code = main(["eval", "--function", "phi3", "--params", "b=1,c=2", "--x", "5", "--y", "5"])
        assert code == 3


class TestVerifyCommand:
    """Test the verify subcommand end to end."""

    def test_pass_to_stdout(self, tmp_path, capsys):
        code = main(["verify", "--spec", write_spec(tmp_path / "grid.json")])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["summary"]["total"] == 16
        assert report["summary"]["fail"] == 0
        assert report["summary"]["skipped"] == 4

    def test_forced_mismatch_exits_4(self, tmp_path):
        spec = write_spec(
            tmp_path / "grid.json",
            representations=["direct", "series2f1", "diag2f2", "gaussterms"],
            params={"b": [2.5], "c": [1.5]},
            points=[[-1, 1]],
            gate=1e-16,
        )
        assert main(["verify", "--spec", spec, "--out", str(tmp_path / "report.json")]) == 4
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["records"][0]["status"] == "FAIL"

    def test_gate_flag_overrides_spec(self, tmp_path):
        spec = write_spec(
            tmp_path / "grid.json",
            representations=["direct", "series2f1", "diag2f2", "gaussterms"],
            params={"b": [2.5], "c": [1.5]},
            points=[[-1, 1]],
            gate=1e-16,
        )
        assert main(["verify", "--spec", spec, "--gate", "1e-8", "--out", str(tmp_path / "r.json")]) == 0

    @pytest.mark.parametrize("fmt", ["json", "csv"])
    def test_identical_runs_are_byte_identical(self, tmp_path, fmt):
        spec = write_spec(tmp_path / "grid.json")
        first, second = tmp_path / f"first.{fmt}", tmp_path / f"second.{fmt}"
        assert main(["verify", "--spec", spec, "--format", fmt, "--out", str(first)]) == 0
        assert main(["verify", "--spec", spec, "--format", fmt, "--out", str(second),
                     "--workers", "3"]) == 0
        assert first.read_bytes() == second.read_bytes()

    def test_csv_header(self, tmp_path):
        out = tmp_path / "report.csv"
        main(["verify", "--spec", write_spec(tmp_path / "grid.json"), "--format", "csv", "--out", str(out)])
        header = out.read_text().splitlines()[0]
        assert header == "function,method_pair,a,b,c,x_re,x_im,y_re,y_im,rel_err,status"

    def test_workers_from_environment(self, tmp_path, monkeypatch):
        monkeypatch.setenv("HUMBERT_WORKERS", "2")
        assert main(["verify", "--spec", write_spec(tmp_path / "grid.json"),
                     "--out", str(tmp_path / "r.json")]) == 0

    def test_unwritable_report_path(self, tmp_path, capsys):
        out = tmp_path / "missing" / "report.json"
        code = main(["verify", "--spec", write_spec(tmp_path / "grid.json"), "--out", str(out)])
        assert code == 2
        data = json.loads(capsys.readouterr().out)
        assert data["success"] is False
        assert "cannot write report" in data["error"]
        assert not out.exists()

    def test_bad_spec_file(self, tmp_path, capsys):
        path = tmp_path / "grid.json"
        path.write_text("[1, 2]")
        assert main(["verify", "--spec", str(path)]) == 2
        assert json.loads(capsys.readouterr().out)["success"] is False


class TestOracleCommand:
    """Test the oracle and identities subcommands."""

    def test_corrected_equal(self, capsys):
        code = main(["oracle", "--identity", "eq15", "--params", "b=1/2,c=5/2", "--deg", "6"])
        assert code == 0
        assert json.loads(capsys.readouterr().out)["equal"] is True

    def test_printed_mismatch(self, capsys):
        code = main(["oracle", "--identity", "eq15", "--params", "b=1,c=3", "--deg", "4", "--printed"])
        assert code == 4
        data = json.loads(capsys.readouterr().out)
        assert data["equal"] is False
        assert data["first_mismatch"]["i"] == 1

    def test_degree_cap(self, capsys):
        assert main(["oracle", "--identity", "eq15", "--params", "b=1,c=2", "--deg", "20"]) == 2

    def test_identities_json(self, capsys):
        assert main(["identities", "--format", "json"]) == 0
        entries = json.loads(capsys.readouterr().out)
        assert [e["id"] for e in entries] == [
            "eq13", "eq14", "eq15", "eq16", "eq26", "eq31", "eq33", "eq34", "bc3f3",
        ]
        assert all(e["correction"] for e in entries)

    def test_identities_plain(self, capsys):
        assert main(["identities"]) == 0
        assert "eq15" in capsys.readouterr().out
