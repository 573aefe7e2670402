"""Tests for the command-line interface: exit codes, outputs and reports."""

import json
from pathlib import Path

import polars as pl
import pytest

from approachability.cli.main import main
from approachability.cli.output import RUN_COLUMNS, SWEEP_COLUMNS, format_value, summary_path
from approachability.cli.scenario import parse_scenario

SCENARIO_DIR = Path(__file__).resolve().parents[1] / "scenarios"


class TestFormatValue:
    """Tests for CSV cell formatting."""

    @pytest.mark.parametrize(
        "value, text",
        [(None, None), (True, "true"), (False, "false"), (3, "3"), (0.1, "0.1"), ("x", "x")],
    )
    def test_cells(self, value, text):
        """Test each cell type's text."""
        assert format_value(value) == text

    def test_floats_round_trip(self):
        """Test floats are written with enough digits to read back exactly."""
        value = 1 / 3
        assert float(format_value(value)) == value


class TestRun:
    """Tests for the run subcommand."""

    def test_writes_csv_and_summary(self, external_scenario_path: Path, tmp_path: Path):
        """Test a passing run exits 0 with the run CSV and its summary."""
        out = tmp_path / "run.csv"
        assert main(["run", str(external_scenario_path), "--out", str(out)]) == 0

        frame = pl.read_csv(out, infer_schema_length=0)
        assert frame.columns == RUN_COLUMNS
        assert frame.height == 200
        assert set(frame["seed"].to_list()) == {"7"}

        summary = json.loads(summary_path(out).read_text(encoding="utf-8"))
        assert summary["scenario_id"] == "external-small"
        assert summary["passed"] is True
        assert summary["seeds"] == [7]
        assert summary["runs"][0]["n_steps"] == 200

    def test_default_output_name(self, external_scenario_path: Path, tmp_path: Path, monkeypatch):
        """Test the default output path uses the scenario id and seed."""
        monkeypatch.chdir(tmp_path)
        assert main(["run", str(external_scenario_path), "--seed", "8"]) == 0
        assert (tmp_path / "external-small-seed8.csv").exists()
        assert (tmp_path / "external-small-seed8.summary.json").exists()

    def test_byte_identical_reruns(self, external_scenario_path: Path, tmp_path: Path):
        """Test two runs of the same scenario and seed write identical CSVs."""
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        main(["run", str(external_scenario_path), "--out", str(first)])
        main(["run", str(external_scenario_path), "--out", str(second)])
        assert first.read_bytes() == second.read_bytes()

    def test_invalid_scenario_exit_2(self, write_scenario, capsys):
        """Test an invalid scenario exits 2 with a line-anchored message."""
        path = write_scenario(
            "bad.yaml",
            """
            id: bad
            problem:
              kind: external
              utility: [[1.0, 0.0], [0.0, 1.0]]
            algorithm:
              kind: response-based
            opponent:
              kind: fixed-mixed
              q: [0.5, 0.5]
            n_steps: -5
            seeds: [1]
            """,
        )
        assert main(["run", str(path)]) == 2
        assert f"{path}:10: n_steps:" in capsys.readouterr().err

    def test_infeasible_constraint_exit_2(self, tmp_path: Path):
        """Test an infeasible constrained problem exits 2."""
        scenario = SCENARIO_DIR / "constrained-infeasible.yaml"
        assert main(["run", str(scenario), "--out", str(tmp_path / "x.csv")]) == 2

    def test_miscertified_oracle_exit_3(self, tmp_path: Path, capsys):
        """Test a failed spot check exits 3 and still writes an empty CSV and a summary."""
        out = tmp_path / "m.csv"
        scenario = SCENARIO_DIR / "generic-miscertified.yaml"
        assert main(["run", str(scenario), "--out", str(out)]) == 3
        assert "residual" in capsys.readouterr().err
        assert pl.read_csv(out).columns == RUN_COLUMNS
        assert pl.read_csv(out).height == 0
        summary = json.loads(summary_path(out).read_text(encoding="utf-8"))
        assert summary["passed"] is False
        assert summary["failed_step"] == 0

    def test_fail_fast_stops_at_first_failure(
        self, external_scenario_path: Path, tmp_path: Path, third_audit_fails: None
    ):
        """Test --fail-fast writes the steps up to the failed audit and exits 3."""
        out = tmp_path / "f.csv"
        assert main(["run", str(external_scenario_path), "--out", str(out), "--fail-fast"]) == 3
        assert pl.read_csv(out)["n"].to_list() == [1, 2, 3]
        summary = json.loads(summary_path(out).read_text(encoding="utf-8"))
        assert summary["failed_step"] == 3

    def test_audit_failure_without_fail_fast(
        self, external_scenario_path: Path, tmp_path: Path, third_audit_fails: None
    ):
        """Test a failed audit is recorded and the run completes with exit 3."""
        out = tmp_path / "f.csv"
        assert main(["run", str(external_scenario_path), "--out", str(out)]) == 3
        frame = pl.read_csv(out, infer_schema_length=0)
        assert frame.height == 200
        assert frame.filter(pl.col("recursion_audit_pass") == "false")["n"].to_list() == ["3"]


class TestSweepCommand:
    """Tests for the sweep subcommand."""

    def test_sweep_csv(self, write_scenario, external_scenario_text: str, tmp_path: Path):
        """Test a sweep writes one row per checkpoint plus a summary of every seed."""
        path = write_scenario(
            "sweep.yaml", external_scenario_text + "sweep:\n  checkpoints: [10, 100, 200]\n"
        )
        out = tmp_path / "sweep.csv"
        assert main(["sweep", str(path), "--out", str(out)]) == 0

        frame = pl.read_csv(out, infer_schema_length=0)
        assert frame.columns == SWEEP_COLUMNS
        assert frame["n_checkpoint"].to_list() == ["10", "100", "200"]
        summary = json.loads(summary_path(out).read_text(encoding="utf-8"))
        assert summary["seeds"] == [7, 8]
        assert summary["delta"] == 0.1

    def test_bad_worker_count(self, external_scenario_path: Path):
        """Test --workers below 1 is a usage error."""
        with pytest.raises(SystemExit) as info:
            main(["sweep", str(external_scenario_path), "--workers", "0"])
        assert info.value.code == 2


class TestReport:
    """Tests for the report subcommand."""

    @pytest.fixture
    def run_csv(self, external_scenario_path: Path, tmp_path: Path) -> Path:
        out = tmp_path / "run.csv"
        assert main(["run", str(external_scenario_path), "--out", str(out)]) == 0
        return out

    def test_pass(self, run_csv: Path, capsys):
        """Test a passing run is reported as PASS with exit 0."""
        assert main(["report", str(run_csv)]) == 0
        line = capsys.readouterr().out.strip()
        assert line.startswith("PASS external-small seed=7 steps=200 max_ratio=")
        assert line.endswith("audits=200/200")

    def test_fail_on_audit(self, run_csv: Path, tmp_path: Path, capsys):
        """Test a run with a failed audit is reported as FAIL with exit 3."""
        tampered = tmp_path / "tampered.csv"
        tampered.write_text(
            run_csv.read_text(encoding="utf-8").replace(",true,", ",false,", 1),
            encoding="utf-8",
        )
        assert main(["report", str(run_csv), str(tampered)]) == 3
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0].startswith("PASS")
        assert lines[1].startswith("FAIL")
        assert lines[1].endswith("audits=199/200")

    def test_fail_on_ratio(self, run_csv: Path, tmp_path: Path):
        """Test a bound ratio above 1 fails a gated run."""
        frame = pl.read_csv(run_csv, infer_schema_length=0)
        frame = frame.with_columns(pl.lit("1.5").alias("bound_ratio"))
        tampered = tmp_path / "ratio.csv"
        frame.write_csv(tampered)
        assert main(["report", str(tampered)]) == 3

    @pytest.mark.parametrize(
        "norm, ratio, code",
        [
            ("1e-09", "1.5", 0),  # 3.3e-10 above the bound, within the slack
            ("10.0", "1.00000005", 3),  # 5e-7 above the bound
        ],
    )
    def test_bound_slack_is_absolute(self, run_csv: Path, tmp_path: Path, norm, ratio, code):
        """Test the report allows the runner's absolute slack on the norm, not on the ratio."""
        frame = pl.read_csv(run_csv, infer_schema_length=0)
        frame = frame.with_columns(
            pl.lit(norm).alias("lambda_norm"), pl.lit(ratio).alias("bound_ratio")
        )
        tampered = tmp_path / "slack.csv"
        frame.write_csv(tampered)
        assert main(["report", str(tampered)]) == code

    def test_malformed_csv(self, tmp_path: Path):
        """Test a file that is not a run CSV exits 2."""
        bogus = tmp_path / "bogus.csv"
        bogus.write_text("a,b\n1,2\n", encoding="utf-8")
        assert main(["report", str(bogus)]) == 2
        assert main(["report", str(tmp_path / "absent.csv")]) == 2

    def test_requires_a_file(self):
        """Test report without arguments is a usage error."""
        with pytest.raises(SystemExit) as info:
            main(["report"])
        assert info.value.code == 2


class TestValidate:
    """Tests for the validate subcommand."""

    def test_echo(self, external_scenario_path: Path, external_scenario_text: str, capsys):
        """Test validate prints a normalized scenario that parses back unchanged."""
        assert main(["validate", str(external_scenario_path)]) == 0
        echoed = parse_scenario(capsys.readouterr().out)
        assert echoed.normalized() == parse_scenario(external_scenario_text).normalized()

    def test_invalid(self, tmp_path: Path):
        """Test a missing scenario file exits 2."""
        assert main(["validate", str(tmp_path / "absent.yaml")]) == 2
