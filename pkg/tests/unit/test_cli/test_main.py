"""
Unit tests for the command-line interface.
"""
import json

import pytest

from infra.cli.main import main
from shared.config.constants import (
    EXIT_FAILURE,
    EXIT_INFEASIBLE,
    EXIT_OK,
    EXIT_TIME_LIMIT,
    EXIT_USAGE,
    PACKAGE_VERSION,
)
from shared.models.applications import KnapsackSpec
from shared.models.run import SuiteReport
from solvers.applications.knapsack import gen_knapsack
from tools.instances.io import read_instance, write_instance
from tools.instances.region import Relation, row_constraint


@pytest.fixture
def instance_file(tmp_path):
    instance = gen_knapsack(KnapsackSpec(n=3, alpha=50.0, seed=1))
    return write_instance(instance, tmp_path / f"{instance.label}.json")


class TestParser:
    """Tests for argument handling."""

    def test_version(self, capsys):
        assert main(["--version"]) == EXIT_OK
        assert PACKAGE_VERSION in capsys.readouterr().out

    def test_missing_command(self):
        assert main([]) == EXIT_USAGE

    def test_bad_option(self):
        assert main(["verify", "nogood", "--n", "0"]) == EXIT_USAGE


class TestGenerate:
    """Tests for the generate command."""

    def test_writes_files(self, tmp_path, capsys):
        """Test one file per seed with the instance label as name."""
        # Execute
        code = main(["generate", "kp", "--n", "4", "--alpha", "50", "--seed", "3", "--count", "2",
                     "--out", str(tmp_path)])

        # Assert
        assert code == EXIT_OK
        printed = capsys.readouterr().out.split()
        assert [p.rsplit("/", 1)[-1] for p in printed] == ["kp_n4_a50_s3.json", "kp_n4_a50_s4.json"]
        assert read_instance(tmp_path / "kp_n4_a50_s3.json").n == 4

    def test_uncorrelated_makespan(self, tmp_path):
        assert main(["generate", "ms", "--n", "5", "--eta", "0.5", "--uncorrelated", "--out", str(tmp_path)]) == EXIT_OK
        assert (tmp_path / "msu_n5_e0.5_s0.json").exists()

    def test_invalid_parameters(self, tmp_path, capsys):
        """Test that a spec validation error is a usage error."""
        code = main(["generate", "kp", "--n", "0", "--alpha", "50", "--out", str(tmp_path)])
        assert code == EXIT_USAGE
        assert "generate:" in capsys.readouterr().err


class TestSolve:
    """Tests for the solve command."""

    def test_optimal(self, instance_file, tmp_path, capsys):
        """Test the printed record, the written copy and exit code 0."""
        # Setup
        output = tmp_path / "out" / "result.json"

        # Execute
        code = main(["solve", str(instance_file), "--d", "4", "--l", "3", "--backend", "fallback",
                     "--output", str(output)])

        # Assert
        assert code == EXIT_OK
        record = json.loads(capsys.readouterr().out)
        assert record["status"] == "optimal"
        assert record["config"]["d"] == 4
        assert record["config"]["command"] == "solve"
        assert json.loads(output.read_text()) == record

    def test_sense_override(self, instance_file, capsys):
        """Test that --sense min solves the minimization."""
        code = main(["solve", str(instance_file), "--d", "4", "--l", "3", "--backend", "fallback", "--sense", "min"])
        record = json.loads(capsys.readouterr().out)
        assert code == EXIT_OK
        assert record["sense"] == "min"
        assert record["objective"] == pytest.approx(0.0, abs=1e-6)

    def test_infeasible(self, tmp_path, capsys):
        """Test exit code 4 on an empty region."""
        instance = gen_knapsack(KnapsackSpec(n=3, alpha=50.0, seed=1))
        impossible = instance.with_region(instance.region.with_constraints([
            row_constraint(0, {0: 1.0}, Relation.GE, 2.0, name="impossible"),
        ]))
        path = write_instance(impossible, tmp_path / "impossible.json")
        assert main(["solve", str(path), "--backend", "fallback"]) == EXIT_INFEASIBLE
        assert json.loads(capsys.readouterr().out)["status"] == "infeasible"

    def test_time_limit(self, instance_file, capsys):
        assert main(["solve", str(instance_file), "--backend", "fallback", "--time-limit", "1e-9"]) == EXIT_TIME_LIMIT

    def test_unreadable_instance(self, tmp_path, capsys):
        """Test exit code 2 and a message on stderr."""
        missing = tmp_path / "missing.json"
        assert main(["solve", str(missing)]) == EXIT_USAGE
        assert "solve:" in capsys.readouterr().err

    def test_bad_gap_limit(self, instance_file):
        """Test that a gap limit below the tolerance is a usage error."""
        assert main(["solve", str(instance_file), "--tolerance", "0.01", "--gap-limit", "0.001"]) == EXIT_USAGE


class TestVerify:
    """Tests for the verify command."""

    def test_passing_suite(self, capsys):
        assert main(["verify", "nogood", "--n", "2"]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["passed"] is True

    def test_failing_suite(self, mocker, capsys):
        """Test exit code 1 when a check fails."""
        mocker.patch(
            "infra.cli.commands.verify.run_suite",
            return_value=SuiteReport(suite="nogood", passed=False, checks=1, failures=["broken"]),
        )
        assert main(["verify", "nogood"]) == EXIT_FAILURE
        assert json.loads(capsys.readouterr().out)["failures"] == ["broken"]

    def test_unknown_suite(self):
        assert main(["verify", "everything"]) == EXIT_USAGE


class TestBench:
    """Tests for the bench command."""

    def test_csv_outputs(self, instance_file, tmp_path, capsys):
        """Test the per-instance and summary files."""
        # Setup
        rows_path = tmp_path / "report" / "rows.csv"
        summary_path = tmp_path / "report" / "summary.csv"

        # Execute
        code = main(["bench", str(instance_file.parent), "--models", "enhanced,baseline", "--omit-timing",
                     "--output", str(rows_path), "--summary", str(summary_path)])

        # Assert
        assert code == EXIT_OK
        rows = rows_path.read_text().splitlines()
        assert len(rows) == 3
        assert rows[1].split(",")[5] == ""
        assert summary_path.read_text().splitlines()[0].startswith("family,n,param,model")

    def test_empty_directory(self, tmp_path, capsys):
        assert main(["bench", str(tmp_path)]) == EXIT_USAGE
        assert "no instance files" in capsys.readouterr().err

    def test_nothing_completed(self, tmp_path, capsys):
        """Test exit code 1 when every row is an error."""
        (tmp_path / "broken.json").write_text("{}")
        assert main(["bench", str(tmp_path)]) == EXIT_FAILURE
        assert capsys.readouterr().out.splitlines()[1].split(",")[4] == "error"

    def test_bad_models(self, tmp_path):
        assert main(["bench", str(tmp_path), "--models", "enhanced,fancy"]) == EXIT_USAGE
