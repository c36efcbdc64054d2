# tests/cli/test_cli.py
import csv
import json

import pytest

from fcopt import cli
from fcopt.config.settings import Settings
from fcopt.exceptions import ConvergenceError


@pytest.fixture
def settings():
    return Settings()


def run_cli(settings, *argv):
    return cli.main(list(argv), settings=settings)


class TestRunCommand:
    def test_run_writes_trace(self, settings, tmp_path):
        # Arrange
        out = tmp_path / "gm.csv"

        # Act
        code = run_cli(settings, "run", "--problem", "corpus:a", "--method", "gm", "--iters", "5", "--out", str(out))

        # Assert
        assert code == cli.EXIT_OK
        with out.open(encoding="utf-8") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["k", "phi", "gap", "bound", "step_norm", "inner_iters", "subproblem_kkt"]
        assert len(rows) == 7

    def test_run_is_byte_deterministic(self, settings, tmp_path):
        for name in ("a.csv", "b.csv"):
            run_cli(settings, "run", "--problem", "corpus:d", "--method", "fgm", "--iters", "5",
                    "--out", str(tmp_path / name))

        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_missing_problem_file(self, settings, tmp_path):
        code = run_cli(settings, "run", "--problem", str(tmp_path / "absent.json"), "--method", "gm",
                       "--out", str(tmp_path / "t.csv"))

        assert code == cli.EXIT_IO

    def test_invalid_method(self, settings, tmp_path):
        code = run_cli(settings, "run", "--problem", "corpus:a", "--method", "sgd", "--out", str(tmp_path / "t.csv"))

        assert code == cli.EXIT_CONFIG

    def test_gm_rejects_nonlinear_constraints(self, settings, tmp_path, capsys):
        code = run_cli(settings, "run", "--problem", "corpus:c", "--method", "gm", "--out", str(tmp_path / "t.csv"))

        assert code == cli.EXIT_CONFIG
        assert "F(L_1(f)) = +inf" in capsys.readouterr().err
        assert not (tmp_path / "t.csv").exists()

    def test_convergence_failure(self, settings, tmp_path, monkeypatch):
        def failing_runner(problem, config, stats=None):
            raise ConvergenceError("subproblem failed at k = 1")

        monkeypatch.setattr("fcopt.orchestration.method_runner.get_runner", lambda method: failing_runner)

        code = run_cli(settings, "run", "--problem", "corpus:a", "--method", "gm", "--out", str(tmp_path / "t.csv"))

        assert code == cli.EXIT_CONVERGENCE

    def test_unwritable_output(self, settings, tmp_path):
        blocker = tmp_path / "blocker"
        blocker.write_text("", encoding="utf-8")

        code = run_cli(settings, "run", "--problem", "corpus:a", "--method", "gm", "--iters", "2",
                       "--out", str(blocker / "t.csv"))

        assert code == cli.EXIT_IO

    def test_argument_error(self, settings):
        assert run_cli(settings, "run", "--problem", "corpus:a") == 2

    def test_metrics_file(self, settings, tmp_path):
        metrics_path = tmp_path / "metrics.prom"

        run_cli(settings, "run", "--problem", "corpus:a", "--method", "full", "--iters", "2",
                "--out", str(tmp_path / "t.csv"), "--metrics-out", str(metrics_path))

        assert "fcopt_method_runs_total" in metrics_path.read_text(encoding="utf-8")


class TestVerifyCommand:
    def test_passing_problem_prints_json_lines(self, settings, capsys):
        code = run_cli(settings, "verify", "--problem", "corpus:a", "--samples", "50")

        lines = capsys.readouterr().out.splitlines()
        assert code == cli.EXIT_OK
        assert lines
        assert all("check_id" in json.loads(line) for line in lines)

    def test_failing_check_exit_code(self, settings, capsys):
        code = run_cli(settings, "verify", "--problem", "corpus:j", "--checks", "subhomo_equivalence",
                       "--samples", "50")

        report = json.loads(capsys.readouterr().out.splitlines()[0])
        assert code == cli.EXIT_VERIFICATION
        assert report["status"] == "fail"

    def test_empty_check_list(self, settings):
        assert run_cli(settings, "verify", "--problem", "corpus:a", "--checks", "") == cli.EXIT_CONFIG

    def test_unknown_check(self, settings):
        assert run_cli(settings, "verify", "--problem", "corpus:a", "--checks", "rate,bogus") == cli.EXIT_CONFIG


class TestOtherCommands:
    def test_compare(self, settings, tmp_path):
        code = run_cli(settings, "compare", "--problem", "corpus:b", "--methods", "gm,fgm,full", "--iters", "5",
                       "--out", str(tmp_path))

        assert code == cli.EXIT_OK
        summary = json.loads((tmp_path / "summary.json").read_text(encoding="utf-8"))
        assert set(summary["methods"]) == {"gm", "fgm", "full"}

    def test_compare_with_inapplicable_method(self, settings, tmp_path):
        code = run_cli(settings, "compare", "--problem", "corpus:a", "--methods", "gm,cgm", "--iters", "3",
                       "--out", str(tmp_path))

        assert code == cli.EXIT_CONFIG
        assert (tmp_path / "summary.json").exists()

    def test_compare_maps_unexpected_run_errors_to_convergence_exit(self, settings, tmp_path, monkeypatch):
        def broken_runner(problem, config, stats=None):
            raise FloatingPointError("overflow in step")

        monkeypatch.setattr("fcopt.orchestration.method_runner.get_runner", lambda method: broken_runner)

        code = run_cli(settings, "compare", "--problem", "corpus:a", "--methods", "gm", "--iters", "3",
                       "--out", str(tmp_path))

        assert code == cli.EXIT_CONVERGENCE
        assert (tmp_path / "summary.json").exists()

    def test_regularize_solve(self, settings, tmp_path):
        out = tmp_path / "reg.csv"

        code = run_cli(settings, "regularize-solve", "--problem", "corpus:h", "--epsilon", "1e-2", "--out", str(out))

        assert code == cli.EXIT_OK
        assert out.exists()

    def test_corpus_list(self, settings, capsys):
        code = run_cli(settings, "corpus", "list")

        lines = capsys.readouterr().out.splitlines()
        assert code == cli.EXIT_OK
        assert len(lines) == 10
        assert lines[0].startswith("unconstrained-quadratic\ta\t")

    def test_corpus_export(self, settings, tmp_path):
        code = run_cli(settings, "corpus", "export", "--out", str(tmp_path))

        assert code == cli.EXIT_OK
        assert len(list(tmp_path.glob("*.json"))) == 10
