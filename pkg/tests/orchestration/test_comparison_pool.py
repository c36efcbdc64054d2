# tests/orchestration/test_comparison_pool.py
import json
from unittest.mock import MagicMock

import pytest

from fcopt.config.settings import MethodConfig
from fcopt.corpus.entries import corpus_get
from fcopt.exceptions import ConfigError, ConvergenceError
from fcopt.orchestration.comparison_pool import SUMMARY_FILE, ComparisonPool, proxy_reference
from fcopt.orchestration.method_runner import MethodRunner
from fcopt.output.trace_writer import TraceWriter
from fcopt.statistics import StatisticsTracker
from fcopt.types import IterationRecord, MethodId, RunTrace


@pytest.fixture
def pool():
    writer = TraceWriter()
    return ComparisonPool(MethodRunner(writer, StatisticsTracker()), writer, concurrency=2)


def configs(*pairs, iters=10):
    return [MethodConfig(method=method, p=p, iters=iters) for method, p in pairs]


class TestComparisonPool:
    @pytest.mark.asyncio
    async def test_writes_one_trace_per_method_and_a_summary(self, pool, tmp_path):
        # Arrange
        problem = corpus_get("unconstrained-quadratic").build()

        # Act
        summary = await pool.compare(problem, configs((MethodId.GM, 1), (MethodId.FGM, 1)), tmp_path)

        # Assert
        assert (tmp_path / "gm.csv").exists()
        assert (tmp_path / "fgm.csv").exists()
        on_disk = json.loads((tmp_path / SUMMARY_FILE).read_text(encoding="utf-8"))
        assert on_disk["reference"] == {"value": -0.3, "proxy": False, "margin": 0.0}
        assert set(on_disk["methods"]) == {"gm", "fgm"}
        assert summary["methods"]["gm"]["iterations"] == 10
        assert summary["methods"]["gm"]["bound_satisfied"] is True

    @pytest.mark.asyncio
    async def test_shared_method_names_carry_the_order(self, pool, tmp_path):
        problem = corpus_get("lse-pentagon").build()

        summary = await pool.compare(problem, configs((MethodId.FULL, 1), (MethodId.FULL, 2), iters=3), tmp_path)

        assert set(summary["methods"]) == {"full-p1", "full-p2"}
        assert (tmp_path / "full-p2.csv").exists()

    @pytest.mark.asyncio
    async def test_proxy_reference_without_known_optimum(self, pool, tmp_path):
        problem = corpus_get("unconstrained-quadratic").build()
        problem = problem.with_function(problem.f, known_opt=None)

        summary = await pool.compare(problem, configs((MethodId.GM, 1), (MethodId.FULL, 1)), tmp_path)

        reference = summary["reference"]
        assert reference["proxy"] is True
        best = min(summary["methods"][name]["final_phi"] for name in ("gm", "full"))
        assert reference["value"] == pytest.approx(best - reference["margin"])
        assert summary["methods"]["gm"]["final_gap"] > 0.0

    @pytest.mark.asyncio
    async def test_failed_run_raises_after_summary_is_written(self, pool, tmp_path):
        problem = corpus_get("unconstrained-quadratic").build()

        with pytest.raises(ConfigError):
            await pool.compare(problem, configs((MethodId.GM, 1), (MethodId.CGM, 1)), tmp_path)

        on_disk = json.loads((tmp_path / SUMMARY_FILE).read_text(encoding="utf-8"))
        assert on_disk["methods"]["cgm"]["status"] == "error"
        assert on_disk["methods"]["gm"]["status"] == "completed"
        assert (tmp_path / "gm.csv").exists()
        assert not (tmp_path / "cgm.csv").exists()

    @pytest.mark.asyncio
    async def test_unexpected_error_is_reported_as_convergence_failure(self, tmp_path):
        # Arrange
        runner = MagicMock()
        runner.run.side_effect = ZeroDivisionError("division by zero in step")
        pool = ComparisonPool(runner, TraceWriter(), concurrency=1)
        problem = corpus_get("unconstrained-quadratic").build()

        # Act
        with pytest.raises(ConvergenceError) as excinfo:
            await pool.compare(problem, configs((MethodId.GM, 1)), tmp_path)

        # Assert
        assert isinstance(excinfo.value.__cause__, ZeroDivisionError)
        on_disk = json.loads((tmp_path / SUMMARY_FILE).read_text(encoding="utf-8"))
        assert on_disk["reference"] is None
        assert on_disk["methods"]["gm"]["error_type"] == "ZeroDivisionError"


def test_proxy_reference_margin():
    traces = []
    for values in ([3.0, 2.0], [2.5, 1.0]):
        trace = RunTrace(method=MethodId.GM, problem_name="t", p=1)
        trace.records = [IterationRecord(k=k, phi=v, step_norm=0.0) for k, v in enumerate(values)]
        traces.append(trace)

    value, margin = proxy_reference(traces)

    assert margin == pytest.approx(2e-8)
    assert value == pytest.approx(1.0 - 2e-8)
