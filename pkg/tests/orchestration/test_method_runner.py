# tests/orchestration/test_method_runner.py
from unittest.mock import MagicMock

import pytest

from fcopt.config.settings import MethodConfig
from fcopt.corpus.entries import corpus_get
from fcopt.exceptions import InapplicableMethodError
from fcopt.orchestration.method_runner import MethodRunner, RegularizationService
from fcopt.statistics import StatisticsTracker, StatKey
from fcopt.types import MethodId


class TestMethodRunner:
    @pytest.fixture
    def writer(self):
        return MagicMock()

    @pytest.fixture
    def stats(self):
        return StatisticsTracker()

    def test_run_to_file_writes_the_trace(self, writer, stats, tmp_path):
        # Arrange
        runner = MethodRunner(writer, stats)
        problem = corpus_get("max-of-quadratics").build()
        output = tmp_path / "gm.csv"

        # Act
        trace = runner.run_to_file(problem, MethodConfig(method=MethodId.GM, iters=5), output)

        # Assert
        writer.write_trace.assert_called_once_with(trace, output)
        assert stats.output_path == str(output)
        assert stats.get(StatKey.METHOD_RUNS) == 1

    def test_run_without_output_writes_nothing(self, writer, stats):
        runner = MethodRunner(writer, stats)

        runner.run_to_file(corpus_get("a").build(), MethodConfig(method=MethodId.FULL, iters=2), None)

        writer.write_trace.assert_not_called()

    def test_inapplicable_method_propagates(self, writer, stats):
        runner = MethodRunner(writer, stats)

        with pytest.raises(InapplicableMethodError):
            runner.run(corpus_get("power-outer").build(), MethodConfig(method=MethodId.GM))

        writer.write_trace.assert_not_called()

    def test_regularization_service(self, writer, stats, tmp_path):
        service = RegularizationService(writer, stats)
        problem = corpus_get("rank-deficient").build()
        config = MethodConfig(method=MethodId.FULL, p=1, epsilon=1e-2)

        trace = service.solve(problem, 1, 1e-2, config, tmp_path / "reg.csv")

        assert trace.method is MethodId.REGULARIZED
        writer.write_trace.assert_called_once_with(trace, tmp_path / "reg.csv")
