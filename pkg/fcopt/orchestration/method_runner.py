# fcopt/orchestration/method_runner.py
"""
Runs one method on one problem and writes its trace.
"""

from pathlib import Path
from typing import Optional, Union

import structlog

from fcopt.config.settings import MethodConfig
from fcopt.core.methods import get_runner
from fcopt.core.problem import CompositeProblem
from fcopt.core.regularization import solve_via_regularization
from fcopt.output.trace_writer import TraceWriter
from fcopt.statistics import StatisticsTracker
from fcopt.types import RunTrace

logger = structlog.get_logger(__name__)


class MethodRunner:
    """Dispatches a MethodConfig to its runner through the method registry."""

    def __init__(self, writer: TraceWriter, stats: StatisticsTracker):
        self._writer = writer
        self._stats = stats

    def run(self, problem: CompositeProblem, config: MethodConfig) -> RunTrace:
        """
        Raises:
            ConfigError: If the method does not apply to the problem.
            ConvergenceError: If an iteration cannot be completed.
        """
        runner = get_runner(config.method)
        return runner(problem, config, self._stats)

    def run_to_file(self, problem: CompositeProblem, config: MethodConfig,
                    output_path: Optional[Union[str, Path]]) -> RunTrace:
        trace = self.run(problem, config)
        if output_path is not None:
            self._writer.write_trace(trace, output_path)
            self._stats.set_output_path(str(output_path))
        return trace


class RegularizationService:
    """Runs the regularized solver and writes its trace."""

    def __init__(self, writer: TraceWriter, stats: StatisticsTracker):
        self._writer = writer
        self._stats = stats

    def solve(self, problem: CompositeProblem, p: int, epsilon: float, config: MethodConfig,
              output_path: Optional[Union[str, Path]] = None) -> RunTrace:
        trace = solve_via_regularization(problem, p, epsilon, config, self._stats)
        if output_path is not None:
            self._writer.write_trace(trace, output_path)
            self._stats.set_output_path(str(output_path))
        logger.info("Regularized solve finished.", mu=trace.metadata.get("mu"), final_phi=trace.final_phi())
        return trace
