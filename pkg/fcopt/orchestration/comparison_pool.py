# fcopt/orchestration/comparison_pool.py
"""
Runs several methods on one problem concurrently and summarizes them.

Each method runs in a worker thread under a semaphore; every trace is
written to its own file and the summary is written after all runs finish.
Without a known optimum, the gap column of every trace uses a shared proxy:
the smallest φ observed across the comparison minus a reported margin.
"""

import asyncio
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import aiofiles
import structlog

from fcopt.config.settings import MethodConfig
from fcopt.core.bounds import apply_bound
from fcopt.core.problem import CompositeProblem
from fcopt.exceptions import ConvergenceError, FcoptError, ReportWriteError
from fcopt.orchestration.method_runner import MethodRunner
from fcopt.output.trace_writer import TraceWriter
from fcopt.types import CheckStatus, RunTrace
from fcopt.verification.checks import check_rate

logger = structlog.get_logger(__name__)

PROXY_MARGIN = 1e-8
SUMMARY_FILE = "summary.json"


def proxy_reference(traces: Sequence[RunTrace]) -> Tuple[float, float]:
    """(min φ over every trace − margin, margin) with margin = 1e-8·(1 + |min φ|)."""
    best = min(min(trace.phi) for trace in traces)
    margin = PROXY_MARGIN * (1.0 + abs(best))
    return best - margin, margin


class ComparisonPool:
    """Manages the concurrent execution of a set of method configurations."""

    def __init__(self, runner: MethodRunner, writer: TraceWriter, concurrency: int = 4):
        self._runner = runner
        self._writer = writer
        self._semaphore = asyncio.Semaphore(concurrency)

    async def _run_one(self, problem: CompositeProblem, config: MethodConfig) -> RunTrace:
        async with self._semaphore:
            logger.info("Starting comparison run.", method=config.method.value, p=config.p)
            return await asyncio.to_thread(self._runner.run, problem, config)

    async def compare(self, problem: CompositeProblem, configs: Sequence[MethodConfig],
                      output_dir: Union[str, Path]) -> Dict[str, Any]:
        """
        Runs every configuration, writes `<method>.csv` per successful run and
        `summary.json`, and returns the summary.

        Raises:
            FcoptError: The first error of a failed run, after the files of the
                        successful runs and the summary have been written.
        """
        output_dir = Path(output_dir)
        names = [self._trace_name(c, configs) for c in configs]
        results = await asyncio.gather(*(self._run_one(problem, c) for c in configs), return_exceptions=True)

        traces: Dict[str, RunTrace] = {}
        failures: Dict[str, BaseException] = {}
        for name, result in zip(names, results):
            if isinstance(result, BaseException):
                logger.error("Comparison run failed.", method=name, error=str(result))
                failures[name] = result
            else:
                traces[name] = result

        reference: Optional[Dict[str, Any]] = None
        if traces:
            reference = self._reference(problem, list(traces.values()))
        for name, trace in traces.items():
            self._writer.write_trace(trace, output_dir / f"{name}.csv")

        summary = self._summary(traces, failures, reference)
        await self._write_summary(summary, output_dir / SUMMARY_FILE)
        for error in failures.values():
            if isinstance(error, FcoptError):
                raise error
            raise ConvergenceError(f"Comparison run failed: {error}") from error
        return summary

    @staticmethod
    def _trace_name(config: MethodConfig, configs: Sequence[MethodConfig]) -> str:
        shared = sum(1 for c in configs if c.method is config.method) > 1
        return f"{config.method.value}-p{config.p}" if shared else config.method.value

    @staticmethod
    def _reference(problem: CompositeProblem, traces: List[RunTrace]) -> Dict[str, Any]:
        if problem.known_opt is not None:
            return {"value": problem.known_opt, "proxy": False, "margin": 0.0}
        value, margin = proxy_reference(traces)
        logger.info("Using proxy reference value.", value=value, margin=margin)
        for trace in traces:
            trace.set_reference_value(value)
            apply_bound(trace, trace.bound_column, trace.phi[0], value)
            trace.metadata["reference_proxy"] = value
        return {"value": value, "proxy": True, "margin": margin}

    @staticmethod
    def _summary(traces: Dict[str, RunTrace], failures: Dict[str, BaseException],
                 reference: Optional[Dict[str, Any]]) -> Dict[str, Any]:
        methods: Dict[str, Any] = {}
        phi_ref = None if reference is None else reference["value"]
        for name, trace in traces.items():
            rate = check_rate(trace, reference=phi_ref)
            methods[name] = {
                "status": trace.status.value,
                "iterations": len(trace.records) - 1,
                "final_phi": trace.final_phi(),
                "final_gap": trace.records[-1].gap,
                "bound_satisfied": None if rate.status is CheckStatus.INCONCLUSIVE else rate.passed,
                "bound": trace.metadata.get("bound"),
            }
        for name, error in failures.items():
            methods[name] = {"status": "error", "error": str(error), "error_type": type(error).__name__}
        return {"reference": reference, "methods": methods}

    async def _write_summary(self, summary: Dict[str, Any], path: Path) -> None:
        """Uses `aiofiles` so the event loop is not blocked by the write."""
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            async with aiofiles.open(path, "w", encoding="utf-8") as handle:
                await handle.write(self._writer.render_json(summary))
        except OSError as e:
            raise ReportWriteError(f"Failed to write summary to {path}") from e
        logger.info("Comparison summary written.", path=str(path), methods=len(summary["methods"]))
