# fcopt/core/recording.py
"""
Shared plumbing of the method runners: applicability gates, the per-run
trace recorder and the best-iterate fallback for inexact subproblems.
"""

import math
import time
from typing import Callable, Optional

import numpy as np
import structlog

from fcopt.core.bounds import BoundColumn, apply_bound
from fcopt.core.problem import CompositeProblem, phi
from fcopt.exceptions import (
    ConfigError, ConvergenceError, InapplicableMethodError, NumericalError, SubproblemConvergenceError,
    SubproblemError
)
from fcopt.linalg import Point
from fcopt.statistics import StatisticsTracker, StatKey
from fcopt.types import IterationRecord, MethodId, RunStatus, RunTrace, SubproblemResult
from fcopt.utils import metrics

logger = structlog.get_logger(__name__)


# --- Gates ---


def require_finite_constant(problem: CompositeProblem, p: int, method: MethodId) -> float:
    """Returns F(L_p(f)) or raises when it is +inf or zero."""
    value = problem.F_of_constants(p)
    if math.isinf(value):
        raise InapplicableMethodError(
            f"Method '{method.value}' needs F(L_{p}(f)) < +inf, but F(L_{p}(f)) = +inf for this problem."
        )
    if value <= 0.0:
        raise ConfigError(f"Method '{method.value}' needs F(L_{p}(f)) > 0; got {value} (M = 0 is degenerate).")
    return value


def require_subhomogeneous(problem: CompositeProblem, method: MethodId) -> None:
    if not problem.outer.subhomogeneous:
        raise InapplicableMethodError(
            f"Method '{method.value}' needs a subhomogeneous outer function; "
            f"{problem.outer.kind.value} is not."
        )


def require_bounded(problem: CompositeProblem, method: MethodId) -> None:
    if not problem.Q.is_bounded:
        raise ConfigError(f"Method '{method.value}' needs a bounded domain (Box or Ball Q).")


# --- Steps ---


def guarded_step(step: Callable[[], SubproblemResult], problem: CompositeProblem,
                 stats: Optional[StatisticsTracker], k: int) -> SubproblemResult:
    """
    Runs one subproblem. A budget-exhausted solve continues from its best
    iterate when that iterate is finite and inside dom φ.
    """
    try:
        return step()
    except SubproblemConvergenceError as e:
        best = e.best
        if best is not None and np.all(np.isfinite(best.y)) and math.isfinite(phi(problem, best.y)):
            logger.warning("Subproblem returned its best iterate.", k=k, error=str(e), kkt=best.kkt_residual)
            if stats is not None:
                stats.add_stat(StatKey.BEST_ITERATE_FALLBACKS)
            return best
        raise ConvergenceError(f"Iteration {k}: {e}") from e
    except (SubproblemError, NumericalError) as e:
        raise ConvergenceError(f"Iteration {k}: {e}") from e


# --- Recording ---


class TraceRecorder:
    """Accumulates iteration records and closes the run with its bound column."""

    def __init__(self, method: MethodId, problem: CompositeProblem, p: int,
                 stats: Optional[StatisticsTracker] = None):
        self.method = method
        self.problem = problem
        self.stats = stats
        self.trace = RunTrace(method=method, problem_name=problem.name, p=p, known_opt=problem.known_opt)
        self.phi0 = phi(problem, problem.x0)
        self._started = time.perf_counter()
        self.trace.records.append(IterationRecord(k=0, phi=self.phi0, step_norm=0.0))

    def record(self, k: int, x: Point, x_prev: Point, result: Optional[SubproblemResult] = None,
               inner_iters: Optional[int] = None, kkt: Optional[float] = None, **extras) -> float:
        value = phi(self.problem, x)
        record = IterationRecord(
            k=k, phi=value, step_norm=self.problem.norm.norm(x - x_prev),
            inner_iters=inner_iters if inner_iters is not None else (result.inner_iterations if result else 0),
            subproblem_kkt=kkt if kkt is not None else (result.kkt_residual if result else 0.0),
            extras=extras,
        )
        self.trace.records.append(record)
        metrics.OUTER_ITERATIONS_TOTAL.labels(method=self.method.value).inc()
        if self.stats is not None:
            self.stats.add_stat(StatKey.OUTER_ITERATIONS)
        logger.debug("Iteration recorded.", k=k, phi=value, step_norm=record.step_norm)
        return value

    def finish(self, x: Point, column: Optional[BoundColumn], status: RunStatus = RunStatus.COMPLETED,
               **metadata) -> RunTrace:
        trace = self.trace
        trace.final_point = np.array(x, dtype=np.float64)
        trace.status = status
        trace.metadata.update(metadata)
        trace.set_reference_value(self.problem.known_opt)
        apply_bound(trace, column, self.phi0, self.problem.known_opt)
        metrics.METHOD_RUNS_TOTAL.labels(method=self.method.value, status=status.value).inc()
        metrics.RUN_DURATION_SECONDS.labels(method=self.method.value).observe(time.perf_counter() - self._started)
        if self.stats is not None:
            self.stats.add_stat(StatKey.METHOD_RUNS)
        logger.info("Run finished.", iterations=len(trace.records) - 1, final_phi=trace.final_phi(),
                    status=status.value)
        return trace
