# fcopt/statistics.py
"""
Per-invocation counters: runs, outer iterations, auxiliary problems and checks.

Methods, engines and the verifier bump the counters through `add_stat`; the
CLI emits one structured summary event when the command finishes. `compare`
runs methods in worker threads, so updates are serialized by a lock.
"""
import os
import threading
from collections import Counter
from enum import Enum
from typing import Dict, Optional

import structlog

logger = structlog.get_logger(__name__)


class StatKey(str, Enum):
    METHOD_RUNS = "method_runs"
    OUTER_ITERATIONS = "outer_iterations"
    SUBPROBLEMS_SOLVED = "subproblems_solved"
    DUAL_ASCENT_SOLVES = "dual_ascent_solves"
    INNER_ITERATIONS = "inner_iterations"
    BEST_ITERATE_FALLBACKS = "best_iterate_fallbacks"
    PROX_INNER_BUDGET_EXHAUSTED = "prox_inner_budget_exhausted"
    CHECKS_RUN = "checks_run"
    CHECKS_FAILED = "checks_failed"


class StatisticsTracker:
    """Counts events of one fcopt command and remembers where its output went."""

    def __init__(self) -> None:
        self.stats: Counter[StatKey] = Counter()
        self.output_path: Optional[str] = None
        self._lock = threading.Lock()

    def add_stat(self, key: StatKey, count: int = 1) -> None:
        with self._lock:
            self.stats[key] += count

    def get(self, key: StatKey) -> int:
        with self._lock:
            return self.stats[key]

    def set_output_path(self, path: str) -> None:
        self.output_path = os.path.abspath(path)

    def as_dict(self) -> Dict[str, int]:
        """Non-zero counters keyed by their snake_case name, in declaration order."""
        with self._lock:
            return {key.value: self.stats[key] for key in StatKey if self.stats[key]}

    def log_summary(self) -> None:
        written = self.output_path is not None and os.path.exists(self.output_path)
        logger.info("Invocation summary.", output=self.output_path, output_written=written, **self.as_dict())
