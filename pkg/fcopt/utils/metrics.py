# fcopt/utils/metrics.py
"""
Centralized Prometheus metrics definitions for fcopt.

Every instrumentation point of the package is declared here so that the
exported metric set can be read in one place. The CLI dumps the default
registry with `--metrics-out`.
"""
from pathlib import Path
from typing import Union

from prometheus_client import REGISTRY, Counter, Histogram, write_to_textfile

# A common prefix for all fcopt metrics.
PREFIX = "fcopt"

# --- Subproblem Metrics ---

SUBPROBLEMS_SOLVED_TOTAL = Counter(
    f"{PREFIX}_subproblems_solved_total",
    "Total number of auxiliary problems solved.",
    ["operation", "solver"],  # e.g., operation="cubic_step", solver="secular"
)

SUBPROBLEM_FAILURES_TOTAL = Counter(
    f"{PREFIX}_subproblem_failures_total",
    "Total number of auxiliary problems that raised an error.",
    ["operation", "error_type"],
)

SUBPROBLEM_INNER_ITERATIONS = Histogram(
    f"{PREFIX}_subproblem_inner_iterations",
    "Histogram of inner iterations spent per auxiliary problem.",
    ["solver"],
    buckets=(1, 2, 5, 10, 20, 50, 100, 500, 1000, 5000, float("inf")),
)

# --- Method Metrics ---

METHOD_RUNS_TOTAL = Counter(
    f"{PREFIX}_method_runs_total",
    "Total number of method runs by terminal status.",
    ["method", "status"],
)

OUTER_ITERATIONS_TOTAL = Counter(
    f"{PREFIX}_outer_iterations_total",
    "Total number of outer iterations performed.",
    ["method"],
)

RUN_DURATION_SECONDS = Histogram(
    f"{PREFIX}_run_duration_seconds",
    "Histogram of wall time per method run.",
    ["method"],
    buckets=(0.01, 0.05, 0.1, 0.5, 1, 5, 10, 30, 60, float("inf")),
)

# --- Verification Metrics ---

CHECKS_RUN_TOTAL = Counter(
    f"{PREFIX}_checks_run_total",
    "Total number of property checks executed.",
    ["check", "status"],
)


def write_metrics(path: Union[str, Path]) -> Path:
    """Writes the default registry in the Prometheus text format."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    write_to_textfile(str(path), REGISTRY)
    return path
