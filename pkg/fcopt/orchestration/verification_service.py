# fcopt/orchestration/verification_service.py
"""
Runs the property checks of a problem and streams the reports.
"""

from typing import List, Optional, Sequence, TextIO

import structlog

from fcopt.config.settings import Settings, settings as default_settings
from fcopt.core.problem import CompositeProblem
from fcopt.output.trace_writer import TraceWriter
from fcopt.statistics import StatisticsTracker
from fcopt.types import CheckReport, CheckStatus
from fcopt.verification.checks import run_checks

logger = structlog.get_logger(__name__)


class VerificationService:
    """Wraps `run_checks` with the configured defaults and JSON-lines output."""

    def __init__(self, writer: TraceWriter, stats: StatisticsTracker, app_settings: Optional[Settings] = None):
        self._writer = writer
        self._stats = stats
        self._settings = app_settings or default_settings

    def verify(self, problem: CompositeProblem, names: Optional[Sequence[str]] = None,
               samples: Optional[int] = None, seed: Optional[int] = None,
               stream: Optional[TextIO] = None) -> List[CheckReport]:
        reports = run_checks(problem, names, samples, seed, self._settings.verification, self._stats)
        if stream is not None:
            self._writer.write_check_reports(reports, stream)
        return reports

    @staticmethod
    def all_passed(reports: Sequence[CheckReport]) -> bool:
        """True when no report failed; inconclusive reports do not count as failures."""
        return not any(r.status is CheckStatus.FAIL for r in reports)
