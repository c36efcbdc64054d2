# fcopt/output/trace_writer.py
"""
Provides a service for writing run traces, comparison summaries and check
reports.

`TraceWriter` is a "dumb" I/O service: it formats and writes what the runners
and the verifier produce and contains no numerical logic. Floats are written
with `repr`, so the same run always produces a byte-identical file.
"""

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, TextIO, Union

import structlog

from fcopt.exceptions import ReportWriteError
from fcopt.types import CheckReport, IterationRecord, RunTrace, to_jsonable

logger = structlog.get_logger(__name__)

PathLike = Union[str, Path]


def _cell(value: Optional[Union[int, float]]) -> str:
    """Empty for None and non-finite values, `repr` for floats."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    value = float(value)
    return repr(value) if math.isfinite(value) else ""


class TraceWriter:
    """A stateless service that writes traces as CSV and reports as JSON."""

    TRACE_HEADER: List[str] = ["k", "phi", "gap", "bound", "step_norm", "inner_iters", "subproblem_kkt"]

    def trace_rows(self, trace: RunTrace) -> List[List[str]]:
        return [self._row(record) for record in trace.records]

    @staticmethod
    def _row(record: IterationRecord) -> List[str]:
        return [
            _cell(record.k), _cell(record.phi), _cell(record.gap), _cell(record.bound),
            _cell(record.step_norm), _cell(record.inner_iters), _cell(record.subproblem_kkt),
        ]

    def render_trace(self, trace: RunTrace) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.TRACE_HEADER)
        writer.writerows(self.trace_rows(trace))
        return buffer.getvalue()

    def write_trace(self, trace: RunTrace, output_path: PathLike) -> Path:
        """
        Writes one CSV row per record under the fixed header.

        Raises:
            ReportWriteError: If the file cannot be written.
        """
        path = Path(output_path)
        self._write_text(path, self.render_trace(trace))
        logger.info("Trace written.", path=str(path), method=trace.method.value, rows=len(trace.records))
        return path

    def write_summary(self, summary: Dict[str, Any], output_path: PathLike) -> Path:
        path = Path(output_path)
        self._write_text(path, self.render_json(summary))
        logger.info("Summary written.", path=str(path))
        return path

    @staticmethod
    def render_json(document: Dict[str, Any]) -> str:
        return json.dumps(to_jsonable(document), indent=2, sort_keys=True) + "\n"

    @staticmethod
    def render_check_reports(reports: Iterable[CheckReport]) -> str:
        """One JSON object per line."""
        return "".join(json.dumps(report.as_dict(), sort_keys=True) + "\n" for report in reports)

    def write_check_reports(self, reports: Iterable[CheckReport], stream: TextIO) -> None:
        try:
            stream.write(self.render_check_reports(reports))
            stream.flush()
        except OSError as e:
            raise ReportWriteError(f"Failed to write check reports: {e}") from e

    @staticmethod
    def _write_text(path: Path, text: str) -> None:
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with path.open("w", newline="", encoding="utf-8") as handle:
                handle.write(text)
        except OSError as e:
            raise ReportWriteError(f"Failed to write {path}") from e
