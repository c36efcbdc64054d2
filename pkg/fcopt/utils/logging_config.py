# fcopt/utils/logging_config.py
"""
structlog configuration for the fcopt command line.

Records are routed through the standard `logging` module so that scipy,
asyncio and fcopt events share one renderer. Console output goes to stderr;
stdout carries only the JSON-lines reports of `verify`.
"""

import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, TextIO

import structlog
from structlog.types import Processor

from fcopt.exceptions import ConfigError

LOG_LEVELS: Dict[str, int] = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}

# Third-party loggers kept at WARNING even under FCOPT_LOG=debug.
QUIET_LOGGERS = ("asyncio", "matplotlib", "numba")


def resolve_level(name: str) -> int:
    """
    Maps an FCOPT_LOG value to a `logging` level.

    Raises:
        ConfigError: For names other than error, info and debug.
    """
    try:
        return LOG_LEVELS[name.strip().lower()]
    except KeyError as e:
        raise ConfigError(f"Unknown log level '{name}'. Known: {', '.join(LOG_LEVELS)}.") from e


def _pre_chain() -> List[Processor]:
    return [
        structlog.contextvars.merge_contextvars,
        structlog.stdlib.add_logger_name,
        structlog.stdlib.add_log_level,
        structlog.processors.TimeStamper(fmt="iso", utc=True),
        structlog.processors.StackInfoRenderer(),
        structlog.processors.format_exc_info,
    ]


def _formatter(json_output: bool) -> logging.Formatter:
    renderer: Processor = structlog.processors.JSONRenderer() if json_output else structlog.dev.ConsoleRenderer(
        colors=False
    )
    return structlog.stdlib.ProcessorFormatter(foreign_pre_chain=_pre_chain(), processor=renderer)


def setup_logging(
    log_level: str = "error",
    log_to_console: bool = True,
    log_file: Optional[Path] = None,
    force_json_console: bool = False,
    stream: Optional[TextIO] = None,
) -> None:
    """
    Configures structlog and the root logger for one invocation.

    The console handler writes to `stream` (stderr by default) and renders
    JSON when `force_json_console` is set; the optional log file always
    receives JSON lines.
    """
    level = resolve_level(log_level)
    structlog.configure(
        processors=[*_pre_chain(), structlog.stdlib.ProcessorFormatter.wrap_for_formatter],
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )

    handlers: List[logging.Handler] = []
    if log_to_console:
        console = logging.StreamHandler(stream or sys.stderr)
        console.setFormatter(_formatter(force_json_console))
        handlers.append(console)
    if log_file is not None:
        to_file = logging.FileHandler(log_file, mode="a", encoding="utf-8")
        to_file.setFormatter(_formatter(True))
        handlers.append(to_file)

    logging.basicConfig(handlers=handlers, level=level, force=True)
    for name in QUIET_LOGGERS:
        logging.getLogger(name).setLevel(max(level, logging.WARNING))
