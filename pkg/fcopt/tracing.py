# fcopt/tracing.py
"""
Binds a run id, the method and the problem name into the structlog context
while a runner executes, so every record of one run can be grouped.
"""

import functools
import time
import uuid
from dataclasses import asdict, dataclass
from typing import Any, Callable, Dict

import structlog

logger = structlog.get_logger(__name__)


@dataclass(frozen=True, slots=True)
class RunContext:
    run_id: str
    method: str
    problem: str

    @classmethod
    def new(cls, method: str, problem: str) -> "RunContext":
        return cls(run_id=uuid.uuid4().hex[:12], method=method, problem=problem)

    def as_dict(self) -> Dict[str, str]:
        return asdict(self)


def trace_run(method: str) -> Callable:
    """Decorator for runners `(problem, config, ...)`; logs start and finish with the elapsed time."""
    def decorator(func: Callable) -> Callable:
        @functools.wraps(func)
        def wrapper(problem: Any, *args: Any, **kwargs: Any) -> Any:
            ctx = RunContext.new(method, getattr(problem, "name", "problem"))
            with structlog.contextvars.bound_contextvars(**ctx.as_dict()):
                started = time.perf_counter()
                logger.info("Method run started.", runner=func.__name__)
                result = func(problem, *args, **kwargs)
                status = getattr(getattr(result, "status", None), "value", None)
                logger.info("Method run finished.", status=status, seconds=round(time.perf_counter() - started, 6))
                return result
        return wrapper
    return decorator
