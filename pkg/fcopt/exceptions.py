# fcopt/exceptions.py
"""
Defines custom exceptions for the fcopt solver library and its CLI harness.

Centralizing exceptions in this module prevents circular dependencies between
the numerical core, the verifier and the harness. Every library error derives
from `FcoptError`; only the CLI translates them into process exit codes.
"""

from typing import Optional, TYPE_CHECKING

if TYPE_CHECKING:
    from fcopt.types import SubproblemResult


class FcoptError(Exception):
    """Base class for all application-specific, catchable errors."""
    pass


class ConfigError(FcoptError):
    """
    Raised when a problem, a method configuration or a call violates a
    precondition that can be fixed by changing the input.
    """
    pass


class InapplicableMethodError(ConfigError):
    """
    Raised when a method's gate rejects a problem, for example when
    F(L_p(f)) is infinite or the outer function is not subhomogeneous.
    """
    pass


class UndefinedConditionNumberError(ConfigError):
    """Raised when a condition number is requested for a component with L_p = 0."""
    pass


class InconsistentConstantsError(ConfigError):
    """
    Raised when declared constants contradict each other, e.g. a full-domain
    component whose condition number exceeds 1/p!.
    """
    pass


class DimensionMismatchError(ConfigError):
    """Raised when vectors or matrices do not share the problem dimension."""
    pass


class DomainError(ConfigError):
    """Raised when a point lies outside the domain an operation requires."""
    pass


class UnknownCorpusEntryError(ConfigError):
    """Raised when a corpus id does not name a bundled problem."""
    pass


class ProblemFileError(FcoptError):
    """
    Raised when a problem file cannot be read or is not a JSON document.

    Schema violations inside a well-formed JSON document are reported as
    `ConfigError` instead.
    """
    pass


class NumericalError(FcoptError):
    """Raised for non-finite intermediate values or failed root brackets."""
    pass


class SingularityError(NumericalError):
    """Raised when a matrix expected to be symmetric positive definite is not."""
    pass


class SubproblemError(FcoptError):
    """Base class for failures of the per-iteration auxiliary problems."""
    pass


class ModelInfeasibleError(SubproblemError):
    """
    Raised when the model problem has no feasible point, which shows up as
    an unbounded dual.
    """
    pass


class SubproblemConvergenceError(SubproblemError):
    """
    Raised when a subproblem solver exhausts its iteration budget.

    Attributes:
        best: The best iterate found so far, packaged as a result, so that
              callers may decide to continue from it.
    """
    def __init__(self, message: str, best: Optional["SubproblemResult"] = None):
        super().__init__(message)
        self.best = best


class ConvergenceError(FcoptError):
    """Raised when a method run cannot continue after a subproblem failure."""
    pass


class ReportWriteError(FcoptError):
    """Raised when a trace file or a summary report cannot be written."""
    pass
