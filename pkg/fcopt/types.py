# fcopt/types.py
"""
A central module for shared data structures and enumerations.
"""

import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np

from fcopt.linalg import Point


class ComponentKind(str, Enum):
    QUADRATIC = "Quadratic"
    AFFINE_LOG_SUM_EXP = "AffineLogSumExp"
    POWER_OF_NORM = "PowerOfNorm"
    AFFINE = "Affine"
    SUM = "Sum"


class OuterKind(str, Enum):
    CONSTRAINT = "ConstraintForm"
    ADDITIVE = "AdditiveComposite"
    MAX = "MaxForm"
    LOG_SUM_EXP = "LogSumExpForm"
    POWER = "PowerForm"


class SetKind(str, Enum):
    ALL = "All"
    BOX = "Box"
    BALL = "Ball"


class MethodId(str, Enum):
    RESTRICTED = "restricted"
    FULL = "full"
    GM = "gm"
    CGM = "cgm"
    FGM = "fgm"
    CUBIC = "cubic"
    CONTRACTING_NEWTON = "contr-newton"
    CONTRACTING_PROX = "contr-prox"
    REGULARIZED = "regularized"


class RunStatus(str, Enum):
    COMPLETED = "completed"


class CheckStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True, slots=True)
class DualPoint:
    """Multipliers λ (and τ for models with a cubic term) certifying a subproblem solution."""
    lam: np.ndarray
    tau: Optional[float] = None


@dataclass(frozen=True, slots=True)
class SubproblemResult:
    y: Point
    model_value: float
    kkt_residual: float
    inner_iterations: int
    solver: str
    dual: Optional[DualPoint] = None
    dual_value: Optional[float] = None


@dataclass(slots=True)
class IterationRecord:
    """One row of a run trace; `gap` and `bound` stay None when undefined."""
    k: int
    phi: float
    step_norm: float
    inner_iters: int = 0
    subproblem_kkt: float = 0.0
    gap: Optional[float] = None
    bound: Optional[float] = None
    extras: Dict[str, Any] = field(default_factory=dict)


@dataclass
class RunTrace:
    """Per-iteration record of a method run plus its terminal status."""
    method: MethodId
    problem_name: str
    p: int
    records: List[IterationRecord] = field(default_factory=list)
    status: RunStatus = RunStatus.COMPLETED
    known_opt: Optional[float] = None
    final_point: Optional[Point] = None
    metadata: Dict[str, Any] = field(default_factory=dict)
    bound_column: Optional[Any] = None

    @property
    def phi(self) -> List[float]:
        return [r.phi for r in self.records]

    @property
    def bounds(self) -> List[Optional[float]]:
        return [r.bound for r in self.records]

    def final_phi(self) -> float:
        return self.records[-1].phi if self.records else math.inf

    def set_reference_value(self, phi_star: Optional[float]) -> None:
        """Fills the gap column against `phi_star` (exact optimum or a documented proxy)."""
        for record in self.records:
            if phi_star is None or not math.isfinite(record.phi):
                record.gap = None
            else:
                record.gap = record.phi - phi_star


@dataclass(frozen=True, slots=True)
class CheckReport:
    """
    The outcome of one sampled property check.

    A failing report's witness reproduces the violation from the recorded seed.
    """
    check_id: str
    samples: int
    max_violation: float
    status: CheckStatus
    slack: float
    seed: Optional[int] = None
    witness: Dict[str, Any] = field(default_factory=dict)
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status is CheckStatus.PASS

    def as_dict(self) -> Dict[str, Any]:
        """Returns a JSON-ready dictionary (arrays become lists)."""
        data = asdict(self)
        data["status"] = self.status.value
        data["passed"] = self.passed
        return to_jsonable(data)


def to_jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating, float)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, Enum):
        return value.value
    return value
