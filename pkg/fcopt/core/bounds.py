# fcopt/core/bounds.py
"""
Theoretical right-hand sides for the `bound` column of every method.

A `BoundColumn` is either linear, q^k·(φ(x0) − φ*), and then needs a
reference value, or sublinear, C/k^power, and then is independent of φ*.
Columns are attached to the trace so that `compare` can refill linear ones
against a proxy reference value.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import structlog

from fcopt.core.problem import CompositeProblem
from fcopt.types import RunTrace

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class BoundColumn:
    label: str
    linear_rate: Optional[float] = None
    constant: Optional[float] = None
    power: float = 1.0
    custom: Optional[Callable[[int], float]] = None

    @property
    def needs_reference(self) -> bool:
        return self.linear_rate is not None

    def value(self, k: int, gap0: Optional[float] = None) -> Optional[float]:
        if self.linear_rate is not None:
            if gap0 is None:
                return None
            return (1.0 - self.linear_rate) ** k * gap0
        if k == 0:
            return None
        if self.custom is not None:
            return self.custom(k)
        return self.constant / k ** self.power

    def describe(self) -> dict:
        out = {"label": self.label}
        if self.linear_rate is not None:
            out["beta"] = self.linear_rate
        if self.constant is not None:
            out["constant"] = self.constant
            out["power"] = self.power
        return out


def apply_bound(trace: RunTrace, column: Optional[BoundColumn], phi0: float, phi_star: Optional[float]) -> None:
    """Fills the bound column of `trace` and remembers the column on it."""
    trace.bound_column = column
    if column is None:
        for record in trace.records:
            record.bound = None
        return
    trace.metadata["bound"] = column.describe()
    gap0 = None if phi_star is None else phi0 - phi_star
    for record in trace.records:
        record.bound = column.value(record.k, gap0)


def linear_bound(beta: float, label: str) -> BoundColumn:
    return BoundColumn(label=label, linear_rate=beta)


def _sublinear(label: str, constant: float, power: float) -> Optional[BoundColumn]:
    if not math.isfinite(constant):
        logger.warning("No valid bound column.", label=label, constant=constant)
        return None
    return BoundColumn(label=label, constant=constant, power=power)


def _radius(problem: CompositeProblem, label: str) -> Optional[float]:
    D0 = problem.level_set_radius()
    if D0 is None:
        logger.warning("Bound column omitted: D0 unknown for an unbounded domain.", label=label)
    return D0


def _diameter(problem: CompositeProblem, label: str) -> Optional[float]:
    D = problem.domain_diameter()
    if D is None or not math.isfinite(D):
        logger.warning("Bound column omitted: domain diameter unknown.", label=label)
        return None
    return D


def full_convex_bound(problem: CompositeProblem, p: int) -> Optional[BoundColumn]:
    """(p+1)^{p+1} F(L_p(f)) D0^{p+1} / p! · k^{-p}."""
    D0 = _radius(problem, "full-convex")
    if D0 is None:
        return None
    constant = (p + 1) ** (p + 1) * problem.F_of_constants(p) * D0 ** (p + 1) / math.factorial(p)
    return _sublinear("full-convex", constant, float(p))


def gm_bound(problem: CompositeProblem, alpha: float) -> Optional[BoundColumn]:
    """4αF(L_1(f))D0²/k."""
    D0 = _radius(problem, "gm")
    if D0 is None:
        return None
    return _sublinear("gm", 4.0 * alpha * problem.F_of_constants(1) * D0 ** 2, 1.0)


def cgm_bound(problem: CompositeProblem) -> Optional[BoundColumn]:
    """4F(L_1(f))𝒟²/k."""
    D = _diameter(problem, "cgm")
    if D is None:
        return None
    return _sublinear("cgm", 4.0 * problem.F_of_constants(1) * D ** 2, 1.0)


def fgm_bound(problem: CompositeProblem, M: float, radius: Optional[float]) -> Optional[BoundColumn]:
    """2M‖x* − x0‖²/k², with a user radius R standing in for ‖x* − x0‖."""
    if problem.known_opt_point is not None:
        R = problem.norm.norm(problem.known_opt_point - problem.x0)
    elif radius is not None:
        R = radius
    else:
        logger.warning("Bound column omitted: FGM needs x* or a radius estimate.")
        return None
    return _sublinear("fgm", 2.0 * M * R ** 2, 2.0)


def cubic_bound(problem: CompositeProblem, alpha: float) -> Optional[BoundColumn]:
    """9(1 + α)F(L_2(f))D0³/(2k²)."""
    D0 = _radius(problem, "cubic")
    if D0 is None:
        return None
    return _sublinear("cubic", 9.0 * (1.0 + alpha) * problem.F_of_constants(2) * D0 ** 3 / 2.0, 2.0)


def contracting_newton_bound(problem: CompositeProblem) -> Optional[BoundColumn]:
    """9F(L_2(f))𝒟³/k²."""
    D = _diameter(problem, "contr-newton")
    if D is None:
        return None
    return _sublinear("contr-newton", 9.0 * problem.F_of_constants(2) * D ** 3, 2.0)


def prox_constants(rho: float, delta: float, K: int) -> dict:
    """R0 = ρ + Kδ, a = 6δ^{2/3} + 12δ^{1/3}ρ^{1/3}, b = 12δ^{1/3}."""
    return {
        "R0": rho + K * delta,
        "a": 6.0 * delta ** (2.0 / 3.0) + 12.0 * delta ** (1.0 / 3.0) * rho ** (1.0 / 3.0),
        "b": 12.0 * delta ** (1.0 / 3.0),
    }


def prox_bound(rho: float, delta: float, K: int) -> BoundColumn:
    """(R0^{1/3} + (b + √a)k)³ / A_k with A_k = (k/3)³."""
    c = prox_constants(rho, delta, K)
    step = c["b"] + math.sqrt(c["a"])
    base = c["R0"] ** (1.0 / 3.0)

    def evaluate(k: int) -> float:
        return (base + step * k) ** 3 / (k / 3.0) ** 3

    return BoundColumn(label="contr-prox", custom=evaluate, constant=c["R0"], power=3.0)
