# fcopt/corpus/entries.py
"""
Bundled desk-scale problem instances.

Every entry is built in Python with its optimum written in closed form,
lists the (method, p) pairs whose gates accept it, and exports to a problem
file through `fcopt.io.problem_file`.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import structlog

from fcopt.core.outer import AdditiveComposite, ConstraintForm, MaxForm, PowerForm, SimpleSet
from fcopt.core.problem import CompositeProblem, phi
from fcopt.core.smooth import (
    AffineComponent, AffineLogSumExpComponent, PowerOfNormComponent, QuadraticComponent, VectorFunction
)
from fcopt.exceptions import UnknownCorpusEntryError
from fcopt.types import MethodId

logger = structlog.get_logger(__name__)

MethodOrder = Tuple[MethodId, int]


@dataclass(frozen=True)
class CorpusEntry:
    """A named problem builder with its analytic optimum and applicable methods."""
    id: str
    label: str
    description: str
    provenance: str
    builder: Callable[[], CompositeProblem] = field(repr=False)
    applicable_methods: Tuple[MethodOrder, ...] = ()
    analytic_opt: Optional[float] = None

    def build(self) -> CompositeProblem:
        return self.builder()

    def describe(self) -> dict:
        return {
            "id": self.id,
            "label": self.label,
            "description": self.description,
            "provenance": self.provenance,
            "analytic_opt": self.analytic_opt,
            "applicable_methods": [f"{m.value}:p={p}" for m, p in self.applicable_methods],
        }


def _strong_convexity_radius(gap0: float, sigma: float) -> float:
    """‖x − x*‖ ≤ √(2·gap0/σ) on the initial level set of a σ-strongly convex φ."""
    return math.sqrt(2.0 * gap0 / sigma)


# --- Builders ---


def _unconstrained_quadratic() -> CompositeProblem:
    A = np.array([[3.0, 1.0], [1.0, 2.0]])
    f = VectorFunction([QuadraticComponent(A, [-1.0, -1.0])])
    x0 = np.array([1.0, 1.0])
    sigma = float(np.linalg.eigvalsh(A)[0])
    draft = CompositeProblem(f, AdditiveComposite(), x0, name="unconstrained-quadratic", known_opt=-0.3)
    return CompositeProblem(
        f, AdditiveComposite(), x0, name=draft.name, known_opt=-0.3, known_opt_point=np.array([0.2, 0.4]),
        D0=_strong_convexity_radius(draft.initial_gap(), sigma),
    )


def _constrained_quadratic() -> CompositeProblem:
    f = VectorFunction([
        QuadraticComponent(np.eye(2), [-2.0, -2.0], 4.0),
        AffineComponent([1.0, 0.0], -0.5),
        AffineComponent([0.0, 1.0], -0.25),
    ])
    x0 = np.zeros(2)
    phi_star = 2.65625
    gap0 = 4.0 - phi_star
    return CompositeProblem(
        f, ConstraintForm(3), x0, name="constrained-quadratic", known_opt=phi_star,
        known_opt_point=np.array([0.5, 0.25]), D0=_strong_convexity_radius(gap0, 1.0),
    )


def _interval_1d() -> CompositeProblem:
    f = VectorFunction([AffineComponent([1.0]), QuadraticComponent([[2.0]], c=-1.0)])
    return CompositeProblem(
        f, ConstraintForm(2), np.array([0.5]), name="interval-1d", known_opt=-1.0,
        known_opt_point=np.array([-1.0]), D0=2.0, diameter=2.0,
    )


def _max_of_quadratics() -> CompositeProblem:
    angles = np.deg2rad([90.0, 210.0, 330.0])
    centers = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    f = VectorFunction([QuadraticComponent(np.eye(2), -c, 0.5 * float(c @ c)) for c in centers])
    x0 = np.array([1.0, 0.5])
    draft = CompositeProblem(f, MaxForm(3), x0)
    return CompositeProblem(
        f, MaxForm(3), x0, name="max-of-quadratics", known_opt=0.5, known_opt_point=np.zeros(2),
        D0=_strong_convexity_radius(phi(draft, x0) - 0.5, 1.0),
    )


def _lse_pentagon() -> CompositeProblem:
    angles = 2.0 * np.pi * np.arange(5) / 5.0
    rows = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    component = AffineLogSumExpComponent(rows)
    x0 = np.array([1.0, 1.0])
    # f(x) ≥ max_j ⟨a_j, x⟩ ≥ cos(π/5)‖x‖ bounds the initial level set.
    D0 = component.value(x0) / math.cos(math.pi / 5.0)
    return CompositeProblem(
        VectorFunction([component]), AdditiveComposite(), x0, name="lse-pentagon", known_opt=math.log(5.0),
        known_opt_point=np.zeros(2), D0=D0,
    )


def _box_lse() -> CompositeProblem:
    rows = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    Q = SimpleSet.box([0.5, 0.5], [2.0, 2.0])
    return CompositeProblem(
        VectorFunction([AffineLogSumExpComponent(rows)]), AdditiveComposite(Q), np.array([2.0, 2.0]),
        name="box-lse", known_opt=math.log(4.0 * math.cosh(0.5)), known_opt_point=np.array([0.5, 0.5]),
    )


def _cubic_ball_constraint() -> CompositeProblem:
    f = VectorFunction([
        PowerOfNormComponent([2.0, 0.0], degree=3.0, coefficient=1.0 / 3.0),
        QuadraticComponent(np.eye(2), c=-0.5),
    ])
    # Feasible points lie in the unit disc.
    return CompositeProblem(
        f, ConstraintForm(2), np.zeros(2), name="cubic-ball-constraint", known_opt=1.0 / 3.0,
        known_opt_point=np.array([1.0, 0.0]), D0=2.0,
    )


def _rank_deficient() -> CompositeProblem:
    A = np.array([[1.0, 1.0], [1.0, 1.0]])
    f = VectorFunction([QuadraticComponent(A, [-1.0, -1.0], 0.5)])
    return CompositeProblem(
        f, AdditiveComposite(), np.zeros(2), name="rank-deficient", known_opt=0.0,
        known_opt_point=np.array([0.5, 0.5]),
    )


def _ball_projection() -> CompositeProblem:
    f = VectorFunction([QuadraticComponent(np.eye(2), [-2.0, 0.0], 2.0)])
    Q = SimpleSet.ball([0.0, 0.0], 1.0)
    return CompositeProblem(
        f, AdditiveComposite(Q), np.array([0.0, 0.5]), name="ball-projection", known_opt=0.5,
        known_opt_point=np.array([1.0, 0.0]),
    )


def _power_outer() -> CompositeProblem:
    f = VectorFunction([QuadraticComponent(np.eye(2), [-1.0, 0.0], 0.5)])
    return CompositeProblem(
        f, PowerForm(2.0), np.array([3.0, 1.0]), name="power-outer", known_opt=0.0,
        known_opt_point=np.array([1.0, 0.0]),
    )


# --- Registry ---


_ENTRIES: List[CorpusEntry] = [
    CorpusEntry(
        "unconstrained-quadratic", "a", "Strongly convex quadratic with A = [[3,1],[1,2]], b = (-1,-1).",
        "x* = A^{-1}(1,1) = (0.2, 0.4), phi* = -0.3.", _unconstrained_quadratic,
        ((MethodId.RESTRICTED, 1), (MethodId.FULL, 1), (MethodId.GM, 1), (MethodId.FGM, 1)), -0.3,
    ),
    CorpusEntry(
        "constrained-quadratic", "b", "1/2|x - (2,2)|^2 subject to x1 <= 0.5 and x2 <= 0.25.",
        "KKT at the vertex (0.5, 0.25), phi* = (1.5^2 + 1.75^2)/2.", _constrained_quadratic,
        ((MethodId.RESTRICTED, 1), (MethodId.FULL, 1), (MethodId.GM, 1), (MethodId.FGM, 1)), 2.65625,
    ),
    CorpusEntry(
        "interval-1d", "c", "Minimize x subject to x^2 - 1 <= 0.",
        "Feasible set [-1, 1], so x* = -1 and phi* = -1.", _interval_1d,
        ((MethodId.RESTRICTED, 1), (MethodId.FULL, 1)), -1.0,
    ),
    CorpusEntry(
        "max-of-quadratics", "d", "Max of 1/2|x - c_i|^2 for unit c_i at 90, 210 and 330 degrees.",
        "0 is the centroid of the c_i, so x* = 0 and phi* = 1/2.", _max_of_quadratics,
        ((MethodId.RESTRICTED, 1), (MethodId.FULL, 1), (MethodId.GM, 1), (MethodId.FGM, 1)), 0.5,
    ),
    CorpusEntry(
        "lse-pentagon", "e", "Log-sum-exp of five unit rows at angles 2*pi*j/5.",
        "The rows sum to zero, so x* = 0 and phi* = ln 5.", _lse_pentagon,
        ((MethodId.FULL, 1), (MethodId.FULL, 2), (MethodId.GM, 1), (MethodId.FGM, 1), (MethodId.CUBIC, 2),
         (MethodId.CONTRACTING_PROX, 2)),
        math.log(5.0),
    ),
    CorpusEntry(
        "box-lse", "f", "ln(e^x1 + e^-x1 + e^x2 + e^-x2) over the box [0.5, 2]^2.",
        "Coordinate-wise increasing on the box, so x* = (0.5, 0.5) and phi* = ln(4 cosh 0.5).", _box_lse,
        ((MethodId.FULL, 1), (MethodId.FULL, 2), (MethodId.GM, 1), (MethodId.CGM, 1), (MethodId.FGM, 1),
         (MethodId.CUBIC, 2), (MethodId.CONTRACTING_NEWTON, 2)),
        math.log(4.0 * math.cosh(0.5)),
    ),
    CorpusEntry(
        "cubic-ball-constraint", "g", "(1/3)|x - (2,0)|^3 subject to |x|^2/2 - 1/2 <= 0.",
        "Nearest point of the unit disc to (2,0) is (1,0), phi* = 1/3.", _cubic_ball_constraint,
        ((MethodId.RESTRICTED, 2), (MethodId.FULL, 2), (MethodId.CUBIC, 2), (MethodId.CONTRACTING_PROX, 2)),
        1.0 / 3.0,
    ),
    CorpusEntry(
        "rank-deficient", "h", "1/2(x1 + x2 - 1)^2, convex but not strongly convex.",
        "Every point of the line x1 + x2 = 1 is optimal, phi* = 0.", _rank_deficient,
        ((MethodId.FULL, 1), (MethodId.GM, 1), (MethodId.FGM, 1)), 0.0,
    ),
    CorpusEntry(
        "ball-projection", "i", "1/2|x - (2,0)|^2 over the unit ball.",
        "Projection of (2,0) onto the ball, x* = (1,0), phi* = 1/2.", _ball_projection,
        ((MethodId.RESTRICTED, 1), (MethodId.FULL, 1), (MethodId.GM, 1), (MethodId.CGM, 1), (MethodId.FGM, 1)),
        0.5,
    ),
    CorpusEntry(
        "power-outer", "j", "max(f, 0)^2 with f = 1/2|x - (1,0)|^2; the outer function is not subhomogeneous.",
        "phi >= 0 with equality only at (1,0).", _power_outer,
        ((MethodId.RESTRICTED, 1), (MethodId.FULL, 1)), 0.0,
    ),
]

CORPUS: Dict[str, CorpusEntry] = {entry.id: entry for entry in _ENTRIES}


def corpus_list() -> List[CorpusEntry]:
    return list(_ENTRIES)


def corpus_get(entry_id: str) -> CorpusEntry:
    """
    Looks an entry up by id or by its letter label.

    Raises:
        UnknownCorpusEntryError: If no entry matches.
    """
    if entry_id in CORPUS:
        return CORPUS[entry_id]
    for entry in _ENTRIES:
        if entry.label == entry_id:
            return entry
    raise UnknownCorpusEntryError(
        f"Unknown corpus entry '{entry_id}'. Known: {', '.join(CORPUS)}."
    )
