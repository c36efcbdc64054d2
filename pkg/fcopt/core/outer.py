# fcopt/core/outer.py
"""
The simple outer function F(x, u) of a fully composite objective
φ(x) = F(x, f(x)), and the simple sets Q it constrains x to.

Every built-in splits as F(x, u) = G(u) + ⟨a, x⟩ + Ind_Q(x), where G is the
"u-part" (closed, convex and monotone in u) and the linear term is only
available for the additive form. The subproblem solvers work with the u-part
through `u_value`, `u_gradient` and `u_hessian`; the x-part is handled by
the feasible set and the linear term of the model objective.
"""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional

import numpy as np
import structlog
from numpy.typing import ArrayLike
from scipy.special import logsumexp, softmax

from fcopt.exceptions import ConfigError, DimensionMismatchError
from fcopt.linalg import NormOperator, Point, as_point
from fcopt.types import CheckReport, CheckStatus, OuterKind, SetKind

logger = structlog.get_logger(__name__)

FEASIBILITY_TOLERANCE = 1e-9
SUBHOMOGENEITY_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class SimpleSet:
    """Q ⊆ E: the whole space, a box, or a ball in the B-norm."""
    kind: SetKind
    lower: Optional[Point] = None
    upper: Optional[Point] = None
    center: Optional[Point] = None
    radius: Optional[float] = None

    @classmethod
    def all(cls) -> "SimpleSet":
        return cls(SetKind.ALL)

    @classmethod
    def box(cls, lower: ArrayLike, upper: ArrayLike) -> "SimpleSet":
        lower = as_point(lower, name="lower")
        upper = as_point(upper, lower.shape[0], name="upper")
        if np.any(lower > upper):
            raise ConfigError("Box needs lower <= upper component-wise.")
        return cls(SetKind.BOX, lower=lower, upper=upper)

    @classmethod
    def ball(cls, center: ArrayLike, radius: float) -> "SimpleSet":
        if not radius > 0.0 or math.isinf(radius):
            raise ConfigError(f"Ball radius must be positive and finite, got {radius}.")
        return cls(SetKind.BALL, center=as_point(center, name="center"), radius=float(radius))

    @property
    def is_bounded(self) -> bool:
        return self.kind is not SetKind.ALL

    @property
    def dimension(self) -> Optional[int]:
        if self.kind is SetKind.BOX:
            return self.lower.shape[0]
        if self.kind is SetKind.BALL:
            return self.center.shape[0]
        return None

    def check_dimension(self, n: int) -> None:
        if self.dimension is not None and self.dimension != n:
            raise DimensionMismatchError(f"Set has dimension {self.dimension}, problem has {n}.")

    def contains(self, x: Point, norm: NormOperator, tol: float = FEASIBILITY_TOLERANCE) -> bool:
        if self.kind is SetKind.ALL:
            return True
        if self.kind is SetKind.BOX:
            return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))
        return norm.norm(x - self.center) <= self.radius + tol

    def project(self, x: Point, norm: NormOperator) -> Point:
        """
        Projection in the B-metric: clamping for a box (exact for diagonal B)
        and radial scaling for a ball.
        """
        if self.kind is SetKind.ALL:
            return np.array(x, dtype=np.float64)
        if self.kind is SetKind.BOX:
            return np.clip(x, self.lower, self.upper)
        h = x - self.center
        r = norm.norm(h)
        if r <= self.radius:
            return np.array(x, dtype=np.float64)
        return self.center + (self.radius / r) * h

    def scaled(self, scale: float, offset: Point) -> "SimpleSet":
        """Returns {scale·v + offset : v ∈ Q} for scale > 0."""
        if not scale > 0.0:
            raise ConfigError(f"Set scaling must be positive, got {scale}.")
        if self.kind is SetKind.ALL:
            return self
        if self.kind is SetKind.BOX:
            return SimpleSet(SetKind.BOX, lower=scale * self.lower + offset, upper=scale * self.upper + offset)
        return SimpleSet(SetKind.BALL, center=scale * self.center + offset, radius=scale * self.radius)

    def diameter(self, norm: NormOperator) -> float:
        if self.kind is SetKind.ALL:
            return math.inf
        if self.kind is SetKind.BOX:
            return norm.norm(self.upper - self.lower)
        return 2.0 * self.radius

    def describe(self) -> dict:
        if self.kind is SetKind.BOX:
            return {"kind": self.kind.value, "lower": self.lower.tolist(), "upper": self.upper.tolist()}
        if self.kind is SetKind.BALL:
            return {"kind": self.kind.value, "center": self.center.tolist(), "radius": self.radius}
        return {"kind": self.kind.value}


class OuterFunction(ABC):
    """
    The simple function F(x, u) = G(u) + ⟨a, x⟩ + Ind_Q(x).

    `subhomogeneous` states that u ↦ F(x, u + tv) − F(x, u) ≤ t·G(v) holds
    for t ≥ 0; for the built-ins it means G itself is subhomogeneous.
    """
    kind: OuterKind
    is_smooth: bool = False

    def __init__(self, m: int, Q: Optional[SimpleSet] = None):
        if m < 1:
            raise ConfigError("Outer function needs m >= 1.")
        self.m = m
        self.Q = Q or SimpleSet.all()

    @property
    def subhomogeneous(self) -> bool:
        return True

    @property
    def linear(self) -> Optional[np.ndarray]:
        return None

    @property
    def is_identity(self) -> bool:
        """True when G(u) = u^(1) on its whole domain (a single unconstrained coordinate)."""
        return False

    @property
    def is_piecewise(self) -> bool:
        """True for max-type outer functions with several pieces (solved through a dual)."""
        return False

    def _check(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=np.float64).reshape(-1)
        if u.shape[0] != self.m:
            raise DimensionMismatchError(f"u has length {u.shape[0]}, outer function expects {self.m}.")
        return u

    @abstractmethod
    def u_value(self, u: np.ndarray, tol: float = FEASIBILITY_TOLERANCE) -> float:
        """G(u), +inf outside the u-domain."""
        ...

    def u_gradient(self, u: np.ndarray) -> np.ndarray:
        """A (sub)gradient of G at u."""
        raise NotImplementedError(f"{type(self).__name__} has no smooth u-part.")

    def u_hessian(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError(f"{type(self).__name__} has no smooth u-part.")

    @abstractmethod
    def of_constants(self, L: np.ndarray) -> float:
        """sup_x F(x, L) taken over the increments in u, see `F_of_constants`."""
        ...

    def x_value(self, x: Point, norm: NormOperator, tol: float = FEASIBILITY_TOLERANCE) -> float:
        """⟨a, x⟩ + Ind_Q(x)."""
        if not self.Q.contains(x, norm, tol):
            return math.inf
        a = self.linear
        return float(a @ x) if a is not None else 0.0

    def evaluate(self, x: Point, u: np.ndarray, norm: NormOperator, tol: float = FEASIBILITY_TOLERANCE) -> float:
        xv = self.x_value(x, norm, tol)
        if math.isinf(xv):
            return math.inf
        return self.u_value(self._check(u), tol) + xv

    def describe(self) -> dict:
        return {"kind": self.kind.value, "m": self.m, "Q": self.Q.describe()}


class ConstraintForm(OuterFunction):
    """F(x, u) = u^(1) if u^(i) <= 0 for i >= 2 and x ∈ Q, else +inf."""
    kind = OuterKind.CONSTRAINT

    @property
    def is_identity(self) -> bool:
        return self.m == 1

    @property
    def is_piecewise(self) -> bool:
        return self.m >= 2

    def u_value(self, u: np.ndarray, tol: float = FEASIBILITY_TOLERANCE) -> float:
        u = self._check(u)
        if np.any(u[1:] > tol):
            return math.inf
        return float(u[0])

    def u_gradient(self, u: np.ndarray) -> np.ndarray:
        g = np.zeros(self.m)
        g[0] = 1.0
        return g

    def u_hessian(self, u: np.ndarray) -> np.ndarray:
        return np.zeros((self.m, self.m))

    def of_constants(self, L: np.ndarray) -> float:
        L = self._check(L)
        return float(L[0]) if np.all(L[1:] == 0.0) else math.inf


class AdditiveComposite(OuterFunction):
    """F(x, u) = u + ⟨a, x⟩ + Ind_Q(x) with a single coordinate u."""
    kind = OuterKind.ADDITIVE
    is_smooth = True

    def __init__(self, Q: Optional[SimpleSet] = None, linear: Optional[ArrayLike] = None):
        super().__init__(1, Q)
        self._linear = None if linear is None else as_point(linear, name="linear")

    @property
    def linear(self) -> Optional[np.ndarray]:
        return self._linear

    @property
    def is_identity(self) -> bool:
        return True

    def u_value(self, u: np.ndarray, tol: float = FEASIBILITY_TOLERANCE) -> float:
        return float(self._check(u)[0])

    def u_gradient(self, u: np.ndarray) -> np.ndarray:
        return np.ones(1)

    def u_hessian(self, u: np.ndarray) -> np.ndarray:
        return np.zeros((1, 1))

    def of_constants(self, L: np.ndarray) -> float:
        # ψ depends on x only and cancels in every increment in u.
        return float(self._check(L)[0])

    def describe(self) -> dict:
        out = super().describe()
        if self._linear is not None:
            out["linear"] = self._linear.tolist()
        return out


class MaxForm(OuterFunction):
    """F(x, u) = max_i u^(i) + Ind_Q(x)."""
    kind = OuterKind.MAX

    @property
    def is_identity(self) -> bool:
        return self.m == 1

    @property
    def is_piecewise(self) -> bool:
        return self.m >= 2

    def u_value(self, u: np.ndarray, tol: float = FEASIBILITY_TOLERANCE) -> float:
        return float(np.max(self._check(u)))

    def u_gradient(self, u: np.ndarray) -> np.ndarray:
        u = self._check(u)
        g = np.zeros(self.m)
        g[int(np.argmax(u))] = 1.0
        return g

    def u_hessian(self, u: np.ndarray) -> np.ndarray:
        return np.zeros((self.m, self.m))

    def of_constants(self, L: np.ndarray) -> float:
        return float(np.max(self._check(L)))


class LogSumExpForm(OuterFunction):
    """F(x, u) = ln Σ_i exp(u^(i)) + Ind_Q(x)."""
    kind = OuterKind.LOG_SUM_EXP
    is_smooth = True

    def u_value(self, u: np.ndarray, tol: float = FEASIBILITY_TOLERANCE) -> float:
        return float(logsumexp(self._check(u)))

    def u_gradient(self, u: np.ndarray) -> np.ndarray:
        return softmax(self._check(u))

    def u_hessian(self, u: np.ndarray) -> np.ndarray:
        s = self.u_gradient(u)
        return np.diag(s) - np.outer(s, s)

    def of_constants(self, L: np.ndarray) -> float:
        return float(logsumexp(self._check(L)))


class PowerForm(OuterFunction):
    """
    F(x, u) = max(u, 0)^q + Ind_Q(x) with q >= 2.

    Monotone and convex but not subhomogeneous, so only the basic methods
    accept it.
    """
    kind = OuterKind.POWER
    is_smooth = True

    def __init__(self, exponent: float = 2.0, Q: Optional[SimpleSet] = None):
        if exponent < 2.0:
            raise ConfigError(f"PowerForm exponent must be at least 2, got {exponent}.")
        super().__init__(1, Q)
        self.exponent = float(exponent)

    @property
    def subhomogeneous(self) -> bool:
        return False

    def u_value(self, u: np.ndarray, tol: float = FEASIBILITY_TOLERANCE) -> float:
        return max(float(self._check(u)[0]), 0.0) ** self.exponent

    def u_gradient(self, u: np.ndarray) -> np.ndarray:
        t = max(float(self._check(u)[0]), 0.0)
        return np.array([self.exponent * t ** (self.exponent - 1.0)])

    def u_hessian(self, u: np.ndarray) -> np.ndarray:
        t = max(float(self._check(u)[0]), 0.0)
        q = self.exponent
        return np.array([[q * (q - 1.0) * t ** (q - 2.0) if t > 0.0 else 0.0]])

    def of_constants(self, L: np.ndarray) -> float:
        return max(float(self._check(L)[0]), 0.0) ** self.exponent

    def describe(self) -> dict:
        out = super().describe()
        out["exponent"] = self.exponent
        return out


# --- Module-level operations ---


def eval_F(F: OuterFunction, x: Point, u: ArrayLike, norm: NormOperator, tol: float = FEASIBILITY_TOLERANCE) -> float:
    """F(x, u) as an extended real; +inf is a valid result."""
    return F.evaluate(np.asarray(x, dtype=np.float64), np.asarray(u, dtype=np.float64), norm, tol)


def F_of_constants(F: OuterFunction, L: ArrayLike) -> float:
    """
    F(L_p(f)) = sup_x F(x, L) for the vector of Lipschitz constants.

    An infinite result means the subhomogeneous-method family cannot be
    applied to the problem.
    """
    L = np.asarray(L, dtype=np.float64)
    if np.any(L < 0.0) or np.any(np.isnan(L)):
        raise ConfigError("Lipschitz constants must be nonnegative.")
    if np.any(np.isinf(L)):
        return math.inf
    return F.of_constants(L)


def domain_membership(F: OuterFunction, x: Point, norm: NormOperator, tol: float = FEASIBILITY_TOLERANCE) -> bool:
    """Whether x belongs to the x-domain of F, i.e. x ∈ Q."""
    return F.Q.contains(np.asarray(x, dtype=np.float64), norm, tol)


def project_to_Q(Q: SimpleSet, x: Point, norm: Optional[NormOperator] = None) -> Point:
    x = np.asarray(x, dtype=np.float64)
    return Q.project(x, norm or NormOperator.identity(x.shape[0]))


def sample_u(F: OuterFunction, rng: np.random.Generator, scale: float) -> np.ndarray:
    """Gaussian u of size m; constraint pieces are made nonpositive so u stays in dom G."""
    u = rng.normal(0.0, scale, size=F.m)
    if F.kind is OuterKind.CONSTRAINT:
        u[1:] = -np.abs(u[1:])
    return u


def check_subhomogeneous(F: OuterFunction, x: Point, samples: int = 1000, seed: int = 0,
                         norm: Optional[NormOperator] = None, scale: float = 2.0,
                         slack: float = SUBHOMOGENEITY_SLACK) -> CheckReport:
    """
    Samples (u, v, t) triples and tests G(u + tv) <= G(u) + tG(v), then the
    gradient form ⟨g_u, u⟩ <= G(u) with g_u a subgradient at u.

    Returns a failing report with the worst witness when either test is
    violated beyond `slack`.
    """
    x = np.asarray(x, dtype=np.float64)
    norm = norm or NormOperator.identity(x.shape[0])
    if not F.Q.contains(x, norm):
        raise ConfigError("check_subhomogeneous needs x inside the x-domain of F.")
    rng = np.random.default_rng(seed)
    worst, witness = -math.inf, {}
    for _ in range(samples):
        u = sample_u(F, rng, scale)
        v = sample_u(F, rng, scale)
        t = float(rng.exponential(1.0))
        lhs = F.u_value(u + t * v)
        rhs = F.u_value(u) + t * F.u_value(v)
        if math.isfinite(lhs) and math.isfinite(rhs):
            violation = lhs - rhs
            if violation > worst:
                worst, witness = violation, {"condition": "sum", "u": u, "v": v, "t": t, "lhs": lhs, "rhs": rhs}
        try:
            g = F.u_gradient(u)
        except NotImplementedError:
            continue
        value = F.u_value(u)
        if math.isfinite(value):
            violation = float(g @ u) - value
            if violation > worst:
                worst, witness = violation, {"condition": "gradient", "u": u, "lhs": float(g @ u), "rhs": value}
    status = CheckStatus.PASS if worst <= slack else CheckStatus.FAIL
    if status is CheckStatus.FAIL:
        logger.info("Subhomogeneity violated.", outer=F.kind.value, violation=worst)
    return CheckReport(
        check_id="subhomogeneous", samples=samples, max_violation=float(worst), status=status,
        slack=slack, seed=seed, witness=witness, details={"outer": F.kind.value},
    )
