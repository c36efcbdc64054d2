# fcopt/core/problem.py
"""
The fully composite problem min_x φ(x) = F(x, f(x)).
"""

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import structlog
from numpy.typing import ArrayLike

from fcopt.core.outer import FEASIBILITY_TOLERANCE, F_of_constants, OuterFunction
from fcopt.core.smooth import VectorFunction
from fcopt.exceptions import ConfigError, DimensionMismatchError, DomainError
from fcopt.linalg import NormOperator, Point, as_point
from fcopt.types import SetKind

logger = structlog.get_logger(__name__)


@dataclass(frozen=True, eq=False)
class CompositeProblem:
    """
    The pair (f, F) with the norm operator, a starting point and optional
    reference data.

    `D0` bounds the distance from x* of every point of the initial level set;
    `diameter` is the diameter of dom φ. Both are used only for the bound
    columns of the traces.
    """
    f: VectorFunction
    outer: OuterFunction
    x0: Point
    norm: Optional[NormOperator] = None
    name: str = "problem"
    known_opt: Optional[float] = None
    known_opt_point: Optional[Point] = None
    D0: Optional[float] = None
    diameter: Optional[float] = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        n = self.f.n
        object.__setattr__(self, "x0", as_point(self.x0, n, name="x0"))
        if self.norm is None:
            object.__setattr__(self, "norm", NormOperator.identity(n))
        elif self.norm.n != n:
            raise DimensionMismatchError(f"Norm operator acts on {self.norm.n}, problem dimension is {n}.")
        if self.outer.m != self.f.m:
            raise DimensionMismatchError(f"Outer function expects m = {self.outer.m}, f has {self.f.m} components.")
        self.outer.Q.check_dimension(n)
        if self.outer.Q.kind is SetKind.BOX and not self.norm.is_diagonal:
            raise ConfigError("A box feasible set needs a diagonal norm operator.")
        if self.outer.linear is not None and self.outer.linear.shape[0] != n:
            raise DimensionMismatchError("Linear term of the outer function has the wrong dimension.")
        if self.known_opt_point is not None:
            object.__setattr__(self, "known_opt_point", as_point(self.known_opt_point, n, name="known_opt_point"))
        for name in ("D0", "diameter"):
            value = getattr(self, name)
            if value is not None and not value >= 0.0:
                raise ConfigError(f"{name} must be nonnegative, got {value}.")
        if math.isinf(phi(self, self.x0)):
            raise DomainError("x0 is outside dom φ: F(x0, f(x0)) = +inf.")

    @property
    def n(self) -> int:
        return self.f.n

    @property
    def m(self) -> int:
        return self.f.m

    @property
    def Q(self):
        return self.outer.Q

    def value(self, x: ArrayLike) -> float:
        return phi(self, x)

    def F_of_constants(self, p: int) -> float:
        """F(L_p(f))."""
        return F_of_constants(self.outer, self.f.lipschitz(p))

    def domain_diameter(self) -> Optional[float]:
        """Declared diameter, else diam Q when Q is bounded, else None."""
        if self.diameter is not None:
            return self.diameter
        if self.Q.is_bounded:
            return self.Q.diameter(self.norm)
        return None

    def level_set_radius(self) -> Optional[float]:
        """Declared D0, else diam Q when bounded, else None (bounds are omitted)."""
        if self.D0 is not None:
            return self.D0
        if self.Q.is_bounded:
            return self.Q.diameter(self.norm)
        return None

    def initial_gap(self) -> Optional[float]:
        if self.known_opt is None:
            return None
        return phi(self, self.x0) - self.known_opt

    def with_function(self, f: VectorFunction, **changes) -> "CompositeProblem":
        """A copy with another vector function (and optional field changes)."""
        return replace(self, f=f, **changes)


def phi(problem: CompositeProblem, x: ArrayLike, tol: float = FEASIBILITY_TOLERANCE) -> float:
    """φ(x) = F(x, f(x)); +inf outside dom φ."""
    x = as_point(x, problem.n)
    if not problem.outer.Q.contains(x, problem.norm, tol):
        return math.inf
    u = problem.f.values(x)
    if not np.all(np.isfinite(u)):
        return math.inf
    return problem.outer.evaluate(x, u, problem.norm, tol)
