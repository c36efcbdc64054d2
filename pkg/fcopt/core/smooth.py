# fcopt/core/smooth.py
"""
Smooth convex components f_i, the vector function f = (f_1, ..., f_m) and
their Taylor models.

Each component carries declared constants: the Lipschitz constants L_1, L_2
of its first and second derivatives and the uniform convexity parameters
σ_2, σ_3, where σ_{p+1} bounds ⟨∇f(y) − ∇f(x), y − x⟩ from below by
σ_{p+1}‖y − x‖^{p+1}. Constants are problem data: they are declared (or
derived in closed form by the `analytic_*` helpers) and only ever falsified
by the verifier, never estimated.

The condition number of degree p is γ_p = σ_{p+1}/L_p, and

    β_p(f, α) = (p!γ_p)^{1/p} / ((1 + α)^{1/p} + (p!γ_p)^{1/p}).
"""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
import structlog
from numpy.typing import ArrayLike
from scipy.special import logsumexp, softmax

from fcopt.exceptions import (
    ConfigError, DimensionMismatchError, InconsistentConstantsError, UndefinedConditionNumberError
)
from fcopt.linalg import Matrix, NormOperator, Point, as_point, generalized_eigenvalues
from fcopt.types import ComponentKind

logger = structlog.get_logger(__name__)

SUPPORTED_ORDERS = (1, 2)
GAMMA_TOLERANCE = 1e-12


def _check_order(p: int) -> None:
    if p not in SUPPORTED_ORDERS:
        raise ConfigError(f"Order p must be 1 or 2, got {p}.")


@dataclass(frozen=True, slots=True)
class ComponentConstants:
    """Declared smoothness and uniform convexity constants of one component."""
    L1: float
    L2: float
    sigma2: float = 0.0
    sigma3: float = 0.0

    def __post_init__(self) -> None:
        for name in ("L1", "L2", "sigma2", "sigma3"):
            value = getattr(self, name)
            if math.isnan(value) or value < 0.0:
                raise ConfigError(f"Constant {name} must be a nonnegative real or +inf, got {value}.")
        if math.isinf(self.sigma2) or math.isinf(self.sigma3):
            raise ConfigError("Uniform convexity constants must be finite.")

    def lipschitz(self, p: int) -> float:
        _check_order(p)
        return self.L1 if p == 1 else self.L2

    def uniform_convexity(self, p: int) -> float:
        """Returns σ_{p+1}."""
        _check_order(p)
        return self.sigma2 if p == 1 else self.sigma3


class SmoothComponent(ABC):
    """
    One smooth convex function f_i: E → R with full domain.

    Subclasses implement `value`, `gradient` and `hessian`; the declared
    constants are either passed explicitly or derived analytically.
    """
    kind: ComponentKind

    def __init__(self, n: int, constants: ComponentConstants):
        self.n = n
        self.constants = constants

    @abstractmethod
    def value(self, x: Point) -> float:
        ...

    @abstractmethod
    def gradient(self, x: Point) -> np.ndarray:
        ...

    @abstractmethod
    def hessian(self, x: Point) -> Matrix:
        ...

    @property
    def is_affine(self) -> bool:
        return False

    def lipschitz(self, p: int) -> float:
        return self.constants.lipschitz(p)

    def uniform_convexity(self, p: int) -> float:
        return self.constants.uniform_convexity(p)

    def _point(self, x: ArrayLike) -> Point:
        return as_point(x, self.n)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n}, constants={self.constants})"


class QuadraticComponent(SmoothComponent):
    """f(x) = ½⟨Ax, x⟩ + ⟨b, x⟩ + c with A symmetric positive semidefinite."""
    kind = ComponentKind.QUADRATIC

    def __init__(self, A: ArrayLike, b: Optional[ArrayLike] = None, c: float = 0.0,
                 constants: Optional[ComponentConstants] = None, norm: Optional[NormOperator] = None):
        A = np.asarray(A, dtype=np.float64)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DimensionMismatchError(f"Quadratic matrix must be square, got shape {A.shape}.")
        n = A.shape[0]
        scale = max(float(np.abs(A).max()), 1.0)
        if np.abs(A - A.T).max() > 1e-12 * scale:
            raise ConfigError("Quadratic matrix must be symmetric.")
        self.A = 0.5 * (A + A.T)
        self.b = np.zeros(n) if b is None else as_point(b, n, name="b")
        self.c = float(c)
        if np.linalg.eigvalsh(self.A).min() < -1e-10 * scale:
            raise ConfigError("Quadratic matrix must be positive semidefinite.")
        super().__init__(n, constants or analytic_quadratic_constants(self.A, norm or NormOperator.identity(n)))

    def value(self, x: Point) -> float:
        x = self._point(x)
        return float(0.5 * x @ self.A @ x + self.b @ x + self.c)

    def gradient(self, x: Point) -> np.ndarray:
        x = self._point(x)
        return self.A @ x + self.b

    def hessian(self, x: Point) -> Matrix:
        return self.A.copy()


class AffineLogSumExpComponent(SmoothComponent):
    """f(x) = ln Σ_j exp(⟨a_j, x⟩ + b_j)."""
    kind = ComponentKind.AFFINE_LOG_SUM_EXP

    def __init__(self, rows: ArrayLike, offsets: Optional[ArrayLike] = None,
                 constants: Optional[ComponentConstants] = None, norm: Optional[NormOperator] = None):
        rows = np.asarray(rows, dtype=np.float64)
        if rows.ndim == 1:
            rows = rows.reshape(-1, 1)
        if rows.ndim != 2 or rows.shape[0] < 1:
            raise DimensionMismatchError(f"Rows must form a nonempty matrix, got shape {rows.shape}.")
        self.rows = rows
        k, n = rows.shape
        self.offsets = np.zeros(k) if offsets is None else as_point(offsets, k, name="offsets")
        super().__init__(n, constants or analytic_log_sum_exp_constants(rows, norm or NormOperator.identity(n)))

    def _weights(self, x: Point) -> np.ndarray:
        return softmax(self.rows @ x + self.offsets)

    def value(self, x: Point) -> float:
        x = self._point(x)
        return float(logsumexp(self.rows @ x + self.offsets))

    def gradient(self, x: Point) -> np.ndarray:
        x = self._point(x)
        return self.rows.T @ self._weights(x)

    def hessian(self, x: Point) -> Matrix:
        x = self._point(x)
        s = self._weights(x)
        mean = self.rows.T @ s
        return (self.rows.T * s) @ self.rows - np.outer(mean, mean)


class PowerOfNormComponent(SmoothComponent):
    """f(x) = c‖x − x_c‖^q in the B-norm, q ≥ 2."""
    kind = ComponentKind.POWER_OF_NORM

    def __init__(self, center: ArrayLike, degree: float, coefficient: float,
                 norm: Optional[NormOperator] = None, constants: Optional[ComponentConstants] = None):
        center = as_point(center, name="center")
        if degree < 2.0:
            raise ConfigError(f"PowerOfNorm degree must be at least 2, got {degree}.")
        if coefficient <= 0.0:
            raise ConfigError(f"PowerOfNorm coefficient must be positive, got {coefficient}.")
        self.center = center
        self.degree = float(degree)
        self.coefficient = float(coefficient)
        self.norm = norm or NormOperator.identity(center.shape[0])
        if self.norm.n != center.shape[0]:
            raise DimensionMismatchError("PowerOfNorm center and norm operator disagree in dimension.")
        super().__init__(center.shape[0], constants or analytic_power_constants(self.degree, self.coefficient))

    def value(self, x: Point) -> float:
        r = self.norm.norm(self._point(x) - self.center)
        return self.coefficient * r ** self.degree

    def gradient(self, x: Point) -> np.ndarray:
        h = self._point(x) - self.center
        r = self.norm.norm(h)
        if r == 0.0:
            return np.zeros(self.n)
        return self.coefficient * self.degree * r ** (self.degree - 2.0) * self.norm.apply(h)

    def hessian(self, x: Point) -> Matrix:
        h = self._point(x) - self.center
        r = self.norm.norm(h)
        q, c, B = self.degree, self.coefficient, self.norm.matrix
        if r == 0.0:
            return 2.0 * c * B if q == 2.0 else np.zeros((self.n, self.n))
        Bh = self.norm.apply(h)
        return c * q * (r ** (q - 2.0) * B + (q - 2.0) * r ** (q - 4.0) * np.outer(Bh, Bh))


class AffineComponent(SmoothComponent):
    """f(x) = ⟨a, x⟩ + b."""
    kind = ComponentKind.AFFINE

    def __init__(self, a: ArrayLike, b: float = 0.0, constants: Optional[ComponentConstants] = None):
        a = as_point(a, name="a")
        self.a = a
        self.b = float(b)
        super().__init__(a.shape[0], constants or ComponentConstants(L1=0.0, L2=0.0))

    @property
    def is_affine(self) -> bool:
        return True

    def value(self, x: Point) -> float:
        return float(self.a @ self._point(x) + self.b)

    def gradient(self, x: Point) -> np.ndarray:
        return self.a.copy()

    def hessian(self, x: Point) -> Matrix:
        return np.zeros((self.n, self.n))


class SumComponent(SmoothComponent):
    """A sum of components with explicitly declared constants for the sum."""
    kind = ComponentKind.SUM

    def __init__(self, parts: Sequence[SmoothComponent], constants: ComponentConstants):
        if not parts:
            raise ConfigError("SumComponent needs at least one part.")
        n = parts[0].n
        if any(part.n != n for part in parts):
            raise DimensionMismatchError("All parts of a SumComponent must share the dimension.")
        self.parts = list(parts)
        super().__init__(n, constants)

    @property
    def is_affine(self) -> bool:
        return all(part.is_affine for part in self.parts)

    def value(self, x: Point) -> float:
        return float(sum(part.value(x) for part in self.parts))

    def gradient(self, x: Point) -> np.ndarray:
        return np.sum([part.gradient(x) for part in self.parts], axis=0)

    def hessian(self, x: Point) -> Matrix:
        return np.sum([part.hessian(x) for part in self.parts], axis=0)


# --- Analytic constants ---


def analytic_quadratic_constants(A: ArrayLike, norm: NormOperator) -> ComponentConstants:
    """L_1 = λ_max(A; B), σ_2 = λ_min(A; B); the second derivative is constant."""
    eig = generalized_eigenvalues(A, norm)
    return ComponentConstants(L1=max(float(eig[-1]), 0.0), L2=0.0, sigma2=max(float(eig[0]), 0.0))


def analytic_log_sum_exp_constants(rows: ArrayLike, norm: NormOperator) -> ComponentConstants:
    """With R = max_j ‖a_j‖_*: L_1 = R², L_2 = 2R³; no uniform convexity."""
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    R = max(norm.dual_norm(row) for row in rows)
    return ComponentConstants(L1=R ** 2, L2=2.0 * R ** 3)


def analytic_power_constants(degree: float, coefficient: float) -> ComponentConstants:
    c = coefficient
    if degree == 2.0:
        return ComponentConstants(L1=2.0 * c, L2=0.0, sigma2=2.0 * c)
    if degree == 3.0:
        return ComponentConstants(L1=math.inf, L2=6.0 * c, sigma3=1.5 * c)
    return ComponentConstants(L1=math.inf, L2=math.inf)


# --- Vector function and Taylor models ---


@dataclass(frozen=True, eq=False)
class TaylorModel:
    """
    Snapshot of f and its derivatives at an anchor x.

    For order p the model of component i at y is
    Ω_p(f_i, x; y) = f_i(x) + ⟨∇f_i(x), y − x⟩ [+ ½⟨∇²f_i(x)(y − x), y − x⟩ when p = 2].
    Higher orders would add the terms D^k f_i(x)[y − x]^k / k!.
    """
    order: int
    anchor: Point
    values: np.ndarray
    gradients: np.ndarray
    hessians: Optional[np.ndarray] = None

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.anchor.shape[0]

    def evaluate(self, y: Point) -> np.ndarray:
        h = as_point(y, self.n, name="y") - self.anchor
        out = self.values + self.gradients @ h
        if self.order == 2 and self.hessians is not None:
            out = out + 0.5 * np.einsum("ijk,j,k->i", self.hessians, h, h)
        return out


class VectorFunction:
    """f = (f_1, ..., f_m) over a common dimension n."""

    def __init__(self, components: Sequence[SmoothComponent]):
        components = list(components)
        if not components:
            raise ConfigError("A vector function needs at least one component.")
        n = components[0].n
        if any(c.n != n for c in components):
            raise DimensionMismatchError("All components must share the dimension.")
        self.components: List[SmoothComponent] = components
        self.n = n

    @property
    def m(self) -> int:
        return len(self.components)

    def __len__(self) -> int:
        return self.m

    def __iter__(self):
        return iter(self.components)

    def values(self, x: Point) -> np.ndarray:
        return np.array([c.value(x) for c in self.components])

    def jacobian(self, x: Point) -> np.ndarray:
        return np.vstack([c.gradient(x) for c in self.components])

    def hessians(self, x: Point) -> np.ndarray:
        return np.stack([c.hessian(x) for c in self.components])

    def lipschitz(self, p: int) -> np.ndarray:
        """The vector L_p(f)."""
        return np.array([c.lipschitz(p) for c in self.components])

    def uniform_convexity(self, p: int) -> np.ndarray:
        """The vector σ_{p+1}(f)."""
        return np.array([c.uniform_convexity(p) for c in self.components])

    def condition_numbers(self, p: int) -> List[Optional[float]]:
        """The vector γ_p(f); entries are None where L_p vanishes."""
        out: List[Optional[float]] = []
        for c in self.components:
            try:
                out.append(condition_number(c, p))
            except UndefinedConditionNumberError:
                out.append(None)
        return out

    def taylor_model(self, x: Point, order: int) -> TaylorModel:
        _check_order(order)
        x = as_point(x, self.n)
        hessians = self.hessians(x) if order == 2 else None
        return TaylorModel(order=order, anchor=x, values=self.values(x), gradients=self.jacobian(x), hessians=hessians)


# --- Condition numbers and contraction coefficients ---


def condition_number(component: SmoothComponent, p: int, full_domain: bool = True) -> float:
    """
    Returns γ_p = σ_{p+1}/L_p; an infinite L_p gives γ_p = 0.

    Raises:
        UndefinedConditionNumberError: If L_p = 0.
        InconsistentConstantsError: If γ_p > 1/p! on a component whose domain is all of E.
    """
    L = component.lipschitz(p)
    if L == 0.0:
        raise UndefinedConditionNumberError(f"Condition number of degree {p} is undefined for L_{p} = 0.")
    if math.isinf(L):
        return 0.0
    gamma = component.uniform_convexity(p) / L
    bound = 1.0 / math.factorial(p)
    if full_domain and gamma > bound * (1.0 + GAMMA_TOLERANCE):
        raise InconsistentConstantsError(
            f"γ_{p} = {gamma:.6g} exceeds 1/{p}! for a component defined on the whole space."
        )
    return gamma


def beta_from_gamma(gamma: float, p: int, alpha: float) -> float:
    """General-p contraction coefficient; returns 0 for γ = 0."""
    if gamma < 0.0 or alpha < 0.0:
        raise ConfigError("γ and α must be nonnegative.")
    t = (math.factorial(p) * gamma) ** (1.0 / p)
    return t / ((1.0 + alpha) ** (1.0 / p) + t)


def beta(component: SmoothComponent, p: int, alpha: float) -> float:
    """β_p(f_i, α)."""
    return beta_from_gamma(condition_number(component, p), p, alpha)


def hat_beta(f: VectorFunction, p: int) -> float:
    """
    min_i β_p(f_i, p) over the components whose L_p is positive.

    Components with L_p = 0 satisfy the vector growth inequality for every
    β ∈ [0, 1] and are skipped.

    Raises:
        UndefinedConditionNumberError: If every component has L_p = 0.
    """
    _check_order(p)
    candidates = [beta(c, p, alpha=float(p)) for c in f.components if c.lipschitz(p) > 0.0]
    if not candidates:
        raise UndefinedConditionNumberError(f"Every component has L_{p} = 0; β̂_{p} is undefined.")
    return min(candidates)


def taylor_remainder_bound(L_p: float, p: int, r: float) -> float:
    """Upper bound L_p r^{p+1}/(p+1)! on |f(y) − Ω_p(f, x; y)| for ‖y − x‖ = r."""
    return L_p * r ** (p + 1) / math.factorial(p + 1)
