# fcopt/linalg.py
"""
Dense small-scale linear algebra shared by every other module.

The space E = R^n is equipped with the pair of conjugate Euclidean norms
induced by a fixed symmetric positive definite operator B:

    ‖x‖ = ⟨Bx, x⟩^{1/2},    ‖g‖_* = ⟨g, B^{-1}g⟩^{1/2}.

`NormOperator` owns B together with its Cholesky factor, which is computed
once at construction. All functions are pure and safe to share between
threads.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple, TypeAlias

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray

from fcopt.exceptions import DimensionMismatchError, NumericalError, SingularityError

Point: TypeAlias = NDArray[np.float64]
CoVector: TypeAlias = NDArray[np.float64]
Matrix: TypeAlias = NDArray[np.float64]

SYMMETRY_TOLERANCE = 1e-12


class NormKind(str, Enum):
    IDENTITY = "identity"
    DIAGONAL = "diagonal"
    DENSE = "dense"


def as_point(x: ArrayLike, n: Optional[int] = None, name: str = "x") -> Point:
    """
    Converts `x` to a finite float vector, checking its length when `n` is given.

    Raises:
        DimensionMismatchError: If the length differs from `n`.
        NumericalError: If an entry is not finite.
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise DimensionMismatchError(f"{name} must be a vector, got shape {arr.shape}.")
    if n is not None and arr.shape[0] != n:
        raise DimensionMismatchError(f"{name} has length {arr.shape[0]}, expected {n}.")
    if not np.all(np.isfinite(arr)):
        raise NumericalError(f"{name} has non-finite entries.")
    return arr


def _cholesky(A: Matrix) -> Tuple[Matrix, bool]:
    try:
        factor = scipy.linalg.cho_factor(A, lower=True, check_finite=True)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, ValueError) as e:
        raise SingularityError(f"Matrix is not symmetric positive definite: {e}") from e
    if np.any(np.diag(factor[0]) <= 0.0):
        raise SingularityError("Cholesky pivot is not positive.")
    return factor


@dataclass(frozen=True, eq=False)
class NormOperator:
    """
    The SPD operator B defining the primal and dual norms.

    Use the `identity`, `diagonal` and `dense` constructors; they validate
    symmetry (relative tolerance 1e-12) and positive definiteness (Cholesky).
    """
    kind: NormKind
    matrix: Matrix
    _factor: Tuple[Matrix, bool] = field(repr=False, compare=False)

    @classmethod
    def identity(cls, n: int) -> "NormOperator":
        if n < 1:
            raise DimensionMismatchError("Dimension must be positive.")
        eye = np.eye(n)
        return cls(NormKind.IDENTITY, eye, (eye, True))

    @classmethod
    def diagonal(cls, d: ArrayLike) -> "NormOperator":
        diag = as_point(d, name="diagonal")
        if np.any(diag <= 0.0):
            raise SingularityError("Diagonal norm operator needs positive entries.")
        matrix = np.diag(diag)
        return cls(NormKind.DIAGONAL, matrix, _cholesky(matrix))

    @classmethod
    def dense(cls, B: ArrayLike) -> "NormOperator":
        matrix = np.asarray(B, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatchError(f"Norm operator must be square, got shape {matrix.shape}.")
        scale = max(np.abs(matrix).max(), 1.0)
        if np.abs(matrix - matrix.T).max() > SYMMETRY_TOLERANCE * scale:
            raise SingularityError("Norm operator is not symmetric.")
        matrix = 0.5 * (matrix + matrix.T)
        return cls(NormKind.DENSE, matrix, _cholesky(matrix))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_diagonal(self) -> bool:
        return self.kind in (NormKind.IDENTITY, NormKind.DIAGONAL)

    def _check(self, x: NDArray[np.float64]) -> None:
        if x.shape[-1] != self.n:
            raise DimensionMismatchError(f"Vector has length {x.shape[-1]}, norm operator acts on {self.n}.")

    def apply(self, x: Point) -> CoVector:
        """Returns Bx."""
        self._check(x)
        if self.kind is NormKind.IDENTITY:
            return np.array(x, dtype=np.float64)
        return self.matrix @ x

    def solve(self, g: CoVector) -> Point:
        """Returns B^{-1}g."""
        self._check(g)
        if self.kind is NormKind.IDENTITY:
            return np.array(g, dtype=np.float64)
        if self.kind is NormKind.DIAGONAL:
            return g / np.diag(self.matrix)
        return scipy.linalg.cho_solve(self._factor, g)

    def norm(self, x: Point) -> float:
        self._check(x)
        return float(np.sqrt(max(float(x @ self.apply(x)), 0.0)))

    def dual_norm(self, g: CoVector) -> float:
        self._check(g)
        return float(np.sqrt(max(float(g @ self.solve(g)), 0.0)))

    def diagonal_entries(self) -> Point:
        return np.diag(self.matrix).copy()


def norm(B: NormOperator, x: Point) -> float:
    """Returns ⟨Bx, x⟩^{1/2}."""
    return B.norm(np.asarray(x, dtype=np.float64))


def dual_norm(B: NormOperator, g: CoVector) -> float:
    """Returns ⟨g, B^{-1}g⟩^{1/2}."""
    return B.dual_norm(np.asarray(g, dtype=np.float64))


def spd_solve(A: ArrayLike, rhs: ArrayLike) -> Point:
    """
    Solves A·out = rhs for a symmetric positive definite A.

    One step of iterative refinement follows the Cholesky solve.

    Raises:
        SingularityError: If the Cholesky factorization fails.
        DimensionMismatchError: If the shapes disagree.
    """
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(rhs, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] != b.shape[0]:
        raise DimensionMismatchError(f"Cannot solve system with matrix {A.shape} and rhs {b.shape}.")
    factor = _cholesky(0.5 * (A + A.T))
    out = scipy.linalg.cho_solve(factor, b)
    out = out + scipy.linalg.cho_solve(factor, b - A @ out)
    if not np.all(np.isfinite(out)):
        raise NumericalError("SPD solve produced non-finite values.")
    return out


def generalized_eigenvalues(A: ArrayLike, B: NormOperator) -> NDArray[np.float64]:
    """Eigenvalues of A relative to B, i.e. the roots of det(A − λB) = 0, ascending."""
    A = np.asarray(A, dtype=np.float64)
    return scipy.linalg.eigh(0.5 * (A + A.T), B.matrix, eigvals_only=True)


def operator_norm(A: ArrayLike, B: NormOperator) -> float:
    """Largest |eigenvalue| of the symmetric A relative to B (the norm of A as a map E → E*)."""
    eig = generalized_eigenvalues(A, B)
    return float(np.max(np.abs(eig))) if eig.size else 0.0
