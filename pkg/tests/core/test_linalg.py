# tests/core/test_linalg.py
import math

import numpy as np
import pytest

from fcopt.exceptions import DimensionMismatchError, NumericalError, SingularityError
from fcopt.linalg import NormKind, NormOperator, as_point, generalized_eigenvalues, operator_norm, spd_solve


class TestNormOperator:
    def test_diagonal_norms_are_conjugate(self):
        # Arrange
        B = NormOperator.diagonal([4.0, 1.0])

        # Act
        primal = B.norm(np.array([1.0, 1.0]))
        dual = B.dual_norm(np.array([4.0, 1.0]))

        # Assert
        assert B.kind is NormKind.DIAGONAL
        assert primal == pytest.approx(math.sqrt(5.0))
        assert dual == pytest.approx(math.sqrt(5.0))

    def test_dense_solve_inverts_apply(self):
        B = NormOperator.dense([[2.0, 0.5], [0.5, 1.0]])
        x = np.array([0.3, -1.2])

        assert B.solve(B.apply(x)) == pytest.approx(x)

    def test_identity_is_diagonal(self):
        assert NormOperator.identity(3).is_diagonal
        assert not NormOperator.dense(np.eye(3)).is_diagonal

    def test_rejects_non_symmetric_matrix(self):
        with pytest.raises(SingularityError):
            NormOperator.dense([[1.0, 0.5], [0.0, 1.0]])

    def test_rejects_indefinite_matrix(self):
        with pytest.raises(SingularityError):
            NormOperator.dense([[1.0, 2.0], [2.0, 1.0]])

    def test_rejects_nonpositive_diagonal(self):
        with pytest.raises(SingularityError):
            NormOperator.diagonal([1.0, 0.0])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            NormOperator.identity(2).norm(np.ones(3))


def test_as_point_validates_length_and_finiteness():
    assert as_point(2.0).shape == (1,)
    with pytest.raises(DimensionMismatchError):
        as_point([1.0, 2.0], 3)
    with pytest.raises(NumericalError):
        as_point([1.0, np.nan])


def test_spd_solve_matches_numpy():
    # Arrange
    A = np.array([[4.0, 1.0], [1.0, 3.0]])
    b = np.array([1.0, 2.0])

    # Act
    x = spd_solve(A, b)

    # Assert
    assert x == pytest.approx(np.linalg.solve(A, b))


def test_spd_solve_rejects_singular_matrix():
    with pytest.raises(SingularityError):
        spd_solve(np.zeros((2, 2)), np.ones(2))


def test_generalized_eigenvalues_and_operator_norm():
    B = NormOperator.diagonal([2.0, 1.0])
    A = np.diag([4.0, -3.0])

    eig = generalized_eigenvalues(A, B)

    assert eig == pytest.approx([-3.0, 2.0])
    assert operator_norm(A, B) == pytest.approx(3.0)
