# tests/core/test_regularization.py
import math

import numpy as np
import pytest

from fcopt.config.settings import MethodConfig
from fcopt.core.problem import phi
from fcopt.core.regularization import (
    RegularizedProblem, build_regularizer, choose_mu, optimal_alpha, regularization_bound,
    regularized_condition_number, solve_via_regularization, xi_measure
)
from fcopt.core.smooth import hat_beta
from fcopt.corpus.entries import corpus_get
from fcopt.exceptions import ConfigError, DomainError
from fcopt.types import CheckStatus, MethodId
from fcopt.verification.checks import check_rate


@pytest.fixture
def problem():
    return corpus_get("rank-deficient").build()


class TestRegularizer:
    def test_default_coefficients_are_lipschitz_constants(self, problem):
        reg = build_regularizer(problem, 1)

        assert reg.c == pytest.approx([2.0])
        assert reg.default_c

    def test_regularizer_touches_f_at_center_and_dominates_elsewhere(self, problem):
        reg = build_regularizer(problem, 1)
        x = np.array([1.0, -2.0])

        assert reg.d_values(problem.x0) == pytest.approx(problem.f.values(problem.x0))
        assert np.all(reg.d_values(x) >= problem.f.values(x))

    def test_custom_coefficients_must_be_positive(self, problem):
        with pytest.raises(ConfigError):
            build_regularizer(problem, 1, c=[0.0])

    def test_default_coefficients_need_positive_lipschitz_constant(self, problem):
        # L_2 vanishes for a quadratic.
        with pytest.raises(ConfigError):
            build_regularizer(problem, 2)

    def test_blended_constants(self, problem):
        reg = build_regularizer(problem, 1)

        blended = reg.blended(0.5).components[0].constants

        assert blended.sigma2 == pytest.approx(1.0)
        assert blended.L1 == pytest.approx(3.0)
        assert reg.blended(0.0) is reg.f


class TestRegularizedProblem:
    def test_phi_mu_agrees_with_phi_at_center(self, problem):
        reg_problem = RegularizedProblem(problem, build_regularizer(problem, 1), 0.3)

        assert reg_problem.phi_mu(problem.x0) == pytest.approx(phi(problem, problem.x0))
        assert reg_problem.problem.known_opt is None

    def test_phi_mu_dominates_phi(self, problem):
        reg_problem = RegularizedProblem(problem, build_regularizer(problem, 1), 0.3)
        x = np.array([2.0, 1.0])

        assert reg_problem.phi_mu(x) >= phi(problem, x)

    def test_mu_out_of_range(self, problem):
        with pytest.raises(ConfigError):
            RegularizedProblem(problem, build_regularizer(problem, 1), 1.5)

    def test_condition_number_formula(self, problem):
        reg_problem = RegularizedProblem(problem, build_regularizer(problem, 1), 1.0)

        # (1 + 1)·2^0·(1/1 + 1) = 4, so β = 1/(1 + 4).
        assert regularized_condition_number(reg_problem) == pytest.approx(0.2)

    def test_condition_number_matches_hat_beta_on_random_settings(self, problem):
        # Arrange
        regularizers = {1: build_regularizer(problem, 1), 2: build_regularizer(corpus_get("lse-pentagon").build(), 2)}
        rng = np.random.default_rng(2024)

        for _ in range(100):
            p = int(rng.integers(1, 3))
            mu = 1.0 - float(rng.uniform())
            reg_problem = RegularizedProblem(regularizers[p].problem, regularizers[p], mu)

            # Act
            closed_form = regularized_condition_number(reg_problem)

            # Assert
            assert closed_form == pytest.approx(hat_beta(reg_problem.problem.f, p), abs=1e-12)


    def test_condition_number_with_custom_coefficients(self, problem):
        reg_problem = RegularizedProblem(problem, build_regularizer(problem, 1, c=[1.0]), 0.5)

        assert regularized_condition_number(reg_problem) == pytest.approx(hat_beta(reg_problem.problem.f, 1))

    def test_condition_number_is_zero_without_regularization(self, problem):
        reg_problem = RegularizedProblem(problem, build_regularizer(problem, 1), 0.0)

        assert regularized_condition_number(reg_problem) == 0.0


class TestLocalMeasure:
    def test_additive_measure_has_closed_form(self, problem):
        # f(x) = 1/8 at x = (1/4, 1/4), A = φ(x0) = 1/2, so ξ = g/(A − f(x)).
        x = np.array([0.25, 0.25])

        xi = xi_measure(problem, x, [1.0], 0.5)

        assert xi == pytest.approx(1.0 / 0.375, rel=1e-9)

    def test_point_above_level_is_rejected(self, problem):
        with pytest.raises(DomainError):
            xi_measure(problem, problem.x0, [1.0], 0.5)

    def test_negative_direction_is_rejected(self, problem):
        with pytest.raises(ConfigError):
            xi_measure(problem, np.array([0.25, 0.25]), [-1.0], 0.5)

    def test_choose_mu(self, problem):
        assert choose_mu(problem, 0.1, 1.0) == pytest.approx(0.01)
        assert choose_mu(problem, 0.1, 1e-3) == 1.0
        with pytest.raises(ConfigError):
            choose_mu(problem, 0.1, 0.0)
        with pytest.raises(ConfigError):
            choose_mu(problem, 0.0, 1.0)

    def test_balancing_coefficient(self):
        assert optimal_alpha(1.0) == pytest.approx(1.0 / (1.0 + math.sqrt(2.0)))

    def test_bound_decomposition(self):
        assert regularization_bound(0.1, 2.0, 0.25, 4.0, 1.0, 0.0) == pytest.approx(0.2 + 2.0)


class TestSolveViaRegularization:
    def test_solves_rank_deficient_problem(self, problem):
        config = MethodConfig(method=MethodId.FULL, p=1, epsilon=1e-2)

        trace = solve_via_regularization(problem, 1, 1e-2, config)

        assert trace.method is MethodId.REGULARIZED
        assert 0.0 < trace.metadata["mu"] <= 1.0
        assert "phi_mu" in trace.records[-1].extras
        assert trace.final_phi() <= trace.phi[0]
        assert trace.final_phi() - problem.known_opt <= 1e-2

    def test_reaches_target_gap_on_rank_deficient_problem(self, problem):
        # Arrange
        epsilon = 1e-3
        config = MethodConfig(method=MethodId.FULL, p=1, epsilon=epsilon)

        # Act
        trace = solve_via_regularization(problem, 1, epsilon, config)

        # Assert
        assert trace.final_phi() - problem.known_opt <= epsilon
        assert check_rate(trace).status is CheckStatus.PASS

    def test_regularized_objective_bounds_phi_along_the_trace(self, problem):
        trace = solve_via_regularization(problem, 1, 1e-3)

        first = trace.records[0]
        # d(x0) = f(x0): both objectives agree at the start.
        assert first.extras["phi_mu"] == pytest.approx(first.phi, abs=1e-14)
        for record in trace.records:
            assert record.phi <= record.extras["phi_mu"] + 1e-12 * (1.0 + abs(record.phi))
        phi_mu = [r.extras["phi_mu"] for r in trace.records]
        assert all(b <= a + 1e-12 * (1.0 + abs(a)) for a, b in zip(phi_mu, phi_mu[1:]))

    def test_regularizer_dominates_f_at_the_final_point(self, problem):
        trace = solve_via_regularization(problem, 1, 1e-3)
        reg = build_regularizer(problem, 1)

        x = trace.final_point
        assert np.all(reg.d_values(x) >= problem.f.values(x))
        assert reg.d_values(problem.x0) == pytest.approx(problem.f.values(problem.x0), abs=1e-15)


    def test_falls_back_when_prerun_makes_no_progress(self):
        problem = corpus_get("rank-deficient").build()
        at_optimum = problem.with_function(problem.f, x0=np.array([0.5, 0.5]))

        trace = solve_via_regularization(at_optimum, 1, 1e-3)

        assert trace.metadata["mu"] == 0.0
        assert trace.method is MethodId.FULL
