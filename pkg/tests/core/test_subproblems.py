# tests/core/test_subproblems.py
import math

import numpy as np
import pytest

from fcopt.config.settings import SubproblemSettings
from fcopt.core.outer import AdditiveComposite, ConstraintForm, SimpleSet
from fcopt.core.problem import CompositeProblem
from fcopt.core.smooth import AffineComponent, QuadraticComponent, VectorFunction
from fcopt.core.solvers import project_simplex, select_engine
from fcopt.core.subproblems import (
    build_objective, contracted_lmo, cubic_step, full_step, full_step_p1, grad_reg_step
)
from fcopt.corpus.entries import corpus_get
from fcopt.exceptions import ConfigError
from fcopt.statistics import StatisticsTracker, StatKey


def grid_oracle(fn, center, half_width=2.5, points=None, rounds=7, fine_points=41):
    """
    Brute-force minimizer of `fn`: a global grid over [−half_width, half_width]^n,
    then nested grids shrinking tenfold around `center`.

    Returns (argmin, min) over every grid point evaluated.
    """
    center = np.asarray(center, dtype=np.float64)
    n = center.shape[0]
    points = points or (5001 if n == 1 else 101)
    best_x, best_v = None, math.inf

    def scan(lower, upper, count):
        nonlocal best_x, best_v
        axes = [np.linspace(lo, hi, count) for lo, hi in zip(lower, upper)]
        for coords in np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n):
            value = fn(coords)
            if value < best_v:
                best_x, best_v = coords.copy(), value

    scan(np.full(n, -half_width), np.full(n, half_width), points)
    radius = 20.0 * half_width / (points - 1)
    for _ in range(rounds):
        scan(center - radius, center + radius, fine_points)
        radius /= 10.0
    return best_x, best_v


@pytest.fixture
def cfg():
    return SubproblemSettings()


class TestFullStep:
    def test_interval_instance_reaches_the_boundary(self, cfg):
        # Arrange
        problem = corpus_get("interval-1d").build()

        # Act
        result = full_step_p1(problem, problem.x0, cfg=cfg)

        # Assert
        assert result.solver == "dual-ascent"
        assert result.y == pytest.approx([-1.0], abs=1e-8)
        assert result.dual.lam == pytest.approx([1.0, 0.5], abs=1e-8)
        assert result.model_value == pytest.approx(-1.0, abs=1e-8)

    def test_max_of_quadratics_balances_the_pieces(self, cfg):
        problem = corpus_get("max-of-quadratics").build()

        result = full_step_p1(problem, np.zeros(2), cfg=cfg)

        assert result.y == pytest.approx([0.0, 0.0], abs=1e-6)
        assert result.dual.lam == pytest.approx([1.0 / 3.0] * 3, abs=1e-4)

    def test_max_of_quadratics_model_is_exact(self, cfg):
        # With L_1 = 1 the model of each piece is the piece itself.
        problem = corpus_get("max-of-quadratics").build()

        result = full_step_p1(problem, np.array([1.0, 0.5]), cfg=cfg)

        assert result.y == pytest.approx([0.0, 0.0], abs=1e-6)
        assert result.model_value == pytest.approx(0.5, abs=1e-8)

    def test_restricted_step_stays_in_scaled_set(self, cfg):
        problem = corpus_get("ball-projection").build()
        beta = 0.25

        result = full_step(problem, problem.x0, 1, beta=beta, cfg=cfg)

        shrunk = problem.Q.scaled(beta, (1.0 - beta) * problem.x0)
        assert shrunk.contains(result.y, problem.norm, 1e-7)

    def test_restricted_step_rejects_beta_out_of_range(self, cfg):
        problem = corpus_get("ball-projection").build()

        with pytest.raises(ConfigError):
            full_step(problem, problem.x0, 1, beta=1.5, cfg=cfg)

    def test_second_order_step_needs_finite_constants(self, cfg):
        problem = corpus_get("interval-1d").build()

        with pytest.raises(ConfigError):
            full_step(problem, problem.x0, 2, cfg=cfg)

    def test_unsupported_order(self, cfg):
        problem = corpus_get("unconstrained-quadratic").build()

        with pytest.raises(ConfigError):
            full_step(problem, problem.x0, 3, cfg=cfg)


class TestRegularizedSteps:
    def test_grad_reg_step_on_isotropic_quadratic_lands_on_minimum(self, cfg):
        f = VectorFunction([QuadraticComponent(np.eye(2))])
        problem = CompositeProblem(f, AdditiveComposite(), np.array([2.0, 0.0]))

        result = grad_reg_step(problem, problem.x0, 1.0, cfg=cfg)

        assert result.solver == "closed-form"
        assert result.y == pytest.approx([0.0, 0.0], abs=1e-12)

    def test_cubic_step_on_linear_function_solves_secular_equation(self, cfg):
        # min (y − x) + (6/6)|y − x|³ gives y − x = −1/√3.
        problem = CompositeProblem(VectorFunction([AffineComponent([1.0])]), AdditiveComposite(), np.zeros(1))

        result = cubic_step(problem, problem.x0, 6.0, cfg=cfg)

        assert result.solver == "secular"
        assert result.y == pytest.approx([-1.0 / math.sqrt(3.0)], rel=1e-8)
        assert result.dual.tau == pytest.approx(3.0 / math.sqrt(3.0), rel=1e-6)

    def test_grad_reg_step_rejects_nonpositive_M(self, cfg):
        problem = corpus_get("unconstrained-quadratic").build()

        with pytest.raises(ConfigError):
            grad_reg_step(problem, problem.x0, 0.0, cfg=cfg)
        with pytest.raises(ConfigError):
            cubic_step(problem, problem.x0, math.inf, cfg=cfg)

    def test_cubic_step_decreases_log_sum_exp(self, cfg):
        problem = corpus_get("lse-pentagon").build()

        result = cubic_step(problem, problem.x0, problem.F_of_constants(2), cfg=cfg)

        assert problem.value(result.y) < problem.value(problem.x0)

    def test_stats_are_recorded(self, cfg):
        problem = corpus_get("max-of-quadratics").build()
        stats = StatisticsTracker()

        grad_reg_step(problem, problem.x0, 1.0, cfg=cfg, stats=stats)

        assert stats.get(StatKey.SUBPROBLEMS_SOLVED) == 1
        assert stats.get(StatKey.DUAL_ASCENT_SOLVES) == 1


class TestContractedLmo:
    def test_linear_minimization_over_ball(self, cfg):
        problem = corpus_get("ball-projection").build()
        gradient = problem.x0 - np.array([2.0, 0.0])

        result = contracted_lmo(problem, problem.x0, 1.0, 1, cfg=cfg)

        assert result.solver == "lmo"
        assert result.y == pytest.approx(-gradient / np.linalg.norm(gradient))

    def test_box_constraint_model_uses_linear_program(self, cfg):
        problem = box_constraint_problem()

        result = contracted_lmo(problem, problem.x0, 1.0, 1, cfg=cfg)

        assert result.solver == "linprog"
        assert result.y == pytest.approx([0.0, 0.0], abs=1e-9)

    def test_contraction_keeps_point_near_anchor(self, cfg):
        problem = corpus_get("box-lse").build()
        gamma = 0.5

        result = contracted_lmo(problem, problem.x0, gamma, 1, cfg=cfg)

        # x_k + (y − x_k)/γ must lie in Q.
        assert problem.Q.contains(problem.x0 + (result.y - problem.x0) / gamma, problem.norm, 1e-9)

    def test_unbounded_domain_is_rejected(self, cfg):
        problem = corpus_get("unconstrained-quadratic").build()

        with pytest.raises(ConfigError):
            contracted_lmo(problem, problem.x0, 0.5, 1, cfg=cfg)

    def test_gamma_out_of_range_is_rejected(self, cfg):
        problem = corpus_get("box-lse").build()

        with pytest.raises(ConfigError):
            contracted_lmo(problem, problem.x0, 0.0, 1, cfg=cfg)


def box_constraint_problem():
    # min x1 + x2 subject to x1 ≤ 0.5 over the unit box.
    f = VectorFunction([AffineComponent([1.0, 1.0]), AffineComponent([1.0, 0.0], -0.5)])
    Q = SimpleSet.box([0.0, 0.0], [1.0, 1.0])
    return CompositeProblem(f, ConstraintForm(2, Q), np.array([0.25, 0.25]))


def full_case(entry, p, anchor=None):
    def build(cfg):
        problem = corpus_get(entry).build()
        x = problem.x0 if anchor is None else np.asarray(anchor, dtype=np.float64)
        if p == 1:
            obj = build_objective(problem, x, order=1, quad=problem.f.lipschitz(1), cfg=cfg)
        else:
            obj = build_objective(problem, x, order=2, cubic=problem.f.lipschitz(2), cfg=cfg)
        return full_step(problem, x, p, cfg=cfg), obj
    return build


def grad_reg_case(entry, M=1.0):
    def build(cfg):
        problem = corpus_get(entry).build()
        obj = build_objective(problem, problem.x0, order=1, reg_quad=M, cfg=cfg)
        return grad_reg_step(problem, problem.x0, M, cfg=cfg), obj
    return build


def cubic_case(entry):
    def build(cfg):
        problem = corpus_get(entry).build()
        M = problem.F_of_constants(2)
        obj = build_objective(problem, problem.x0, order=2, reg_cubic=0.5 * M, cfg=cfg)
        return cubic_step(problem, problem.x0, M, cfg=cfg), obj
    return build


def lmo_case(make_problem, gamma, p):
    def build(cfg):
        problem = make_problem()
        feasible = problem.Q.scaled(gamma, (1.0 - gamma) * problem.x0)
        obj = build_objective(problem, problem.x0, order=p, feasible=feasible, cfg=cfg)
        return contracted_lmo(problem, problem.x0, gamma, p, cfg=cfg), obj
    return build


def corpus_problem(entry):
    return lambda: corpus_get(entry).build()


ORACLE_CASES = {
    "full-p1-interval": full_case("interval-1d", 1),
    "full-p1-max-of-quadratics": full_case("max-of-quadratics", 1, anchor=[1.0, 0.5]),
    "full-p1-constrained-quadratic": full_case("constrained-quadratic", 1),
    "full-p2-lse": full_case("lse-pentagon", 2),
    "full-p2-cubic-ball": full_case("cubic-ball-constraint", 2),
    "grad-reg-max-of-quadratics": grad_reg_case("max-of-quadratics"),
    "grad-reg-ball": grad_reg_case("ball-projection"),
    "cubic-lse": cubic_case("lse-pentagon"),
    "cubic-box-lse": cubic_case("box-lse"),
    "lmo-box": lmo_case(corpus_problem("box-lse"), 0.5, 1),
    "lmo-ball": lmo_case(corpus_problem("ball-projection"), 0.5, 1),
    "lmo-second-order-box": lmo_case(corpus_problem("box-lse"), 1.0, 2),
    "lmo-linear-program": lmo_case(box_constraint_problem, 1.0, 1),
}


class TestGridOracleAgreement:
    @pytest.mark.parametrize("name", sorted(ORACLE_CASES))
    def test_solver_matches_brute_force_grid(self, cfg, name):
        # Arrange
        result, obj = ORACLE_CASES[name](cfg)

        # Act
        y_grid, v_grid = grid_oracle(obj.value, result.y)

        # Assert
        assert obj.n <= 2 and obj.m <= 3
        assert abs(result.model_value - v_grid) <= 1e-6
        assert np.max(np.abs(result.y - y_grid)) <= 1e-3


class TestEngineSelection:
    def test_engines_follow_structure(self):
        assert select_engine(build_objective(corpus_get("a").build(), np.zeros(2), 1, reg_quad=1.0)) == "closed-form"
        assert select_engine(build_objective(corpus_get("d").build(), np.zeros(2), 1, reg_quad=1.0)) == "dual-ascent"
        box = corpus_get("f").build()
        assert select_engine(build_objective(box, box.x0, 1)) == "lmo"
        assert select_engine(build_objective(box, box.x0, 1, reg_quad=1.0)) == "projected-gradient"


def test_project_simplex():
    out = project_simplex(np.array([2.0, 0.0, 0.0]))

    assert out == pytest.approx([1.0, 0.0, 0.0])
    assert project_simplex(np.array([0.5, 0.5])) == pytest.approx([0.5, 0.5])
