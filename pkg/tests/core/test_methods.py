# tests/core/test_methods.py
import math

import numpy as np
import pytest
from pydantic import ValidationError

from fcopt.config.settings import MethodConfig
from fcopt.core.methods import (
    cgm_gamma, contracting_newton_gamma, fgm_coefficients, get_runner, run_cgm, run_contracting_newton,
    run_cubic_newton, run_fgm, run_full_basic, run_gm, run_restricted_basic
)
from fcopt.corpus.entries import corpus_get
from fcopt.exceptions import ConfigError, InapplicableMethodError
from fcopt.statistics import StatisticsTracker, StatKey
from fcopt.types import CheckStatus, MethodId, RunStatus
from fcopt.verification.checks import check_rate


def config(method: MethodId, p: int = 1, iters: int = 20, **kwargs) -> MethodConfig:
    return MethodConfig(method=method, p=p, iters=iters, **kwargs)


class TestSchedules:
    def test_cgm_gamma(self):
        assert cgm_gamma(0) == 1.0
        assert cgm_gamma(1) == pytest.approx(2.0 / 3.0)

    def test_contracting_newton_gamma(self):
        assert contracting_newton_gamma(0) == 1.0
        assert contracting_newton_gamma(3) == pytest.approx(0.5)

    def test_fgm_coefficients_solve_the_quadratic(self):
        A = 0.0
        for _ in range(5):
            a, A_next = fgm_coefficients(A)
            assert a * a == pytest.approx(A + a)
            assert A_next == pytest.approx(A + a)
            A = A_next

    def test_fgm_first_coefficient(self):
        assert fgm_coefficients(0.0) == (1.0, 1.0)
        a, _ = fgm_coefficients(1.0)
        assert a == pytest.approx((1.0 + math.sqrt(5.0)) / 2.0)


class TestMethodConfig:
    def test_first_order_method_rejects_p2(self):
        with pytest.raises(ValidationError):
            MethodConfig(method=MethodId.GM, p=2)

    def test_second_order_method_rejects_p1(self):
        with pytest.raises(ValidationError):
            MethodConfig(method=MethodId.CUBIC, p=1)

    def test_unknown_runner(self):
        with pytest.raises(ConfigError):
            get_runner("nope")


class TestBasicMethods:
    def test_full_method_on_strongly_convex_quadratic_meets_linear_bound(self):
        problem = corpus_get("unconstrained-quadratic").build()

        trace = run_full_basic(problem, config(MethodId.FULL, iters=30))

        assert trace.status is RunStatus.COMPLETED
        assert len(trace.records) == 31
        assert trace.records[0].k == 0
        assert trace.records[0].phi == pytest.approx(1.5)
        assert check_rate(trace).status is CheckStatus.PASS
        assert trace.metadata["bound"]["label"] == "full-linear"

    def test_full_method_on_convex_problem_uses_sublinear_bound(self):
        problem = corpus_get("rank-deficient").build()

        trace = run_full_basic(problem, config(MethodId.FULL, iters=10))

        # No D0 and an unbounded domain: the bound column is omitted.
        assert all(r.bound is None for r in trace.records)
        assert trace.final_phi() == pytest.approx(0.0, abs=1e-8)

    def test_restricted_method_on_interval(self):
        problem = corpus_get("interval-1d").build()

        trace = run_restricted_basic(problem, config(MethodId.RESTRICTED, iters=40))

        assert trace.metadata["beta"] == pytest.approx(1.0 / 3.0)
        assert check_rate(trace).status is CheckStatus.PASS
        assert trace.final_phi() == pytest.approx(-1.0, abs=1e-4)

    def test_restricted_method_rejects_beta_above_hat_beta(self):
        problem = corpus_get("interval-1d").build()

        with pytest.raises(ConfigError):
            run_restricted_basic(problem, config(MethodId.RESTRICTED, beta=0.9))

    def test_restricted_method_needs_uniform_convexity(self):
        problem = corpus_get("rank-deficient").build()

        with pytest.raises(ConfigError):
            run_restricted_basic(problem, config(MethodId.RESTRICTED))

    def test_full_method_on_constrained_quadratic_stays_feasible(self):
        problem = corpus_get("constrained-quadratic").build()

        trace = run_full_basic(problem, config(MethodId.FULL, iters=25))

        assert all(math.isfinite(phi) for phi in trace.phi)
        assert check_rate(trace).status is CheckStatus.PASS


class TestFirstOrderMethods:
    def test_gm_converges_on_quadratic(self):
        problem = corpus_get("unconstrained-quadratic").build()
        stats = StatisticsTracker()

        trace = run_gm(problem, config(MethodId.GM, iters=50), stats)

        assert trace.records[-1].gap < 1e-8
        assert check_rate(trace).status is CheckStatus.PASS
        assert stats.get(StatKey.OUTER_ITERATIONS) == 50
        assert stats.get(StatKey.METHOD_RUNS) == 1

    def test_gm_is_monotone(self):
        problem = corpus_get("max-of-quadratics").build()

        trace = run_gm(problem, config(MethodId.GM, iters=15))

        assert all(b <= a + 1e-10 for a, b in zip(trace.phi, trace.phi[1:]))

    def test_gm_rejects_nonlinear_constraints(self):
        problem = corpus_get("interval-1d").build()

        with pytest.raises(InapplicableMethodError):
            run_gm(problem, config(MethodId.GM))

    def test_gm_rejects_power_outer(self):
        problem = corpus_get("power-outer").build()

        with pytest.raises(InapplicableMethodError):
            run_gm(problem, config(MethodId.GM))

    def test_cgm_needs_bounded_domain(self):
        problem = corpus_get("unconstrained-quadratic").build()

        with pytest.raises(ConfigError):
            run_cgm(problem, config(MethodId.CGM))

    def test_cgm_on_box(self):
        problem = corpus_get("box-lse").build()

        trace = run_cgm(problem, config(MethodId.CGM, iters=30))

        assert trace.records[1].extras["gamma"] == 1.0
        assert trace.final_phi() <= trace.phi[0]
        assert check_rate(trace).status is CheckStatus.PASS

    def test_fgm_records_estimating_sequence(self):
        problem = corpus_get("unconstrained-quadratic").build()

        trace = run_fgm(problem, config(MethodId.FGM, iters=30))

        assert trace.records[0].extras["A"] == 0.0
        assert trace.records[1].extras["A"] == 1.0
        assert "dist_v" in trace.records[-1].extras
        assert check_rate(trace).status is CheckStatus.PASS

    def test_fgm_bound_needs_point_or_radius(self):
        problem = corpus_get("rank-deficient").build()
        problem = problem.with_function(problem.f, known_opt_point=None)

        without = run_fgm(problem, config(MethodId.FGM, iters=3))
        with_radius = run_fgm(problem, config(MethodId.FGM, iters=3, radius=1.0))

        assert all(r.bound is None for r in without.records)
        assert with_radius.records[1].bound is not None

    def test_runs_are_deterministic(self):
        problem = corpus_get("max-of-quadratics").build()

        first = run_fgm(problem, config(MethodId.FGM, iters=10))
        second = run_fgm(problem, config(MethodId.FGM, iters=10))

        assert first.phi == second.phi


class TestSecondOrderMethods:
    def test_cubic_newton_on_log_sum_exp(self):
        problem = corpus_get("lse-pentagon").build()

        trace = run_cubic_newton(problem, config(MethodId.CUBIC, p=2, iters=20))

        assert trace.final_phi() < trace.phi[0]
        assert trace.metadata["M"] == pytest.approx(2.0)
        assert check_rate(trace).status is CheckStatus.PASS

    def test_contracting_newton_on_box(self):
        problem = corpus_get("box-lse").build()

        trace = run_contracting_newton(problem, config(MethodId.CONTRACTING_NEWTON, p=2, iters=10))

        assert [r.extras["gamma"] for r in trace.records[1:4]] == pytest.approx([1.0, 0.75, 0.6])
        assert check_rate(trace).status is CheckStatus.PASS

    def test_cubic_rejects_degenerate_constant(self):
        problem = corpus_get("interval-1d").build()
        # L_2 is zero for every component, so F(L_2(f)) = 0.
        with pytest.raises(ConfigError):
            run_cubic_newton(problem, config(MethodId.CUBIC, p=2))

    def test_final_point_is_recorded(self):
        problem = corpus_get("lse-pentagon").build()

        trace = run_cubic_newton(problem, config(MethodId.CUBIC, p=2, iters=5))

        assert trace.final_point is not None
        assert np.all(np.isfinite(trace.final_point))


class TestRateHorizons:
    """Every bound column holds over the full horizon on the entries the methods are designed for."""

    @pytest.mark.parametrize("entry, method, p, iters", [
        ("lse-pentagon", MethodId.FULL, 1, 500),
        ("lse-pentagon", MethodId.GM, 1, 500),
        ("max-of-quadratics", MethodId.GM, 1, 500),
        ("box-lse", MethodId.CGM, 1, 500),
        ("ball-projection", MethodId.CGM, 1, 500),
        ("lse-pentagon", MethodId.FGM, 1, 500),
        ("lse-pentagon", MethodId.FULL, 2, 100),
        ("lse-pentagon", MethodId.CUBIC, 2, 100),
        ("box-lse", MethodId.CONTRACTING_NEWTON, 2, 100),
    ])
    def test_bound_column_holds_at_every_iteration(self, entry, method, p, iters):
        # Arrange
        problem = corpus_get(entry).build()

        # Act
        trace = get_runner(method)(problem, config(method, p=p, iters=iters))

        # Assert
        assert len(trace.records) == iters + 1
        assert all(r.bound is not None for r in trace.records[1:])
        report = check_rate(trace)
        assert report.status is CheckStatus.PASS, report.witness
        assert report.samples == iters


def test_runs_finish_with_the_only_run_status():
    problem = corpus_get("unconstrained-quadratic").build()

    trace = run_gm(problem, config(MethodId.GM, iters=2))

    assert [status.value for status in RunStatus] == ["completed"]
    assert trace.status is RunStatus.COMPLETED
