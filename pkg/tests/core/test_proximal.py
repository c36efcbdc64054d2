# tests/core/test_proximal.py
import numpy as np
import pytest

from fcopt.config.settings import MethodConfig
from fcopt.core.proximal import (
    BregmanTerm, CubicProxFunction, default_delta, estimate_rho, inner_budget, prox_schedule, run_contracting_prox
)
from fcopt.core.bounds import prox_bound, prox_constants
from fcopt.corpus.entries import corpus_get
from fcopt.exceptions import InapplicableMethodError
from fcopt.linalg import NormOperator
from fcopt.types import MethodId


@pytest.fixture
def prox():
    return CubicProxFunction(alpha=2.0, center=np.array([0.5, -0.5]), norm=NormOperator.identity(2))


class TestSchedule:
    def test_first_step_is_a_full_contraction(self):
        A, A_next, gamma = prox_schedule(0)

        assert A == 0.0
        assert A_next == pytest.approx(1.0 / 27.0)
        assert gamma == pytest.approx(1.0)

    def test_second_step(self):
        A, A_next, gamma = prox_schedule(1)

        assert A == pytest.approx(1.0 / 27.0)
        assert A_next == pytest.approx(8.0 / 27.0)
        assert gamma == pytest.approx(7.0 / 8.0)

    def test_default_delta(self):
        assert default_delta(1e-2, 0.5) == pytest.approx(2e-4)
        assert default_delta(1e-2, 1e-6) == pytest.approx(1e-2)

    def test_inner_budget(self):
        assert inner_budget(0.5, 1.0) == 1
        # log_{4/3}(10) ≈ 8.004
        assert inner_budget(10.0, 1.0) == 9


class TestCubicProxFunction:
    def test_bregman_vanishes_on_the_diagonal(self, prox):
        v = np.array([1.0, 2.0])

        assert prox.bregman(v, v) == pytest.approx(0.0, abs=1e-12)

    def test_bregman_is_uniformly_convex(self, prox):
        rng = np.random.default_rng(3)
        for _ in range(50):
            v, x = rng.normal(size=2), rng.normal(size=2)
            r = np.linalg.norm(x - v)
            assert prox.bregman(v, x) >= prox.alpha / 6.0 * r ** 3 - 1e-10

    def test_three_point_identity(self, prox):
        v_bar, v, x = np.array([0.1, 0.3]), np.array([-1.0, 0.4]), np.array([2.0, -0.7])

        lhs = prox.bregman(v_bar, x)
        rhs = prox.bregman(v, x) + prox.bregman(v_bar, v) + float((prox.gradient(v) - prox.gradient(v_bar)) @ (x - v))

        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_bregman_term_gradient_matches_finite_differences(self, prox):
        term = BregmanTerm(prox, np.array([0.2, 0.2]))
        y = np.array([1.1, -0.4])
        step = 1e-6

        fd = np.array([(term.value(y + step * e) - term.value(y - step * e)) / (2 * step) for e in np.eye(2)])

        assert term.gradient(y) == pytest.approx(fd, rel=1e-6)
        assert term.hessian(prox.center) == pytest.approx(np.zeros((2, 2)))


class TestProxBound:
    def test_constants(self):
        c = prox_constants(rho=1.0, delta=1e-3, K=10)

        assert c["R0"] == pytest.approx(1.01)
        assert c["b"] == pytest.approx(1.2)
        assert c["a"] == pytest.approx(6e-2 + 1.2)

    def test_bound_decreases_towards_a_constant(self):
        column = prox_bound(rho=1.0, delta=1e-6, K=50)

        assert column.value(0) is None
        assert column.value(10) < column.value(1)


class TestContractingProx:
    def test_run_on_log_sum_exp(self):
        problem = corpus_get("lse-pentagon").build()
        config = MethodConfig(method=MethodId.CONTRACTING_PROX, p=2, iters=6, epsilon=1e-3)

        trace = run_contracting_prox(problem, config)

        assert len(trace.records) == 7
        assert trace.final_phi() < trace.phi[0]
        assert trace.records[1].extras["gamma"] == pytest.approx(1.0)
        assert trace.records[1].extras["inner_budget"] >= 1
        assert trace.metadata["alpha"] == pytest.approx(2.0)

    def test_rejects_non_subhomogeneous_outer(self):
        problem = corpus_get("power-outer").build()
        config = MethodConfig(method=MethodId.CONTRACTING_PROX, p=2, iters=2)

        with pytest.raises(InapplicableMethodError):
            run_contracting_prox(problem, config)

    def test_rho_estimate_prefers_config_then_known_point(self):
        problem = corpus_get("lse-pentagon").build()
        explicit = MethodConfig(method=MethodId.CONTRACTING_PROX, p=2, rho_estimate=0.7)
        implicit = MethodConfig(method=MethodId.CONTRACTING_PROX, p=2)

        assert estimate_rho(problem, explicit, alpha=2.0) == 0.7
        assert estimate_rho(problem, implicit, alpha=2.0) == pytest.approx(2.0 / 3.0 * 2.0 ** 1.5)
