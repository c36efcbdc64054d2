# tests/core/test_outer.py
import math

import numpy as np
import pytest

from fcopt.core.outer import (
    AdditiveComposite, ConstraintForm, F_of_constants, LogSumExpForm, MaxForm, PowerForm, SimpleSet,
    check_subhomogeneous, domain_membership, eval_F, project_to_Q, sample_u
)
from fcopt.exceptions import ConfigError, DimensionMismatchError
from fcopt.linalg import NormOperator
from fcopt.types import CheckStatus, SetKind


class TestSimpleSet:
    @pytest.fixture
    def norm(self):
        return NormOperator.identity(2)

    def test_box_projection_clamps(self, norm):
        Q = SimpleSet.box([0.0, 0.0], [1.0, 1.0])

        assert Q.project(np.array([2.0, -1.0]), norm) == pytest.approx([1.0, 0.0])
        assert Q.contains(np.array([0.5, 1.0]), norm)
        assert not Q.contains(np.array([0.5, 1.1]), norm)

    def test_ball_projection_scales_radially(self, norm):
        Q = SimpleSet.ball([0.0, 0.0], 1.0)

        assert Q.project(np.array([3.0, 4.0]), norm) == pytest.approx([0.6, 0.8])
        assert Q.project(np.array([0.3, 0.4]), norm) == pytest.approx([0.3, 0.4])

    def test_scaled_box(self):
        Q = SimpleSet.box([0.0, 0.0], [1.0, 1.0]).scaled(0.5, np.array([1.0, 2.0]))

        assert Q.lower == pytest.approx([1.0, 2.0])
        assert Q.upper == pytest.approx([1.5, 2.5])

    def test_scaled_ball(self):
        Q = SimpleSet.ball([1.0, 0.0], 2.0).scaled(0.25, np.array([0.0, 1.0]))

        assert Q.center == pytest.approx([0.25, 1.0])
        assert Q.radius == pytest.approx(0.5)

    def test_diameter(self, norm):
        assert SimpleSet.box([0.0, 0.0], [3.0, 4.0]).diameter(norm) == pytest.approx(5.0)
        assert SimpleSet.ball([0.0, 0.0], 1.5).diameter(norm) == pytest.approx(3.0)
        assert math.isinf(SimpleSet.all().diameter(norm))

    def test_invalid_sets(self):
        with pytest.raises(ConfigError):
            SimpleSet.ball([0.0], 0.0)
        with pytest.raises(ConfigError):
            SimpleSet.box([1.0], [0.0])

    def test_project_to_Q_defaults_to_identity_norm(self):
        Q = SimpleSet.ball([0.0, 0.0], 1.0)

        assert project_to_Q(Q, [2.0, 0.0]) == pytest.approx([1.0, 0.0])


class TestOuterFunctions:
    def test_constraint_form_is_infinite_when_violated(self):
        F = ConstraintForm(2)

        assert F.u_value(np.array([1.0, -0.5])) == 1.0
        assert math.isinf(F.u_value(np.array([1.0, 0.5])))

    def test_max_and_log_sum_exp(self):
        assert MaxForm(3).u_value(np.array([1.0, 3.0, 2.0])) == 3.0
        assert LogSumExpForm(2).u_value(np.zeros(2)) == pytest.approx(math.log(2.0))
        assert LogSumExpForm(2).u_gradient(np.zeros(2)) == pytest.approx([0.5, 0.5])

    def test_power_form(self):
        F = PowerForm(2.0)

        assert F.u_value(np.array([-1.0])) == 0.0
        assert F.u_value(np.array([3.0])) == pytest.approx(9.0)
        assert not F.subhomogeneous

    def test_power_form_exponent_below_two_is_rejected(self):
        with pytest.raises(ConfigError):
            PowerForm(1.5)

    def test_additive_composite_linear_term(self):
        F = AdditiveComposite(linear=[1.0, -1.0])
        norm = NormOperator.identity(2)

        assert eval_F(F, [2.0, 1.0], [0.5], norm) == pytest.approx(1.5)

    def test_eval_outside_Q_is_infinite(self):
        F = AdditiveComposite(SimpleSet.ball([0.0, 0.0], 1.0))
        norm = NormOperator.identity(2)

        assert math.isinf(eval_F(F, [2.0, 0.0], [0.0], norm))
        assert not domain_membership(F, [2.0, 0.0], norm)

    def test_u_length_is_checked(self):
        with pytest.raises(DimensionMismatchError):
            MaxForm(2).u_value(np.zeros(3))


class TestFOfConstants:
    def test_constraint_form_finite_only_for_affine_constraints(self):
        F = ConstraintForm(3)

        assert F_of_constants(F, [2.0, 0.0, 0.0]) == 2.0
        assert math.isinf(F_of_constants(F, [2.0, 1.0, 0.0]))

    def test_max_form(self):
        assert F_of_constants(MaxForm(2), [1.0, 3.0]) == 3.0

    def test_infinite_constant_propagates(self):
        assert math.isinf(F_of_constants(MaxForm(2), [1.0, math.inf]))

    def test_negative_constant_is_rejected(self):
        with pytest.raises(ConfigError):
            F_of_constants(MaxForm(2), [-1.0, 1.0])


class TestSubhomogeneity:
    @pytest.mark.parametrize("F", [ConstraintForm(3), MaxForm(3), LogSumExpForm(3), AdditiveComposite()])
    def test_built_in_subhomogeneous_forms_pass(self, F):
        report = check_subhomogeneous(F, np.zeros(2), samples=300, seed=1)

        assert report.status is CheckStatus.PASS

    def test_power_form_fails_with_witness(self):
        report = check_subhomogeneous(PowerForm(2.0), np.zeros(2), samples=300, seed=1)

        assert report.status is CheckStatus.FAIL
        assert report.max_violation > 0.0
        assert report.witness["condition"] in ("sum", "gradient")

    def test_x_outside_domain_is_rejected(self):
        F = MaxForm(2, SimpleSet.box([0.0], [1.0]))

        with pytest.raises(ConfigError):
            check_subhomogeneous(F, np.array([2.0]))

    def test_set_kinds_in_description(self):
        F = ConstraintForm(2, SimpleSet.ball([0.0], 1.0))

        assert F.describe()["Q"]["kind"] == SetKind.BALL.value

    def test_sampled_u_stays_in_the_constraint_domain(self):
        F = ConstraintForm(3)
        rng = np.random.default_rng(4)

        samples = [sample_u(F, rng, 2.0) for _ in range(50)]

        assert all(s.shape == (3,) for s in samples)
        assert all(np.all(s[1:] <= 0.0) for s in samples)
        assert all(math.isfinite(F.u_value(s)) for s in samples)
