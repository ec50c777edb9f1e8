import math
import os

import numpy as np
import pytest

from tailkit.convolve import product_tail
from tailkit.distributions import (
    Degenerate,
    Exponential,
    ParameterError,
    RegVar,
    UniformLaw,
    positive_part,
    shift,
)
from tailkit.quadrature import LOG_ZERO
from tailkit.risk import (
    RiskModelSpec,
    asymptotic_preconditions,
    discounted_loss_tail,
    divergence_guard,
    finite_ruin_asymptotic,
    finite_ruin_mc,
    finite_ruin_profile,
    infinite_lower_bound,
)

PARETO1 = RegVar(1.0, 1.0)
UNI = UniformLaw(1.0)


@pytest.fixture(scope="module")
def fixture():
    return RiskModelSpec(Z_law=PARETO1, Y_law=UNI)


@pytest.fixture(scope="module")
def deg1_model():
    return RiskModelSpec(Z_law=PARETO1, Y_law=Degenerate(1.0))


class TestModelValidation:
    def test_zero_horizon_rejected(self):
        with pytest.raises(ParameterError) as e:
            RiskModelSpec(Z_law=PARETO1, Y_law=UNI, horizon=0)
        assert "horizon" in str(e.value)

    def test_discount_mass_at_zero_rejected(self):
        bad_y = positive_part(shift(Exponential(1.0), -1.0))
        with pytest.raises(ParameterError) as e:
            RiskModelSpec(Z_law=PARETO1, Y_law=bad_y)
        assert e.value.param == "Y_law"

    def test_infinite_horizon_accepted(self):
        m = RiskModelSpec(Z_law=PARETO1, Y_law=UNI, horizon=math.inf)
        assert m.horizon == math.inf


class TestDiscountedLossTail:
    @pytest.mark.parametrize("i", [1, 3, 7])
    def test_unit_discount_is_identity(self, deg1_model, i):
        got = discounted_loss_tail(deg1_model, i, 50.0)
        assert got == PARETO1.log_sf(50.0)

    @pytest.mark.parametrize("i", [1, 2, 3, 4])
    def test_uniform_halves_per_period(self, fixture, i):
        # E[prod of i uniforms] / x = 2^-i / x
        got = math.exp(discounted_loss_tail(fixture, i, 50.0))
        want = 2.0 ** -i / 50.0
        assert got == pytest.approx(want, rel=1e-5)

    def test_first_period_equals_product_tail(self, fixture):
        got = discounted_loss_tail(fixture, 1, 50.0)
        assert got == product_tail(PARETO1, UNI, 50.0)


class TestTailSumApproximation:
    def test_single_period(self, fixture):
        assert finite_ruin_asymptotic(fixture, 1, 50.0) == \
            discounted_loss_tail(fixture, 1, 50.0)

    def test_three_periods_closed_form(self, fixture):
        # sum of 2^-i / 50 for i = 1..3 = 0.875/50 = 0.0175
        got = math.exp(finite_ruin_asymptotic(fixture, 3, 50.0))
        assert got == pytest.approx(0.0175, rel=1e-5)

    def test_unit_discount_scales_linearly(self, deg1_model):
        got = finite_ruin_asymptotic(deg1_model, 4, 50.0)
        want = math.log(4.0) + PARETO1.log_sf(50.0)
        assert got == pytest.approx(want, abs=1e-12)


class TestRuinSimulation:
    def test_degenerate_staircase(self):
        stair = RiskModelSpec(Z_law=Degenerate(1.0), Y_law=Degenerate(1.0))
        assert finite_ruin_mc(stair, 3, 2.5, paths=10 ** 4, seed=1).point \
            == 1.0
        assert finite_ruin_mc(stair, 3, 3.0, paths=10 ** 4, seed=1).point \
            == 0.0

    def test_single_period_agrees_with_tail(self, fixture):
        est = finite_ruin_mc(fixture, 1, 20.0, paths=10 ** 6, seed=7)
        want = math.exp(discounted_loss_tail(fixture, 1, 20.0))
        assert abs(est.point - want) <= 4.0 * est.ci_halfwidth / 1.96 + 1e-12
        # one period: the running max equals the terminal sum
        assert est.point == est.terminal_point

    def test_seed_determinism(self, fixture):
        a = finite_ruin_mc(fixture, 3, 50.0, paths=10 ** 5, seed=11)
        b = finite_ruin_mc(fixture, 3, 50.0, paths=10 ** 5, seed=11)
        assert a == b

    def test_worker_count_invariance(self, fixture):
        base = finite_ruin_mc(fixture, 3, 50.0, paths=10 ** 5, seed=11)
        try:
            os.environ["TAILKIT_WORKERS"] = "1"
            one = finite_ruin_mc(fixture, 3, 50.0, paths=10 ** 5, seed=11)
            os.environ["TAILKIT_WORKERS"] = "8"
            eight = finite_ruin_mc(fixture, 3, 50.0, paths=10 ** 5, seed=11)
        finally:
            del os.environ["TAILKIT_WORKERS"]
        assert base == one == eight

    def test_monotone_in_horizon(self, fixture):
        # shared path prefixes: more periods can only add ruin events
        points = [finite_ruin_mc(fixture, n, 30.0, paths=10 ** 5,
                                 seed=3).point
                  for n in (1, 2, 3, 5)]
        assert all(p1 <= p2 for p1, p2 in zip(points, points[1:]))

    def test_profile_monotone_in_level(self, fixture):
        prof = finite_ruin_profile(fixture, 3, [10.0, 20.0, 40.0, 80.0],
                                   paths=10 ** 5, seed=3)
        assert all(a.point >= b.point for a, b in zip(prof, prof[1:]))
        assert [e.x for e in prof] == [10.0, 20.0, 40.0, 80.0]

    def test_profile_order_independent(self, fixture):
        prof = finite_ruin_profile(fixture, 3, [10.0, 20.0, 40.0, 80.0],
                                   paths=10 ** 5, seed=3)
        shuffled = finite_ruin_profile(fixture, 3, [40.0, 10.0, 80.0, 20.0],
                                       paths=10 ** 5, seed=3)
        assert sorted((e.x, e.point) for e in shuffled) == \
            sorted((e.x, e.point) for e in prof)

    def test_running_max_dominates_terminal(self):
        mixed = RiskModelSpec(Z_law=shift(PARETO1, -1.5), Y_law=UNI)
        est = finite_ruin_mc(mixed, 4, 5.0, paths=10 ** 5, seed=5)
        assert est.point >= est.terminal_point

    def test_path_floor(self, fixture):
        with pytest.raises(ParameterError):
            finite_ruin_mc(fixture, 1, 10.0, paths=10, seed=0)


class TestDivergenceGuard:
    def test_discounts_above_one_diverge(self):
        guard = divergence_guard(RiskModelSpec(
            Z_law=PARETO1, Y_law=shift(UniformLaw(1.0), 1.0)))
        assert not guard.passed
        assert "diverges" in guard.reason

    def test_contracting_discounts_pass(self, fixture):
        assert divergence_guard(fixture).passed

    def test_unit_discount_diverges(self, deg1_model):
        assert not divergence_guard(deg1_model).passed


@pytest.fixture(scope="module")
def result(fixture):
    return infinite_lower_bound(fixture, 50.0, lam=2.0, epsilon=0.05)


class TestSeriesLowerBound:
    def test_halving_constant(self, result):
        _, cert = result
        assert cert.a_estimate == pytest.approx(0.5, abs=1e-9)

    def test_split_masses(self, result):
        _, cert = result
        assert cert.p_mass == pytest.approx(0.5, abs=1e-12)
        assert cert.q_mass == pytest.approx(0.5, abs=1e-12)

    def test_contraction_factor(self, result):
        # p a + p eps + q = 0.25 + 0.025 + 0.5
        _, cert = result
        assert cert.factor == pytest.approx(0.775, abs=1e-12)

    def test_terms_summed(self, result):
        _, cert = result
        assert cert.i_star == 22

    def test_series_value(self, result):
        series_log, cert = result
        want = (1.0 - 2.0 ** -cert.i_star) / 50.0
        assert math.exp(series_log) == pytest.approx(want, rel=1e-5)

    def test_remainder_certified_small(self, result):
        _, cert = result
        assert cert.remainder_ratio < 0.01

    def test_step_checks_pass(self, result):
        _, cert = result
        assert cert.passed
        assert len(cert.step_checks) > 0
        assert all(s.ok for s in cert.step_checks)

    def test_degenerate_discount_split(self):
        half = RiskModelSpec(Z_law=PARETO1, Y_law=Degenerate(0.5))
        series_log, cert = infinite_lower_bound(half, 50.0, lam=2.0,
                                                epsilon=0.05)
        assert cert.p_mass == 1.0 and cert.q_mass == 0.0
        assert cert.factor == pytest.approx(cert.a_estimate + 0.05,
                                            abs=1e-12)
        want = (1.0 - 2.0 ** -cert.i_star) / 50.0
        assert math.exp(series_log) == pytest.approx(want, rel=1e-9)


class TestLowerBoundRefusals:
    def test_light_tailed_loss(self):
        with pytest.raises(ParameterError) as e:
            infinite_lower_bound(RiskModelSpec(Z_law=Exponential(1.0),
                                               Y_law=UNI), 20.0)
        assert e.value.param == "Z_law"

    def test_unit_discounts(self, deg1_model):
        with pytest.raises(ParameterError) as e:
            infinite_lower_bound(deg1_model, 50.0)
        assert e.value.param == "Y_law"

    def test_discounts_above_one(self):
        with pytest.raises(ParameterError) as e:
            infinite_lower_bound(RiskModelSpec(Z_law=PARETO1,
                                               Y_law=UniformLaw(2.0)), 50.0)
        assert "(0, 1]" in str(e.value)

    def test_slack_too_large(self, fixture):
        with pytest.raises(ParameterError) as e:
            infinite_lower_bound(fixture, 50.0, epsilon=0.6)
        assert "epsilon" in str(e.value)

    def test_bounded_loss_handled(self):
        # a bounded loss law either refuses the membership gate or
        # returns an exactly-zero series; both are sound
        bounded = RiskModelSpec(Z_law=UniformLaw(1.0), Y_law=UNI)
        try:
            series_log, _ = infinite_lower_bound(bounded, 10.0)
            assert series_log == LOG_ZERO
        except ParameterError as e:
            assert e.param == "Z_law"


class TestPreconditions:
    def test_fixture_evidence_agrees(self, fixture):
        pre = asymptotic_preconditions(fixture)
        v = pre["product_subexp"]
        assert v.status == "OK"
        assert v.predicted_member is True
        assert v.agreement == "agree"
        assert pre["EQ11"].overall == "HOLDS_EVIDENCE"
