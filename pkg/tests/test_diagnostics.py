import json
import math

import numpy as np
import pytest

from tailkit.diagnostics import (
    CLASS_IDS,
    CONDITION_IDS,
    VerdictThresholds,
    build_insensitivity,
    check_condition,
    classify,
    knot_probe_grid,
    product_subexp_verdict,
    ratio_curve,
)
from tailkit.distributions import (
    Degenerate,
    Example31F,
    Exponential,
    KnotChainTail,
    LatticePower,
    ParameterError,
    RegVar,
    UniformLaw,
    WeibullType,
    scale,
)
from tailkit.grids import GeometricGrid
from tailkit.reports import render_json

EXP1 = Exponential(1.0)
RV2 = RegVar(2.0, 1.0)
LAT3 = LatticePower(3.0)
WB = WeibullType(0.5)
UNI = UniformLaw(1.0)
E31F = Example31F(1.5)
E31G = KnotChainTail(1.5, 9.0)


class TestRatioCurve:
    def test_exponential_shift_ratio(self):
        rc = ratio_curve(lambda u: EXP1.log_sf(u - 1.0), EXP1, None)
        assert np.allclose(rc.ratios, math.e, rtol=1e-12)
        assert rc.verdict.kind == "CONVERGES_TO"
        assert abs(rc.verdict.value - math.e) < 1e-9

    def test_identical_evaluators(self):
        rc = ratio_curve(EXP1, EXP1, None)
        assert rc.verdict.kind == "CONVERGES_TO"
        assert abs(rc.verdict.value - 1.0) < 1e-12

    def test_dead_denominator_drops_points(self):
        rc = ratio_curve(UNI, UNI, np.linspace(0.5, 2.0, 40))
        assert rc.dropped > 0
        assert rc.verdict.kind == "INCONCLUSIVE"


class TestClassify:
    def test_exponential_shift_class(self):
        diag = classify(EXP1, "L_gamma")
        assert diag.member is True
        assert diag.estimates["gamma"] == pytest.approx(1.0, abs=1e-12)

    def test_regvar_shift_class_flat(self):
        diag = classify(RV2, "L_gamma")
        assert abs(diag.estimates["gamma"]) < 1e-6

    def test_lattice_uses_span_shifts(self):
        diag = classify(LAT3, "L_gamma")
        assert diag.member is True
        assert abs(diag.estimates["gamma"]) < 1e-3

    def test_regvar_scaling_index(self):
        diag = classify(RV2, "R")
        assert diag.member is True
        assert diag.estimates["alpha"] == pytest.approx(2.0, abs=1e-9)

    def test_regvar_halving_bound(self):
        diag = classify(RV2, "D")
        assert diag.member is True
        assert diag.estimates["bound"] == pytest.approx(4.0, abs=1e-9)

    def test_stretched_tail_rejected_from_scaling_classes(self):
        assert classify(WB, "R").member is False
        assert classify(WB, "D").member is False

    def test_pareto_sum_ratio_limit(self):
        diag = classify(RegVar(1.0, 1.0), "S",
                        GeometricGrid(x0=10.0, ratio=1.3, count=28))
        assert diag.member is True
        assert diag.estimates["limit"] == pytest.approx(2.0, abs=0.05)

    def test_exponential_sum_ratio_diverges(self):
        diag = classify(EXP1, "S", GeometricGrid(x0=2.0, ratio=1.35,
                                                 count=24))
        assert diag.member is False
        assert diag.verdict.kind == "DIVERGES"

    def test_regvar_tail_halving_class(self):
        diag = classify(RV2, "A")
        assert diag.member is True
        assert diag.estimates["limsup_2x"] == pytest.approx(0.25, abs=1e-9)

    @pytest.mark.parametrize("cid", ["R", "D", "L_gamma"])
    @pytest.mark.parametrize("c", [0.5, 2.0])
    def test_scale_invariance(self, cid, c):
        base = classify(RV2, cid)
        other = classify(scale(RV2, c), cid)
        assert base.member == other.member
        assert base.verdict.kind == other.verdict.kind

    def test_unknown_class_rejected(self):
        with pytest.raises(ParameterError):
            classify(RV2, "Z")
        assert "Z" not in CLASS_IDS


class TestIncrementCondition:
    def test_lattice_exponential_holds(self):
        rep = check_condition("EQ12", LAT3, EXP1,
                              {"d": (1.0, 2.0, 3.0), "loc_ceiling": 0.0})
        assert rep.overall == "HOLDS_EVIDENCE"

    def test_ratio_value_at_fifty(self):
        # increment of the factor law over the product tail; value frozen
        # from direct summation of the lattice series
        grid = 50.0 * 1.5 ** np.arange(-10, 30)
        rep = check_condition("EQ12", LAT3, EXP1,
                              {"d": (1.0,), "loc_ceiling": 0.0}, grid)
        c = rep.parameter_evidence["d=1"]
        at50 = float(np.exp(c.log_ratios[np.argmin(np.abs(c.x_grid - 50.0))]))
        assert at50 == pytest.approx(3.6638767438999594e-19, rel=1e-6)

    def test_vacuous_for_continuous_law(self):
        rep = check_condition("EQ12", RV2, EXP1)
        assert rep.overall == "HOLDS_EVIDENCE"
        assert not rep.parameter_evidence
        assert rep.notes


class TestDominanceConditions:
    def test_degenerate_scale_identity(self):
        rep = check_condition("EQ13", RV2, Degenerate(1.0))
        c = rep.parameter_evidence["t=1"]
        assert np.allclose(c.ratios, 1.0, rtol=1e-12)
        assert rep.overall == "HOLDS_EVIDENCE"

    def test_bounded_factor_makes_growth_trivial(self):
        rep = check_condition("T1A_D", RV2, UNI)
        assert rep.overall == "HOLDS_EVIDENCE"

    def test_atomless_factor_rejected_for_atom_condition(self):
        with pytest.raises(ParameterError):
            check_condition("EQ14", RV2, EXP1)


class TestKnotChainRefutation:
    def test_single_scale_fails(self):
        kg = knot_probe_grid(E31G)
        rep = check_condition("EQ11", E31F, E31G, {"b": (1.0,)}, kg)
        c = rep.parameter_evidence["b=1"]
        tail_ratio = np.exp(
            c.log_ratios[np.isin(c.x_grid, E31G.chain_knots())])
        assert abs(tail_ratio[-1] - 1.0) < 1e-3
        assert rep.overall == "FAILS_EVIDENCE"

    def test_default_scales_fail(self):
        kg = knot_probe_grid(E31G)
        rep = check_condition("EQ11", E31F, E31G, None, kg)
        assert rep.overall == "FAILS_EVIDENCE"

    def test_knot_ratio_identity(self):
        # below 2^52 the unit shift is exactly representable, so the
        # piecewise-linear descent gives the ratio 2 - 1/x_n exactly
        kn = E31G.chain_knots()
        kn = kn[(kn > 10.0) & (kn < 2.0 ** 52)]
        rc = ratio_curve(lambda u: E31G.log_sf(u - 1.0), E31G, 2.0 * kn)
        expect = 2.0 - 1.0 / kn
        assert np.allclose(rc.ratios, expect, rtol=1e-12)
        assert not (rc.verdict.kind == "CONVERGES_TO"
                    and abs(rc.verdict.value - 1.0) < 0.05)


@pytest.fixture(scope="module")
def weibull_t32():
    return check_condition("T32", WB, WB)


class TestGrowthConditions:
    def test_weibull_pair_holds(self, weibull_t32):
        assert weibull_t32.overall == "HOLDS_EVIDENCE"

    def test_fast_probe_is_controlled(self, weibull_t32):
        c = weibull_t32.parameter_evidence["a=x^0.75 | G(a(x))/H(x)"]
        assert c.verdict.kind in ("VANISHES", "BOUNDED", "CONVERGES_TO")

    def test_slow_probe_diverges(self, weibull_t32):
        c = weibull_t32.parameter_evidence["a=x^0.25 | G(a(x))/H(x)"]
        assert c.verdict.kind == "DIVERGES"

    def test_shift_curve_converges_to_one(self, weibull_t32):
        c = weibull_t32.parameter_evidence["F(x-1/x)/F(x)"]
        assert c.verdict.kind == "CONVERGES_TO"
        assert abs(c.verdict.value - 1.0) < 1e-3

    def test_scaled_variant_fails(self):
        rep = check_condition("T31", WB, WB)
        assert rep.overall == "FAILS_EVIDENCE"


class TestInsensitivity:
    def test_closed_form_value(self):
        grid = np.unique(np.concatenate([GeometricGrid().values(), [100.0]]))
        a_fn = build_insensitivity(RV2, 0.01, grid)
        # delta-matched shift for a pure power tail: x (1 - (1+delta)^(-1/2))
        assert a_fn(100.0) == pytest.approx(0.4962809790010847, abs=1e-6)

    def test_shape_invariants(self):
        grid = GeometricGrid().values()
        a_fn = build_insensitivity(RV2, 0.01, grid)
        av = a_fn(grid)
        assert np.all(np.diff(av) >= -1e-12)
        assert np.all(np.diff(av / grid) <= 1e-15)
        assert np.all(av <= np.sqrt(grid) * (1 + 1e-12))
        ratios = np.exp(RV2.log_sf(grid - av) - RV2.log_sf(grid))
        assert np.all(ratios <= 1.01 + 1e-9)

    def test_off_grid_invariants(self):
        a_fn = build_insensitivity(RV2, 0.01)
        xs = np.exp(np.linspace(0.0, 25.0, 400))
        av = a_fn(xs)
        assert np.all(np.diff(av) >= -1e-12)
        assert np.all(np.diff(av / xs) <= 1e-15)

    def test_refuses_exponential_decay(self):
        with pytest.raises(ParameterError) as e:
            build_insensitivity(EXP1, 0.01)
        assert "gamma" in str(e.value)


class TestSubexpVerdict:
    def test_degenerate_factor_branch(self):
        v = product_subexp_verdict(RV2, Degenerate(2.0))
        assert v.status == "OK"
        assert v.predicted_member is True
        assert v.agreement == "agree"

    def test_lattice_increment_branch(self):
        v = product_subexp_verdict(LAT3, EXP1)
        assert v.status == "OK"
        assert v.predicted_member is True
        assert v.eq12 is not None
        assert v.eq12.overall == "HOLDS_EVIDENCE"
        assert v.agreement == "agree"

    def test_continuous_branch(self):
        v = product_subexp_verdict(RV2, E31G)
        assert v.status == "OK"
        assert v.predicted_member is True
        assert v.agreement == "agree"

    def test_refused_without_premise(self):
        v = product_subexp_verdict(EXP1, UNI,
                                   GeometricGrid(x0=2.0, ratio=1.35,
                                                 count=24))
        assert v.status == "REFUSED"
        assert v.premise.member is False

    def test_report_serializes(self):
        v = product_subexp_verdict(RV2, Degenerate(2.0))
        text = render_json(v.to_dict())
        back = json.loads(text)
        assert back["status"] == "OK"
        assert back["predicted_member"] is True


class TestThresholdStability:
    def test_window_shrink_never_flips_holds_to_fails(self):
        outcomes = []
        for w in (8, 6, 5, 4, 3):
            th = VerdictThresholds(window=w)
            rep = check_condition("EQ12", LAT3, EXP1,
                                  {"d": (1.0,), "loc_ceiling": 0.0},
                                  thresholds=th)
            outcomes.append(rep.overall)
        for a, b in zip(outcomes, outcomes[1:]):
            assert not (a == "HOLDS_EVIDENCE" and b == "FAILS_EVIDENCE")

    def test_condition_ids_stable(self):
        assert CONDITION_IDS == ("EQ11", "EQ12", "EQ13", "EQ14",
                                 "T1A_D", "T31", "T32")
        assert CLASS_IDS == ("L_gamma", "S", "D", "R", "A")
