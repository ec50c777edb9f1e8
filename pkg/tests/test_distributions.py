import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from tailkit.distributions import (
    Degenerate,
    Example31F,
    Exponential,
    FiniteAtomic,
    KnotChainTail,
    LatticePower,
    ParameterError,
    RegVar,
    UniformLaw,
    WeibullType,
    make_family,
    positive_part,
    scale,
    shift,
)

ZETA3 = special.zeta(3.0)


class TestClosedForms:
    def test_regvar(self):
        rv = RegVar(1.0, 1.0)
        assert rv.sf(2.0) == pytest.approx(0.5, abs=1e-15)
        assert rv.sf(0.5) == 1.0
        assert rv.atoms() == []

    def test_regvar_two(self):
        rv = RegVar(2.0, 1.0)
        assert rv.log_sf(10.0) == pytest.approx(-2.0 * math.log(10.0))

    def test_weibull(self):
        assert WeibullType(2.0).log_sf(3.0) == -9.0
        assert WeibullType(0.5).log_sf(4.0) == -2.0

    def test_exponential(self):
        assert Exponential(1.0).log_sf(10.0) == -10.0
        assert Exponential(2.0).log_sf(3.0) == -6.0

    def test_degenerate_steps(self):
        d = Degenerate(2.0)
        assert d.log_sf(1.9) == 0.0
        assert d.log_sf(2.0) == -math.inf

    def test_uniform(self):
        u = UniformLaw(1.0)
        assert u.sf(0.25) == pytest.approx(0.75)
        assert u.log_sf(1.0) == -math.inf
        assert u.sf(0.0) == 1.0

    def test_finite_atomic(self):
        a = FiniteAtomic([1.0, 2.0, 5.0], [0.2, 0.3, 0.5])
        assert a.sf(1.5) == pytest.approx(0.8)
        assert a.sf(4.9) == pytest.approx(0.5)
        assert a.sf(5.0) == 0.0


class TestKnotChain:
    """Alternating descent/flat tail whose pieces have exact values."""

    def test_piece_values(self):
        g = KnotChainTail(1.0, 5.0)
        assert g.sf(5.0) == pytest.approx(0.2, abs=1e-15)
        assert g.sf(10.0) == pytest.approx(0.04, abs=1e-15)
        assert g.sf(7.5) == pytest.approx(0.12, abs=1e-15)
        assert g.sf(0.0) == 1.0
        assert g.sf(2.5) == pytest.approx(1 + (5 ** -2 - 5 ** -1) * 2.5,
                                          abs=1e-15)

    def test_knot_recursion(self):
        g = KnotChainTail(1.5, 9.0)
        kx = g.chain_knots()
        np.testing.assert_allclose(np.log(kx[1:]),
                                   (1 + 1 / 1.5) * np.log(kx[:-1]),
                                   rtol=1e-14)
        assert np.all(kx[1:] > 4 * kx[:-1])

    def test_descent_ratio_identity(self):
        # survival drops linearly on [x_n, 2 x_n], so the unit-shift ratio
        # at 2 x_n is exactly 2 - 1/x_n
        g = KnotChainTail(1.5, 9.0)
        kx = g.chain_knots()[:6]
        r = np.exp(g.log_sf(2 * kx - 1) - g.log_sf(2 * kx))
        np.testing.assert_allclose(r, 2 - 1 / kx, rtol=1e-9)

    def test_deep_tail_stays_finite(self):
        v = KnotChainTail(1.5, 9.0).log_sf(1e300)
        assert math.isfinite(v) and v < -300


class TestLattice:
    def test_atom_masses(self):
        lp = LatticePower(3.0)
        ats = lp.atoms(mass_floor=1e-6)
        assert ats[0][1] == pytest.approx(1 / ZETA3, abs=1e-12)
        assert ats[4][1] == pytest.approx(5.0 ** -3 / ZETA3, abs=1e-15)
        assert 90 <= len(ats) <= 100

    def test_survival_consistency(self):
        lp = LatticePower(3.0)
        assert lp.sf(1.0) == pytest.approx(1 - 1 / ZETA3, abs=1e-12)
        assert lp.sf(0.5) == 1.0
        s = sum(m for _, m in lp.atoms(mass_floor=0, loc_ceiling=3))
        assert lp.sf(3.7) == pytest.approx(1 - s, abs=1e-12)

    def test_deep_tail_matches_hurwitz(self):
        lp = LatticePower(3.0)
        m = np.array([9.9e7, 1.1e8, 1e9])
        direct = np.log(special.zeta(3.0, m))
        assert np.allclose(direct, lp._log_hurwitz(m), rtol=1e-13)


class TestWrappers:
    def test_scale(self):
        sc = scale(Exponential(1.0), 2.0)
        assert sc.log_sf(4.0) == pytest.approx(-2.0, abs=1e-15)
        sc2 = scale(RegVar(1.0, 1.0), 3.0)
        assert sc2.sf(6.0) == pytest.approx(0.5, abs=1e-15)

    def test_positive_part_of_shifted(self):
        z = shift(RegVar(2.0, 1.0), -2.0)
        zp = positive_part(z)
        assert zp.mass_at_zero == pytest.approx(0.75, abs=1e-12)
        assert zp.sf(3.0) == pytest.approx(5.0 ** -2.0, abs=1e-15)
        assert zp.sf(-1.0) == 1.0

    def test_positive_part_noop_for_positive_support(self):
        rv = RegVar(1.0, 1.0)
        assert positive_part(rv) is rv

    def test_scale_validation(self):
        with pytest.raises(ParameterError):
            scale(Exponential(1.0), 0.0)
        with pytest.raises(ParameterError):
            scale(Exponential(1.0), -1.0)


class TestInverse:
    DISTS = [RegVar(1.0, 1.0), WeibullType(2.0), Exponential(1.0),
             UniformLaw(1.0), KnotChainTail(1.0, 5.0),
             KnotChainTail(1.5, 9.0), LatticePower(3.0),
             FiniteAtomic([1, 2, 5], [0.2, 0.3, 0.5])]

    @pytest.mark.parametrize("dist", DISTS, ids=lambda d: repr(d))
    @pytest.mark.parametrize("level", [-0.5, -3.0, -20.0, -100.0])
    def test_round_trip(self, dist, level):
        x = dist.inverse_log_sf(level)
        if math.isinf(x):
            return
        v = dist.log_sf(x)
        before = dist.log_sf(x * (1 - 1e-9)) if x > 0 else 0.0
        assert (v <= level + 1e-9 and before >= level - 1e-6) or v == level


class TestSampling:
    def test_seed_determinism(self):
        rv = RegVar(1.0, 1.0)
        a = rv.sample(100, seed=5)
        b = rv.sample(100, seed=5)
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, rv.sample(100, seed=6))

    def test_means(self):
        xs = UniformLaw(1.0).sample(10 ** 5, seed=1)
        assert abs(xs.mean() - 0.5) < 0.005
        xs = Exponential(1.0).sample(10 ** 5, seed=1)
        assert abs(xs.mean() - 1.0) < 0.02

    def test_empirical_tail(self):
        xs = RegVar(1.0, 1.0).sample(10 ** 5, seed=2)
        assert abs((xs > 10).mean() - 0.1) < 4 * math.sqrt(0.09 / 1e5)

    def test_degenerate(self):
        assert np.all(Degenerate(2.0).sample(3, seed=0) == 2.0)

    def test_lattice_integer_support(self):
        xs = LatticePower(3.0).sample(10 ** 4, seed=4)
        assert np.all(xs == np.floor(xs))
        p = LatticePower(3.0).sf(4.0)
        assert abs((xs > 4).mean() - p) < 4 * math.sqrt(p * (1 - p) / 1e4)

    def test_knot_chain_tail_agreement(self):
        g = KnotChainTail(1.5, 9.0)
        xs = g.sample(10 ** 5, seed=3)
        grid = np.geomspace(0.5, 5e4, 50)
        emp = (xs[:, None] > grid[None, :]).mean(axis=0)
        theo = np.exp(g.log_sf(grid))
        bound = 5 * math.sqrt(math.log(2 / 1e-3) / (2e5))
        assert float(np.max(np.abs(emp - theo))) <= bound

    def test_positive_part_zero_mass(self):
        zp = positive_part(shift(RegVar(2.0, 1.0), -2.0))
        xs = zp.sample(10 ** 4, seed=5)
        assert abs((xs == 0).mean() - 0.75) < 0.02


class TestFamilySpecs:
    def test_scaled_round_trip(self):
        d = make_family({"family": "scaled", "c": 2.0,
                         "base": {"family": "regvar", "beta": 1.0}})
        assert d.sf(4.0) == pytest.approx(0.5, abs=1e-15)

    @pytest.mark.parametrize("spec", [
        {"family": "regvar", "beta": 2.0, "x_min": 1.0},
        {"family": "weibull_type", "alpha": 0.5},
        {"family": "exponential", "rate": 2.0},
        {"family": "uniform", "s": 1.0},
        {"family": "degenerate", "c": 3.0},
        {"family": "lattice_power", "beta": 3.0},
        {"family": "example31_G", "alpha": 1.5, "x1": 9.0},
        {"family": "example31_F", "alpha": 1.5},
        {"family": "finite_atomic", "locations": [1.0, 2.0],
         "masses": [0.5, 0.5]},
    ])
    def test_spec_reproduces_law(self, spec):
        d = make_family(spec)
        d2 = make_family(d.family_spec)
        xs = np.array([0.5, 1.0, 3.0, 17.0])
        np.testing.assert_array_equal(
            np.asarray(d.log_sf(xs), dtype=float),
            np.asarray(d2.log_sf(xs), dtype=float))

    def test_unknown_family(self):
        with pytest.raises(ParameterError) as e:
            make_family({"family": "nope"})
        assert e.value.param == "family"

    def test_missing_parameter(self):
        with pytest.raises(ParameterError) as e:
            make_family({"family": "regvar"})
        assert e.value.param == "beta"

    def test_extra_parameter_rejected(self):
        with pytest.raises(ParameterError) as e:
            make_family({"family": "regvar", "beta": 1.0, "bogus": 3})
        assert e.value.param == "bogus"

    def test_knot_spacing_validated(self):
        # the chain construction needs knots that at least double,
        # which fails for a too-small first knot
        with pytest.raises(ParameterError) as e:
            make_family({"family": "example31_G", "alpha": 1.0, "x1": 3.0})
        assert e.value.param == "x1"


class TestMonotonicity:
    DISTS = [RegVar(1.0, 1.0), WeibullType(2.0), Exponential(1.0),
             UniformLaw(2.0), KnotChainTail(1.5, 9.0), LatticePower(3.0),
             Degenerate(2.0), Example31F(1.5)]

    @pytest.mark.parametrize("dist", DISTS, ids=lambda d: repr(d))
    @settings(max_examples=25, deadline=None)
    @given(data=st.data())
    def test_log_sf_non_increasing(self, dist, data):
        xs = data.draw(st.lists(
            st.floats(min_value=0.0, max_value=50.0,
                      allow_nan=False), min_size=2, max_size=30))
        x = np.sort(np.asarray(xs))
        v = np.maximum(np.asarray(dist.log_sf(x), dtype=float), -1e308)
        assert np.all(np.diff(v) <= 1e-12)
