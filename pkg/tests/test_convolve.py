import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tailkit.convolve import (
    GridSpec,
    mc_product_tail,
    product_dist,
    product_tail,
    sum_self_tail,
)
from tailkit.distributions import (
    Degenerate,
    Example31F,
    Exponential,
    FiniteAtomic,
    KnotChainTail,
    LatticePower,
    RegVar,
    UniformLaw,
    WeibullType,
    scale,
)
from tailkit.quadrature import LOG_ZERO, logsumexp_all

PARETO1 = RegVar(1.0, 1.0)
UNI = UniformLaw(1.0)
EXP1 = Exponential(1.0)


def rel_log(got, want_log):
    """Linear-space relative error of two log values."""
    return abs(math.expm1(got - want_log))


class TestProductClosedForms:
    @pytest.mark.parametrize("x", [1.0, 10.0, 1e4])
    def test_pareto_uniform(self, x):
        # P(X U > x) = E[U]/x = 1/(2x) once x is past the support edge
        got = product_tail(PARETO1, UNI, x)
        assert rel_log(got, math.log(1 / (2 * x))) < 1e-8

    def test_argument_order_symmetric(self):
        got = product_tail(UNI, PARETO1, 100.0)
        assert rel_log(got, math.log(1 / 200.0)) < 1e-8

    @pytest.mark.parametrize("t,want_log", [
        (0.25, -0.907761187781382),
        (0.5, -1.8745342424159488),
        (0.9, -5.263812388099362),
    ])
    def test_uniform_uniform(self, t, want_log):
        # P(U1 U2 > t) = 1 - t + t ln t
        assert rel_log(product_tail(UNI, UNI, t), want_log) < 1e-8

    @pytest.mark.parametrize("x,want_log", [
        (1.0, -1.2739241220005684),
        (20.0, -7.58318983651875),
    ])
    def test_exp_exp_bessel(self, x, want_log):
        # 2 sqrt(x) K_1(2 sqrt(x)), frozen from scipy.special.kv
        assert rel_log(product_tail(EXP1, EXP1, x), want_log) < 1e-7


class TestDegenerateShortcuts:
    def test_exact_reduction(self):
        got = product_tail(PARETO1, Degenerate(3.0), 12.0)
        assert got == PARETO1.log_sf(4.0)
        got = product_tail(Degenerate(0.5), EXP1, 4.0)
        assert got == EXP1.log_sf(8.0)

    def test_scale_wrapper_reduction(self):
        got = product_tail(scale(PARETO1, 2.0), UNI, 50.0)
        want = product_tail(PARETO1, UNI, 25.0)
        assert rel_log(got, want) < 1e-12

    @settings(max_examples=60, deadline=None)
    @given(c=st.floats(min_value=1e-3, max_value=1e3),
           x=st.floats(min_value=1e-2, max_value=1e6))
    def test_degenerate_always_exact(self, c, x):
        for f in (PARETO1, EXP1, WeibullType(0.5)):
            assert product_tail(f, Degenerate(c), x) == f.log_sf(x / c)


class TestAtomicMeasures:
    def test_pareto_against_three_atoms(self):
        a = FiniteAtomic([1.0, 2.0, 4.0], [0.5, 0.25, 0.25])
        want = logsumexp_all([math.log(0.5) + PARETO1.log_sf(6.0),
                              math.log(0.25) + PARETO1.log_sf(3.0),
                              math.log(0.25) + PARETO1.log_sf(1.5)])
        assert rel_log(product_tail(PARETO1, a, 6.0), want) < 1e-14

    def test_atomic_atomic(self):
        a = FiniteAtomic([1.0, 2.0, 4.0], [0.5, 0.25, 0.25])
        total = 0.0
        for la, ma in ((1.0, 0.5), (2.0, 0.25), (4.0, 0.25)):
            for lb, mb in ((1.0, 0.5), (2.0, 0.25), (4.0, 0.25)):
                if la * lb > 4.0:
                    total += ma * mb
        assert rel_log(product_tail(a, a, 4.0), math.log(total)) < 1e-12


class TestWeibullPairs:
    def test_alpha_one_vs_bessel(self):
        w1 = WeibullType(1.0)
        assert rel_log(product_tail(w1, w1, 100.0),
                       -18.25804196681191) < 1e-7

    def test_alpha_three_halves_deep_tail(self):
        # frozen saddle-shifted numeric quadrature value at x = 1e4
        w = WeibullType(1.5)
        assert rel_log(product_tail(w, w, 1e4),
                       -1995.9735699644386) < 1e-5


class TestKnotChainMeasure:
    @pytest.mark.parametrize("x,want_log", [
        (50.0, -4.716124874653459),
        (1e4, -14.762311526793729),
        (3.5e7, -25.633400591011082),
    ])
    def test_exact_piecewise_oracle(self, x, want_log):
        # the tail law is piecewise linear, so the product tail has a
        # closed form per piece; values frozen from that formula
        got = product_tail(Example31F(1.5), KnotChainTail(1.5, 9.0), x)
        assert rel_log(got, want_log) < 5e-8


class TestLatticeMeasure:
    def test_exp_eval_side(self):
        got = product_tail(EXP1, LatticePower(3.0), 50.0)
        assert rel_log(got, -8.008080184980969) < 2e-8

    def test_pareto_eval_side(self):
        got = product_tail(PARETO1, LatticePower(3.0), 1e6)
        assert rel_log(got, -13.501844734848616) < 1e-8

    @pytest.mark.parametrize("x,want_log", [
        (1e6, -27.81505529132004),
        (1e8, -37.02539566329622),
    ])
    def test_exp_deep_lattice_tail(self, x, want_log):
        # frozen brute-force summation over the lattice atoms
        got = product_tail(EXP1, LatticePower(3.0), x)
        assert rel_log(got, want_log) < 1e-12

    def test_weibull_deep_lattice_tail(self):
        got = product_tail(WeibullType(0.5), LatticePower(3.0), 1e5)
        assert rel_log(got, -20.724978455543944) < 1e-12


class TestProductDist:
    def test_uniform_square_survival(self):
        gu = product_dist(UNI, UNI)
        for t in (0.01, 0.25, 0.7):
            want = math.log(1 - t + t * math.log(t))
            assert rel_log(float(gu.log_sf(t)), want) < 5e-7

    def test_iterated_uniform_tails(self):
        # E[prod of i uniforms] = 2^-i, read through a pareto eval side
        spec = GridSpec(nodes=1024, eps_lo=1e-5)
        w = None
        for i in range(1, 6):
            w = UNI if w is None else product_dist(w, UNI, spec)
            got = product_tail(PARETO1, w, 50.0)
            assert rel_log(got, math.log(2.0 ** -i / 50.0)) < 1e-6, i

    def test_gridded_as_eval_side(self):
        h = product_dist(PARETO1, UNI)
        got = product_tail(h, UNI, 30.0)
        assert rel_log(got, math.log(1 / 120.0)) < 1e-5

    def test_degenerate_factor_reproduces_scaling(self):
        gd = product_dist(Degenerate(2.0), PARETO1)
        for x in (3.0, 40.0):
            assert rel_log(float(gd.log_sf(x)), PARETO1.log_sf(x / 2.0)) < 1e-6

    def test_round_trips(self):
        gu = product_dist(UNI, UNI)
        inv = gu.inverse_log_sf(float(gu.log_sf(0.3)))
        assert abs(inv - 0.3) < 1e-6
        s = gu.sample(200, seed=3)
        assert np.all((s > 0) & (s <= 1.0 + 1e-12))

    def test_mass_accounting(self):
        # continuous mass + head/tail atoms must total one
        from scipy.integrate import quad
        gu = product_dist(UNI, UNI)
        edges = gu.grid_nodes()
        m = sum(quad(lambda t: math.exp(gu.log_density(t)), a, b,
                     limit=30)[0]
                for a, b in zip(edges[:-1], edges[1:]))
        head = gu.head_atom()
        tail = gu.tail_atom()
        acc = m + (math.exp(head[1]) if head else 0.0) + \
            (math.exp(tail[1]) if tail else 0.0)
        assert acc == pytest.approx(1.0, rel=1e-7)


class TestSelfSums:
    @pytest.mark.parametrize("x", [1.0, 10.0, 40.0])
    def test_erlang_two(self, x):
        want = math.log(math.exp(-x) * (1.0 + x))
        assert rel_log(sum_self_tail(EXP1, 2, x), want) < 1e-8

    @pytest.mark.parametrize("x", [5.0, 30.0])
    def test_erlang_three(self, x):
        want = math.log(math.exp(-x) * (1.0 + x + x * x / 2.0))
        assert rel_log(sum_self_tail(EXP1, 3, x), want) < 5e-7

    def test_erlang_five(self):
        x = 12.0
        want = math.exp(-x) * sum(x ** j / math.factorial(j)
                                  for j in range(5))
        assert rel_log(sum_self_tail(EXP1, 5, x), math.log(want)) < 1e-6

    def test_pareto_pair(self):
        # frozen numeric value of P(X1 + X2 > 25) for survival 1/x
        assert rel_log(sum_self_tail(PARETO1, 2, 25.0),
                       -2.4060610271792475) < 1e-7

    def test_irwin_hall(self):
        assert rel_log(sum_self_tail(UNI, 3, 2.0), math.log(1 / 6.0)) < 2e-6
        assert rel_log(sum_self_tail(UNI, 2, 1.5), math.log(0.125)) < 1e-7

    def test_lattice_pair(self):
        # frozen zeta-weighted double sum at a half-integer level
        assert rel_log(sum_self_tail(LatticePower(3.0), 2, 9.5),
                       -4.386301488013766) < 1e-9

    def test_degenerate_steps(self):
        assert sum_self_tail(Degenerate(2.0), 4, 7.9) == 0.0
        assert sum_self_tail(Degenerate(2.0), 4, 8.0) == LOG_ZERO

    @pytest.mark.parametrize("x", [5.0, 50.0])
    def test_inclusion_exclusion_bounds(self, x):
        two = sum_self_tail(PARETO1, 2, x)
        one = PARETO1.log_sf(x)
        lb = math.log(2.0 * math.exp(one) - math.exp(one) ** 2)
        assert two >= lb - 1e-9
        assert two >= one


class TestMonteCarlo:
    def test_agrees_with_closed_form(self):
        p, half = mc_product_tail(PARETO1, UNI, 8.0, 10 ** 5, seed=7)
        assert abs(p - 1 / 16.0) < 4.0 * half + 1e-12

    def test_seed_determinism(self):
        a = mc_product_tail(PARETO1, UNI, 8.0, 10 ** 5, seed=7)
        b = mc_product_tail(PARETO1, UNI, 8.0, 10 ** 5, seed=7)
        assert a == b

    def test_zero_hits_bounded_upward(self):
        p, up = mc_product_tail(Degenerate(0.5), UNI, 2.0, 1000, seed=1)
        assert p == 0.0
        assert 0.0028 < up < 0.0031
