import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tailkit.quadrature import (
    LOG_ZERO,
    QuadratureError,
    QuadratureSpec,
    log_diff_exp,
    log_quad,
    logsumexp_all,
    logsumexp_pair,
)

finite_logs = st.floats(min_value=-600.0, max_value=600.0,
                        allow_nan=False, allow_infinity=False)


class TestLogSumExp:
    def test_pair_matches_direct(self):
        assert logsumexp_pair(0.0, 0.0) == pytest.approx(math.log(2.0))
        assert logsumexp_pair(-1.0, -3.0) == pytest.approx(
            math.log(math.exp(-1.0) + math.exp(-3.0)), rel=1e-14)

    def test_pair_handles_log_zero(self):
        assert logsumexp_pair(LOG_ZERO, -5.0) == -5.0
        assert logsumexp_pair(-5.0, LOG_ZERO) == -5.0
        assert logsumexp_pair(LOG_ZERO, LOG_ZERO) == LOG_ZERO

    def test_pair_far_apart_keeps_dominant(self):
        assert logsumexp_pair(-1000.0, 0.0) == pytest.approx(0.0, abs=1e-12)
        # no overflow at large magnitudes
        assert logsumexp_pair(-2000.0, -2000.0) == pytest.approx(
            -2000.0 + math.log(2.0), rel=1e-14)

    @given(finite_logs, finite_logs)
    def test_pair_properties(self, a, b):
        s = logsumexp_pair(a, b)
        assert s == logsumexp_pair(b, a)
        assert s >= max(a, b)
        assert s <= max(a, b) + math.log(2.0) + 1e-12

    def test_all_matches_pair_chain(self):
        vals = [-3.0, -1.0, -10.0, -0.5]
        want = vals[0]
        for v in vals[1:]:
            want = logsumexp_pair(want, v)
        assert logsumexp_all(vals) == pytest.approx(want, rel=1e-14)

    def test_all_empty_and_all_zero(self):
        assert logsumexp_all([]) == LOG_ZERO
        assert logsumexp_all([LOG_ZERO, LOG_ZERO]) == LOG_ZERO

    def test_diff_inverts_sum(self):
        a, b = -2.0, -4.0
        assert log_diff_exp(logsumexp_pair(a, b), b) == pytest.approx(
            a, rel=1e-12)

    def test_diff_edge_cases(self):
        assert log_diff_exp(-1.0, LOG_ZERO) == -1.0
        assert log_diff_exp(-1.0, -1.0) == LOG_ZERO
        assert log_diff_exp(-3.0, -1.0) == LOG_ZERO

    @given(finite_logs, finite_logs)
    def test_diff_roundtrip(self, a, b):
        big, small = max(a, b) + 1.0, min(a, b)
        back = log_diff_exp(logsumexp_pair(big, small), small)
        assert back == pytest.approx(big, rel=1e-9, abs=1e-9)


class TestLogQuad:
    def test_power_integral(self):
        # integral of x^2 over [0, 1] = 1/3
        val, err = log_quad(lambda x: 2.0 * np.log(x), 0.0, 1.0)
        assert val == pytest.approx(math.log(1.0 / 3.0), rel=1e-10)
        assert err <= val + math.log(1e-6)

    def test_exponential_integral(self):
        val, _ = log_quad(lambda x: -x, 0.0, 10.0)
        assert val == pytest.approx(math.log(-math.expm1(-10.0)), rel=1e-10)

    def test_shift_linearity(self):
        # scaling the integrand by e^c shifts the log integral by c
        base, _ = log_quad(lambda x: -x * x, 0.0, 3.0)
        shifted, _ = log_quad(lambda x: -x * x - 500.0, 0.0, 3.0)
        assert shifted == pytest.approx(base - 500.0, rel=1e-12)

    def test_deep_log_values(self):
        # gaussian mass far in the tail: integral over [20, 21] of e^{-x^2/2}
        from scipy.stats import norm
        val, _ = log_quad(lambda x: -0.5 * x * x - 0.5 * math.log(2 * math.pi),
                          20.0, 21.0)
        want = norm.sf(20.0) - norm.sf(21.0)
        assert val == pytest.approx(math.log(want), rel=1e-9)

    def test_breakpoints_respected(self):
        # integrand with a kink: |x - 0.5| to a negative power is easier
        # when the panel edges land on the kink
        def lf(x):
            return -np.abs(x - 0.5)
        val, _ = log_quad(lf, 0.0, 1.0, breakpoints=(0.5,))
        want = 2.0 * (1.0 - math.exp(-0.5))
        assert val == pytest.approx(math.log(want), rel=1e-10)

    def test_zero_integrand(self):
        val, err = log_quad(lambda x: np.full_like(x, LOG_ZERO), 0.0, 1.0)
        assert val == LOG_ZERO

    def test_budget_exhaustion_raises(self):
        # an endpoint singularity at an unreachable tolerance must raise,
        # and the error must carry the partial estimate
        with pytest.raises(QuadratureError) as info:
            log_quad(lambda x: -0.999 * np.log(x), 0.0, 1.0,
                     rel_tol=1e-14, max_panels=8)
        err = info.value
        assert math.isfinite(err.partial_log)
        assert err.achieved_rel > 1e-14


class TestQuadratureSpec:
    def test_defaults(self):
        q = QuadratureSpec()
        assert q.rel_tol == 1e-8
        assert q.max_panels == 1 << 16
        assert q.truncation_tail == 1e-16

    def test_validation(self):
        with pytest.raises(ValueError):
            QuadratureSpec(rel_tol=0.0)
        with pytest.raises(ValueError):
            QuadratureSpec(rel_tol=2.0)
