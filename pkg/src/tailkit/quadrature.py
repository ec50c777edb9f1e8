"""Adaptive panel quadrature carried out entirely in log space.

Tail probabilities routinely live far below the smallest positive double
(survival values like exp(-2000)), so integrands here are callables that
return natural logs and the integral itself is returned as a log.  Each
panel is evaluated with the 15-point Gauss-Kronrod rule; the embedded
7-point Gauss value supplies the error indicator.  Panel sums use a
running-maximum rescale so nothing is exponentiated below the rescaled
range.

Panels whose indicated error exceeds their share of the tolerance are
bisected, all active panels in one vectorized sweep, until the summed
indicator falls under ``rel_tol`` times the integral estimate or the
panel budget runs out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LOG_ZERO = float("-inf")

# 15-point Kronrod abscissae (ascending) with the embedded 7-point Gauss
# rule on the odd indices.  Standard constants.
_XGK_HALF = np.array(
    [
        0.991455371120813,
        0.949107912342759,
        0.864864423359769,
        0.741531185599394,
        0.586087235467691,
        0.405845151377397,
        0.207784955007898,
    ]
)
XGK = np.concatenate([-_XGK_HALF, [0.0], _XGK_HALF[::-1]])

_WGK_HALF = np.array(
    [
        0.022935322010529,
        0.063092092629979,
        0.104790010322250,
        0.140653259715525,
        0.169004726639267,
        0.190350578064785,
        0.204432940075298,
    ]
)
WGK = np.concatenate([_WGK_HALF, [0.209482141084728], _WGK_HALF[::-1]])

GAUSS_IDX = np.array([1, 3, 5, 7, 9, 11, 13])
_WG_HALF = np.array([0.129484966168870, 0.279705391489277, 0.381830050505119])
WG = np.concatenate([_WG_HALF, [0.417959183673469], _WG_HALF[::-1]])

LOG_WGK = np.log(WGK)
LOG_WG = np.log(WG)


@dataclass(frozen=True)
class QuadratureSpec:
    """Accuracy controls shared by every integral in the package.

    rel_tol: target relative error of the returned value.
    max_panels: hard cap on Gauss-Kronrod panels per integral.
    truncation_tail: survival mass at which an unbounded integration
        domain is initially cut; the neglected-mass bound is checked
        against rel_tol and the domain extended if it is not small
        enough, so this only sets the starting window.
    """

    rel_tol: float = 1e-8
    max_panels: int = 1 << 16
    truncation_tail: float = 1e-16

    def __post_init__(self) -> None:
        if not (0 < self.rel_tol < 1):
            raise ValueError("rel_tol must lie in (0, 1)")
        if self.max_panels < 4:
            raise ValueError("max_panels must be at least 4")
        if not (0 < self.truncation_tail < 1):
            raise ValueError("truncation_tail must lie in (0, 1)")


class QuadratureError(ArithmeticError):
    """Raised when the panel budget is exhausted before convergence.

    Carries the partial estimate (log space) and the achieved relative
    error bound so callers can report or salvage the partial result.
    """

    def __init__(self, message: str, partial_log: float = LOG_ZERO,
                 achieved_rel: float = float("inf")):
        super().__init__(message)
        self.partial_log = partial_log
        self.achieved_rel = achieved_rel


def logsumexp_pair(a: float, b: float) -> float:
    """Stable log(exp(a) + exp(b)) for two scalars."""
    if a == LOG_ZERO:
        return b
    if b == LOG_ZERO:
        return a
    m = max(a, b)
    return m + np.log(np.exp(a - m) + np.exp(b - m))


def logsumexp_all(values) -> float:
    vals = np.asarray(values, dtype=float)
    vals = vals[np.isfinite(vals) | (vals == np.inf)]
    if vals.size == 0:
        return LOG_ZERO
    m = np.max(vals)
    if m == LOG_ZERO or not np.isfinite(m):
        return float(m)
    return float(m + np.log(np.sum(np.exp(vals - m))))


def log_diff_exp(a: float, b: float) -> float:
    """Stable log(exp(a) - exp(b)) for a >= b; LOG_ZERO when they coincide."""
    if b == LOG_ZERO:
        return a
    if b >= a:
        return LOG_ZERO
    return a + np.log1p(-np.exp(b - a))


def _panel_sums(lf: np.ndarray, log_h: np.ndarray):
    """Kronrod and Gauss panel sums from node log-values.

    Returns (log_integral, log_error) per panel, where the error is the
    absolute Kronrod-Gauss difference.
    """
    lw = lf + LOG_WGK
    m = np.max(lw, axis=1)
    finite = m > LOG_ZERO
    log_i = np.full(lf.shape[0], LOG_ZERO)
    log_e = np.full(lf.shape[0], LOG_ZERO)
    if np.any(finite):
        mf = m[finite]
        sk = np.sum(np.exp(lw[finite] - mf[:, None]), axis=1)
        lg = lf[finite][:, GAUSS_IDX] + LOG_WG
        sg = np.sum(np.exp(lg - mf[:, None]), axis=1)
        log_i[finite] = mf + np.log(sk) + log_h[finite]
        diff = np.abs(sk - sg)
        with np.errstate(divide="ignore"):
            log_e[finite] = np.where(
                diff > 0, mf + np.log(np.where(diff > 0, diff, 1.0)) + log_h[finite],
                LOG_ZERO,
            )
    return log_i, log_e


def log_quad(log_f, lo: float, hi: float, *, breakpoints=(),
             rel_tol: float = 1e-8, max_panels: int = 1 << 16):
    """log of the integral of exp(log_f) over [lo, hi].

    Args:
        log_f: vectorized callable mapping an ndarray of abscissae to the
            log integrand (-inf where the integrand vanishes).
        lo, hi: integration limits, lo < hi required for a nonzero result.
        breakpoints: interior points where the integrand kinks; panels
            never straddle them.
        rel_tol: relative tolerance on the summed error indicator.
        max_panels: panel budget; exceeding it raises QuadratureError.

    Returns:
        (log_integral, log_error_bound) pair of floats.
    """
    if not hi > lo:
        return LOG_ZERO, LOG_ZERO
    pts = np.asarray([p for p in breakpoints if lo < p < hi], dtype=float)
    edges = np.unique(np.concatenate([[lo, hi], pts]))
    a = edges[:-1]
    b = edges[1:]
    keep = b > a
    a, b = a[keep], b[keep]

    prev_err = np.inf
    stall = 0
    for _ in range(200):
        h = 0.5 * (b - a)
        c = 0.5 * (a + b)
        nodes = c[:, None] + h[:, None] * XGK[None, :]
        with np.errstate(divide="ignore", invalid="ignore", over="ignore",
                         under="ignore"):
            lf = np.asarray(log_f(nodes.reshape(-1)), dtype=float)
        lf = lf.reshape(nodes.shape)
        lf[np.isnan(lf)] = LOG_ZERO
        with np.errstate(divide="ignore"):
            log_h = np.log(h)
        log_i, log_e = _panel_sums(lf, log_h)

        total = logsumexp_all(log_i)
        err = logsumexp_all(log_e)
        target = total + np.log(rel_tol) if total > LOG_ZERO else LOG_ZERO
        if err <= target or err == LOG_ZERO:
            return total, err
        if total == LOG_ZERO:
            # Nothing found anywhere; refining cannot help a truly zero
            # integrand, and knot breakpoints guard against missed spikes.
            return LOG_ZERO, err

        # Split every panel holding more than its share of the error,
        # except panels already at the floating-point resolution floor:
        # splitting those cannot move any node.
        thresh = target - np.log(2.0 * len(a))
        width_floor = 2.0 ** -44 * np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
        splittable = (b - a) > width_floor
        split = (log_e > thresh) & splittable
        if not np.any(split):
            if not np.any(splittable & (log_e > LOG_ZERO)):
                # Every failing panel is resolution-limited; the indicator
                # is as honest as double precision allows.
                return total, err
            split = (splittable & (log_e > LOG_ZERO)
                     & (log_e >= np.max(log_e[splittable]) - 1e-9))
            if not np.any(split):
                return total, err
        n_new = len(a) + int(np.sum(split))
        if n_new > max_panels:
            raise QuadratureError(
                "panel budget exhausted before reaching the requested "
                f"tolerance (panels={len(a)}, rel err ~ {np.exp(min(err - total, 50.0)):.3e})",
                partial_log=total,
                achieved_rel=float(np.exp(min(err - total, 50.0))),
            )
        mid = c[split]
        a = np.sort(np.concatenate([a, mid]))
        b = np.sort(np.concatenate([b, mid]))

        if err >= prev_err - 1e-12:
            stall += 1
            if stall >= 8:
                # Round-off floor: indicator is no longer improving.
                return total, err
        else:
            stall = 0
        prev_err = err

    return total, err
