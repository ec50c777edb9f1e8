"""Discrete-time ruin analysis under stochastic discounting.

The model tracks an insurer whose period-i net loss Z_i (claims minus
premiums, real-valued) is discounted back to time zero by the running
product of per-period discount factors Y_j > 0:

    S_n = sum_{i<=n} Z_i * Y_1 * ... * Y_i.

Ruin by time n means max_{k<=n} S_k exceeds the initial wealth x.  The
module estimates that probability three ways: plain Monte Carlo over
simulated paths, a tail approximation summing the discounted single-loss
tails H_i, and, for the infinite horizon, a certified geometric lower
bound on the tail series.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .convolve import GridSpec, product_dist, product_tail
from .diagnostics import (
    ClassDiagnosis,
    VerdictThresholds,
    _auto_grid,
    check_condition,
    classify,
    product_subexp_verdict,
)
from .distributions import (
    Degenerate,
    HeavyTailDistribution,
    ParameterError,
    positive_part,
)
from .grids import as_grid_array
from .quadrature import LOG_ZERO, QuadratureError, QuadratureSpec, logsumexp_all

__all__ = [
    "GeometricStepCheck",
    "GuardResult",
    "LowerBoundCertificate",
    "RiskModelSpec",
    "RuinEstimate",
    "asymptotic_preconditions",
    "discounted_loss_tail",
    "divergence_guard",
    "finite_ruin_asymptotic",
    "finite_ruin_mc",
    "finite_ruin_profile",
    "infinite_lower_bound",
]

# grid for the chained discount-factor products
_DISCOUNT_GRID = GridSpec(nodes=1024, eps_lo=1e-5)

# Monte Carlo batch rows; results depend only on (seed, batch index, rows)
_BATCH_ROWS = 1 << 17


def _worker_count(jobs: int) -> int:
    env = os.environ.get("TAILKIT_WORKERS")
    base = int(env) if env else (os.cpu_count() or 1)
    return max(1, min(base, 8, jobs))


# ---------------------------------------------------------------------------
# model specification
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RiskModelSpec:
    """Net-loss law, discount-factor law, and analysis horizon.

    ``Z_law`` may carry negative mass (premium-dominated periods);
    simulation draws from it directly while tail formulas use its
    positive part.  ``Y_law`` must put all its mass on (0, inf) or
    (0, s].  ``horizon`` is an integer number of periods, or ``math.inf``
    for the open-ended analyses.
    """

    Z_law: HeavyTailDistribution
    Y_law: HeavyTailDistribution
    horizon: float = math.inf
    _loss_law: HeavyTailDistribution = field(init=False, repr=False)
    _w_cache: dict = field(init=False, repr=False)

    def __post_init__(self):
        h = self.horizon
        if isinstance(h, (int, np.integer)):
            if h < 1:
                raise ParameterError("horizon", f"horizon must be >= 1, got {h}")
            object.__setattr__(self, "horizon", int(h))
        elif not (isinstance(h, float) and math.isinf(h) and h > 0):
            raise ParameterError(
                "horizon", f"horizon must be an integer >= 1 or inf, got {h!r}")
        y = self.Y_law
        if y.mass_at_zero != 0.0 or y.log_sf(0.0) != 0.0:
            raise ParameterError(
                "Y_law", "discount factors must be strictly positive; "
                "the given law has mass at or below zero")
        object.__setattr__(self, "_loss_law", positive_part(self.Z_law))
        object.__setattr__(self, "_w_cache", {})

    @property
    def loss_law(self) -> HeavyTailDistribution:
        """Law of the positive part of one period's net loss."""
        return self._loss_law

    def discount_law(self, i: int,
                     q: QuadratureSpec | None = None) -> HeavyTailDistribution:
        """Law of the i-fold discount product Y_1 * ... * Y_i.

        i = 1 returns ``Y_law`` itself; deeper products are gridded laws
        built by repeated product convolution and cached on the model, so
        a chain is tabulated once per model instance.  A degenerate
        ``Y_law`` short-circuits to an exact point mass.
        """
        if i < 1:
            raise ParameterError("i", f"period index must be >= 1, got {i}")
        if i == 1:
            return self.Y_law
        if isinstance(self.Y_law, Degenerate):
            loc = self.Y_law.c ** i
            if loc <= 0.0 or not math.isfinite(loc):
                raise ParameterError(
                    "i", f"the {i}-fold discount product underflows "
                    f"({self.Y_law.c} ** {i}); no representable law remains")
            return Degenerate(loc)
        cached = self._w_cache.get(i)
        if cached is not None:
            return cached
        prev = self.discount_law(i - 1, q)
        try:
            w = product_dist(prev, self.Y_law, _DISCOUNT_GRID, q)
        except QuadratureError as exc:
            raise QuadratureError(
                f"tabulating the {i}-fold discount product failed ({exc}); "
                "retry with a wider grid (larger nodes, smaller eps_lo)"
            ) from exc
        self._w_cache[i] = w
        return w


@dataclass(frozen=True)
class RuinEstimate:
    """Monte Carlo ruin probability with a normal-theory error bar.

    ``point`` estimates the running-maximum exceedance (ruin by time n);
    ``terminal_point`` the terminal-sum exceedance from the same paths,
    so path by path it never exceeds ``point``.  When no path hits, the
    half-width falls back to the exact one-sided 95% bound.
    """

    point: float
    ci_halfwidth: float
    paths: int
    seed: int
    x: float
    n: int
    terminal_point: float
    terminal_ci_halfwidth: float

    def __post_init__(self):
        if not 0.0 <= self.point <= 1.0:
            raise ParameterError("point", f"not a probability: {self.point}")
        if self.ci_halfwidth < 0.0:
            raise ParameterError("ci_halfwidth",
                                 f"negative half-width: {self.ci_halfwidth}")

    def to_dict(self) -> dict:
        return {"point": self.point, "ci_halfwidth": self.ci_halfwidth,
                "paths": self.paths, "seed": self.seed, "x": self.x,
                "n": self.n, "terminal_point": self.terminal_point,
                "terminal_ci_halfwidth": self.terminal_ci_halfwidth}


@dataclass(frozen=True)
class GeometricStepCheck:
    """One observed instance of the per-period contraction inequality."""

    i: int
    x: float
    log_lhs: float
    log_rhs: float
    ok: bool

    def to_dict(self) -> dict:
        return {"i": self.i, "x": self.x, "log_lhs": self.log_lhs,
                "log_rhs": self.log_rhs, "ok": self.ok}


@dataclass(frozen=True)
class GuardResult:
    """Outcome of the infinite-horizon admissibility check."""

    passed: bool
    reason: str

    def to_dict(self) -> dict:
        return {"passed": self.passed, "reason": self.reason}


@dataclass(frozen=True)
class LowerBoundCertificate:
    """Evidence bundle behind an infinite-horizon series lower bound.

    ``factor`` is the geometric contraction rate p*a + p*eps + q built
    from the tail-halving constant a of the loss law at scale ``lam``,
    the discount mass p below 1/lam, and its complement q.  The series
    was summed through ``i_star`` terms; past that, the remainder is
    bounded by the geometric tail recorded here.  ``step_checks`` holds
    spot checks of the contraction inequality on actual tails.
    """

    lam: float
    epsilon: float
    a_estimate: float
    p_mass: float
    q_mass: float
    factor: float
    x0: float
    i_star: int
    series_log: float
    remainder_log: float
    remainder_ratio: float
    step_checks: tuple[GeometricStepCheck, ...]
    class_evidence: ClassDiagnosis
    notes: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return self.factor < 1.0 and all(c.ok for c in self.step_checks)

    def to_dict(self) -> dict:
        return {
            "lam": self.lam,
            "epsilon": self.epsilon,
            "a_estimate": self.a_estimate,
            "p_mass": self.p_mass,
            "q_mass": self.q_mass,
            "factor": self.factor,
            "x0": self.x0,
            "i_star": self.i_star,
            "series_log": self.series_log,
            "remainder_log": self.remainder_log,
            "remainder_ratio": self.remainder_ratio,
            "passed": self.passed,
            "step_checks": [c.to_dict() for c in self.step_checks],
            "class_evidence": self.class_evidence.to_dict(),
            "notes": list(self.notes),
        }


# ---------------------------------------------------------------------------
# discounted single-loss tails
# ---------------------------------------------------------------------------


def discounted_loss_tail(model: RiskModelSpec, i: int, x: float,
                         q: QuadratureSpec | None = None) -> float:
    """log P(Z_i^+ * Y_1 * ... * Y_i > x) for one period i >= 1."""
    if i < 1:
        raise ParameterError("i", f"period index must be >= 1, got {i}")
    if not (x > 0 and math.isfinite(x)):
        raise ParameterError("x", f"x must be positive and finite, got {x}")
    F = model.loss_law
    if isinstance(model.Y_law, Degenerate):
        c_i = model.Y_law.c ** i
        if c_i > 0.0 and math.isfinite(c_i):
            return float(F.log_sf(x / c_i))
        log_arg = math.log(x) - i * math.log(model.Y_law.c)
        if log_arg > 700.0:
            return LOG_ZERO
        return float(F.log_sf(math.exp(log_arg)))
    return product_tail(F, model.discount_law(i, q), x, q)


def _require_finite_n(model: RiskModelSpec, n) -> int:
    if n is None:
        n = model.horizon
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise ParameterError("n", f"horizon must be a finite integer, got {n!r}")
    if n < 1:
        raise ParameterError("n", f"horizon must be >= 1, got {n}")
    return int(n)


def finite_ruin_asymptotic(model: RiskModelSpec, n: int, x: float,
                           q: QuadratureSpec | None = None) -> float:
    """log of the n-term tail sum approximating the ruin probability.

    Sums the discounted single-loss tails H_i over i = 1..n in log
    space.  The approximation tracks the true ruin probability when one
    large discounted loss dominates every ruin event; run
    :func:`asymptotic_preconditions` for the supporting evidence.
    """
    n = _require_finite_n(model, n)
    return logsumexp_all([discounted_loss_tail(model, i, x, q)
                          for i in range(1, n + 1)])


def asymptotic_preconditions(model: RiskModelSpec, grid=None,
                             q: QuadratureSpec | None = None,
                             thresholds: VerdictThresholds | None = None
                             ) -> dict:
    """Evidence that the tail-sum approximation is applicable.

    Returns the product-tail subexponentiality verdict for (loss law,
    discount law) together with the dominance condition EQ11 report.
    Advisory: the estimators do not require these to pass.
    """
    F, G = model.loss_law, model.Y_law
    return {
        "product_subexp": product_subexp_verdict(F, G, grid, q, thresholds),
        "EQ11": check_condition("EQ11", F, G, None, grid, q, thresholds),
    }


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------


def _batch_counts(model: RiskModelSpec, n: int, xs: np.ndarray, rows: int,
                  seq: np.random.SeedSequence) -> tuple[np.ndarray, np.ndarray]:
    """Exceedance counts of the running max and the terminal sum.

    Each period draws from its own child sequence, so shorter horizons
    replay a prefix of the same paths and the estimates are monotone in
    n path by path, not only on average.
    """
    per_period = seq.spawn(n)
    prod = np.ones(rows)
    s = np.zeros(rows)
    m = np.full(rows, -np.inf)
    for i in range(n):
        rng = np.random.default_rng(per_period[i])
        z = model.Z_law.sample(rows, rng=rng)
        y = model.Y_law.sample(rows, rng=rng)
        prod *= y
        s += z * prod
        np.maximum(m, s, out=m)
    m.sort()
    ruin = rows - np.searchsorted(m, xs, side="right")
    s.sort()
    term = rows - np.searchsorted(s, xs, side="right")
    return ruin.astype(np.int64), term.astype(np.int64)


def _simulate_counts(model: RiskModelSpec, n: int, xs: np.ndarray,
                     paths: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    n_batches = (paths + _BATCH_ROWS - 1) // _BATCH_ROWS
    children = np.random.SeedSequence(seed).spawn(n_batches)
    sizes = [min(_BATCH_ROWS, paths - b * _BATCH_ROWS)
             for b in range(n_batches)]

    def one(b: int):
        return _batch_counts(model, n, xs, sizes[b], children[b])

    if n_batches == 1:
        parts = [one(0)]
    else:
        with ThreadPoolExecutor(_worker_count(n_batches)) as pool:
            parts = list(pool.map(one, range(n_batches)))
    ruin = np.zeros(xs.size, dtype=np.int64)
    term = np.zeros(xs.size, dtype=np.int64)
    for rc, tc in parts:
        ruin += rc
        term += tc
    return ruin, term


def _ci_halfwidth(hits: int, paths: int) -> float:
    p = hits / paths
    if hits == 0 or hits == paths:
        # exact one-sided 95% bound when the estimate sits on the boundary
        return -math.expm1(math.log(0.05) / paths)
    return 1.96 * math.sqrt(p * (1.0 - p) / paths)


def finite_ruin_mc(model: RiskModelSpec, n: int, x: float,
                   paths: int = 10 ** 6, seed: int = 0) -> RuinEstimate:
    """Monte Carlo estimate of ruin by time n at initial wealth x.

    Simulates ``paths`` independent loss/discount paths, tracking the
    running maximum of the discounted sums.  Deterministic in ``seed``
    and independent of worker count: paths are drawn in fixed-size
    batches keyed by batch index, and counts are reduced in index order.
    Plain sampling, no variance reduction; the half-width shrinks like
    paths**-0.5, so probabilities near 1e-4 need 10**6 paths or more
    for a usable relative error.
    """
    n = _require_finite_n(model, n)
    if paths < 10 ** 4:
        raise ParameterError("paths", f"need at least 10**4 paths, got {paths}")
    if not (x >= 0 and math.isfinite(x)):
        raise ParameterError("x", f"initial wealth must be >= 0, got {x}")
    ruin, term = _simulate_counts(model, n, np.asarray([float(x)]),
                                  int(paths), int(seed))
    return RuinEstimate(
        point=ruin[0] / paths, ci_halfwidth=_ci_halfwidth(int(ruin[0]), paths),
        paths=int(paths), seed=int(seed), x=float(x), n=n,
        terminal_point=term[0] / paths,
        terminal_ci_halfwidth=_ci_halfwidth(int(term[0]), paths))


def finite_ruin_profile(model: RiskModelSpec, n: int, xs,
                        paths: int = 10 ** 6, seed: int = 0
                        ) -> list[RuinEstimate]:
    """Ruin estimates across several wealth levels from one shared path set.

    All levels are evaluated against the same simulated maxima, so the
    profile is non-increasing in x path by path, which keeps plotted
    curves monotone even at Monte Carlo noise scale.
    """
    n = _require_finite_n(model, n)
    if paths < 10 ** 4:
        raise ParameterError("paths", f"need at least 10**4 paths, got {paths}")
    arr = np.asarray(xs, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ParameterError("xs", "need a non-empty 1-d array of levels")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ParameterError("xs", "levels must be finite and >= 0")
    order = np.argsort(arr, kind="stable")
    ruin_s, term_s = _simulate_counts(model, n, arr[order],
                                      int(paths), int(seed))
    ruin = np.empty_like(ruin_s)
    term = np.empty_like(term_s)
    ruin[order] = ruin_s
    term[order] = term_s
    return [RuinEstimate(
        point=int(rc) / paths, ci_halfwidth=_ci_halfwidth(int(rc), paths),
        paths=int(paths), seed=int(seed), x=float(xv), n=n,
        terminal_point=int(tc) / paths,
        terminal_ci_halfwidth=_ci_halfwidth(int(tc), paths))
        for xv, rc, tc in zip(arr, ruin, term)]


# ---------------------------------------------------------------------------
# infinite horizon
# ---------------------------------------------------------------------------


def divergence_guard(model: RiskModelSpec) -> GuardResult:
    """Whether the infinite-horizon tail series can converge at all.

    Discount factors bounded below by 1 never shrink old losses, so the
    series of discounted single-loss tails dominates n times the loss
    tail and diverges; such models are refused for infinite-horizon
    analysis.
    """
    s1 = model.Y_law.support_lo
    if s1 >= 1.0:
        return GuardResult(
            passed=False,
            reason=f"discount factors never drop below {s1:g}, so each "
            "period's discounted loss tail dominates the one-period loss "
            "tail and the tail series diverges")
    return GuardResult(
        passed=True,
        reason="discount factors fall below 1 with positive probability")


def _trailing_halving_constant(F: HeavyTailDistribution, lam: float,
                               xs: np.ndarray, window: int) -> float:
    """Max of F_bar(lam x)/F_bar(x) over the trailing probe window."""
    log_r = np.asarray(F.log_sf(lam * xs) - F.log_sf(xs), dtype=float)
    log_r = log_r[np.isfinite(log_r)]
    if log_r.size == 0:
        raise ParameterError(
            "grid", "the loss tail vanished on the probe grid; cannot "
            "estimate the tail-halving constant")
    return float(np.exp(log_r[-min(window, log_r.size):]).max())


def infinite_lower_bound(model: RiskModelSpec, x: float, lam: float = 2.0,
                         epsilon: float = 0.05,
                         q: QuadratureSpec | None = None, *,
                         grid=None, x0: float | None = None,
                         thresholds: VerdictThresholds | None = None,
                         max_terms: int = 400
                         ) -> tuple[float, LowerBoundCertificate]:
    """Certified lower-bound value for the infinite-horizon tail series.

    Requires the positive-part loss law to show tail-halving evidence
    (class A membership: long-tailed with limsup F_bar(2x)/F_bar(x) < 1)
    and discount factors confined to (0, 1].  The ruin probability is
    then asymptotically at least the tail series; the series itself is
    summed through enough terms that the geometric remainder bound, with
    rate p*a + p*eps + q < 1, falls under 1% of the partial sum.

    Returns the log partial sum and a certificate holding the constants,
    the remainder bound, and spot checks of the per-period contraction
    on actual tails at levels >= x0 (default: the 10th probe-grid node).
    """
    if not (x > 0 and math.isfinite(x)):
        raise ParameterError("x", f"x must be positive and finite, got {x}")
    if not (lam > 1 and math.isfinite(lam)):
        raise ParameterError("lam", f"the scale must exceed 1, got {lam}")
    guard = divergence_guard(model)
    if not guard.passed:
        raise ParameterError("Y_law", guard.reason)
    if model.Y_law.support_hi > 1.0 + 1e-12:
        raise ParameterError(
            "Y_law", "the geometric bound needs discount factors confined "
            f"to (0, 1]; support reaches {model.Y_law.support_hi:g}")

    F = model.loss_law
    th = thresholds or VerdictThresholds()
    xs = as_grid_array(grid) if grid is not None else _auto_grid(F)
    evidence = classify(F, "A", xs, q, th)
    if evidence.member is not True:
        raise ParameterError(
            "Z_law", "the lower bound needs positive tail-halving evidence "
            f"for the loss law; the class-A probe returned "
            f"member={evidence.member} ({evidence.verdict})")

    a = _trailing_halving_constant(F, lam, xs, th.window)
    if not 0.0 < epsilon < 1.0 - a:
        raise ParameterError(
            "epsilon", f"epsilon must lie in (0, 1 - a) = (0, {1.0 - a:.6g}) "
            f"for the estimated a = {a:.6g}, got {epsilon}")
    p = -math.expm1(model.Y_law.log_sf(1.0 / lam))
    q_mass = 1.0 - p
    factor = p * a + p * epsilon + q_mass
    if factor >= 1.0:
        raise ParameterError(
            "lam", f"geometric rate p*a + p*eps + q = {factor:.6f} is not "
            "below 1, so the remainder bound is vacuous; increase lam or "
            "choose a discount law with more mass below 1/lam")

    log_factor = math.log(factor)
    terms: list[float] = []
    h1 = discounted_loss_tail(model, 1, x, q)
    if h1 <= LOG_ZERO:
        # discounting only shrinks losses, so every later term is zero too
        evidence_note = ("the one-period discounted loss tail is exactly "
                         "zero at this level, so the whole series vanishes")
        cert = LowerBoundCertificate(
            lam=float(lam), epsilon=float(epsilon), a_estimate=a, p_mass=p,
            q_mass=q_mass, factor=factor,
            x0=float(xs[min(9, xs.size - 1)]) if x0 is None else float(x0),
            i_star=1, series_log=LOG_ZERO, remainder_log=LOG_ZERO,
            remainder_ratio=0.0, step_checks=(), class_evidence=evidence,
            notes=(evidence_note,))
        return LOG_ZERO, cert
    partial = LOG_ZERO
    remainder = math.inf
    i_star = 0
    while True:
        i_star += 1
        if i_star > max_terms:
            raise ParameterError(
                "max_terms", f"the series did not certify a <1% remainder "
                f"within {max_terms} terms (rate {factor:.4f}); raise "
                "max_terms or increase lam")
        terms.append(discounted_loss_tail(model, i_star, x, q))
        partial = logsumexp_all(terms)
        # terms past i_star are bounded by factor**i * H_1(x), summed
        remainder = h1 + i_star * log_factor - math.log1p(-factor)
        if partial > LOG_ZERO and remainder - partial <= math.log(0.01):
            break

    node10 = float(xs[min(9, xs.size - 1)])
    x_floor = node10 if x0 is None else float(x0)
    check_xs = [float(t) for t in xs[xs >= x_floor][:6]]
    checks: list[GeometricStepCheck] = []
    if check_xs:
        prev = [discounted_loss_tail(model, 1, t, q) for t in check_xs]
        for i in range(1, min(i_star, 24) + 1):
            nxt = [discounted_loss_tail(model, i + 1, t, q) for t in check_xs]
            for t, lhs, base in zip(check_xs, nxt, prev):
                rhs = base + log_factor
                ok = bool(lhs <= rhs + 1e-9 + 1e-12 * abs(rhs))
                checks.append(GeometricStepCheck(i=i, x=t, log_lhs=lhs,
                                                 log_rhs=rhs, ok=ok))
            prev = nxt

    cert = LowerBoundCertificate(
        lam=float(lam), epsilon=float(epsilon), a_estimate=a, p_mass=p,
        q_mass=q_mass, factor=factor, x0=x_floor, i_star=i_star,
        series_log=partial, remainder_log=remainder,
        remainder_ratio=math.exp(remainder - partial),
        step_checks=tuple(checks), class_evidence=evidence,
        notes=(f"series summed through i = {i_star}; geometric remainder "
               f"bound is {math.exp(remainder - partial):.3%} of the "
               "partial sum",))
    return partial, cert
