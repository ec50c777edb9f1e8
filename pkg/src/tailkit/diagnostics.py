"""Evidence-graded asymptotic diagnostics.

Limits, limsups, and little-o / big-O relations cannot be certified from
finitely many tail evaluations.  Every checker in this module therefore
reports *evidence*: the relevant ratio is tabulated on a probe grid, the
trailing window is summarized, and a verdict is granted only when the
window statistics clear explicit thresholds.  The thresholds live in
:class:`VerdictThresholds` and every verdict names the numbers behind it.

Hysteresis separates the positive and negative thresholds: between
"clearly vanishes" and "clearly stays up" sits an INCONCLUSIVE band, so a
small change of grid or window moves a verdict into the band before it
can flip sign.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .convolve import GridSpec, product_dist, product_tail, sum_self_tail
from .distributions import HeavyTailDistribution, ParameterError
from .grids import GeometricGrid, as_grid_array
from .quadrature import QuadratureSpec, log_diff_exp

__all__ = [
    "HOLDS_EVIDENCE",
    "FAILS_EVIDENCE",
    "INCONCLUSIVE",
    "CONDITION_IDS",
    "CLASS_IDS",
    "Verdict",
    "VerdictThresholds",
    "WindowStats",
    "RatioDiagnostic",
    "ConditionReport",
    "ClassDiagnosis",
    "InsensitivityFunction",
    "SubexpVerdict",
    "ratio_curve",
    "classify",
    "check_condition",
    "build_insensitivity",
    "knot_probe_grid",
    "product_subexp_verdict",
]

HOLDS_EVIDENCE = "HOLDS_EVIDENCE"
FAILS_EVIDENCE = "FAILS_EVIDENCE"
INCONCLUSIVE = "INCONCLUSIVE"

#: conditions understood by :func:`check_condition`.  The identifiers are
#: wire tokens shared with other tools; each maps to the ratio written in
#: its docstring entry below.
CONDITION_IDS = ("EQ11", "EQ12", "EQ13", "EQ14", "T1A_D", "T31", "T32")

CLASS_IDS = ("L_gamma", "S", "D", "R", "A")

_VERDICT_KINDS = ("CONVERGES_TO", "BOUNDED", "DIVERGES", "VANISHES",
                  "INCONCLUSIVE")


@dataclass(frozen=True)
class Verdict:
    """Outcome of judging one ratio curve.

    ``CONVERGES_TO`` and ``BOUNDED`` carry a value (the detected limit,
    resp. the trailing peak); the other kinds carry none.
    """

    kind: str
    value: float | None = None

    def __post_init__(self):
        if self.kind not in _VERDICT_KINDS:
            raise ParameterError("kind", f"unknown verdict kind {self.kind!r}")
        needs_value = self.kind in ("CONVERGES_TO", "BOUNDED")
        if needs_value and (self.value is None
                            or not math.isfinite(self.value)):
            raise ParameterError("value",
                                 f"{self.kind} needs a finite value")
        if not needs_value and self.value is not None:
            raise ParameterError("value",
                                 f"{self.kind} does not take a value")

    @classmethod
    def converges_to(cls, c: float) -> "Verdict":
        return cls("CONVERGES_TO", float(c))

    @classmethod
    def bounded(cls, m: float) -> "Verdict":
        return cls("BOUNDED", float(m))

    @classmethod
    def diverges(cls) -> "Verdict":
        return cls("DIVERGES")

    @classmethod
    def vanishes(cls) -> "Verdict":
        return cls("VANISHES")

    @classmethod
    def inconclusive(cls) -> "Verdict":
        return cls("INCONCLUSIVE")

    def __str__(self) -> str:
        if self.value is None:
            return self.kind
        return f"{self.kind}({self.value:.6g})"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "value": self.value}


@dataclass(frozen=True)
class VerdictThresholds:
    """Explicit finite-x proxies for asymptotic statements.

    window:         trailing points summarized (last 8 of the 40-point
                    default grid).
    tol_c:          relative spread allowed around a detected limit.
    tol_s:          relative slope per grid step allowed for a limit.
    vanish_floor:   trailing ratios must sit at or below this, strictly
                    decreasing, to count as vanishing.
    bounded_spread: trailing max may exceed trailing median by at most
                    this factor for a boundedness verdict.
    diverge_rate:   minimum log-ratio growth per step, sustained across
                    the window, to count as divergence.
    drop_limit:     fraction of probe points that may be dropped (zero
                    denominator) before the curve is inconclusive.
    fail_factor:    hysteresis multiple on vanish_floor; a little-o claim
                    fails only when the window floor exceeds
                    fail_factor * vanish_floor.
    fail_band:      hysteresis multiple on tol_c for limit mismatches.
    """

    window: int = 8
    tol_c: float = 0.05
    tol_s: float = 0.01
    vanish_floor: float = 1e-6
    bounded_spread: float = 10.0
    diverge_rate: float = 0.1
    drop_limit: float = 0.25
    fail_factor: float = 100.0
    fail_band: float = 3.0

    def __post_init__(self):
        if self.window < 3:
            raise ParameterError("window", "needs at least 3 points")
        for name in ("tol_c", "tol_s", "vanish_floor", "diverge_rate"):
            if getattr(self, name) <= 0:
                raise ParameterError(name, "must be positive")
        if self.bounded_spread <= 1:
            raise ParameterError("bounded_spread", "must exceed 1")
        if not 0 <= self.drop_limit < 1:
            raise ParameterError("drop_limit", "needs 0 <= drop_limit < 1")
        if self.fail_factor <= 1 or self.fail_band <= 1:
            raise ParameterError("fail_factor",
                                 "hysteresis factors must exceed 1")


@dataclass(frozen=True)
class WindowStats:
    """Summary of the trailing window, in linear ratio units."""

    mean: float
    slope: float
    peak: float
    low: float
    median: float
    count: int

    def to_dict(self) -> dict:
        return {"mean": self.mean, "slope": self.slope, "peak": self.peak,
                "low": self.low, "median": self.median, "count": self.count}


_EMPTY_STATS = WindowStats(math.nan, math.nan, math.nan, math.nan,
                           math.nan, 0)


@dataclass(frozen=True, eq=False)
class RatioDiagnostic:
    """One tabulated ratio curve together with its verdict.

    ``log_ratios`` holds log(numerator) - log(denominator) at the kept
    probe points; a value of -inf records an exactly zero ratio.  Points
    whose denominator was exactly zero are dropped and counted.
    """

    x_grid: np.ndarray
    log_ratios: np.ndarray
    verdict: Verdict
    window_stats: WindowStats
    dropped: int = 0
    label: str = ""

    @property
    def ratios(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.log_ratios)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "x": [float(t) for t in self.x_grid],
            "log_ratio": [float(v) for v in self.log_ratios],
            "verdict": self.verdict.to_dict(),
            "window_stats": self.window_stats.to_dict(),
            "dropped": self.dropped,
        }


@dataclass(frozen=True, eq=False)
class ConditionReport:
    """Per-parameter evidence and the aggregated status of one condition."""

    condition_id: str
    parameter_evidence: dict
    overall: str
    required: str
    quantifier: str
    notes: tuple = ()

    def to_dict(self) -> dict:
        return {
            "condition_id": self.condition_id,
            "overall": self.overall,
            "required": self.required,
            "quantifier": self.quantifier,
            "notes": list(self.notes),
            "parameter_evidence": {k: v.to_dict()
                                   for k, v in self.parameter_evidence.items()},
        }


@dataclass(frozen=True, eq=False)
class ClassDiagnosis:
    """Membership evidence for one distribution class.

    ``member`` is True / False only on decisive evidence; None records an
    inconclusive probe.  ``verdict`` is the headline curve's verdict.
    """

    class_id: str
    member: bool | None
    verdict: Verdict
    evidence: dict
    estimates: dict
    notes: tuple = ()

    def to_dict(self) -> dict:
        return {
            "class_id": self.class_id,
            "member": self.member,
            "verdict": self.verdict.to_dict(),
            "estimates": dict(self.estimates),
            "notes": list(self.notes),
            "evidence": {k: v.to_dict() for k, v in self.evidence.items()},
        }


# ---------------------------------------------------------------------------
# ratio curves and the verdict engine
# ---------------------------------------------------------------------------


def _log_evaluator(obj, role: str):
    """Adapt a distribution or callable to log-values over float arrays."""
    if isinstance(obj, HeavyTailDistribution):
        return lambda xs: np.atleast_1d(obj.log_sf(xs))
    if callable(obj):
        def call(xs: np.ndarray) -> np.ndarray:
            try:
                out = np.asarray(obj(xs), dtype=float)
                if out.shape == xs.shape:
                    return out
            except (TypeError, ValueError):
                pass
            return np.asarray([float(obj(float(t))) for t in xs])
        return call
    raise ParameterError(role, "needs a distribution or a callable of x")


def _window_stats(log_r: np.ndarray) -> WindowStats:
    if log_r.size == 0:
        return _EMPTY_STATS
    # saturate rather than overflow: only order matters past e**700
    r = np.exp(np.minimum(log_r, 700.0))
    idx = np.arange(r.size, dtype=float)
    di = idx - idx.mean()
    denom = float((di * di).sum())
    slope = float((di * (r - r.mean())).sum() / denom) if denom else 0.0
    return WindowStats(mean=float(r.mean()), slope=slope,
                       peak=float(r.max()), low=float(r.min()),
                       median=float(np.median(r)), count=int(r.size))


def _judge(log_r: np.ndarray, th: VerdictThresholds) -> tuple[Verdict, WindowStats]:
    """Grade one curve from its trailing window."""
    n = log_r.size
    w = th.window
    if n < w + 4:
        return Verdict.inconclusive(), _window_stats(log_r[-min(n, w):])
    t = log_r[-w:]
    stats = _window_stats(t)
    finite = np.isfinite(t)

    if not finite.any():
        return Verdict.vanishes(), stats

    if not finite.all():
        # exact zeros are admissible only as the terminal run of a
        # vanishing curve; anywhere else the window is ambiguous
        k = int(np.argmin(finite))
        terminal = finite[:k].all() and not finite[k:].any()
        if terminal and stats.peak <= th.vanish_floor \
                and (k < 2 or np.all(np.diff(t[:k]) < 0)):
            return Verdict.vanishes(), stats
        return Verdict.inconclusive(), stats

    r = np.exp(np.minimum(t, 700.0))
    if stats.peak <= th.vanish_floor and np.all(np.diff(t) < 0):
        return Verdict.vanishes(), stats

    mean = stats.mean
    if mean > 0 and abs(stats.slope) <= th.tol_s * mean \
            and np.all(np.abs(r - mean) <= th.tol_c * mean):
        return Verdict.converges_to(mean), stats

    if np.all(np.diff(t) > 0) and t[-1] - t[0] >= w * th.diverge_rate:
        return Verdict.diverges(), stats

    if stats.median > 0 and stats.peak <= th.bounded_spread * stats.median:
        return Verdict.bounded(stats.peak), stats

    return Verdict.inconclusive(), stats


def ratio_curve(numerator, denominator, grid=None, *,
                thresholds: VerdictThresholds | None = None,
                label: str = "") -> RatioDiagnostic:
    """Tabulate numerator/denominator on a probe grid and grade the result.

    Both arguments are distributions (their survival functions are used)
    or callables returning log-values over an array of x.  The ratio is
    formed in log space, so magnitudes far below double-precision
    underflow stay exact.  Points where the denominator is exactly zero
    are dropped and counted; losing more than the configured fraction of
    the grid forces an INCONCLUSIVE verdict.
    """
    th = thresholds or VerdictThresholds()
    xs = as_grid_array(grid)
    num = _log_evaluator(numerator, "numerator")
    den = _log_evaluator(denominator, "denominator")

    ln_num = np.asarray(num(xs), dtype=float)
    ln_den = np.asarray(den(xs), dtype=float)
    if np.isnan(ln_num).any():
        raise ParameterError("numerator", "produced NaN on the probe grid")
    if np.isnan(ln_den).any():
        raise ParameterError("denominator", "produced NaN on the probe grid")

    keep = ln_den > -math.inf
    dropped = int(xs.size - keep.sum())
    xs_kept = xs[keep]
    log_r = ln_num[keep] - ln_den[keep]

    if dropped > th.drop_limit * xs.size:
        verdict, stats = Verdict.inconclusive(), _window_stats(
            log_r[-min(log_r.size, th.window):])
    else:
        verdict, stats = _judge(log_r, th)
    return RatioDiagnostic(x_grid=xs_kept, log_ratios=log_r, verdict=verdict,
                           window_stats=stats, dropped=dropped, label=label)


def _decide(diag: RatioDiagnostic, required: str, th: VerdictThresholds,
            target: float | None = None) -> int:
    """+1 achieved, -1 decisively refuted, 0 open.

    The refutation thresholds sit a hysteresis factor away from the
    achievement thresholds, so borderline curves land at 0.
    """
    kind = diag.verdict.kind
    if required == "VANISHES":
        if kind == "VANISHES":
            return 1
        if kind == "DIVERGES":
            return -1
        if kind in ("CONVERGES_TO", "BOUNDED"):
            # limsup proxy: the late half of the window must sit both
            # clear of the vanish floor (hysteresis factor) and not be
            # decaying from the early half, else the curve stays open
            w = min(th.window, diag.log_ratios.size)
            trail = np.exp(np.minimum(diag.log_ratios[-w:], 700.0))
            early, late = trail[: w // 2], trail[w // 2:]
            if late.size and late.max() >= th.fail_factor * th.vanish_floor \
                    and (early.size == 0 or late.max() >= 0.5 * early.max()):
                return -1
        return 0
    if required == "BOUNDED":
        if kind in ("BOUNDED", "CONVERGES_TO", "VANISHES"):
            return 1
        if kind == "DIVERGES":
            return -1
        return 0
    if required == "CONVERGES_TO":
        if target is None or target <= 0:
            raise ParameterError("target", "needs a positive limit target")
        if kind == "CONVERGES_TO":
            err = abs(diag.verdict.value - target)
            band = th.tol_c * target
            if err <= band:
                return 1
            if err >= th.fail_band * band:
                return -1
            return 0
        if kind in ("DIVERGES", "VANISHES"):
            return -1
        return 0
    raise ParameterError("required", f"unknown required verdict {required!r}")


def _aggregate(marks, quantifier: str) -> str:
    marks = list(marks)
    if not marks:
        return INCONCLUSIVE
    if quantifier == "forall":
        if all(m == 1 for m in marks):
            return HOLDS_EVIDENCE
        if any(m == -1 for m in marks):
            return FAILS_EVIDENCE
        return INCONCLUSIVE
    if any(m == 1 for m in marks):
        return HOLDS_EVIDENCE
    if all(m == -1 for m in marks):
        return FAILS_EVIDENCE
    return INCONCLUSIVE


def _run_jobs(jobs):
    """Evaluate (key, thunk) pairs, concurrently when there are several.

    Results are assembled in the order the jobs were listed, so reports
    are deterministic regardless of scheduling.
    """
    if len(jobs) <= 1:
        return {k: fn() for k, fn in jobs}
    with ThreadPoolExecutor(max_workers=min(8, len(jobs))) as pool:
        futures = [(k, pool.submit(fn)) for k, fn in jobs]
        results = {k: f.result() for k, f in futures}
    return {k: results[k] for k, _ in jobs}


# ---------------------------------------------------------------------------
# class membership
# ---------------------------------------------------------------------------


def _float_gcd(values: np.ndarray, tol: float = 1e-9) -> float | None:
    """Greatest common divisor of positive floats, or None past tolerance."""
    g = 0.0
    for v in np.abs(values):
        a, b = g, float(v)
        while b > tol:
            a, b = b, math.fmod(a, b)
        g = a
    if g <= tol:
        return None
    ratios = np.abs(values) / g
    if np.max(np.abs(ratios - np.round(ratios))) * g > tol:
        return None
    return g


def _detect_span(V: HeavyTailDistribution) -> tuple[float | None, str | None]:
    """Lattice span when V is purely atomic; (None, reason) otherwise.

    Families that know their span declare it; otherwise the span is the
    gcd of the atom gaps, and an inconsistent gcd disables every
    span-dependent check rather than guessing.
    """
    if V.lattice_span is not None:
        return V.lattice_span, None
    if V.has_density:
        return None, None
    try:
        pairs = V.atoms(1e-12, 1e9)
    except ParameterError:
        return None, "atom enumeration unavailable"
    if len(pairs) < 2:
        return None, None
    locs = np.sort(np.asarray([loc for loc, _ in pairs], dtype=float))
    span = _float_gcd(np.diff(locs))
    if span is None:
        return None, "lattice span detection failed (inconsistent atom gaps)"
    return span, None


def _shift_curve(V, t: float, xs, th, label: str) -> RatioDiagnostic:
    return ratio_curve(lambda u: np.atleast_1d(V.log_sf(u - t)), V, xs,
                       thresholds=th, label=label)


def _classify_L(V, xs, q, th) -> ClassDiagnosis:
    span, fail = _detect_span(V)
    if fail is not None:
        return ClassDiagnosis("L_gamma", None, Verdict.inconclusive(),
                              {}, {}, notes=(fail,))
    t1 = span if span is not None else 1.0
    t2 = 2.0 * t1
    jobs = [(f"t={t1:g}", lambda: _shift_curve(
                V, t1, xs, th, f"V(x-{t1:g})/V(x)")),
            (f"t={t2:g}", lambda: _shift_curve(
                V, t2, xs, th, f"V(x-{t2:g})/V(x)"))]
    ev = _run_jobs(jobs)
    d1, d2 = ev[f"t={t1:g}"], ev[f"t={t2:g}"]

    w = th.window
    tail = d1.log_ratios[-w:] if d1.log_ratios.size >= w else d1.log_ratios
    tail = tail[np.isfinite(tail)]
    gamma = float(np.mean(tail)) / t1 if tail.size else None

    estimates: dict = {}
    notes = []
    if span is not None:
        notes.append(f"lattice law: shifts restricted to multiples of "
                     f"the span {t1:g}")
    member: bool | None = None
    if gamma is not None:
        estimates["gamma"] = gamma
    k1, k2 = d1.verdict.kind, d2.verdict.kind
    if k1 == "CONVERGES_TO" and k2 == "CONVERGES_TO":
        lc1 = math.log(d1.verdict.value)
        lc2 = math.log(d2.verdict.value)
        estimates["ratio_t1"] = d1.verdict.value
        estimates["ratio_t2"] = d2.verdict.value
        gap = abs(lc2 - 2.0 * lc1)
        member = True if gap <= th.tol_c else (
            False if gap >= th.fail_band * th.tol_c else None)
        if member:
            estimates["gamma"] = gamma = lc1 / t1
    elif k1 == "DIVERGES" or k2 == "DIVERGES":
        member = False
        notes.append("shift ratio diverges; no exponential shift rate fits")
    return ClassDiagnosis("L_gamma", member, d1.verdict, ev, estimates,
                          notes=tuple(notes))


def _classify_S(V, xs, q, th) -> ClassDiagnosis:
    if V.support_lo < 0:
        raise ParameterError("V", "subexponential evidence needs a "
                                  "nonnegative law")

    def num(us: np.ndarray) -> np.ndarray:
        return np.asarray([sum_self_tail(V, 2, float(t), q) for t in us])

    diag = ratio_curve(num, V, xs, thresholds=th, label="V*2(x)/V(x)")
    mark = _decide(diag, "CONVERGES_TO", th, target=2.0)
    member = True if mark == 1 else (False if mark == -1 else None)
    estimates = {}
    if diag.verdict.kind == "CONVERGES_TO":
        estimates["limit"] = diag.verdict.value
    return ClassDiagnosis("S", member, diag.verdict,
                          {"sum2": diag}, estimates)


def _classify_D(V, xs, q, th) -> ClassDiagnosis:
    diag = ratio_curve(lambda u: np.atleast_1d(V.log_sf(u / 2.0)), V, xs,
                       thresholds=th, label="V(x/2)/V(x)")
    mark = _decide(diag, "BOUNDED", th)
    member = True if mark == 1 else (False if mark == -1 else None)
    estimates = {}
    if diag.verdict.kind in ("BOUNDED", "CONVERGES_TO"):
        estimates["bound"] = diag.window_stats.peak
    return ClassDiagnosis("D", member, diag.verdict,
                          {"half": diag}, estimates)


def _classify_R(V, xs, q, th) -> ClassDiagnosis:
    def curve(t: float) -> RatioDiagnostic:
        return ratio_curve(lambda u: np.atleast_1d(V.log_sf(t * u)), V, xs,
                           thresholds=th, label=f"V({t:g}x)/V(x)")

    ev = _run_jobs([("t=2", lambda: curve(2.0)), ("t=4", lambda: curve(4.0))])
    d2, d4 = ev["t=2"], ev["t=4"]
    estimates: dict = {}
    member: bool | None = None
    notes: list[str] = []
    if d2.verdict.kind == "CONVERGES_TO" and d4.verdict.kind == "CONVERGES_TO":
        a2 = -math.log(d2.verdict.value) / math.log(2.0)
        a4 = -math.log(d4.verdict.value) / math.log(4.0)
        estimates.update(alpha_t2=a2, alpha_t4=a4, alpha=0.5 * (a2 + a4))
        scale_ref = max(abs(estimates["alpha"]), 0.5)
        member = abs(a2 - a4) <= 0.02 * scale_ref
        if not member:
            notes.append("power-law exponents from t=2 and t=4 disagree")
    elif "VANISHES" in (d2.verdict.kind, d4.verdict.kind):
        member = False
        notes.append("scaled tail ratio vanishes; the tail decays faster "
                     "than any power")
    return ClassDiagnosis("R", member, d2.verdict, ev, estimates,
                          notes=tuple(notes))


def _classify_A(V, xs, q, th) -> ClassDiagnosis:
    s_diag = _classify_S(V, xs, q, th)
    curve = ratio_curve(lambda u: np.atleast_1d(V.log_sf(2.0 * u)), V, xs,
                        thresholds=th, label="V(2x)/V(x)")
    peak, low = curve.window_stats.peak, curve.window_stats.low
    estimates = dict(s_diag.estimates)
    estimates["limsup_2x"] = peak
    notes: list[str] = []
    if s_diag.member is False:
        member: bool | None = False
        notes.append("not subexponential in evidence")
    elif s_diag.member is None:
        member = None
    elif peak <= 1.0 - th.tol_c:
        member = True
    elif low >= 1.0 - th.tol_c:
        member = False
        notes.append("V(2x)/V(x) is not bounded away from 1")
    else:
        member = None
    evidence = dict(s_diag.evidence)
    evidence["scale2"] = curve
    return ClassDiagnosis("A", member, curve.verdict, evidence, estimates,
                          notes=tuple(notes))


def classify(V: HeavyTailDistribution, class_id: str, grid=None,
             q: QuadratureSpec | None = None,
             thresholds: VerdictThresholds | None = None) -> ClassDiagnosis:
    """Evidence-graded membership probe for one distribution class.

    class_id selects the defining ratio:

    - ``L_gamma``: V(x-t)/V(x) for shifts t -> e^(gamma t); the gamma
      estimate is the trailing mean of the log ratio at unit shift.  For
      lattice laws the shifts are multiples of the detected span.
    - ``S``: 2-fold self-convolution tail over V's own tail -> 2.
    - ``D``: V(x/2)/V(x) stays bounded.
    - ``R``: V(tx)/V(x) -> t^-alpha with matching alpha at t = 2 and 4.
    - ``A``: subexponential plus V(2x)/V(x) bounded away from 1.

    Returns a :class:`ClassDiagnosis`; ``member`` is None whenever the
    evidence does not clear the thresholds in either direction.
    """
    if not isinstance(V, HeavyTailDistribution):
        raise ParameterError("V", "needs a distribution instance")
    if class_id not in CLASS_IDS:
        raise ParameterError("class_id",
                             f"unknown class {class_id!r}; "
                             f"expected one of {CLASS_IDS}")
    xs = as_grid_array(grid)
    q = q or QuadratureSpec()
    th = thresholds or VerdictThresholds()
    dispatch = {"L_gamma": _classify_L, "S": _classify_S, "D": _classify_D,
                "R": _classify_R, "A": _classify_A}
    return dispatch[class_id](V, xs, q, th)


# ---------------------------------------------------------------------------
# named conditions
# ---------------------------------------------------------------------------


class _PowerShift:
    """Probe function a(x) = x**p for 0 < p < 1."""

    def __init__(self, p: float):
        self.p = float(p)
        self.label = f"a=x^{p:g}"

    def __call__(self, x):
        return np.asarray(x, dtype=float) ** self.p


_DEFAULT_B = (0.25, 0.5, 1.0, 2.0, 4.0)
_DEFAULT_T = (1.0, 2.0, 4.0)
_DEFAULT_POWERS = (0.25, 0.5, 0.75)
_ATOM_MASS_FLOOR = 1e-6
_ATOM_LOC_CEILING = 20.0


def _product_log_eval(F, G, q, override):
    """Vector evaluator for the product tail, honoring a precomputed H."""
    if override is not None:
        if not isinstance(override, HeavyTailDistribution):
            raise ParameterError("H", "needs a distribution instance")
        return lambda xs: np.atleast_1d(override.log_sf(xs))
    return lambda xs: np.asarray(
        [product_tail(F, G, float(t), q) for t in np.atleast_1d(xs)])


def _probe_functions(params) -> list:
    """Shift functions to try: user-supplied first, then power defaults."""
    out: list = []
    user = params.get("a")
    if user is not None:
        items = user if isinstance(user, (list, tuple)) else [user]
        for item in items:
            if not callable(item):
                raise ParameterError("a", "needs callables x -> a(x)")
            out.append(item)
    out.extend(_PowerShift(p) for p in _DEFAULT_POWERS)
    seen: set[str] = set()
    unique = []
    for fn in out:
        lbl = _fn_label(fn)
        if lbl not in seen:
            seen.add(lbl)
            unique.append(fn)
    return unique


def _fn_label(fn) -> str:
    lbl = getattr(fn, "label", None)
    return lbl if lbl else f"a={getattr(fn, '__name__', 'custom')}"


def _atom_probe(dist, params) -> list[float]:
    floor = float(params.get("mass_floor", _ATOM_MASS_FLOOR))
    ceil = float(params.get("loc_ceiling", _ATOM_LOC_CEILING))
    try:
        pairs = dist.atoms(floor, ceil) if ceil > 0 else []
    except ParameterError:
        pairs = []
    locs = {float(loc) for loc, _ in pairs}
    for d in params.get("d", ()):
        d = float(d)
        if d <= 0:
            raise ParameterError("d", f"probe points must be positive, "
                                      f"got {d}")
        locs.add(d)
    return sorted(locs)


def check_condition(condition_id: str, F: HeavyTailDistribution,
                    G: HeavyTailDistribution, params: dict | None = None,
                    grid=None, q: QuadratureSpec | None = None,
                    thresholds: VerdictThresholds | None = None
                    ) -> ConditionReport:
    """Probe one named asymptotic condition on the product tail H of F, G.

    Condition semantics (H is the tail of the independent product XY):

    - ``EQ11``  (forall b > 0):       G(x) = o(H(bx)).
    - ``EQ12``  (forall d in D[F]):   G(x/d) - G((x+1)/d) = o(H(x)),
      with D[F] the positive discontinuity points of F; empty D[F] makes
      the condition hold vacuously.
    - ``EQ13``  (exists t >= 1):      H(x) = O(F(x/t)).
    - ``EQ14``  (exists d in D[G]):   H(x) = O(F(x/d)).
    - ``T1A_D`` (exists probe a):     G(a(x)) = o(H(x)) for a(x) rising
      to infinity with a(x)/x falling.
    - ``T31``   (exists probe a):     G(a(x)) = O(H(x)) and
      F(x/a(x)) = O(H(x)) with a(x) and x/a(x) both rising.
    - ``T32``:  F(x-1/x) ~ F(x) and G(x-1/x) ~ G(x), plus some probe a
      with G(a(x)) = O(H(x)) and F(a(x)) = O(H(x)).

    ``params`` may carry probe overrides: ``b`` / ``d`` / ``t`` iterables,
    ``a`` (callable or list of callables; InsensitivityFunction works),
    ``mass_floor`` / ``loc_ceiling`` for the atom scan, and ``H`` (a
    precomputed product representation used instead of fresh quadrature).

    Little-o conditions require VANISHES per parameter; big-O conditions
    require BOUNDED (a convergent or vanishing ratio counts as bounded).
    Universally quantified conditions fail as soon as one parameter fails
    decisively; existential ones fail only when every probe fails.
    """
    if condition_id not in CONDITION_IDS:
        raise ParameterError("condition_id",
                             f"unknown condition {condition_id!r}; "
                             f"expected one of {CONDITION_IDS}")
    for name, dist in (("F", F), ("G", G)):
        if not isinstance(dist, HeavyTailDistribution):
            raise ParameterError(name, "needs a distribution instance")
    params = dict(params or {})
    q = q or QuadratureSpec()
    th = thresholds or VerdictThresholds()
    xs = as_grid_array(grid)
    h_fn = _product_log_eval(F, G, q, params.get("H"))

    if condition_id == "EQ11":
        bs = sorted({float(b) for b in params.get("b", _DEFAULT_B)})
        if not bs or min(bs) <= 0:
            raise ParameterError("b", "needs positive scale factors")
        jobs = [(f"b={b:g}", _eq11_job(G, h_fn, b, xs, th)) for b in bs]
        ev = _run_jobs(jobs)
        marks = [_decide(dg, "VANISHES", th) for dg in ev.values()]
        return ConditionReport("EQ11", ev, _aggregate(marks, "forall"),
                               "VANISHES", "forall")

    if condition_id == "EQ12":
        ds = _atom_probe(F, params)
        if not ds:
            note = ("no discontinuity points of F found (mass floor "
                    f"{params.get('mass_floor', _ATOM_MASS_FLOOR):g}, "
                    f"location ceiling "
                    f"{params.get('loc_ceiling', _ATOM_LOC_CEILING):g}); "
                    "the condition holds vacuously")
            return ConditionReport("EQ12", {}, HOLDS_EVIDENCE, "VANISHES",
                                   "forall", notes=(note,))
        jobs = [(f"d={d:g}", _eq12_job(G, h_fn, d, xs, th)) for d in ds]
        ev = _run_jobs(jobs)
        marks = [_decide(dg, "VANISHES", th) for dg in ev.values()]
        return ConditionReport("EQ12", ev, _aggregate(marks, "forall"),
                               "VANISHES", "forall")

    if condition_id in ("EQ13", "EQ14"):
        if condition_id == "EQ13":
            ts = {float(t) for t in params.get("t", _DEFAULT_T)}
            if math.isfinite(G.support_hi) and G.support_hi > 0:
                # a bounded multiplier makes the relation hold from its
                # endpoint on, so the endpoint is the natural probe
                ts.add(max(1.0, G.support_hi))
            ts = sorted(ts)
            if not ts or min(ts) < 1.0:
                raise ParameterError("t", "needs scale factors t >= 1")
            key = "t"
        else:
            ts = _atom_probe(G, params)
            if not ts:
                raise ParameterError(
                    "G", "needs a discontinuous G: no atoms at the probe "
                         "floor, and no d values were supplied")
            key = "d"
        jobs = [(f"{key}={t:g}", _big_o_job(F, h_fn, t, xs, th, key))
                for t in ts]
        ev = _run_jobs(jobs)
        marks = [_decide(dg, "BOUNDED", th) for dg in ev.values()]
        return ConditionReport(condition_id, ev,
                               _aggregate(marks, "exists"),
                               "BOUNDED", "exists")

    if condition_id == "T1A_D":
        fns = _probe_functions(params)
        jobs = [(_fn_label(fn), _shift_o_job(G, h_fn, fn, xs, th))
                for fn in fns]
        ev = _run_jobs(jobs)
        marks = [_decide(dg, "VANISHES", th) for dg in ev.values()]
        return ConditionReport("T1A_D", ev, _aggregate(marks, "exists"),
                               "VANISHES", "exists")

    if condition_id == "T31":
        fns = _probe_functions(params)
        jobs = []
        for fn in fns:
            lbl = _fn_label(fn)
            jobs.append((f"{lbl} | G(a(x))/H(x)",
                         _shift_o_job(G, h_fn, fn, xs, th)))
            jobs.append((f"{lbl} | F(x/a(x))/H(x)",
                         _inverse_shift_job(F, h_fn, fn, xs, th)))
        ev = _run_jobs(jobs)
        marks = []
        for fn in fns:
            lbl = _fn_label(fn)
            pair = [_decide(ev[f"{lbl} | G(a(x))/H(x)"], "BOUNDED", th),
                    _decide(ev[f"{lbl} | F(x/a(x))/H(x)"], "BOUNDED", th)]
            marks.append(_combine_pair(pair))
        return ConditionReport("T31", ev, _aggregate(marks, "exists"),
                               "BOUNDED", "exists")

    # T32
    fns = _probe_functions(params)
    jobs = [("F(x-1/x)/F(x)", _near_shift_job(F, xs, th, "F(x-1/x)/F(x)")),
            ("G(x-1/x)/G(x)", _near_shift_job(G, xs, th, "G(x-1/x)/G(x)"))]
    for fn in fns:
        lbl = _fn_label(fn)
        jobs.append((f"{lbl} | G(a(x))/H(x)",
                     _shift_o_job(G, h_fn, fn, xs, th)))
        jobs.append((f"{lbl} | F(a(x))/H(x)",
                     _shift_o_job(F, h_fn, fn, xs, th,
                                  label_side="F")))
    ev = _run_jobs(jobs)
    shift_marks = [_decide(ev["F(x-1/x)/F(x)"], "CONVERGES_TO", th, 1.0),
                   _decide(ev["G(x-1/x)/G(x)"], "CONVERGES_TO", th, 1.0)]
    group_marks = []
    for fn in fns:
        lbl = _fn_label(fn)
        pair = [_decide(ev[f"{lbl} | G(a(x))/H(x)"], "BOUNDED", th),
                _decide(ev[f"{lbl} | F(a(x))/H(x)"], "BOUNDED", th)]
        group_marks.append(_combine_pair(pair))
    shifts = _aggregate(shift_marks, "forall")
    growth = _aggregate(group_marks, "exists")
    if FAILS_EVIDENCE in (shifts, growth):
        overall = FAILS_EVIDENCE
    elif shifts == HOLDS_EVIDENCE and growth == HOLDS_EVIDENCE:
        overall = HOLDS_EVIDENCE
    else:
        overall = INCONCLUSIVE
    return ConditionReport(
        "T32", ev, overall,
        "CONVERGES_TO(1) for the unit shifts; BOUNDED for the a-curves",
        "forall+exists")


def _combine_pair(pair) -> int:
    if all(m == 1 for m in pair):
        return 1
    if any(m == -1 for m in pair):
        return -1
    return 0


def _eq11_job(G, h_fn, b, xs, th):
    def run():
        return ratio_curve(G, lambda u: h_fn(b * u), xs, thresholds=th,
                           label=f"G(x)/H({b:g}x)")
    return run


def _eq12_job(G, h_fn, d, xs, th):
    def num(us: np.ndarray) -> np.ndarray:
        hi = np.atleast_1d(G.log_sf(us / d))
        lo = np.atleast_1d(G.log_sf((us + 1.0) / d))
        return np.asarray([log_diff_exp(a, b) for a, b in zip(hi, lo)])

    def run():
        return ratio_curve(num, h_fn, xs, thresholds=th,
                           label=f"[G(x/{d:g})-G((x+1)/{d:g})]/H(x)")
    return run


def _big_o_job(F, h_fn, t, xs, th, key):
    def run():
        return ratio_curve(h_fn, lambda u: np.atleast_1d(F.log_sf(u / t)),
                           xs, thresholds=th, label=f"H(x)/F(x/{t:g})")
    return run


def _shift_o_job(dist, h_fn, fn, xs, th, label_side: str = "G"):
    def run():
        return ratio_curve(
            lambda u: np.atleast_1d(dist.log_sf(np.asarray(fn(u), float))),
            h_fn, xs, thresholds=th,
            label=f"{label_side}(a(x))/H(x), {_fn_label(fn)}")
    return run


def _inverse_shift_job(F, h_fn, fn, xs, th):
    def run():
        return ratio_curve(
            lambda u: np.atleast_1d(
                F.log_sf(u / np.asarray(fn(u), dtype=float))),
            h_fn, xs, thresholds=th,
            label=f"F(x/a(x))/H(x), {_fn_label(fn)}")
    return run


def _near_shift_job(dist, xs, th, label):
    def run():
        return ratio_curve(
            lambda u: np.atleast_1d(dist.log_sf(u - 1.0 / u)), dist, xs,
            thresholds=th, label=label)
    return run


# ---------------------------------------------------------------------------
# insensitivity functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class InsensitivityFunction:
    """A shift scale a(x) under which a tail barely moves.

    Construction guarantees, at the build nodes and everywhere between
    them (log-log interpolation preserves all three):

    - a(x) is non-decreasing,
    - a(x)/x is non-increasing,
    - a(x) <= sqrt(x).

    At the nodes the defining bound F(x - a(x))/F(x) <= 1 + delta holds
    as well.  Below the first node a(x) shrinks proportionally to x; past
    the last node the final log-log slope continues, clamped to 1/2 so
    the square-root cap survives.
    """

    log_x: np.ndarray
    log_a: np.ndarray
    delta: float
    gamma: float
    label: str = "a=insensitive"

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        scalar = arr.ndim == 0
        lx = np.log(np.maximum(np.atleast_1d(arr), 1e-300))
        la = np.interp(lx, self.log_x, self.log_a)
        below = lx < self.log_x[0]
        la[below] = self.log_a[0] + (lx[below] - self.log_x[0])
        above = lx > self.log_x[-1]
        if above.any():
            run = self.log_x[-1] - self.log_x[-2]
            slope = (self.log_a[-1] - self.log_a[-2]) / run if run > 0 else 0.0
            slope = min(max(slope, 0.0), 0.5)
            la[above] = self.log_a[-1] + slope * (lx[above] - self.log_x[-1])
        out = np.exp(la)
        return float(out[0]) if scalar else out.reshape(arr.shape)

    @property
    def x_nodes(self) -> np.ndarray:
        return np.exp(self.log_x)

    @property
    def a_values(self) -> np.ndarray:
        return np.exp(self.log_a)

    def to_dict(self) -> dict:
        return {"label": self.label, "delta": self.delta,
                "gamma": self.gamma,
                "x": [float(t) for t in self.x_nodes],
                "a": [float(t) for t in self.a_values]}


def _largest_shift(F, x: float, log_bound: float) -> float:
    """Largest a <= sqrt(x) with F(x-a)/F(x) <= the bound, by bisection."""
    cap = math.sqrt(x)
    base = float(F.log_sf(x))
    if not math.isfinite(base):
        return 0.0

    def ok(a: float) -> bool:
        return float(F.log_sf(x - a)) - base <= log_bound

    if ok(cap):
        return cap
    lo, hi = 0.0, cap
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def build_insensitivity(F: HeavyTailDistribution, delta: float,
                        grid=None, q: QuadratureSpec | None = None,
                        thresholds: VerdictThresholds | None = None
                        ) -> InsensitivityFunction:
    """Construct a(x) with F(x - a(x)) ~ F(x) at tolerance delta.

    F must show long-tail evidence first (shift-ratio gamma estimate near
    zero); otherwise no growing a can keep the ratio near 1 and the
    construction refuses, naming the estimate.

    At each grid node the largest admissible a <= sqrt(x) is found by
    bisection on the exact bound F(x-a)/F(x) <= 1 + delta.  The node
    values are then monotonized without ever exceeding an admissible
    value: first the largest non-decreasing minorant (a running minimum
    from the right), then the largest minorant with a(x)/x non-increasing
    (a running minimum of the slack ratio).  Both passes lower values
    only, so the delta bound survives at every node.
    """
    if not 0.0 < delta <= 0.5:
        raise ParameterError("delta", f"needs 0 < delta <= 0.5, got {delta}")
    th = thresholds or VerdictThresholds()
    xs = as_grid_array(grid)
    gate = classify(F, "L_gamma", xs, q, th)
    gamma = gate.estimates.get("gamma")
    limit = math.log1p(th.tol_c)
    if gate.member is not True or gamma is None or abs(gamma) > limit:
        shown = "unavailable" if gamma is None else f"{gamma:.4g}"
        raise ParameterError(
            "F", "needs long-tail evidence: the shift-ratio gamma estimate "
                 f"is {shown} (want |gamma| <= {limit:.3g} with a "
                 f"convergent shift ratio; verdict was {gate.verdict})")

    log_bound = math.log1p(delta)
    cap = np.asarray([_largest_shift(F, float(x), log_bound) for x in xs])
    if np.any(cap <= 0.0):
        bad = xs[cap <= 0.0][0]
        raise ParameterError(
            "F", f"no positive admissible shift at x = {bad:g}; the tail "
                 "jumps there and cannot be shift-insensitive")

    # monotonize from below: never exceed the pointwise admissible cap
    a = np.minimum.accumulate(cap[::-1])[::-1]
    a = xs * np.minimum.accumulate(a / xs)

    if np.any(np.diff(a) < 0) or np.any(np.diff(a / xs) > 0):
        raise ParameterError("grid", "monotonization failed; the grid is "
                                     "too irregular for a joint fit")
    return InsensitivityFunction(
        log_x=np.log(xs), log_a=np.log(a), delta=float(delta),
        gamma=float(gamma), label=f"a=insensitive(delta={delta:g})")


def knot_probe_grid(V: HeavyTailDistribution, *, doubles: bool = True,
                    floor: float = 0.0) -> np.ndarray:
    """Probe grid following a law's own structural break points.

    Laws whose tail alternates between regimes (descents and flats, say)
    hide their limit behaviour from a generic geometric grid; probing at
    the break points x_n, and optionally 2 x_n, lands exactly where the
    regimes meet.
    """
    if hasattr(V, "chain_knots"):
        kn = np.asarray(V.chain_knots(), dtype=float)
    else:
        kn = np.asarray(V.knots(), dtype=float)
    kn = kn[np.isfinite(kn) & (kn > 0.0) & (kn <= 1e290)]
    if doubles and kn.size:
        kn = np.concatenate([kn, 2.0 * kn])
    kn = np.unique(kn[kn >= floor])
    if kn.size < 2:
        raise ParameterError("V", "needs at least two structural break "
                                  "points to build a probe grid")
    return kn


# ---------------------------------------------------------------------------
# the product subexponentiality verdict
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SubexpVerdict:
    """Prediction and cross-check for subexponentiality of a product.

    ``status`` is REFUSED when the premise (F subexponential) lacks
    member evidence; then only ``premise`` is populated.  Otherwise the
    prediction follows the discontinuity rule: the product is judged
    subexponential exactly when F has no discontinuity points, or it has
    some and the matching increment condition (EQ12) holds.  A direct
    membership probe of the tabulated product provides the cross-check.
    """

    status: str
    premise: ClassDiagnosis
    discontinuity_points: tuple = ()
    eq12: ConditionReport | None = None
    predicted_member: bool | None = None
    cross_check: ClassDiagnosis | None = None
    agreement: str | None = None
    notes: tuple = ()

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "premise": self.premise.to_dict(),
            "discontinuity_points": [float(d) for d in
                                     self.discontinuity_points],
            "eq12": self.eq12.to_dict() if self.eq12 else None,
            "predicted_member": self.predicted_member,
            "cross_check": (self.cross_check.to_dict()
                            if self.cross_check else None),
            "agreement": self.agreement,
            "notes": list(self.notes),
        }


def _auto_grid(V: HeavyTailDistribution, lo_sf: float = 1e-3,
               hi_sf: float = 1e-10, count: int = 40) -> np.ndarray:
    """Geometric probe grid matched to where V's tail actually lives."""
    x0 = V.inverse_log_sf(math.log(lo_sf))
    x1 = V.inverse_log_sf(math.log(hi_sf))
    if not (math.isfinite(x0) and math.isfinite(x1)) or x0 <= 0 \
            or x1 <= x0 * 1.5:
        return GeometricGrid().values()
    ratio = (x1 / x0) ** (1.0 / (count - 1))
    return GeometricGrid(x0=x0, ratio=max(ratio, 1.02), count=count).values()


def product_subexp_verdict(F: HeavyTailDistribution,
                           G: HeavyTailDistribution, grid=None,
                           q: QuadratureSpec | None = None,
                           thresholds: VerdictThresholds | None = None,
                           product_grid: GridSpec | None = None
                           ) -> SubexpVerdict:
    """Predict whether the product tail is subexponential, then check.

    The engine first demands member evidence for F itself (the premise);
    without it the verdict is refused rather than guessed.  Given the
    premise, the prediction is mechanical: no discontinuity points in F
    means membership outright, otherwise membership rides on the
    increment condition EQ12.  Independently, the product distribution is
    tabulated and probed for membership directly, and the report states
    whether prediction and probe agree.
    """
    q = q or QuadratureSpec()
    th = thresholds or VerdictThresholds()
    premise_grid = grid if grid is not None else _auto_grid(F)
    premise = classify(F, "S", premise_grid, q, th)
    if premise.member is not True:
        direction = ("fails" if premise.member is False else "is inconclusive")
        return SubexpVerdict(
            status="REFUSED", premise=premise,
            notes=(f"the subexponentiality premise for F {direction}: "
                   f"{premise.verdict}",))

    try:
        pairs = F.atoms(_ATOM_MASS_FLOOR, _ATOM_LOC_CEILING)
    except ParameterError:
        pairs = []
    dpts = tuple(sorted(float(loc) for loc, _ in pairs))

    notes: list[str] = []
    if not dpts:
        eq12 = None
        predicted: bool | None = True
        notes.append("F has no discontinuity points at the probe floor; "
                     "membership is predicted outright")
    else:
        eq12 = check_condition("EQ12", F, G, {"d": dpts}, grid, q, th)
        if eq12.overall == HOLDS_EVIDENCE:
            predicted = True
        elif eq12.overall == FAILS_EVIDENCE:
            predicted = False
        else:
            predicted = None

    spec = product_grid or GridSpec(nodes=512, eps_lo=1e-5)
    H = product_dist(F, G, spec, q)
    cross = classify(H, "S", _auto_grid(H), q, th)

    if predicted is None or cross.member is None:
        agreement = "inconclusive"
    elif predicted == cross.member:
        agreement = "agree"
    else:
        agreement = "disagree"
    return SubexpVerdict(status="OK", premise=premise,
                         discontinuity_points=dpts, eq12=eq12,
                         predicted_member=predicted, cross_check=cross,
                         agreement=agreement, notes=tuple(notes))
