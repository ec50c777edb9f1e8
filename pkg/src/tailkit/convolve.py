"""Product and k-fold sum convolution tails computed in log space.

The product tail of independent X ~ F and Y ~ G is

    H_bar(x) = P(XY > x) = integral over (0, inf) of F_bar(x/y) G(dy),

and the k-fold sum tail of V is P(V_1 + ... + V_k > x).  Both are evaluated
as Stieltjes integrals against one side's measure: exact sums over that
side's atoms plus adaptive Gauss-Kronrod quadrature of its density in log
space.  Whenever the evaluation side has support bounded away from zero the
far measure tail collapses into an exact survival-function term instead of
a truncated integral.

Grids produced by :func:`product_dist` store monotone cubic interpolants of
(log x, log sf) and behave like ordinary distributions, so products can be
iterated and re-used as integrands or integrators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator

from .distributions import (
    Degenerate,
    HeavyTailDistribution,
    LatticePower,
    ParameterError,
    Scaled,
    scale,
)
from .grids import bounded_tail_nodes, geometric_nodes
from .quadrature import (
    LOG_ZERO,
    QuadratureError,
    QuadratureSpec,
    log_diff_exp,
    log_quad,
    logsumexp_all,
    logsumexp_pair,
)

__all__ = [
    "GridSpec",
    "GriddedDistribution",
    "mc_product_tail",
    "product_dist",
    "product_tail",
    "sum_self_tail",
]

_MAX_EXTENSIONS = 100
_EXTEND_LOG_STEP = 2.0
_SUM_NODES = 1024
_MAX_FOLD = 8
_LATTICE_BLOCK = 1 << 20
_LATTICE_EXACT_CAP = 1 << 26


def _log1mexp(v: float) -> float:
    """log(1 - exp(v)) for v <= 0."""
    if v >= 0.0:
        return LOG_ZERO
    if v == LOG_ZERO:
        return 0.0
    return math.log(-math.expm1(v))


@dataclass(frozen=True)
class GridSpec:
    """Resolution and coverage of a tabulated product distribution.

    The grid spans from the x where at most ``eps_lo`` probability sits
    below it up to the x where at most ``eps_hi`` survives past it, with
    ``nodes`` points spaced uniformly in log x (clustered toward a finite
    support endpoint when there is one).
    """

    nodes: int = 512
    eps_lo: float = 1e-4
    eps_hi: float = 1e-12
    interpolation: str = "pchip"

    def __post_init__(self):
        if not isinstance(self.nodes, int) or self.nodes < 16:
            raise ParameterError("nodes", "needs an int >= 16")
        if not 0.0 < self.eps_lo < 0.5:
            raise ParameterError("eps_lo", "needs 0 < eps_lo < 0.5")
        if not 0.0 < self.eps_hi < 0.5:
            raise ParameterError("eps_hi", "needs 0 < eps_hi < 0.5")
        if self.interpolation not in ("pchip", "linear"):
            raise ParameterError("interpolation", "must be 'pchip' or 'linear'")


_TAIL_CHART_SPLIT = 1.5  # log-distance from a finite endpoint


class _PiecewiseCurve:
    """Independent interpolants on sections split at known curvature breaks."""

    def __init__(self, pieces: list, bounds: np.ndarray):
        self.pieces = pieces
        self.bounds = bounds          # interior section boundaries, ascending

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        idx = np.searchsorted(self.bounds, s, side="right")
        out = np.empty_like(s)
        for k, piece in enumerate(self.pieces):
            m = idx == k
            if np.any(m):
                out[m] = piece(s[m])
        return out

    def derivative(self) -> "_PiecewiseCurve":
        return _PiecewiseCurve([p.derivative() for p in self.pieces],
                               self.bounds)


def _section_spline(s: np.ndarray, v: np.ndarray):
    """C2 spline of non-increasing data, or PCHIP when the spline wiggles.

    The unconstrained spline is an order of h more accurate than a shape
    preserving one; it is only rejected if its slope turns positive anywhere
    on a dense panel probe, which flat or noisy data can cause.
    """
    if s.size >= 4:
        try:
            cand = CubicSpline(s, v, bc_type="not-a-knot")
        except Exception:
            cand = None
        if cand is not None:
            probe = np.linspace(0.0, 1.0, 9)
            ss = (s[:-1, None] + np.diff(s)[:, None] * probe[None, :]).ravel()
            if np.all(cand.derivative()(ss) <= 0.0):
                return cand
    return PchipInterpolator(s, v, extrapolate=False)


def _monotone_falling_spline(s: np.ndarray, v: np.ndarray,
                             cuts: np.ndarray | None = None):
    """Spline s -> v sectioned at cut abscissas where curvature breaks.

    A global spline rings around a second-derivative break; splitting at the
    known break (which is always a node) keeps every section smooth.
    """
    if cuts is not None and cuts.size:
        keep = cuts[(cuts > s[0]) & (cuts < s[-1])]
    else:
        keep = np.empty(0)
    if keep.size == 0:
        return _section_spline(s, v)
    idx = np.searchsorted(s, keep, side="left")
    idx = idx[(s[np.clip(idx, 0, s.size - 1)] == keep)]  # cuts must be nodes
    if idx.size == 0:
        return _section_spline(s, v)
    pieces = []
    edges = [0] + list(idx) + [s.size - 1]
    for a, b in zip(edges[:-1], edges[1:]):
        pieces.append(_section_spline(s[a:b + 1], v[a:b + 1]))
    return _PiecewiseCurve(pieces, s[idx])


class GriddedDistribution(HeavyTailDistribution):
    """Distribution tabulated as (log x, log sf) with monotone interpolation.

    Mass below the first node is carried as a pseudo-atom at the first node
    and mass beyond the last node as a pseudo-atom there when the support is
    bounded; unbounded tails extrapolate log-linearly past the grid.  Both
    pseudo-atoms are internal bookkeeping for integration, not genuine atoms
    of the represented law, so :meth:`atoms` stays empty.

    Bounded supports get a second interpolation chart near the endpoint: in
    sigma = -log(log-distance to the endpoint) the survival curve loses its
    logarithmic singularity and interpolates to near machine accuracy, which
    a single log-x chart cannot deliver there.
    """

    has_density = True

    def __init__(self, log_x: Sequence[float], log_sf_values: Sequence[float], *,
                 support_hi: float = math.inf, interpolation: str = "pchip",
                 tolerance: float = 1e-7, family_spec: dict | None = None,
                 shape_breaks: Sequence[float] = ()):
        u = np.asarray(log_x, dtype=float)
        v = np.asarray(log_sf_values, dtype=float)
        if u.ndim != 1 or u.size < 4:
            raise ParameterError("log_x", "needs a 1-d array with >= 4 nodes")
        if v.shape != u.shape:
            raise ParameterError("log_sf_values", "must match log_x in shape")
        if not np.all(np.isfinite(u)):
            raise ParameterError("log_x", "nodes must be finite")
        if np.any(np.diff(u) <= 0):
            raise ParameterError("log_x", "nodes must be strictly increasing")
        if np.any(np.isnan(v)) or np.any(v == np.inf):
            raise ParameterError("log_sf_values", "values must be <= 0 and not NaN")

        # Trim trailing exact zeros of the sf; they carry no information and
        # break log-space interpolation.
        finite = v > LOG_ZERO
        if not finite[0]:
            raise ParameterError("log_sf_values", "first node must have sf > 0")
        last = int(np.max(np.nonzero(finite)[0]))
        if last + 1 < 4:
            raise ParameterError("log_sf_values", "needs >= 4 nodes with sf > 0")
        u, v = u[: last + 1], v[: last + 1]

        v = np.minimum(v, 0.0)
        repaired = np.minimum.accumulate(v)
        worst = float(np.max(v - repaired))
        if worst > 40.0 * max(tolerance, 1e-15):
            raise ParameterError(
                "log_sf_values",
                f"non-monotone by {worst:.3e} in log units, beyond the "
                f"declared tolerance {tolerance:.3e}")
        v = repaired

        self._u = u
        self._v = v
        self._x0 = math.exp(u[0])
        self._x_end = math.exp(u[-1])
        self.tolerance = float(tolerance)
        self.support_lo = self._x0
        self.support_hi = float(support_hi)
        self.interpolation = interpolation
        self.family_spec = family_spec or {
            "family": "gridded", "nodes": int(u.size)}
        sb = np.asarray(shape_breaks, dtype=float)
        self._shape_breaks = np.sort(
            sb[(sb > self._x0) & (sb < self._x_end)]) if sb.size else sb

        # Endpoint chart applies when the grid runs into a finite endpoint.
        self._u_seam = math.inf
        self._sigma = None
        self._tail_interp = None
        self._tail_dinterp = None
        if math.isfinite(support_hi):
            u_end = math.log(support_hi)
            d = u_end - u
            if d[-1] <= 0:
                raise ParameterError(
                    "support_hi", "endpoint must lie beyond the last node")
            in_tail = d <= _TAIL_CHART_SPLIT
            if interpolation == "pchip" and int(np.sum(in_tail)) >= 4:
                first = int(np.argmax(in_tail))
                seam = max(first - 1, 0)   # share one node across the seam
                # the seam panel itself belongs to the endpoint chart, so the
                # bulk interpolant never gets evaluated where its derivative
                # estimate is contaminated by the section-width jump
                self._u_seam = u[seam]
                self._u_end_log = u_end
                sigma = -np.log(d[seam:])
                self._sigma = sigma
                cuts = None
                if self._shape_breaks.size:
                    ub = np.log(self._shape_breaks)
                    ub = ub[(ub > u[seam]) & (ub < u[-1])]
                    cuts = -np.log(u_end - ub)
                self._tail_interp = _monotone_falling_spline(
                    sigma, v[seam:], cuts)
                self._tail_dinterp = self._tail_interp.derivative()

        if interpolation == "pchip":
            self._interp = PchipInterpolator(u, v, extrapolate=False)
            self._dinterp = self._interp.derivative()
            d_end = float(self._dinterp(u[-1]))
        else:
            self._interp = None
            self._dinterp = None
            d_end = (v[-1] - v[-2]) / (u[-1] - u[-2])
        secant = (v[-1] - v[-2]) / (u[-1] - u[-2])
        slope = d_end if d_end < 0.0 else secant
        self._slope_end = float(min(slope, 0.0))

    # -- interpolation primitives -----------------------------------------

    def _interp_v(self, uu: np.ndarray) -> np.ndarray:
        if self._interp is None:
            return np.interp(uu, self._u, self._v)
        out = self._interp(uu)
        if self._tail_interp is not None:
            tail = uu >= self._u_seam
            if np.any(tail):
                sig = -np.log(self._u_end_log - uu[tail])
                sig = np.minimum(sig, self._sigma[-1])
                out[tail] = self._tail_interp(sig)
        return out

    def _interp_dv(self, uu: np.ndarray) -> np.ndarray:
        """dv/du at uu, chart-aware."""
        if self._dinterp is None:
            idx = np.clip(np.searchsorted(self._u, uu, side="right") - 1,
                          0, self._u.size - 2)
            return (self._v[idx + 1] - self._v[idx]) / (self._u[idx + 1] - self._u[idx])
        out = self._dinterp(uu)
        if self._tail_dinterp is not None:
            tail = uu >= self._u_seam
            if np.any(tail):
                d = self._u_end_log - uu[tail]
                sig = np.minimum(-np.log(d), self._sigma[-1])
                # dv/du = (dv/dsigma) * (dsigma/du) with dsigma/du = 1/d
                out[tail] = self._tail_dinterp(sig) / d
        return out

    # -- distribution interface --------------------------------------------

    def _log_sf(self, xs: np.ndarray) -> np.ndarray:
        out = np.zeros_like(xs)
        positive = xs > 0.0
        u = np.full_like(xs, -np.inf)
        u[positive] = np.log(xs[positive])
        inside = positive & (xs >= self._x0) & (u <= self._u[-1])
        out[inside] = self._interp_v(u[inside])
        beyond = positive & (u > self._u[-1])
        if np.any(beyond):
            if math.isfinite(self.support_hi):
                out[beyond] = LOG_ZERO
            else:
                out[beyond] = self._v[-1] + self._slope_end * (u[beyond] - self._u[-1])
        return np.minimum(out, 0.0)

    def _log_density(self, xs: np.ndarray) -> np.ndarray:
        out = np.full_like(xs, LOG_ZERO)
        ok = (xs >= self._x0) & (xs > 0.0)
        if not np.any(ok):
            return out
        u = np.log(xs[ok])
        vals = np.full(u.shape, LOG_ZERO)
        inside = u <= self._u[-1]
        vv = self._interp_v(u[inside])
        dv = self._interp_dv(u[inside])
        falling = dv < 0.0
        seg = np.full(vv.shape, LOG_ZERO)
        seg[falling] = vv[falling] + np.log(-dv[falling]) - u[inside][falling]
        vals[inside] = seg
        if not math.isfinite(self.support_hi) and self._slope_end < 0.0:
            ub = u[~inside]
            vals[~inside] = (self._v[-1] + self._slope_end * (ub - self._u[-1])
                             + math.log(-self._slope_end) - ub)
        out[ok] = vals
        return out

    def knots(self) -> np.ndarray:
        pts = [self._shape_breaks]
        if math.isfinite(self.support_hi):
            # sf drops to zero past the last node; the chart seam carries a
            # small density kink worth resolving explicitly
            if self._tail_interp is not None:
                pts.append(np.asarray([math.exp(self._u_seam)]))
            pts.append(np.asarray([self._x_end]))
        out = np.concatenate(pts) if pts else np.empty(0)
        return np.unique(out) if out.size else out

    def curvature_breaks(self) -> np.ndarray:
        # the chart seam in knots() is interpolation bookkeeping, not a
        # feature of the represented law
        if math.isfinite(self.support_hi):
            return np.unique(np.append(self._shape_breaks, self._x_end))
        return self._shape_breaks.copy()

    def head_atom(self) -> tuple[float, float] | None:
        """Location and log mass of the below-grid pseudo-atom, if any."""
        lm = _log1mexp(self._v[0])
        if lm == LOG_ZERO:
            return None
        return self._x0, lm

    def tail_atom(self) -> tuple[float, float] | None:
        """Location and log mass of the beyond-grid pseudo-atom.

        Only bounded-support grids carry one; unbounded grids extrapolate.
        """
        if not math.isfinite(self.support_hi):
            return None
        if self._v[-1] == LOG_ZERO:
            return None
        return self._x_end, float(self._v[-1])

    def grid_nodes(self) -> np.ndarray:
        return np.exp(self._u.copy())

    def inverse_log_sf(self, log_p: float) -> float:
        if not log_p <= 0.0:
            raise ValueError("log_p must be <= 0")
        if log_p == 0.0:
            return 0.0
        if log_p >= self._v[0]:
            return self._x0
        if log_p < self._v[-1]:
            if math.isfinite(self.support_hi):
                return self._x_end
            if self._slope_end == 0.0:
                return math.inf
            return math.exp(self._u[-1] + (log_p - self._v[-1]) / self._slope_end)
        lo_i = int(np.searchsorted(-self._v, -log_p, side="left"))
        a, b = self._u[lo_i - 1], self._u[lo_i]
        for _ in range(80):
            mid = 0.5 * (a + b)
            if float(self._interp_v(np.asarray([mid]))[0]) <= log_p:
                b = mid
            else:
                a = mid
        return math.exp(b)

    def _sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        us = 1.0 - rng.random(n)
        return np.asarray([self.inverse_log_sf(math.log(ui)) for ui in us])


def _grid_from_law(law: HeavyTailDistribution, spec: GridSpec,
                   q: QuadratureSpec,
                   family_spec: dict | None = None) -> GriddedDistribution:
    """Tabulate an existing law's log sf directly (no quadrature)."""
    x_lo, x_hi, hi = _product_anchors(law, Degenerate(1.0), spec)
    nodes = _product_nodes(x_lo, x_hi, hi, spec)
    nodes, kept = _insert_breaks(nodes, _critical_points(law))
    vals = law.log_sf(nodes)
    return _build_grid(np.log(nodes), vals, hi, spec, q, family_spec,
                       shape_breaks=kept)


# ---------------------------------------------------------------------------
# measure decomposition


@dataclass
class _MeasureParts:
    atom_locs: np.ndarray
    atom_log_mass: np.ndarray
    has_density: bool
    log_density: Callable[[np.ndarray], np.ndarray] | None
    dens_lo: float
    dens_hi: float
    knots: np.ndarray
    lattice: LatticePower | None = None

    def log_sf(self, x: float) -> float:  # pragma: no cover - set in factory
        raise NotImplementedError


def _measure_parts(M: HeavyTailDistribution, ceiling: float) -> _MeasureParts:
    """Split a measure into exact atoms and a density for integration.

    ``ceiling`` bounds the region that must be resolved atom-by-atom; all
    mass above it is handled exactly through the measure's survival
    function by the caller.
    """
    if isinstance(M, LatticePower):
        parts = _MeasureParts(
            atom_locs=np.empty(0), atom_log_mass=np.empty(0),
            has_density=False, log_density=None,
            dens_lo=0.0, dens_hi=0.0, knots=np.empty(0), lattice=M)
    elif isinstance(M, GriddedDistribution):
        locs, masses = [], []
        head = M.head_atom()
        if head is not None and head[0] <= ceiling:
            locs.append(head[0])
            masses.append(head[1])
        tail = M.tail_atom()
        if tail is not None and tail[0] <= ceiling:
            locs.append(tail[0])
            masses.append(tail[1])
        hi = M._x_end if math.isfinite(M.support_hi) else math.inf
        parts = _MeasureParts(
            atom_locs=np.asarray(locs), atom_log_mass=np.asarray(masses),
            has_density=True, log_density=M.log_density,
            dens_lo=M._x0, dens_hi=hi, knots=np.empty(0))
    else:
        pairs = M.atoms(mass_floor=0.0, loc_ceiling=ceiling)
        locs = np.asarray([p[0] for p in pairs])
        masses = np.asarray([p[1] for p in pairs])
        lm = np.full(locs.shape, LOG_ZERO)
        pos = masses > 0.0
        lm[pos] = np.log(masses[pos])
        parts = _MeasureParts(
            atom_locs=locs, atom_log_mass=lm,
            has_density=M.has_density, log_density=M.log_density,
            dens_lo=max(M.support_lo, 0.0), dens_hi=M.support_hi,
            knots=np.asarray(M.knots(), dtype=float))
    parts.log_sf = M.log_sf  # type: ignore[method-assign]
    return parts


# ---------------------------------------------------------------------------
# adaptive density integration with domain extension


def _extendable_log_integral(
        log_f: Callable[[np.ndarray], np.ndarray],
        lo: float, hi: float, *,
        lo_exact: bool, hi_exact: bool,
        lower_rem: Callable[[float], float],
        upper_rem: Callable[[float], float],
        breakpoints: np.ndarray,
        baseline: float,
        q: QuadratureSpec,
        lo_floor: float = -745.0) -> tuple[float, float]:
    """Integrate exp(log_f) over [lo, hi] in the transformed variable.

    Ends flagged exact need no widening.  Non-exact ends extend outward in
    steps of e**2 until the corresponding remainder bound drops below the
    truncation budget relative to everything accumulated so far (including
    ``baseline`` contributions computed by the caller).  Returns the log
    integral and a log bound combining quadrature error and the final
    remainder bounds.
    """
    if not lo < hi:
        rem = LOG_ZERO
        if not lo_exact:
            rem = logsumexp_pair(rem, lower_rem(lo))
        if not hi_exact:
            rem = logsumexp_pair(rem, upper_rem(hi))
        return LOG_ZERO, rem

    def _quad(a: float, b: float) -> tuple[float, float]:
        bk = breakpoints[(breakpoints > a) & (breakpoints < b)]
        return log_quad(log_f, a, b, breakpoints=tuple(bk),
                        rel_tol=q.rel_tol, max_panels=q.max_panels)

    total, err = _quad(lo, hi)
    log_ttail = math.log(q.truncation_tail)
    for _ in range(_MAX_EXTENSIONS):
        running = logsumexp_pair(total, baseline)
        target = running + log_ttail
        moved = False
        if not lo_exact and lo > lo_floor:
            rb = lower_rem(lo)
            if rb > target:
                new_lo = max(lo - _EXTEND_LOG_STEP, lo_floor)
                piece, perr = _quad(new_lo, lo)
                total = logsumexp_pair(total, piece)
                err = logsumexp_pair(err, perr)
                lo = new_lo
                moved = True
        if not hi_exact:
            rb = upper_rem(hi)
            if rb > logsumexp_pair(total, baseline) + log_ttail:
                new_hi = hi + _EXTEND_LOG_STEP
                piece, perr = _quad(hi, new_hi)
                total = logsumexp_pair(total, piece)
                err = logsumexp_pair(err, perr)
                hi = new_hi
                moved = True
        if not moved:
            break
    else:
        raise QuadratureError(
            "integration domain kept growing without meeting the "
            "truncation budget", partial_log=total)

    if not lo_exact:
        err = logsumexp_pair(err, lower_rem(lo))
    if not hi_exact:
        err = logsumexp_pair(err, upper_rem(hi))
    return total, err


# ---------------------------------------------------------------------------
# product tails


def _pick_sides(F: HeavyTailDistribution, G: HeavyTailDistribution):
    """Choose (evaluation side, measure side) for the product integral.

    Atom-only measures integrate exactly, so they win.  Between two
    continuous laws, prefer evaluating the side whose support starts above
    zero: the measure's far tail then collapses into one exact sf term.
    """
    f_atomic = not F.has_density
    g_atomic = not G.has_density
    if g_atomic:
        return F, G
    if f_atomic:
        return G, F
    if F.support_lo > 0.0 and G.support_lo <= 0.0:
        return F, G
    if G.support_lo > 0.0 and F.support_lo <= 0.0:
        return G, F
    return F, G


def _lattice_log_tail(E: HeavyTailDistribution, M: LatticePower, x: float,
                      q: QuadratureSpec) -> tuple[float, float]:
    """Product tail against an integer-lattice power-law measure.

    Atoms are summed exactly in blocks; past the cutoff either the
    evaluation side is identically one (exact Hurwitz tail) or the sum is
    replaced by its midpoint integral with an Euler-Maclaurin error bound.
    """
    lo_e = max(E.support_lo, 0.0)
    exact_cut = math.inf if lo_e <= 0.0 else x / lo_e

    if exact_cut <= _LATTICE_EXACT_CAP:
        n_cut = int(math.floor(exact_cut))
        terms = [LOG_ZERO]
        for start in range(1, n_cut + 1, _LATTICE_BLOCK):
            ns = np.arange(start, min(n_cut, start + _LATTICE_BLOCK - 1) + 1,
                           dtype=float)
            terms.append(logsumexp_all(M.log_mass(ns) + E.log_sf(x / ns)))
        upper = M.log_sf(float(n_cut))
        return logsumexp_pair(logsumexp_all(terms), upper), LOG_ZERO

    n0 = int(min(max(1 << 16, 32.0 * math.sqrt(x)), float(_LATTICE_EXACT_CAP)))
    terms = [LOG_ZERO]
    for start in range(1, n0 + 1, _LATTICE_BLOCK):
        ns = np.arange(start, min(n0, start + _LATTICE_BLOCK - 1) + 1,
                       dtype=float)
        terms.append(logsumexp_all(M.log_mass(ns) + E.log_sf(x / ns)))
    atom_part = logsumexp_all(terms)

    # Remaining sum over n > n0 via the midpoint integral of the continuum
    # density C t^(-beta) E_bar(x/t), starting at n0 + 1/2.
    def integrand(u: np.ndarray) -> np.ndarray:
        t = np.exp(u)
        return M.continuum_log_pdf(t) + E.log_sf(x / t) + u

    def upper_rem(uh: float) -> float:
        return M.log_sf(math.exp(uh))

    cont, cerr = _extendable_log_integral(
        integrand, math.log(n0 + 0.5), math.log(n0 + 0.5) + 12.0,
        lo_exact=True, hi_exact=False,
        lower_rem=lambda ul: LOG_ZERO, upper_rem=upper_rem,
        breakpoints=np.empty(0), baseline=atom_part, q=q)

    # Euler-Maclaurin midpoint correction: the lattice sum past the cut
    # exceeds its integral by f'(m)/24 plus a third-derivative remainder,
    # and the cut at 32 sqrt(x) keeps the log-slope of f below 1/1024
    # there, so applying the first term leaves errors of cubed-slope size.
    m = n0 + 0.5

    def log_f(t: float) -> float:
        return (float(M.continuum_log_pdf(np.asarray([t]))[0])
                + float(E.log_sf(x / t)))

    lf0 = log_f(m)
    corr_log, corr_neg, em_err = LOG_ZERO, False, LOG_ZERO
    if lf0 > LOG_ZERO:
        r = [math.exp(log_f(m + d) - lf0) for d in (-1.0, -0.5, 0.5, 1.0)]
        d1 = r[2] - r[1]
        d3 = 4.0 * (r[3] - 2.0 * r[2] + 2.0 * r[1] - r[0])
        if math.isfinite(d1) and math.isfinite(d3):
            corr_log = lf0 + math.log(abs(d1) / 24.0 + 1e-300)
            corr_neg = d1 < 0.0
            # 7/5760 |f'''| remainder plus the difference-quotient error
            em_err = lf0 + math.log(3e-3 * abs(d3) + 1e-300)
        else:
            em_err = lf0

    total = logsumexp_pair(atom_part, cont)
    if corr_log > LOG_ZERO:
        if corr_neg:
            total = log_diff_exp(total, min(corr_log, total))
        else:
            total = logsumexp_pair(total, corr_log)
    err = logsumexp_pair(cerr, em_err)
    return total, err


def _product_log_tail(E: HeavyTailDistribution, M: HeavyTailDistribution,
                      x: float, q: QuadratureSpec) -> tuple[float, float]:
    if isinstance(M, LatticePower):
        return _lattice_log_tail(E, M, x, q)

    lo_e = max(E.support_lo, 0.0)
    ceiling = x / lo_e if lo_e > 0.0 else math.inf
    upper_exact = M.log_sf(ceiling) if math.isfinite(ceiling) else LOG_ZERO

    parts = _measure_parts(M, ceiling)
    atom_terms = LOG_ZERO
    if parts.atom_locs.size:
        keep = parts.atom_locs <= ceiling
        locs = parts.atom_locs[keep]
        lms = parts.atom_log_mass[keep]
        if locs.size:
            atom_terms = logsumexp_all(lms + E.log_sf(x / locs))

    baseline = logsumexp_pair(atom_terms, upper_exact)
    dens_part, dens_err = LOG_ZERO, LOG_ZERO
    if parts.has_density:
        s_lo = max(parts.dens_lo, 0.0)
        if math.isfinite(E.support_hi):
            # E_bar(x/y) vanishes for y below x / sup(E): nothing lives there
            s_lo = max(s_lo, x / E.support_hi)
        s_hi = min(parts.dens_hi, ceiling)
        if s_hi > s_lo:
            dens_part, dens_err = _product_density_piece(
                E, parts, x, q, s_lo, s_hi, baseline)

    total = logsumexp_pair(baseline, dens_part)
    return total, dens_err


def _product_density_piece(E, parts: _MeasureParts, x: float,
                           q: QuadratureSpec, s_lo: float, s_hi: float,
                           baseline: float) -> tuple[float, float]:
    log_density = parts.log_density

    def integrand(u: np.ndarray) -> np.ndarray:
        y = np.exp(u)
        return E.log_sf(x / y) + log_density(y) + u

    e_knots = np.asarray(E.knots(), dtype=float)
    bits = [np.log(parts.knots[parts.knots > 0.0])] if parts.knots.size else []
    if e_knots.size:
        with np.errstate(divide="ignore"):
            bits.append(np.log(x / e_knots[e_knots > 0.0]))
    breakpoints = np.sort(np.concatenate(bits)) if bits else np.empty(0)

    lo_exact = s_lo > 0.0
    if lo_exact:
        u_lo = math.log(s_lo)
    else:
        q_lo = _lower_quantile_measure(parts)
        u_lo = math.log(max(q_lo, x * 1e-290)) if q_lo > 0 else math.log(x) - 20.0

    hi_exact = math.isfinite(s_hi)
    if hi_exact:
        u_hi = math.log(s_hi)
    else:
        guess = _upper_quantile_measure(parts, math.log(1e-8))
        u_hi = math.log(guess) if math.isfinite(guess) and guess > 0 else \
            math.log(max(x, 1.0)) + 4.0
    if not lo_exact and u_lo >= u_hi:
        u_lo = u_hi - 4.0

    def lower_rem(ul: float) -> float:
        y = math.exp(ul)
        below = _log1mexp(parts.log_sf(y))
        return E.log_sf(x / y) + min(below, 0.0)

    def upper_rem(uh: float) -> float:
        return parts.log_sf(math.exp(uh))

    lo_floor = math.log(max(x, 1.0)) - 700.0
    return _extendable_log_integral(
        integrand, u_lo, u_hi,
        lo_exact=lo_exact, hi_exact=hi_exact,
        lower_rem=lower_rem, upper_rem=upper_rem,
        breakpoints=breakpoints, baseline=baseline, q=q, lo_floor=lo_floor)


def _lower_quantile_measure(parts: _MeasureParts) -> float:
    """A y with measure((0, y]) around 1e-3, to seed the lower cut."""
    lo, hi = 1e-300, 1e300
    target = math.log(1.0 - 1e-3)
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if parts.log_sf(mid) <= target:
            hi = mid
        else:
            lo = mid
        if hi / lo < 1.5:
            break
    return lo


def _upper_quantile_measure(parts: _MeasureParts, log_p: float) -> float:
    lo, hi = 1e-300, 1e300
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if parts.log_sf(mid) <= log_p:
            hi = mid
        else:
            lo = mid
        if hi / lo < 1.5:
            break
    return hi


def _validate_product_args(F, G, x):
    if not isinstance(F, HeavyTailDistribution):
        raise ParameterError("F", "needs a distribution instance")
    if not isinstance(G, HeavyTailDistribution):
        raise ParameterError("G", "needs a distribution instance")
    x = float(x)
    if not (math.isfinite(x) and x > 0.0):
        raise ParameterError("x", "needs a finite x > 0")
    return x


def product_tail_with_error(F: HeavyTailDistribution,
                            G: HeavyTailDistribution,
                            x, q: QuadratureSpec | None = None
                            ) -> tuple[float, float]:
    """Log product tail and a log bound on its absolute error."""
    q = q or QuadratureSpec()
    x = _validate_product_args(F, G, x)

    if isinstance(F, Scaled):
        return product_tail_with_error(F.base, G, x / F.c, q)
    if isinstance(G, Scaled):
        return product_tail_with_error(F, G.base, x / G.c, q)
    if isinstance(G, Degenerate):
        return float(F.log_sf(x / G.c)), LOG_ZERO
    if isinstance(F, Degenerate):
        return float(G.log_sf(x / F.c)), LOG_ZERO

    E, M = _pick_sides(F, G)
    return _product_log_tail(E, M, x, q)


def product_tail(F: HeavyTailDistribution, G: HeavyTailDistribution,
                 x, q: QuadratureSpec | None = None) -> float:
    """log P(XY > x) for independent X ~ F, Y ~ G on [0, inf)."""
    return product_tail_with_error(F, G, x, q)[0]


# ---------------------------------------------------------------------------
# gridded products


def _lower_quantile(V: HeavyTailDistribution, p: float) -> float:
    """An x with P(V <= x) <= p, not below the support start."""
    xq = V.inverse_log_sf(math.log1p(-p))
    xq *= 1.0 - 1e-12
    return max(xq, V.support_lo)


def _product_anchors(F, G, spec: GridSpec) -> tuple[float, float, float]:
    hi = F.support_hi * G.support_hi if (math.isfinite(F.support_hi)
                                         and math.isfinite(G.support_hi)) \
        else math.inf
    x_lo = _lower_quantile(F, spec.eps_lo / 2.0) * _lower_quantile(G, spec.eps_lo / 2.0)
    x_lo = max(x_lo, F.support_lo * G.support_lo)

    target = math.log(spec.eps_hi / 2.0)
    c_f = F.inverse_log_sf(target)
    c_g = G.inverse_log_sf(target)
    if math.isfinite(c_f) and math.isfinite(c_g):
        x_hi = max(c_f, c_g) ** 2
    else:
        x_hi = max(x_lo, 1.0) * math.exp(80.0)
    x_hi = min(x_hi, hi * (1.0 - 1e-13) if math.isfinite(hi) else x_hi)

    if x_lo <= 0.0:
        x_lo = x_hi * 1e-18
    if x_hi <= x_lo * (1.0 + 1e-9):
        x_lo, x_hi = x_lo / 2.0, x_hi * 2.0
        x_hi = min(x_hi, hi * (1.0 - 1e-13) if math.isfinite(hi) else x_hi)
    return x_lo, x_hi, hi


def _product_nodes(x_lo: float, x_hi: float, hi: float,
                   spec: GridSpec) -> np.ndarray:
    # bounded_tail_nodes falls back to plain log-uniform spacing on its own
    # when x_hi never approaches the endpoint
    if math.isfinite(hi):
        return bounded_tail_nodes(x_lo, x_hi, hi, spec.nodes)
    return geometric_nodes(x_lo, x_hi, spec.nodes)


def _critical_points(V: HeavyTailDistribution) -> np.ndarray:
    """Locations where V's sf can lose smoothness: breaks, atoms, endpoint."""
    pts = [np.asarray(V.curvature_breaks(), dtype=float)]
    try:
        pairs = V.atoms(1e-9, 2.0 ** 20)
    except ParameterError:
        pairs = []          # lattice laws refuse wide-open enumeration
    if pairs:
        pts.append(np.asarray([loc for loc, _ in pairs], dtype=float))
    if math.isfinite(V.support_hi):
        pts.append(np.asarray([V.support_hi]))
    out = np.unique(np.concatenate(pts))
    return out[out > 0.0][:32]


def _product_breaks(F: HeavyTailDistribution,
                    G: HeavyTailDistribution) -> np.ndarray:
    """Candidate sf breaks of the product: cross products of critical points."""
    cf, cg = _critical_points(F), _critical_points(G)
    if cf.size == 0 or cg.size == 0:
        return np.empty(0)
    return np.unique(np.outer(cf, cg).ravel())


def _sum_breaks(V: HeavyTailDistribution, j: int) -> np.ndarray:
    """Candidate sf breaks of the j-fold self sum.

    A curvature break of V at c propagates to m copies at c with the rest
    at the bottom of the support, so multiples cover the single-knot laws
    this engine grids; mixed combinations are left to the node budget.
    """
    cv = _critical_points(V)
    if cv.size == 0:
        return np.empty(0)
    ms = np.arange(1, j + 1, dtype=float)
    vals = ms[:, None] * cv[None, :] + (j - ms)[:, None] * V.support_lo
    return np.unique(vals.ravel())


def _insert_breaks(nodes: np.ndarray, breaks: np.ndarray,
                   max_extra: int = 96) -> tuple[np.ndarray, np.ndarray]:
    """Merge sf-break locations (with tight flanking nodes) into a node set.

    Interpolation across an un-noded curvature break costs two orders of
    accuracy; a node pinned on the break plus close flankers confines the
    damage to a negligible neighborhood.  Grids interpolate in log x, so the
    merge dedupes in log space, always preserving the break itself (its
    exact node anchors a spline section boundary).  Returns
    (nodes, kept breaks).
    """
    if breaks.size == 0 or nodes.size < 2:
        return nodes, np.empty(0)
    lo, hi = nodes[0], nodes[-1]
    keep = breaks[(breaks > lo * (1.0 + 1e-9)) & (breaks < hi * (1.0 - 1e-9))]
    if keep.size == 0:
        return nodes, np.empty(0)
    lk = np.log(keep)
    keep = keep[np.concatenate([[True], np.diff(lk) > 1e-12])]
    if keep.size * 3 > max_extra:
        keep = keep[:: int(np.ceil(keep.size * 3 / max_extra))]

    # drop original nodes that log-collide with a break
    ln = np.log(nodes)
    lk = np.log(keep)
    pos = np.searchsorted(lk, ln)
    near = np.zeros(ln.size, dtype=bool)
    for shift in (0, 1):
        j = np.clip(pos - shift, 0, lk.size - 1)
        near |= np.abs(ln - lk[j]) <= 1e-12
    base = nodes[~near]

    extra = np.concatenate([keep, keep * (1.0 - 3e-3), keep * (1.0 + 3e-3)])
    extra = extra[(extra > lo) & (extra < hi)]
    merged = np.union1d(base, extra)
    lu = np.log(merged)
    mask = np.concatenate([[True], np.diff(lu) > 1e-13])
    mask |= np.isin(merged, keep)
    merged = merged[mask]
    lu = np.log(merged)
    if np.any(np.diff(lu) <= 0.0):
        merged = merged[np.concatenate([[True], np.diff(lu) > 0.0])]
    kept = keep[np.isin(keep, merged)]
    return merged, kept


def _grid_tolerance(q: QuadratureSpec) -> float:
    # interpolation error dominates node-value error at default settings;
    # the floor reflects the measured worst case for the standard layouts
    return max(4.0 * q.rel_tol, 5e-7)


def _build_grid(log_nodes: np.ndarray, vals: np.ndarray, hi: float,
                spec: GridSpec, q: QuadratureSpec,
                family_spec: dict | None,
                shape_breaks: Sequence[float] = ()) -> GriddedDistribution:
    return GriddedDistribution(
        log_nodes, vals, support_hi=hi, interpolation=spec.interpolation,
        tolerance=_grid_tolerance(q), family_spec=family_spec,
        shape_breaks=shape_breaks)


def product_dist(F: HeavyTailDistribution, G: HeavyTailDistribution,
                 grid: GridSpec | None = None,
                 q: QuadratureSpec | None = None) -> GriddedDistribution:
    """Tabulated distribution of the product XY, reusable as F or G."""
    spec = grid or GridSpec()
    q = q or QuadratureSpec()
    _validate_product_args(F, G, 1.0)

    fam = {"family": "gridded", "nodes": spec.nodes,
           "product_of": [F.family_spec, G.family_spec]}

    if isinstance(F, Degenerate):
        return _grid_from_law(scale(G, F.c), spec, q, fam)
    if isinstance(G, Degenerate):
        return _grid_from_law(scale(F, G.c), spec, q, fam)

    x_lo, x_hi, hi = _product_anchors(F, G, spec)

    # The pairwise-quantile anchors are conservative; a coarse probe pass
    # finds where the product's own sf actually crosses the coverage
    # targets, so the full node budget lands on the informative stretch.
    q_probe = replace(q, rel_tol=max(q.rel_tol, 1e-6))
    probe = _product_nodes(x_lo, x_hi, hi, GridSpec(
        nodes=96, eps_lo=spec.eps_lo, eps_hi=spec.eps_hi,
        interpolation=spec.interpolation))
    pv = np.asarray([product_tail(F, G, xi, q_probe) for xi in probe])
    head_t = math.log1p(-spec.eps_lo)
    tail_t = math.log(spec.eps_hi)
    above = np.nonzero(pv >= head_t)[0]
    if above.size:
        x_lo = float(probe[above[-1]])
    below = np.nonzero(pv <= tail_t)[0]
    if below.size:
        x_hi = float(probe[below[0]])
    if x_hi <= x_lo * (1.0 + 1e-9):
        x_lo, x_hi = x_lo / 2.0, x_hi * 2.0
        if math.isfinite(hi):
            x_hi = min(x_hi, hi * (1.0 - 1e-13))

    nodes = _product_nodes(x_lo, x_hi, hi, spec)
    nodes, kept = _insert_breaks(nodes, _product_breaks(F, G))
    q_node = replace(q, rel_tol=q.rel_tol / 4.0)
    vals = np.asarray([product_tail(F, G, xi, q_node) for xi in nodes])
    return _build_grid(np.log(nodes), vals, hi, spec, q, fam,
                       shape_breaks=kept)


# ---------------------------------------------------------------------------
# k-fold sums


def _sum_step_value(Ej: HeavyTailDistribution, V: HeavyTailDistribution,
                    x: float, q: QuadratureSpec) -> tuple[float, float]:
    """One convolution step: V_bar(x) + integral of Ej_bar(x - y) V(dy).

    Ej is the tail of the (j-1)-fold sum; the result is the j-fold sum
    tail at x.  The measure integral runs over [0, x]: the zero atom and
    positive atoms are summed exactly, the density is split at x/2 and
    integrated in log y below and log (x - y) above so both steep ends get
    resolution.
    """
    base = float(V.log_sf(x))
    terms = [base]

    if V.mass_at_zero > 0.0:
        terms.append(math.log(V.mass_at_zero) + float(Ej.log_sf(x)))

    parts = _measure_parts(V, ceiling=x)
    if parts.lattice is not None:
        ns = np.arange(1.0, math.floor(x) + 1.0)
        if ns.size:
            terms.append(logsumexp_all(
                parts.lattice.log_mass(ns) + Ej.log_sf(x - ns)))
        return logsumexp_all(terms), LOG_ZERO

    if parts.atom_locs.size:
        keep = parts.atom_locs <= x
        locs = parts.atom_locs[keep]
        lms = parts.atom_log_mass[keep]
        if locs.size:
            terms.append(logsumexp_all(lms + Ej.log_sf(x - locs)))

    err = LOG_ZERO
    if parts.has_density:
        baseline = logsumexp_all(terms)
        v_knots = parts.knots[parts.knots > 0.0] if parts.knots.size \
            else np.empty(0)
        e_knots = np.asarray(Ej.knots(), dtype=float)
        e_knots = e_knots[e_knots > 0.0] if e_knots.size else np.empty(0)
        dens_lo = max(parts.dens_lo, 0.0)
        dens_hi = min(parts.dens_hi, x)
        log_density = parts.log_density
        # Ej_bar(x - y) vanishes once x - y exceeds Ej's support
        ej_cut = x - Ej.support_hi if math.isfinite(Ej.support_hi) else 0.0

        # Lower half: y in (0, x/2], integrated in u = log y.
        y_a, y_b = max(dens_lo, ej_cut), min(x / 2.0, dens_hi)
        if y_b > y_a:
            def f_low(u: np.ndarray) -> np.ndarray:
                y = np.exp(u)
                return Ej.log_sf(x - y) + log_density(y) + u

            bk = [np.log(v_knots[(v_knots > y_a) & (v_knots < y_b)])]
            ek = x - e_knots
            bk.append(np.log(ek[(ek > max(y_a, 0.0) + 1e-300) & (ek < y_b)]))
            bkpts = np.sort(np.concatenate(bk)) if bk else np.empty(0)
            lo_exact = y_a > 0.0

            def lower_rem(ul: float) -> float:
                y = math.exp(ul)
                return float(Ej.log_sf(x - y)) + \
                    min(_log1mexp(float(V.log_sf(y))), 0.0)

            u_a = math.log(y_a) if lo_exact else math.log(
                max(_lower_quantile_measure(parts), x * 1e-290))
            u_a = min(u_a, math.log(y_b)) if lo_exact else min(
                u_a, math.log(y_b) - 1e-9)
            piece, perr = _extendable_log_integral(
                f_low, u_a, math.log(y_b),
                lo_exact=lo_exact, hi_exact=True,
                lower_rem=lower_rem, upper_rem=lambda uh: LOG_ZERO,
                breakpoints=bkpts, baseline=baseline, q=q,
                lo_floor=math.log(x) - 700.0)
            terms.append(piece)
            err = logsumexp_pair(err, perr)

        # Upper half: y in (x/2, x], integrated in w = log (x - y).
        y_c, y_d = max(x / 2.0, dens_lo, ej_cut), dens_hi
        if y_d > y_c:
            z_hi = x - y_c                    # = x/2 when unclipped
            z_lo = x - y_d                    # 0 when V reaches x

            def f_high(w: np.ndarray) -> np.ndarray:
                z = np.exp(w)
                return Ej.log_sf(z) + log_density(x - z) + w

            bk = [np.log(e_knots[(e_knots > max(z_lo, 0.0) + 1e-300)
                                 & (e_knots < z_hi)])]
            zk = x - v_knots
            bk.append(np.log(zk[(zk > max(z_lo, 0.0) + 1e-300) & (zk < z_hi)]))
            bkpts = np.sort(np.concatenate(bk)) if bk else np.empty(0)
            lo_exact = z_lo > 0.0

            def lower_rem(wl: float) -> float:
                # Mass of V in (x - z, x] is at most z * sup density there;
                # tail densities are non-increasing, so probe the left end
                # with slack.
                z = math.exp(wl)
                dens = max(float(V.log_density(x - z)),
                           float(V.log_density(x - 0.5 * z)))
                return wl + dens + math.log(4.0)

            w_a = math.log(z_lo) if lo_exact else math.log(z_hi) - 12.0
            piece, perr = _extendable_log_integral(
                f_high, w_a, math.log(z_hi),
                lo_exact=lo_exact, hi_exact=True,
                lower_rem=lower_rem, upper_rem=lambda uh: LOG_ZERO,
                breakpoints=bkpts, baseline=baseline, q=q,
                lo_floor=math.log(x) - 700.0)
            terms.append(piece)
            err = logsumexp_pair(err, perr)

    return logsumexp_all(terms), err


def _sum_anchor_grid(V: HeavyTailDistribution, j: int, x: float,
                     spec_nodes: int) -> np.ndarray:
    lo = _lower_quantile(V, 5e-5)
    if V.support_lo > 0.0:
        lo = max(lo, j * V.support_lo * (1.0 - 1e-12))
    target = math.log(1e-13 / j)
    hi_q = V.inverse_log_sf(target)
    hi = j * hi_q if math.isfinite(hi_q) else max(x, lo) * math.exp(40.0)
    hi = max(hi, 1.05 * x)
    if math.isfinite(V.support_hi):
        # Sums of continuous laws vanish polynomially at the endpoint, so
        # stopping 1e-9 short still covers survival values far below any
        # coverage target while keeping node gaps resolvable in double.
        endpoint = j * V.support_hi
        hi = min(hi, endpoint * (1.0 - 1e-9))
        lo = min(lo, hi / math.e ** 4)
        return bounded_tail_nodes(lo, hi, endpoint, spec_nodes)
    lo = min(lo, hi / math.e ** 4)
    return geometric_nodes(lo, hi, spec_nodes)


def sum_self_tail(V: HeavyTailDistribution, k: int, x,
                  q: QuadratureSpec | None = None) -> float:
    """log P(V_1 + ... + V_k > x) for iid V_i ~ V on [0, inf)."""
    q = q or QuadratureSpec()
    if not isinstance(V, HeavyTailDistribution):
        raise ParameterError("V", "needs a distribution instance")
    if not isinstance(k, (int, np.integer)) or isinstance(k, bool):
        raise ParameterError("k", "needs an integer fold count")
    if not 1 <= k <= _MAX_FOLD:
        raise ParameterError("k", f"needs 1 <= k <= {_MAX_FOLD}")
    x = float(x)
    if not (math.isfinite(x) and x > 0.0):
        raise ParameterError("x", "needs a finite x > 0")

    if k == 1:
        return float(V.log_sf(x))
    if isinstance(V, Degenerate):
        return 0.0 if x < k * V.c else LOG_ZERO
    if isinstance(V, Scaled):
        return sum_self_tail(V.base, k, x / V.c, q)

    q_node = replace(q, rel_tol=q.rel_tol / 4.0)
    Ej: HeavyTailDistribution = V
    for j in range(2, k):
        nodes = _sum_anchor_grid(V, j, x, _SUM_NODES)
        nodes, kept = _insert_breaks(nodes, _sum_breaks(V, j))
        vals = np.asarray(
            [_sum_step_value(Ej, V, t, q_node)[0] for t in nodes])
        Ej = GriddedDistribution(
            np.log(nodes), vals,
            support_hi=(j * V.support_hi if math.isfinite(V.support_hi)
                        else math.inf),
            tolerance=_grid_tolerance(q),
            family_spec={"family": "gridded", "fold": j,
                         "base": V.family_spec},
            shape_breaks=kept)
    value, _ = _sum_step_value(Ej, V, x, q)
    return value


# ---------------------------------------------------------------------------
# Monte Carlo cross-check


def mc_product_tail(F: HeavyTailDistribution, G: HeavyTailDistribution,
                    x, n: int, seed: int = 0) -> tuple[float, float]:
    """Monte Carlo estimate of P(XY > x) with a 95 percent half-width.

    Batches are seeded by spawning one child sequence per batch from the
    given seed and reduced in a fixed order, so results are reproducible
    bit for bit.  When no exceedance is observed the half-width is the
    one-sided exact 95 percent upper bound for a zero count.
    """
    x = _validate_product_args(F, G, x)
    if not isinstance(n, (int, np.integer)) or n <= 0:
        raise ParameterError("n", "needs a positive integer sample count")
    n = int(n)

    batch = 1 << 20
    n_batches = (n + batch - 1) // batch
    children = np.random.SeedSequence(seed).spawn(n_batches)
    hits = 0
    left = n
    for ss in children:
        rng = np.random.default_rng(ss)
        m = min(batch, left)
        xs = F.sample(m, rng=rng)
        ys = G.sample(m, rng=rng)
        hits += int(np.count_nonzero(xs * ys > x))
        left -= m
    p = hits / n
    if hits == 0:
        return 0.0, 1.0 - math.exp(math.log(0.05) / n)
    half = 1.96 * math.sqrt(p * (1.0 - p) / n)
    return p, half
