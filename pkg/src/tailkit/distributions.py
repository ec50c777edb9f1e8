"""Distribution families with exact log-space tail evaluation.

Every law here is seen through its log-survival function, so tails like
exp(-2*x**1.5) stay meaningful long after linear probabilities underflow.
Families expose the structure that tail integration needs: atom lists,
the log of the absolutely continuous density, piece boundaries (knots),
inverse survival lookups, and seeded sampling.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .quadrature import LOG_ZERO

__all__ = [
    "HeavyTailDistribution",
    "ParameterError",
    "RegVar",
    "WeibullType",
    "Exponential",
    "UniformLaw",
    "Degenerate",
    "FiniteAtomic",
    "LatticePower",
    "KnotChainTail",
    "Example31F",
    "Scaled",
    "Shifted",
    "PositivePart",
    "make_family",
    "atoms",
    "scale",
    "shift",
    "positive_part",
]

# exp() overflows just above this; used to cap piece generation and searches
_LN_XMAX = 709.0


class ParameterError(ValueError):
    """Invalid distribution parameter; carries the offending name."""

    def __init__(self, param: str, message: str):
        super().__init__(message)
        self.param = param


def _require(condition: bool, param: str, message: str) -> None:
    if not condition:
        raise ParameterError(param, message)


class HeavyTailDistribution:
    """A nonnegative (or real-valued, for net losses) law.

    Subclasses implement ``_log_sf`` over 1-d float arrays and whichever
    structural accessors apply.  The public wrappers handle scalars,
    shapes, +inf, and clamp round-off above log 1.
    """

    family_spec: dict
    support_lo: float = 0.0
    support_hi: float = math.inf
    has_density: bool = False
    # mass of an atom at zero (positive-part laws); never in atoms()
    mass_at_zero: float = 0.0
    # spacing of a lattice support when the family knows it, else None
    lattice_span: float | None = None

    # -- tail evaluation -------------------------------------------------

    def log_sf(self, x):
        """log P(X > x).  Non-increasing, and 0 below the support."""
        arr = np.asarray(x, dtype=float)
        if np.isnan(arr).any():
            raise ValueError("log_sf: x must not contain NaN")
        flat = np.atleast_1d(arr).ravel()
        out = self._log_sf(flat.copy())
        out = np.where(np.isposinf(flat), LOG_ZERO, out)
        out = np.minimum(out, 0.0)
        if arr.ndim == 0:
            return float(out[0])
        return out.reshape(arr.shape)

    def sf(self, x):
        """P(X > x).  Lossy below exp(-745); prefer log_sf."""
        return np.exp(self.log_sf(x))

    def _log_sf(self, xs: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    # -- absolutely continuous component ----------------------------------

    def log_density(self, x):
        """log of the continuous density component; -inf where there is none."""
        arr = np.asarray(x, dtype=float)
        flat = np.atleast_1d(arr).ravel()
        out = self._log_density(flat.copy())
        out = np.where(np.isfinite(flat), out, LOG_ZERO)
        if arr.ndim == 0:
            return float(out[0])
        return out.reshape(arr.shape)

    def _log_density(self, xs: np.ndarray) -> np.ndarray:
        return np.full(xs.shape, LOG_ZERO)

    # -- structure ---------------------------------------------------------

    def atoms(self, mass_floor: float = 0.0, loc_ceiling: float = math.inf):
        """Atoms with mass >= mass_floor at locations in (0, loc_ceiling]."""
        return []

    def knots(self) -> np.ndarray:
        """Positive x where the survival curve or density changes formula."""
        return np.empty(0)

    def curvature_breaks(self) -> np.ndarray:
        """Positive x where the law itself loses smoothness.

        Defaults to :meth:`knots`; representations may report fewer points
        when some knots are artifacts of their own bookkeeping.
        """
        return self.knots()

    # -- sampling ------------------------------------------------------------

    def sample(self, n: int, *, seed=None, rng=None) -> np.ndarray:
        """n i.i.d. draws; deterministic given a seed or a Generator."""
        if n < 1:
            raise ValueError("need n >= 1")
        if rng is None:
            rng = np.random.default_rng(seed)
        return self._sample(int(n), rng)

    def _sample(self, n: int, rng) -> np.ndarray:
        raise NotImplementedError

    # -- inverse survival ------------------------------------------------------

    def inverse_log_sf(self, log_p: float) -> float:
        """Smallest x with log_sf(x) <= log_p (upper quantile).

        Fallback bracket-and-bisect on log x; families with closed forms
        override.  Returns +inf when the target lies below any value the
        representation can reach.
        """
        if log_p >= 0.0:
            return 0.0
        lo = max(self.support_lo, 0.0)
        if self.log_sf(lo) <= log_p:
            return lo
        hi = max(lo * 2.0, 1.0)
        while self.log_sf(hi) > log_p:
            hi *= 4.0
            if hi > 1e300:
                return math.inf
        a = max(lo, hi / 4.0, 1e-300)
        b = hi
        for _ in range(120):
            mid = math.exp(0.5 * (math.log(a) + math.log(b)))
            if mid <= a or mid >= b:
                break
            if self.log_sf(mid) <= log_p:
                b = mid
            else:
                a = mid
        return b

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={v!r}" for k, v in self.family_spec.items()
                          if k != "family")
        return f"{self.family_spec.get('family', type(self).__name__)}({inner})"


# ---------------------------------------------------------------------------
# parametric families
# ---------------------------------------------------------------------------


class RegVar(HeavyTailDistribution):
    """Power-law survival (x / x_min) ** -beta on [x_min, inf).

    The scale is normalized so the survival probability is exactly 1 at
    x_min, which keeps the law free of atoms for every parameter choice.
    """

    def __init__(self, beta: float, x_min: float = 1.0):
        _require(beta > 0, "beta", f"beta must be positive, got {beta}")
        _require(x_min > 0, "x_min", f"x_min must be positive, got {x_min}")
        self.beta = float(beta)
        self.x_min = float(x_min)
        self.family_spec = {"family": "regvar", "beta": self.beta,
                            "x_min": self.x_min}
        self.support_lo = self.x_min
        self.support_hi = math.inf
        self.has_density = True

    def _log_sf(self, xs):
        out = np.zeros_like(xs)
        m = xs > self.x_min
        out[m] = -self.beta * (np.log(xs[m]) - math.log(self.x_min))
        return out

    def _log_density(self, xs):
        out = np.full(xs.shape, LOG_ZERO)
        m = xs >= self.x_min
        lx = np.log(xs[m])
        out[m] = (math.log(self.beta) - lx
                  - self.beta * (lx - math.log(self.x_min)))
        return out

    def knots(self):
        return np.array([self.x_min])

    def inverse_log_sf(self, log_p):
        if log_p >= 0.0:
            return 0.0
        return self.x_min * math.exp(-log_p / self.beta)

    def _sample(self, n, rng):
        u = 1.0 - rng.random(n)
        return self.x_min * u ** (-1.0 / self.beta)


class WeibullType(HeavyTailDistribution):
    """Survival exp(-x**alpha) on (0, inf).

    alpha < 1 gives a heavy (stretched) tail, alpha = 1 the unit
    exponential, alpha > 1 a tail lighter than exponential.
    """

    def __init__(self, alpha: float):
        _require(alpha > 0, "alpha", f"alpha must be positive, got {alpha}")
        self.alpha = float(alpha)
        self.family_spec = {"family": "weibull_type", "alpha": self.alpha}
        self.support_lo = 0.0
        self.has_density = True

    def _log_sf(self, xs):
        out = np.zeros_like(xs)
        m = xs > 0
        with np.errstate(over="ignore"):
            out[m] = -(xs[m] ** self.alpha)
        return out

    def _log_density(self, xs):
        out = np.full(xs.shape, LOG_ZERO)
        m = xs > 0
        with np.errstate(over="ignore"):
            out[m] = (math.log(self.alpha) + (self.alpha - 1.0) * np.log(xs[m])
                      - xs[m] ** self.alpha)
        return out

    def inverse_log_sf(self, log_p):
        if log_p >= 0.0:
            return 0.0
        return (-log_p) ** (1.0 / self.alpha)

    def _sample(self, n, rng):
        return rng.exponential(size=n) ** (1.0 / self.alpha)


class Exponential(HeavyTailDistribution):
    """Survival exp(-rate * x) on (0, inf)."""

    def __init__(self, rate: float = 1.0):
        _require(rate > 0, "rate", f"rate must be positive, got {rate}")
        self.rate = float(rate)
        self.family_spec = {"family": "exponential", "rate": self.rate}
        self.support_lo = 0.0
        self.has_density = True

    def _log_sf(self, xs):
        out = np.zeros_like(xs)
        m = xs > 0
        out[m] = -self.rate * xs[m]
        return out

    def _log_density(self, xs):
        out = np.full(xs.shape, LOG_ZERO)
        m = xs > 0
        out[m] = math.log(self.rate) - self.rate * xs[m]
        return out

    def inverse_log_sf(self, log_p):
        if log_p >= 0.0:
            return 0.0
        return -log_p / self.rate

    def _sample(self, n, rng):
        return rng.exponential(scale=1.0 / self.rate, size=n)


class UniformLaw(HeavyTailDistribution):
    """Uniform on (0, s]."""

    def __init__(self, s: float = 1.0):
        _require(s > 0, "s", f"s must be positive, got {s}")
        self.s = float(s)
        self.family_spec = {"family": "uniform", "s": self.s}
        self.support_lo = 0.0
        self.support_hi = self.s
        self.has_density = True

    def _log_sf(self, xs):
        out = np.zeros_like(xs)
        inside = (xs > 0) & (xs < self.s)
        out[inside] = np.log1p(-xs[inside] / self.s)
        out[xs >= self.s] = LOG_ZERO
        return out

    def _log_density(self, xs):
        out = np.full(xs.shape, LOG_ZERO)
        out[(xs > 0) & (xs <= self.s)] = -math.log(self.s)
        return out

    def inverse_log_sf(self, log_p):
        if log_p >= 0.0:
            return 0.0
        return -self.s * math.expm1(log_p)

    def knots(self):
        # sf hits zero with a corner at the support endpoint
        return np.asarray([self.s])

    def _sample(self, n, rng):
        return self.s * (1.0 - rng.random(n))


class Degenerate(HeavyTailDistribution):
    """All mass at a single positive point c."""

    def __init__(self, c: float):
        _require(c > 0, "c", f"atom location must be positive, got {c}")
        self.c = float(c)
        self.family_spec = {"family": "degenerate", "c": self.c}
        self.support_lo = self.c
        self.support_hi = self.c

    def _log_sf(self, xs):
        return np.where(xs < self.c, 0.0, LOG_ZERO)

    def atoms(self, mass_floor=0.0, loc_ceiling=math.inf):
        if self.c <= loc_ceiling and 1.0 >= mass_floor:
            return [(self.c, 1.0)]
        return []

    def knots(self):
        return np.asarray([self.c])

    def inverse_log_sf(self, log_p):
        if log_p >= 0.0:
            return 0.0
        return self.c

    def _sample(self, n, rng):
        return np.full(n, self.c)


class FiniteAtomic(HeavyTailDistribution):
    """Finite mixture of point masses at positive locations."""

    def __init__(self, locations, masses):
        locs = np.asarray(locations, dtype=float)
        mass = np.asarray(masses, dtype=float)
        _require(locs.ndim == 1 and locs.size >= 1, "locations",
                 "locations must be a non-empty 1-d sequence")
        _require(mass.shape == locs.shape, "masses",
                 "masses must match locations in length")
        _require(bool(np.all(locs > 0)), "locations",
                 "atom locations must be positive")
        _require(bool(np.all(np.diff(locs) > 0)), "locations",
                 "atom locations must be strictly increasing")
        _require(bool(np.all(mass > 0)), "masses", "atom masses must be positive")
        total = float(mass.sum())
        _require(abs(total - 1.0) <= 1e-12, "masses",
                 f"atom masses must sum to 1, got {total}")
        self._locs = locs
        self._mass = mass / total
        # tail[i] = mass at locations i..end; tail[size] = 0
        tail = np.concatenate([np.cumsum(self._mass[::-1])[::-1], [0.0]])
        with np.errstate(divide="ignore"):
            self._log_tail = np.log(np.maximum(tail, 0.0))
        self.family_spec = {"family": "finite_atomic",
                            "locations": locs.tolist(),
                            "masses": self._mass.tolist()}
        self.support_lo = float(locs[0])
        self.support_hi = float(locs[-1])

    def _log_sf(self, xs):
        idx = np.searchsorted(self._locs, xs, side="right")
        return self._log_tail[idx]

    def atoms(self, mass_floor=0.0, loc_ceiling=math.inf):
        keep = (self._mass >= mass_floor) & (self._locs <= loc_ceiling)
        return list(zip(self._locs[keep].tolist(), self._mass[keep].tolist()))

    def knots(self):
        return self._locs.copy()

    def inverse_log_sf(self, log_p):
        if log_p >= 0.0:
            return 0.0
        hit = np.nonzero(self._log_tail[1:] <= log_p)[0]
        if hit.size == 0:
            return float(self._locs[-1])
        return float(self._locs[hit[0]])

    def _sample(self, n, rng):
        return rng.choice(self._locs, size=n, p=self._mass)


class LatticePower(HeavyTailDistribution):
    """Masses proportional to n**-beta on the positive integers.

    Requires beta > 1 so the masses are normalizable.  Survival values
    use the Hurwitz tail sum directly, switching to a series expansion
    once the starting index is large enough that the expansion is exact
    to machine precision.
    """

    _TABLE = 4096  # sampling inverts an exact cdf table up to here

    def __init__(self, beta: float):
        _require(beta > 1, "beta", f"beta must exceed 1, got {beta}")
        self.beta = float(beta)
        self.family_spec = {"family": "lattice_power", "beta": self.beta}
        self.support_lo = 1.0
        self.support_hi = math.inf
        self.lattice_span = 1.0
        self._log_zeta = math.log(float(special.zeta(self.beta)))
        k = np.arange(1, self._TABLE + 1, dtype=float)
        self._cdf = np.cumsum(np.exp(-self.beta * np.log(k) - self._log_zeta))

    def _log_hurwitz(self, m: np.ndarray) -> np.ndarray:
        """log sum_{k >= m} k**-beta for integer-valued m >= 1."""
        b = self.beta
        out = np.empty_like(m)
        small = m <= 1e8
        if small.any():
            out[small] = np.log(special.zeta(b, m[small]))
        big = ~small
        if big.any():
            mb = m[big]
            out[big] = ((1.0 - b) * np.log(mb)
                        + np.log(1.0 / (b - 1.0) + 0.5 / mb
                                 + b / (12.0 * mb * mb)))
        return out

    def _log_sf(self, xs):
        out = np.zeros_like(xs)
        m = xs >= 1.0
        start = np.floor(xs[m]) + 1.0
        out[m] = self._log_hurwitz(start) - self._log_zeta
        return out

    def log_mass(self, n):
        """log P(X = n) for positive integer n (vectorized)."""
        n = np.asarray(n, dtype=float)
        return -self.beta * np.log(n) - self._log_zeta

    def continuum_log_pdf(self, t):
        """log of the density t**-beta / zeta(beta) matching the far masses."""
        t = np.asarray(t, dtype=float)
        return -self.beta * np.log(t) - self._log_zeta

    def atoms(self, mass_floor=0.0, loc_ceiling=math.inf):
        _require(mass_floor > 0 or math.isfinite(loc_ceiling), "mass_floor",
                 "need a positive mass_floor or a finite loc_ceiling")
        n_max = loc_ceiling
        if mass_floor > 0:
            # largest n with n**-beta / zeta >= mass_floor
            cap = math.exp(-(math.log(mass_floor) + self._log_zeta) / self.beta)
            n_max = min(n_max, cap)
        n_max = math.floor(n_max)
        if n_max < 1:
            return []
        _require(n_max <= 2 ** 24, "loc_ceiling",
                 f"refusing to materialize {n_max} atoms; tighten the bounds")
        n = np.arange(1, n_max + 1, dtype=float)
        mass = np.exp(self.log_mass(n))
        keep = mass >= mass_floor
        return list(zip(n[keep].tolist(), mass[keep].tolist()))

    def _integer_inverse(self, log_p: float) -> int:
        """Smallest integer n with log_sf(n) <= log_p."""
        b = self.beta
        # solve the leading term (n+1)**(1-b) / ((b-1) zeta) = p in logs
        ln_np1 = (log_p + math.log(b - 1.0) + self._log_zeta) / (1.0 - b)
        if ln_np1 > _LN_XMAX:
            return -1  # beyond representable integers
        n = max(1, int(math.exp(ln_np1)) - 1)
        def lsf(k: int) -> float:
            return float(self._log_hurwitz(np.array([k + 1.0]))[0]) - self._log_zeta
        while lsf(n) > log_p:
            n += max(1, n // 8)
        lo = 1
        hi = n
        while lo < hi:
            mid = (lo + hi) // 2
            if lsf(mid) <= log_p:
                hi = mid
            else:
                lo = mid + 1
        return lo

    def inverse_log_sf(self, log_p):
        if log_p >= 0.0:
            return 0.0
        n = self._integer_inverse(log_p)
        return math.inf if n < 0 else float(n)

    def _sample(self, n, rng):
        u = rng.random(n)
        out = (np.searchsorted(self._cdf, u, side="left") + 1).astype(float)
        far = u > self._cdf[-1]
        for j in np.nonzero(far)[0]:
            out[j] = float(self._integer_inverse(math.log1p(-u[j])))
        return out


class KnotChainTail(HeavyTailDistribution):
    """Continuous piecewise-linear survival chain with super-geometric breaks.

    Break points grow by x_next = x**(1 + 1/alpha), so each linear
    descent on [x_n, 2 x_n) is followed by an ever longer flat stretch on
    [2 x_n, x_next).  The flat stretches make the law fail every shift
    insensitivity test even though it is continuous.  Tag: example31_G.

    Break points are generated in log space until exp() would overflow;
    past the last one the final flat value is exact for every float x
    because the next break is no longer representable.
    """

    def __init__(self, alpha: float, x1: float):
        _require(alpha > 0, "alpha", f"alpha must be positive, got {alpha}")
        lim = 4.0 ** alpha
        _require(x1 > lim, "x1", f"need x1 > 4**alpha = {lim:g}, got {x1}")
        self.alpha = float(alpha)
        self.x1 = float(x1)
        self.family_spec = {"family": "example31_G", "alpha": self.alpha,
                            "x1": self.x1}
        self.support_lo = 0.0
        self.support_hi = math.inf
        self.has_density = True

        r = 1.0 + 1.0 / self.alpha
        lk = [math.log(self.x1)]
        while lk[-1] <= _LN_XMAX + 1.0:
            lk.append(r * lk[-1])
        self._kln = np.array(lk)
        with np.errstate(over="ignore"):
            self._kx = np.where(self._kln <= _LN_XMAX,
                                np.exp(np.minimum(self._kln, _LN_XMAX)),
                                math.inf)
        # head slope: survival falls linearly from 1 at 0 to x1**-alpha at x1
        self._c0 = (1.0 - math.exp(-self.alpha * self._kln[0])) / self.x1

    def _piece(self, xs: np.ndarray):
        idx = np.searchsorted(self._kx, xs, side="right") - 1
        return idx

    def _log_sf(self, xs):
        out = np.zeros_like(xs)
        pos = xs > 0
        head = pos & (xs < self.x1)
        out[head] = np.log1p(-self._c0 * xs[head])
        body = pos & ~head
        if body.any():
            xb = xs[body]
            i = self._piece(xb)
            xn = self._kx[i]
            ln_xn = self._kln[i]
            excess = xb - xn
            vals = -(self.alpha + 1.0) * ln_xn
            mid = excess < xn
            # linear piece written as x_n**-(alpha+1) * ((2x_n - x) + (x - x_n)/x_n)
            vals[mid] += np.log((xn[mid] - excess[mid]) + excess[mid] / xn[mid])
            out[body] = vals
        return out

    def _log_density(self, xs):
        out = np.full(xs.shape, LOG_ZERO)
        head = (xs > 0) & (xs < self.x1)
        out[head] = math.log(self._c0)
        body = xs >= self.x1
        if body.any():
            xb = xs[body]
            i = self._piece(xb)
            xn = self._kx[i]
            ln_xn = self._kln[i]
            mid = (xb - xn) < xn
            vals = np.full(xb.shape, LOG_ZERO)
            vals[mid] = (-(self.alpha + 1.0) * ln_xn[mid]
                         + np.log1p(-1.0 / xn[mid]))
            out[body] = vals
        return out

    def chain_knots(self) -> np.ndarray:
        """The break points x_n themselves (those safely below overflow)."""
        return self._kx[self._kln <= 700.0]

    def knots(self):
        kx = self.chain_knots()
        return np.unique(np.concatenate([kx, 2.0 * kx]))

    def inverse_log_sf(self, log_p):
        if log_p >= 0.0:
            return 0.0
        a = self.alpha
        if log_p > -a * self._kln[0]:
            return -math.expm1(log_p) / self._c0
        w = -log_p
        if w >= (a + 1.0) * self._kln[-1]:
            return math.inf
        i = int(np.searchsorted(a * self._kln, w, side="right")) - 1
        if w >= (a + 1.0) * self._kln[i]:  # inside the flat stretch
            return 2.0 * self._kx[i]
        xn = self._kx[i]
        cn = math.exp(-(a + 1.0) * self._kln[i]) * (1.0 - 1.0 / xn)
        x = xn + (math.exp(-a * self._kln[i]) - math.exp(log_p)) / cn
        # near the bottom of a linear piece one ulp of x moves the log
        # survival by a finite step; walk to the conservative side
        while self.log_sf(x) > log_p and x < 2.0 * xn:
            x = np.nextafter(x, math.inf)
        return min(x, 2.0 * xn)

    def _sample(self, n, rng):
        u = rng.random(n)
        v = 1.0 - u
        x = np.empty(n)
        head = v > math.exp(-self.alpha * self._kln[0])
        x[head] = u[head] / self._c0
        rest = ~head
        if rest.any():
            w = -np.log(v[rest])
            i = np.searchsorted(self.alpha * self._kln, w, side="right") - 1
            i = np.clip(i, 0, len(self._kln) - 1)
            xn = self._kx[i]
            ln_xn = self._kln[i]
            cn = np.exp(-(self.alpha + 1.0) * ln_xn) * (1.0 - 1.0 / xn)
            x[rest] = xn + (np.exp(-self.alpha * ln_xn) - v[rest]) / cn
        return x


class Example31F(RegVar):
    """Power-law companion to the knot chain: survival x**-(alpha+1) on [1, inf).

    Tag: example31_F."""

    def __init__(self, alpha: float):
        _require(alpha > 0, "alpha", f"alpha must be positive, got {alpha}")
        super().__init__(alpha + 1.0, 1.0)
        self.alpha = float(alpha)
        self.family_spec = {"family": "example31_F", "alpha": self.alpha}


# ---------------------------------------------------------------------------
# composites
# ---------------------------------------------------------------------------


class Scaled(HeavyTailDistribution):
    """Law of c * X for a positive constant c."""

    def __init__(self, base: HeavyTailDistribution, c: float):
        _require(c > 0, "c", f"scale must be positive, got {c}")
        self.base = base
        self.c = float(c)
        self.family_spec = {"family": "scaled", "c": self.c,
                            "base": base.family_spec}
        self.support_lo = base.support_lo * self.c
        self.support_hi = base.support_hi * self.c
        self.has_density = base.has_density
        self.mass_at_zero = base.mass_at_zero
        if base.lattice_span is not None:
            self.lattice_span = base.lattice_span * self.c

    def _log_sf(self, xs):
        return np.atleast_1d(self.base.log_sf(xs / self.c))

    def _log_density(self, xs):
        return np.atleast_1d(self.base.log_density(xs / self.c)) - math.log(self.c)

    def atoms(self, mass_floor=0.0, loc_ceiling=math.inf):
        inner = self.base.atoms(mass_floor, loc_ceiling / self.c)
        return [(loc * self.c, mass) for loc, mass in inner]

    def knots(self):
        return self.base.knots() * self.c

    def inverse_log_sf(self, log_p):
        return self.base.inverse_log_sf(log_p) * self.c

    def _sample(self, n, rng):
        return self.c * self.base.sample(n, rng=rng)


class Shifted(HeavyTailDistribution):
    """Law of X + t; t may be negative, producing a net-loss style law."""

    def __init__(self, base: HeavyTailDistribution, t: float):
        self.base = base
        self.t = float(t)
        self.family_spec = {"family": "shifted", "t": self.t,
                            "base": base.family_spec}
        self.support_lo = base.support_lo + self.t
        self.support_hi = base.support_hi + self.t
        self.has_density = base.has_density

    def _log_sf(self, xs):
        return np.atleast_1d(self.base.log_sf(xs - self.t))

    def _log_density(self, xs):
        return np.atleast_1d(self.base.log_density(xs - self.t))

    def atoms(self, mass_floor=0.0, loc_ceiling=math.inf):
        inner = self.base.atoms(mass_floor, math.inf)
        return [(loc + self.t, mass) for loc, mass in inner
                if 0.0 < loc + self.t <= loc_ceiling]

    def knots(self):
        k = self.base.knots() + self.t
        return k[k > 0]

    def inverse_log_sf(self, log_p):
        return self.base.inverse_log_sf(log_p) + self.t

    def _sample(self, n, rng):
        return self.base.sample(n, rng=rng) + self.t


class PositivePart(HeavyTailDistribution):
    """Law of max(X, 0): any mass on (-inf, 0] collapses to an atom at zero."""

    def __init__(self, base: HeavyTailDistribution):
        self.base = base
        self.family_spec = {"family": "positive_part", "base": base.family_spec}
        self.support_lo = max(base.support_lo, 0.0)
        self.support_hi = max(base.support_hi, 0.0)
        self.has_density = base.has_density
        self.mass_at_zero = -math.expm1(base.log_sf(0.0))

    def _log_sf(self, xs):
        out = np.atleast_1d(self.base.log_sf(np.maximum(xs, 0.0)))
        return np.where(xs < 0, 0.0, out)

    def _log_density(self, xs):
        out = np.atleast_1d(self.base.log_density(xs))
        return np.where(xs > 0, out, LOG_ZERO)

    def atoms(self, mass_floor=0.0, loc_ceiling=math.inf):
        inner = self.base.atoms(mass_floor, loc_ceiling)
        return [(loc, mass) for loc, mass in inner if loc > 0]

    def knots(self):
        k = self.base.knots()
        return k[k > 0]

    def inverse_log_sf(self, log_p):
        if log_p >= 0.0:
            return 0.0
        return max(self.base.inverse_log_sf(log_p), 0.0)

    def _sample(self, n, rng):
        return np.maximum(self.base.sample(n, rng=rng), 0.0)


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def scale(dist: HeavyTailDistribution, c: float) -> HeavyTailDistribution:
    """Law of c * X."""
    _require(c > 0, "c", f"scale must be positive, got {c}")
    if isinstance(dist, Degenerate):
        return Degenerate(dist.c * c)
    return Scaled(dist, c)


def shift(dist: HeavyTailDistribution, t: float) -> HeavyTailDistribution:
    """Law of X + t."""
    if t == 0:
        return dist
    return Shifted(dist, t)


def positive_part(dist: HeavyTailDistribution) -> HeavyTailDistribution:
    """Law of max(X, 0)."""
    if dist.support_lo >= 0.0 and dist.mass_at_zero == 0.0:
        return dist
    return PositivePart(dist)


def atoms(dist: HeavyTailDistribution, mass_floor: float = 0.0,
          loc_ceiling: float = math.inf):
    """Atoms of the law with mass >= mass_floor at locations <= loc_ceiling."""
    return dist.atoms(mass_floor, loc_ceiling)


_SIMPLE_FAMILIES = {
    "regvar": (RegVar, ("beta",), {"x_min": 1.0}),
    "weibull_type": (WeibullType, ("alpha",), {}),
    "exponential": (Exponential, (), {"rate": 1.0}),
    "uniform": (UniformLaw, (), {"s": 1.0}),
    "degenerate": (Degenerate, ("c",), {}),
    "lattice_power": (LatticePower, ("beta",), {}),
    "example31_G": (KnotChainTail, ("alpha", "x1"), {}),
    "example31_F": (Example31F, ("alpha",), {}),
    "finite_atomic": (FiniteAtomic, ("locations", "masses"), {}),
}


def make_family(spec: dict) -> HeavyTailDistribution:
    """Build a distribution from a tagged descriptor.

    The descriptor is a mapping with a "family" tag plus the family's
    parameters; composites nest a "base" descriptor.  Unknown tags or
    parameters are rejected with the offending field named.
    """
    if not isinstance(spec, dict):
        raise ParameterError("family_spec", "family descriptor must be a mapping")
    if "family" not in spec:
        raise ParameterError("family", "descriptor is missing the 'family' tag")
    tag = spec["family"]
    rest = {k: v for k, v in spec.items() if k != "family"}

    if tag == "scaled":
        base = rest.pop("base", None)
        c = rest.pop("c", None)
        _reject_extras(tag, rest)
        _require(base is not None, "base", "scaled requires a 'base' descriptor")
        _require(c is not None, "c", "scaled requires 'c'")
        return scale(make_family(base), c)
    if tag == "shifted":
        base = rest.pop("base", None)
        t = rest.pop("t", None)
        _reject_extras(tag, rest)
        _require(base is not None, "base", "shifted requires a 'base' descriptor")
        _require(t is not None, "t", "shifted requires 't'")
        return shift(make_family(base), t)
    if tag == "positive_part":
        base = rest.pop("base", None)
        _reject_extras(tag, rest)
        _require(base is not None, "base",
                 "positive_part requires a 'base' descriptor")
        return PositivePart(make_family(base))

    if tag not in _SIMPLE_FAMILIES:
        known = ", ".join(sorted(_SIMPLE_FAMILIES) + ["scaled", "shifted",
                                                      "positive_part"])
        raise ParameterError("family", f"unknown family {tag!r}; known: {known}")
    ctor, required, defaults = _SIMPLE_FAMILIES[tag]
    kwargs = dict(defaults)
    for name in required:
        _require(name in rest, name, f"{tag} requires parameter {name!r}")
    for key, value in rest.items():
        _require(key in required or key in defaults, key,
                 f"{tag} does not accept parameter {key!r}")
        kwargs[key] = value
    return ctor(**kwargs)


def _reject_extras(tag: str, rest: dict) -> None:
    for key in rest:
        raise ParameterError(key, f"{tag} does not accept parameter {key!r}")
