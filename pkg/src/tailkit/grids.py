"""Evaluation grids for tail diagnostics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GeometricGrid:
    """Geometric probe grid x0 * ratio**k, k = 0..count-1.

    The defaults walk from 10 out to roughly 1.1e8, far enough into the
    tail for limit behaviour to show while every survival value stays
    representable in log space.
    """

    x0: float = 10.0
    ratio: float = 1.5
    count: int = 40

    def __post_init__(self) -> None:
        if self.x0 <= 0:
            raise ValueError("x0 must be positive")
        if self.ratio <= 1:
            raise ValueError("ratio must exceed 1")
        if self.count < 2:
            raise ValueError("count must be at least 2")

    def values(self) -> np.ndarray:
        return self.x0 * self.ratio ** np.arange(self.count)


def as_grid_array(grid) -> np.ndarray:
    """Accept a GeometricGrid, an array of points, or None (defaults)."""
    if grid is None:
        return GeometricGrid().values()
    if isinstance(grid, GeometricGrid):
        return grid.values()
    arr = np.asarray(grid, dtype=float)
    if arr.ndim != 1 or arr.size < 2:
        raise ValueError("a grid must be a 1-d array with at least 2 points")
    if np.any(np.diff(arr) <= 0):
        raise ValueError("grid points must be strictly increasing")
    if np.any(arr <= 0):
        raise ValueError("grid points must be positive")
    return arr


def geometric_nodes(lo: float, hi: float, count: int) -> np.ndarray:
    """Log-uniform nodes on [lo, hi], both endpoints included."""
    if not (0 < lo < hi):
        raise ValueError("need 0 < lo < hi")
    return np.exp(np.linspace(np.log(lo), np.log(hi), count))


def endpoint_clustered_nodes(lo: float, hi: float, endpoint: float,
                             count: int) -> np.ndarray:
    """Nodes on [lo, hi] log-spaced in distance from a finite upper endpoint.

    Used when a law has bounded support: survival curves flatten into the
    endpoint with polynomial contact in log-distance, so accuracy needs
    nodes that pile up near it.  Works in u = ln x; distances d = ln(endpoint) - u
    are geometric, which also keeps the far tail (small x) resolved.
    """
    if not (0 < lo < hi <= endpoint):
        raise ValueError("need 0 < lo < hi <= endpoint")
    u_lo, u_hi, u_end = np.log(lo), np.log(hi), np.log(endpoint)
    d_max = u_end - u_lo
    d_min = max(u_end - u_hi, 1e-14 * max(1.0, abs(u_end)))
    d = np.exp(np.linspace(np.log(d_max), np.log(d_min), count))
    u = u_end - d
    u[0] = u_lo
    return np.exp(u)


def bounded_tail_nodes(lo: float, hi: float, endpoint: float,
                       count: int) -> np.ndarray:
    """Log-uniform bulk plus an endpoint-clustered tail section.

    Pure endpoint clustering starves the midrange when the grid spans many
    decades, so only the last stretch before the endpoint gets the clustered
    treatment; the bulk stays log-uniform.  Within the clustered section the
    survival curve is analytic in sigma = -ln d (d = log-distance to the
    endpoint) and approaches a straight line as d -> 0, so most of the
    section's nodes go to moderate d where curvature actually lives and only
    a thin rearguard walks the final decades down to d_min.
    """
    if not (0 < lo < hi <= endpoint):
        raise ValueError("need 0 < lo < hi <= endpoint")
    u_lo, u_end = np.log(lo), np.log(endpoint)
    d_split = 1.5
    d_lin = 1e-4
    d_min = max(u_end - np.log(hi), 1e-14 * max(1.0, abs(u_end)))
    if u_end - u_lo <= 2.0 * d_split:
        return endpoint_clustered_nodes(lo, hi, endpoint, count)
    if d_min >= d_split / 2.0:
        # hi never gets close to the endpoint; no singular stretch to cover
        return geometric_nodes(lo, hi, count)
    n_tail = max(count // 3, 48)
    n_main = count - n_tail
    main = np.linspace(u_lo, u_end - d_split, n_main + 1)[:-1]
    if d_min >= d_lin:
        d = np.exp(np.linspace(np.log(d_split), np.log(d_min), n_tail))
    else:
        n_mid = max(2 * n_tail // 3, 8)
        n_deep = n_tail - n_mid
        mid = np.exp(np.linspace(np.log(d_split), np.log(d_lin),
                                 n_mid + 1))[:-1]
        deep = np.exp(np.linspace(np.log(d_lin), np.log(d_min), n_deep))
        d = np.concatenate([mid, deep])
    return np.exp(np.concatenate([main, u_end - d]))
