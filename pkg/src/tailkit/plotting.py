"""Figure rendering for evidence curves, tails, and ruin profiles.

Everything draws through the Agg backend straight to files, so the
module works headless.  Figures show log-space quantities on symlog or
log axes; points whose value is exactly zero in linear space (log value
-inf) are drawn at the bottom edge as open markers so that vanishing
evidence stays visible instead of silently disappearing.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .diagnostics import ConditionReport, RatioDiagnostic

_FIGSIZE = (7.0, 4.4)
_DPI = 120

# the log-axis tick machinery overflows once the data spans hundreds of
# decades (knot grids can); such curves are drawn against log10(x) instead
_MAX_LOG_AXIS_DECADES = 60.0


def _x_mapper(arrays):
    hi, lo = 0.0, math.inf
    for arr in arrays:
        pos = arr[(arr > 0) & np.isfinite(arr)]
        if pos.size:
            hi = max(hi, float(pos.max()))
            lo = min(lo, float(pos.min()))
    if hi <= 0.0 or math.log10(hi / lo) <= _MAX_LOG_AXIS_DECADES:
        return None
    return lambda x: np.log10(np.maximum(np.asarray(x, dtype=float), 1e-300))


def _setup_x_axis(ax, mapper) -> None:
    if mapper is None:
        ax.set_xscale("log")
        ax.set_xlabel("x")
    else:
        ax.set_xlabel("log10 x")


def _finite_floor(values: np.ndarray) -> float:
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        return -1.0
    lo = float(finite.min())
    span = max(1.0, abs(lo) * 0.05)
    return lo - span


def _save(fig, path: str) -> str:
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)
    return str(path)


def save_curve_plot(xs, log_values, path: str, title: str = "",
                    ylabel: str = "log tail") -> str:
    """One log-space curve over a log-x axis."""
    x = np.asarray(xs, dtype=float)
    v = np.asarray(log_values, dtype=float)
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    mapper = _x_mapper([x])
    if mapper is not None:
        x = mapper(x)
    floor = _finite_floor(v)
    shown = np.where(np.isfinite(v), v, floor)
    ax.plot(x, shown, lw=1.6, color="#1f77b4")
    dead = ~np.isfinite(v)
    if dead.any():
        ax.plot(x[dead], shown[dead], "o", mfc="none", mec="#1f77b4",
                ms=5, label="exact zero")
        ax.legend(loc="best", fontsize=9)
    _setup_x_axis(ax, mapper)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title, fontsize=11)
    ax.grid(True, which="both", alpha=0.25)
    return _save(fig, path)


def _plot_ratio(ax, diag: RatioDiagnostic, color, label: str = "",
                window: int = 8, mapper=None):
    x = diag.x_grid if mapper is None else mapper(diag.x_grid)
    r = diag.log_ratios
    floor = _finite_floor(r)
    shown = np.where(np.isfinite(r), r, floor)
    ax.plot(x, shown, lw=1.5, color=color, label=label or diag.label or None)
    dead = ~np.isfinite(r)
    if dead.any():
        ax.plot(x[dead], shown[dead], "o", mfc="none", mec=color, ms=4)
    if x.size >= 2:
        w0 = x[max(0, x.size - window)]
        ax.axvspan(w0, x[-1], color=color, alpha=0.08, lw=0)


def save_ratio_plot(diag: RatioDiagnostic, path: str, title: str = "") -> str:
    """One evidence curve: log ratio over x, trailing window shaded."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    mapper = _x_mapper([diag.x_grid])
    _plot_ratio(ax, diag, "#1f77b4", mapper=mapper)
    _setup_x_axis(ax, mapper)
    ax.set_ylabel("log ratio")
    ax.axhline(0.0, color="0.4", lw=0.8, ls=":")
    caption = f"verdict: {diag.verdict}"
    if diag.dropped:
        caption += f"   dropped points: {diag.dropped}"
    ax.set_title(f"{title}\n{caption}" if title else caption, fontsize=11)
    ax.grid(True, which="both", alpha=0.25)
    if diag.label:
        ax.legend(loc="best", fontsize=9)
    return _save(fig, path)


def save_condition_plot(report: ConditionReport, path: str) -> str:
    """All parameter evidence curves of one condition, overlaid."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    cycle = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    mapper = _x_mapper([d.x_grid for d in report.parameter_evidence.values()])
    for k, (label, diag) in enumerate(sorted(report.parameter_evidence.items())):
        _plot_ratio(ax, diag, cycle[k % len(cycle)],
                    label=f"{label}: {diag.verdict}", mapper=mapper)
    _setup_x_axis(ax, mapper)
    ax.set_ylabel("log ratio")
    ax.axhline(0.0, color="0.4", lw=0.8, ls=":")
    ax.set_title(f"{report.condition_id}: {report.overall}", fontsize=11)
    ax.grid(True, which="both", alpha=0.25)
    if report.parameter_evidence:
        ax.legend(loc="best", fontsize=8)
    return _save(fig, path)


def save_ruin_plot(levels, asym_log, estimates, path: str,
                   title: str = "") -> str:
    """Tail-sum approximation curve with Monte Carlo points and error bars.

    ``levels``/``asym_log`` trace the approximation; ``estimates`` is a
    list of RuinEstimate whose points are drawn with 95% bars.  Zero
    estimates plot at the axis floor as open markers.
    """
    x = np.asarray(levels, dtype=float)
    a = np.asarray(asym_log, dtype=float)
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.plot(x, np.exp(a), lw=1.6, color="#d62728", label="tail-sum approx")
    if estimates:
        mx = np.asarray([e.x for e in estimates])
        mp = np.asarray([e.point for e in estimates])
        mc = np.asarray([e.ci_halfwidth for e in estimates])
        pos = mp > 0
        if pos.any():
            ax.errorbar(mx[pos], mp[pos], yerr=mc[pos], fmt="o", ms=4,
                        lw=1, capsize=3, color="#1f77b4",
                        label="Monte Carlo")
        if (~pos).any():
            tiny = np.exp(a[np.isfinite(a)]).min() if np.isfinite(a).any() \
                else 1e-12
            ax.plot(mx[~pos], np.full((~pos).sum(), tiny), "o", mfc="none",
                    mec="#1f77b4", ms=5, label="MC: no hits")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("initial wealth x")
    ax.set_ylabel("ruin probability")
    if title:
        ax.set_title(title, fontsize=11)
    ax.grid(True, which="both", alpha=0.25)
    ax.legend(loc="best", fontsize=9)
    return _save(fig, path)
