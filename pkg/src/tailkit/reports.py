"""Serialization layer: JSON reports, CSV curves, and spec-file parsing.

Log-space quantities routinely sit at -inf (an exactly-zero tail), which
JSON and CSV cannot carry.  Serialized output replaces non-finite values
with explicit sentinels at the double-precision edge, so files round-trip
through any standards-compliant reader; parsers on this side restore
them.  All emitters sort keys and use a fixed float rendering, making
output files byte-identical for identical inputs.
"""

from __future__ import annotations

import io
import json
import math
from pathlib import Path

import numpy as np

from .distributions import HeavyTailDistribution, ParameterError, make_family
from .risk import RiskModelSpec

SCHEMA_VERSION = 1

# serialized stand-ins for IEEE specials; at the float8 boundary so they
# cannot collide with genuine log-tail values (bounded by ~ -1e305)
LOG_FLOOR = -1.0e308
LOG_CEIL = 1.0e308


class SpecError(ValueError):
    """A spec file failed to parse; carries the offending field path."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


def sanitize(obj):
    """Deep-copy a report payload, replacing non-finite floats.

    -inf and +inf become the documented sentinels, NaN becomes null.
    Numpy scalars and arrays are converted to plain Python types.
    """
    if isinstance(obj, dict):
        return {str(k): sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [sanitize(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        obj = obj.item()
    if isinstance(obj, float):
        if math.isnan(obj):
            return None
        if obj == math.inf:
            return LOG_CEIL
        if obj == -math.inf:
            return LOG_FLOOR
    return obj


def render_json(payload: dict) -> str:
    """Render a report dict as deterministic, sentinel-clean JSON."""
    body = dict(sanitize(payload))
    body.setdefault("schema_version", SCHEMA_VERSION)
    return json.dumps(body, indent=2, sort_keys=True) + "\n"


def curve_csv(xs, values) -> str:
    """Render one curve as CSV with header ``x,value``.

    Points are emitted in increasing x; duplicate x values are rejected
    since a curve cannot carry two values at one abscissa.  Non-finite
    values are written as sentinels so the file stays numeric.
    """
    x = np.asarray(xs, dtype=float)
    v = np.asarray(values, dtype=float)
    if x.ndim != 1 or x.shape != v.shape:
        raise ValueError("curve_csv needs two 1-d arrays of equal length")
    order = np.argsort(x, kind="stable")
    x, v = x[order], v[order]
    if x.size > 1 and np.any(np.diff(x) <= 0):
        raise ValueError("curve x values must be distinct")
    out = io.StringIO()
    out.write("x,value\n")
    for xi, vi in zip(x, v):
        if math.isnan(vi):
            vi_text = ""
        elif vi == math.inf:
            vi_text = repr(LOG_CEIL)
        elif vi == -math.inf:
            vi_text = repr(LOG_FLOOR)
        else:
            vi_text = repr(float(vi))
        out.write(f"{float(xi)!r},{vi_text}\n")
    return out.getvalue()


def read_curve_csv(text: str) -> tuple[np.ndarray, np.ndarray]:
    """Parse ``x,value`` CSV back into arrays, restoring sentinels."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != "x,value":
        raise SpecError("header", "expected 'x,value'")
    xs, vs = [], []
    for i, ln in enumerate(lines[1:], start=2):
        parts = ln.split(",")
        if len(parts) != 2:
            raise SpecError(f"line {i}", f"expected two fields, got {ln!r}")
        xs.append(float(parts[0]))
        vs.append(math.nan if parts[1] == "" else float(parts[1]))
    x = np.asarray(xs)
    v = np.asarray(vs)
    v[v <= LOG_FLOOR] = -math.inf
    v[v >= LOG_CEIL] = math.inf
    return x, v


# ---------------------------------------------------------------------------
# spec parsing
# ---------------------------------------------------------------------------


def _load_json(source, what: str) -> dict:
    if isinstance(source, dict):
        return source
    path = Path(source)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SpecError(str(path), f"cannot read {what} spec: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from exc
    if not isinstance(data, dict):
        raise SpecError(str(path), f"{what} spec must be a JSON object")
    return data


def parse_distribution(source, where: str = "dist") -> HeavyTailDistribution:
    """Build a distribution from a JSON file path or an in-memory dict.

    The schema is the family descriptor consumed by
    :func:`tailkit.distributions.make_family`: a ``family`` tag plus that
    family's parameters, with composites nesting a ``base`` descriptor.
    An optional ``schema_version`` field is accepted and checked.
    """
    data = dict(_load_json(source, where))
    version = data.pop("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise SpecError(f"{where}.schema_version",
                        f"unsupported version {version!r}")
    try:
        return make_family(data)
    except ParameterError as exc:
        raise SpecError(f"{where}.{exc.param}", str(exc)) from exc


def parse_risk_model(source) -> tuple[RiskModelSpec, dict]:
    """Build a risk model plus estimator settings from JSON.

    Schema: ``{"Z": <family>, "Y": <family>, "horizon": int | "inf",
    "estimator": {"paths": int, "seed": int}}`` where the family
    descriptors follow the distribution schema.  Returns the model and
    the estimator settings with defaults filled in.
    """
    data = dict(_load_json(source, "model"))
    version = data.pop("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise SpecError("model.schema_version",
                        f"unsupported version {version!r}")
    for field in ("Z", "Y"):
        if field not in data:
            raise SpecError(f"model.{field}", "required field missing")
        if not isinstance(data[field], dict):
            raise SpecError(f"model.{field}", "must be a family descriptor")
    z = parse_distribution(data.pop("Z"), "model.Z")
    y = parse_distribution(data.pop("Y"), "model.Y")

    horizon = data.pop("horizon", math.inf)
    if horizon in ("inf", "infinite"):
        horizon = math.inf
    if not isinstance(horizon, (int, float)):
        raise SpecError("model.horizon",
                        f"must be an integer or \"inf\", got {horizon!r}")
    if isinstance(horizon, float) and horizon.is_integer():
        horizon = int(horizon)

    est = data.pop("estimator", {})
    if not isinstance(est, dict):
        raise SpecError("model.estimator", "must be an object")
    unknown = set(est) - {"paths", "seed"}
    if unknown:
        raise SpecError(f"model.estimator.{sorted(unknown)[0]}",
                        "unknown estimator setting")
    settings = {"paths": int(est.get("paths", 10 ** 6)),
                "seed": int(est.get("seed", 0))}

    if data:
        raise SpecError(f"model.{sorted(data)[0]}", "unknown field")
    try:
        model = RiskModelSpec(Z_law=z, Y_law=y, horizon=horizon)
    except ParameterError as exc:
        raise SpecError(f"model.{exc.param}", str(exc)) from exc
    return model, settings
