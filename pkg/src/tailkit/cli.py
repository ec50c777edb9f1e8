"""Command-line front door.

One subcommand per operation group: point evaluation, product and sum
convolution tails, class diagnostics, named-condition checks, the
product subexponentiality verdict, and the ruin model.  Input laws and
models come from JSON descriptors (a file path or an inline JSON
object); results are emitted as versioned JSON reports or as ``x,value``
CSV curves.  CSV output also renders a PNG figure next to the output
file unless ``--no-plot`` is given.

Exit codes: 0 success; 1 failed evidence under ``--assert``; 2 invalid
input; 3 numerical non-convergence (partial results are still written).
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .convolve import GridSpec, product_tail, sum_self_tail
from .diagnostics import (
    CLASS_IDS,
    CONDITION_IDS,
    VerdictThresholds,
    check_condition,
    classify,
    knot_probe_grid,
    product_subexp_verdict,
)
from .distributions import ParameterError
from .grids import GeometricGrid, geometric_nodes
from .quadrature import QuadratureError, QuadratureSpec
from . import risk
from .reports import SCHEMA_VERSION, LOG_FLOOR, SpecError, curve_csv, \
    parse_distribution, parse_risk_model, render_json

_CSV_NOTE = "csv output writes a PNG figure next to --out unless --no-plot"


def _defaults_table() -> dict:
    from .diagnostics import (_ATOM_LOC_CEILING, _ATOM_MASS_FLOOR,
                              _DEFAULT_B, _DEFAULT_POWERS, _DEFAULT_T)
    return {
        "probe_grid": asdict(GeometricGrid()),
        "quadrature": asdict(QuadratureSpec()),
        "product_grid": asdict(GridSpec()),
        "discount_grid": asdict(risk._DISCOUNT_GRID),
        "verdict_thresholds": asdict(VerdictThresholds()),
        "condition_probes": {
            "b": list(_DEFAULT_B),
            "t": list(_DEFAULT_T),
            "shift_powers": list(_DEFAULT_POWERS),
            "atom_mass_floor": _ATOM_MASS_FLOOR,
            "atom_loc_ceiling": _ATOM_LOC_CEILING,
        },
        "risk": {"paths": 10 ** 6, "seed": 0, "lam": 2.0, "epsilon": 0.05,
                 "mc_batch_rows": risk._BATCH_ROWS,
                 "workers_env": "TAILKIT_WORKERS"},
        "io": {"schema_version": SCHEMA_VERSION, "log_floor": LOG_FLOOR,
               "csv_header": "x,value"},
    }


def _spec_arg(text: str, where: str):
    if text.lstrip().startswith("{"):
        try:
            return json.loads(text), where
        except json.JSONDecodeError as exc:
            raise SpecError(where, f"inline JSON: {exc.msg}") from exc
    return text, where


def _dist_arg(text: str, where: str):
    source, where = _spec_arg(text, where)
    return parse_distribution(source, where)


def _slug(label: str) -> str:
    out = re.sub(r"[^A-Za-z0-9.+-]+", "_", label).strip("_")
    return out or "curve"


def _evidence_curves(payload_evidence: dict) -> list[tuple[str, object]]:
    return sorted(payload_evidence.items())


def _parse_levels(args) -> np.ndarray:
    if args.x_range is not None:
        lo, hi, count = args.x_range
        xs = geometric_nodes(float(lo), float(hi), int(count))
    elif args.x:
        xs = np.asarray(sorted(set(float(t) for t in args.x)))
    else:
        raise SpecError("x", "give --x values or --x-range LO HI COUNT")
    return xs


def _probe_grid(args):
    if getattr(args, "grid", None) is not None:
        lo, hi, count = args.grid
        return geometric_nodes(float(lo), float(hi), int(count))
    return None


def _quad(args) -> QuadratureSpec | None:
    if getattr(args, "rel_tol", None) is not None:
        return QuadratureSpec(rel_tol=args.rel_tol)
    return None


# ---------------------------------------------------------------------------
# command handlers: each returns (payload, curve, extra_curves, figure, failed)
# where curve is (xs, values) for csv, extra_curves is [(suffix, xs, values)],
# figure is a callable(path) -> None, and failed drives --assert
# ---------------------------------------------------------------------------


def _cmd_eval(args):
    dist = _dist_arg(args.dist, "dist")
    xs = _parse_levels(args)
    vals = np.asarray([float(dist.log_sf(t)) for t in xs])
    payload = {"command": "eval", "dist": dist.family_spec,
               "x": list(xs), "log_sf": list(vals)}

    def figure(path):
        from .plotting import save_curve_plot
        save_curve_plot(xs, vals, path, title=f"survival of {dist!r}",
                        ylabel="log survival")

    return payload, (xs, vals), [], figure, False


def _cmd_convolve(args):
    F = _dist_arg(args.F, "F")
    G = _dist_arg(args.G, "G")
    xs = _parse_levels(args)
    q = _quad(args)
    vals = np.asarray([product_tail(F, G, t, q) for t in xs])
    payload = {"command": "convolve", "F": F.family_spec, "G": G.family_spec,
               "x": list(xs), "log_tail": list(vals)}

    def figure(path):
        from .plotting import save_curve_plot
        save_curve_plot(xs, vals, path, title="product tail",
                        ylabel="log tail")

    return payload, (xs, vals), [], figure, False


def _cmd_selfconv(args):
    dist = _dist_arg(args.dist, "dist")
    xs = _parse_levels(args)
    q = _quad(args)
    vals = np.asarray([sum_self_tail(dist, args.k, t, q) for t in xs])
    payload = {"command": "selfconv", "dist": dist.family_spec, "k": args.k,
               "x": list(xs), "log_tail": list(vals)}

    def figure(path):
        from .plotting import save_curve_plot
        save_curve_plot(xs, vals, path, title=f"{args.k}-fold sum tail",
                        ylabel="log tail")

    return payload, (xs, vals), [], figure, False


def _cmd_classify(args):
    dist = _dist_arg(args.dist, "dist")
    diag = classify(dist, args.class_id, _probe_grid(args), _quad(args))
    payload = {"command": "classify", "dist": dist.family_spec,
               **diag.to_dict()}
    curves = [(label, d) for label, d in _evidence_curves(diag.evidence)]
    curve = (curves[0][1].x_grid, curves[0][1].log_ratios) if curves else None
    extra = [(_slug(label), d.x_grid, d.log_ratios) for label, d in curves[1:]]

    def figure(path):
        from .plotting import save_ratio_plot
        if curves:
            save_ratio_plot(curves[0][1], path,
                            title=f"{args.class_id} evidence for {dist!r}")

    return payload, curve, extra, figure, diag.member is False


def _cmd_check(args):
    F = _dist_arg(args.F, "F")
    G = _dist_arg(args.G, "G")
    params = {}
    if args.d:
        params["d"] = tuple(args.d)
    if args.b:
        params["b"] = tuple(args.b)
    if args.t:
        params["t"] = tuple(args.t)
    grid = knot_probe_grid(G) if args.knot_grid else _probe_grid(args)
    report = check_condition(args.cond, F, G, params or None, grid,
                             _quad(args))
    payload = {"command": "check", "F": F.family_spec, "G": G.family_spec,
               **report.to_dict()}
    curves = _evidence_curves(report.parameter_evidence)
    curve = (curves[0][1].x_grid, curves[0][1].log_ratios) if curves else None
    extra = [(_slug(label), d.x_grid, d.log_ratios) for label, d in curves[1:]]

    def figure(path):
        from .plotting import save_condition_plot
        save_condition_plot(report, path)

    return payload, curve, extra, figure, report.overall == "FAILS_EVIDENCE"


def _cmd_verdict(args):
    F = _dist_arg(args.F, "F")
    G = _dist_arg(args.G, "G")
    verdict = product_subexp_verdict(F, G, _probe_grid(args), _quad(args))
    payload = {"command": "verdict", "F": F.family_spec, "G": G.family_spec,
               **verdict.to_dict()}
    diag = verdict.eq12.parameter_evidence if verdict.eq12 else {}
    curves = _evidence_curves(diag)
    if not curves and verdict.premise.evidence:
        curves = _evidence_curves(verdict.premise.evidence)
    curve = (curves[0][1].x_grid, curves[0][1].log_ratios) if curves else None
    extra = [(_slug(label), d.x_grid, d.log_ratios) for label, d in curves[1:]]

    def figure(path):
        from .plotting import save_condition_plot
        if verdict.eq12 is not None:
            save_condition_plot(verdict.eq12, path)
        elif curves:
            from .plotting import save_ratio_plot
            save_ratio_plot(curves[0][1], path, title="premise evidence")

    failed = verdict.status == "REFUSED" or verdict.predicted_member is False
    return payload, curve, extra, figure, failed


def _cmd_ruin(args):
    source, _ = _spec_arg(args.model, "model")
    model, settings = parse_risk_model(source)
    xs = _parse_levels(args)
    n = args.n if args.n is not None else None
    q = _quad(args)
    asym = np.asarray([risk.finite_ruin_asymptotic(model, n, t, q)
                       for t in xs])
    horizon = "inf" if math.isinf(model.horizon) else model.horizon
    payload = {"command": "ruin",
               "model": {"Z": model.Z_law.family_spec,
                         "Y": model.Y_law.family_spec,
                         "horizon": horizon},
               "n": risk._require_finite_n(model, n),
               "x": list(xs), "asymptotic_log": list(asym)}
    estimates = []
    if not args.no_mc:
        paths = args.paths if args.paths is not None else settings["paths"]
        seed = args.seed if args.seed is not None else settings["seed"]
        estimates = risk.finite_ruin_profile(model, n, xs, paths=paths,
                                             seed=seed)
        payload["mc"] = [e.to_dict() for e in estimates]
    if args.check_conditions:
        pre = risk.asymptotic_preconditions(model, _probe_grid(args), q)
        payload["preconditions"] = {
            "product_subexp": pre["product_subexp"].to_dict(),
            "EQ11": pre["EQ11"].to_dict(),
        }

    def figure(path):
        from .plotting import save_ruin_plot
        save_ruin_plot(xs, asym, estimates, path,
                       title=f"ruin by time {payload['n']}")

    return payload, (xs, asym), [], figure, False


def _cmd_bound(args):
    source, _ = _spec_arg(args.model, "model")
    model, _settings = parse_risk_model(source)
    q = _quad(args)
    series_log, cert = risk.infinite_lower_bound(
        model, args.x[0], lam=args.lam, epsilon=args.epsilon, q=q)
    payload = {"command": "bound",
               "model": {"Z": model.Z_law.family_spec,
                         "Y": model.Y_law.family_spec},
               "x": args.x[0], "series_log": series_log,
               "certificate": cert.to_dict()}
    idx = np.arange(1, cert.i_star + 1, dtype=float)
    terms = np.asarray([risk.discounted_loss_tail(model, int(i), args.x[0], q)
                        for i in idx])

    def figure(path):
        from .plotting import save_curve_plot
        save_curve_plot(idx, terms, path,
                        title=f"discounted loss tails at x={args.x[0]:g}",
                        ylabel="log tail")

    return payload, (idx, terms), [], figure, not cert.passed


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------


def _add_output_options(p):
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json",
                   help=f"report format; {_CSV_NOTE}")
    p.add_argument("--no-plot", action="store_true",
                   help="suppress the PNG figure for csv output")
    p.add_argument("--assert", dest="assert_mode", action="store_true",
                   help="exit 1 when the result is failed evidence")
    p.add_argument("--rel-tol", type=float,
                   help="quadrature relative tolerance override")


def _add_levels(p, required=True):
    p.add_argument("--x", type=float, nargs="+",
                   help="evaluation points (one or more)")
    p.add_argument("--x-range", nargs=3, metavar=("LO", "HI", "COUNT"),
                   type=float, help="geometric range of evaluation points")


def _add_grid(p):
    p.add_argument("--grid", nargs=3, metavar=("LO", "HI", "COUNT"),
                   type=float, help="geometric probe grid override")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="tailkit",
        description="Log-space tail numerics for heavy-tailed laws.")
    top.add_argument("--show-defaults", action="store_true",
                     help="print the defaults table as JSON and exit")
    sub = top.add_subparsers(dest="command")

    p = sub.add_parser("eval", help="survival values of one law")
    p.add_argument("--dist", required=True, help="family JSON (path or inline)")
    _add_levels(p)
    _add_output_options(p)
    p.set_defaults(handler=_cmd_eval)

    p = sub.add_parser("convolve", help="product tail of two laws")
    p.add_argument("--F", required=True)
    p.add_argument("--G", required=True)
    _add_levels(p)
    _add_output_options(p)
    p.set_defaults(handler=_cmd_convolve)

    p = sub.add_parser("selfconv", help="k-fold sum tail of one law")
    p.add_argument("--dist", required=True)
    p.add_argument("--k", type=int, required=True)
    _add_levels(p)
    _add_output_options(p)
    p.set_defaults(handler=_cmd_selfconv)

    p = sub.add_parser("classify", help="distribution class evidence")
    p.add_argument("--dist", required=True)
    p.add_argument("--class-id", required=True, choices=CLASS_IDS)
    _add_grid(p)
    _add_output_options(p)
    p.set_defaults(handler=_cmd_classify)

    p = sub.add_parser("check", help="named-condition evidence")
    p.add_argument("--cond", required=True, choices=CONDITION_IDS)
    p.add_argument("--F", required=True)
    p.add_argument("--G", required=True)
    p.add_argument("--d", type=float, nargs="+",
                   help="shift points for EQ12/EQ14")
    p.add_argument("--b", type=float, nargs="+", help="scales for EQ11")
    p.add_argument("--t", type=float, nargs="+", help="scales for EQ13")
    p.add_argument("--knot-grid", action="store_true",
                   help="probe on G's tail knots (and their doubles)")
    _add_grid(p)
    _add_output_options(p)
    p.set_defaults(handler=_cmd_check)

    p = sub.add_parser("verdict",
                       help="product-tail subexponentiality verdict")
    p.add_argument("--F", required=True)
    p.add_argument("--G", required=True)
    _add_grid(p)
    _add_output_options(p)
    p.set_defaults(handler=_cmd_verdict)

    p = sub.add_parser("ruin", help="finite-horizon ruin probability")
    p.add_argument("--model", required=True, help="model JSON (path or inline)")
    p.add_argument("--n", type=int, help="horizon override")
    p.add_argument("--paths", type=int, help="Monte Carlo paths override")
    p.add_argument("--seed", type=int, help="Monte Carlo seed override")
    p.add_argument("--no-mc", action="store_true",
                   help="skip simulation; report the tail sum only")
    p.add_argument("--check-conditions", action="store_true",
                   help="embed the applicability evidence reports")
    _add_levels(p)
    _add_grid(p)
    _add_output_options(p)
    p.set_defaults(handler=_cmd_ruin)

    p = sub.add_parser("bound", help="infinite-horizon series lower bound")
    p.add_argument("--model", required=True)
    p.add_argument("--x", type=float, nargs=1, required=True)
    p.add_argument("--lam", type=float, default=2.0,
                   help="tail comparison scale (> 1)")
    p.add_argument("--epsilon", type=float, default=0.05,
                   help="slack above the tail-halving constant")
    _add_grid(p)
    _add_output_options(p)
    p.set_defaults(handler=_cmd_bound)

    return top


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _emit(args, payload, curve, extra, figure) -> None:
    if args.format == "json":
        _write_text(args.out, render_json(payload))
        return
    if curve is None:
        raise SpecError("format", "this result has no curve; use json")
    if args.out is None:
        raise SpecError("out", "csv output needs --out so figures and side "
                        "curves have a place to go")
    out = Path(args.out)
    _write_text(str(out), curve_csv(curve[0], curve[1]))
    for suffix, xs, vals in extra:
        side = out.with_name(f"{out.stem}.{suffix}{out.suffix or '.csv'}")
        _write_text(str(side), curve_csv(xs, vals))
    if not args.no_plot and figure is not None:
        figure(str(out.with_suffix(".png")))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.show_defaults:
        sys.stdout.write(render_json(_defaults_table()))
        return 0
    if args.command is None:
        parser.print_help()
        return 2

    try:
        payload, curve, extra, figure, failed = args.handler(args)
    except SpecError as exc:
        print(f"tailkit: {exc}", file=sys.stderr)
        return 2
    except ParameterError as exc:
        print(f"tailkit: {exc.param}: {exc}", file=sys.stderr)
        return 2
    except QuadratureError as exc:
        partial = {"command": args.command, "error": str(exc),
                   "partial_log": exc.partial_log,
                   "achieved_rel": exc.achieved_rel}
        _write_text(getattr(args, "out", None), render_json(partial))
        print(f"tailkit: quadrature did not converge: {exc}", file=sys.stderr)
        return 3

    _emit(args, payload, curve, extra, figure)
    if failed and args.assert_mode:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
