"""Command-line interface: nilfrac <subcommand> [options]."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .blowup import separatrix_leading, separatrix_series
from .boxdim import (EstimatorConfig, estimate_dim_boxcount, estimate_dim_increment,
                     estimate_dim_sausage)
from .classify import classify_nilpotent
from .errors import InputError, NilfracError
from .infinity import Chart, compactify, predicted_dim_infinity, verify_dim_infinity
from .polyfield import NilpotentModel, PlanarVectorField
from .presets import PRESETS, PresetOrbit, get_preset, preset_orbit, separatrix_orbit
from .saddledual import dual_box_dimension, saddle_increment_exponent, verify_saddle_infinity
from .sweep import SweepConfig, Unfolding, run_sweep
from .unitmap import DEFAULT_FLOOR, DEFAULT_RTOL, iterate_orbit

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", dest="exact", action="store_true", default=True,
                      help="exact rational coefficients (default)")
    mode.add_argument("--float", dest="exact", action="store_false",
                      help="float coefficients")
    p.add_argument("--seed", type=int, default=0, help="seed for Monte Carlo fallbacks")
    p.add_argument("--tol", type=float, default=DEFAULT_RTOL, help="integrator relative tolerance")
    p.add_argument("--out", type=Path, default=None, help="output file or directory")
    p.add_argument("--format", choices=("json", "csv", "svg"), default="json")
    return p


def _model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--a", default="1", help="coefficient of x^m")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--b", default="0", help="coefficient of x^n y")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--preset", default=None, help="use a named preset instead")


def _model(args) -> NilpotentModel:
    if args.preset:
        p = get_preset(args.preset)
        if not isinstance(p.field, NilpotentModel):
            raise InputError(f"preset {args.preset} is not a nilpotent model")
        return p.field
    conv = Fraction if args.exact else float
    try:
        return NilpotentModel(conv(args.a), args.m, conv(args.b), args.n)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(str(exc)) from exc


def _cfg(args) -> EstimatorConfig:
    return EstimatorConfig(seed=args.seed)


def _emit(args, obj) -> None:
    text = json.dumps(obj, indent=2, default=str) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text)


# ---------------------------------------------------------------- subcommands


def cmd_classify(args) -> int:
    field = _read_field(args) if args.field else _model(args).to_field()
    _emit(args, classify_nilpotent(field).to_json())
    return EXIT_OK


def _read_field(args) -> PlanarVectorField:
    try:
        obj = json.loads(Path(args.field).read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{args.field}: {exc}") from exc
    return PlanarVectorField.from_json(obj, args.exact)


def cmd_separatrix(args) -> int:
    if args.field:
        field = _read_field(args)
        rep = classify_nilpotent(field)
        model = NilpotentModel(rep.a, rep.m, rep.b if rep.b is not None else 0, rep.n or 1)
    else:
        model, field = _model(args), None
    out = []
    for br in separatrix_leading(model):
        out.append(separatrix_series(model, br, args.terms, field=field).to_json())
    _emit(args, out)
    return EXIT_OK


def cmd_orbit(args) -> int:
    if args.field:
        if args.y0 is None:
            raise InputError("--field needs --x0 and --y0")
        orb = iterate_orbit(_read_field(args), (args.x0, args.y0), floor=args.floor,
                            max_iter=args.max_iter, tol=args.tol)
        po = PresetOrbit(orb, np.empty((0, 2)), None, None, "free orbit")
    elif args.preset and get_preset(args.preset).kind.value != "separatrix":
        po = preset_orbit(get_preset(args.preset), max_iter=args.max_iter)
    else:
        po = separatrix_orbit(_model(args), args.branch, x0=args.x0, max_iter=args.max_iter)
    orb = po.orbit
    if args.format == "csv" or args.format == "svg":
        from .plotting import emit_plot
        if args.out is None:
            if args.format == "svg":
                raise InputError("svg output needs --out")
            sys.stdout.write(orb.to_csv())
        else:
            emit_plot(orb, args.format, args.out, po.curve, po.note)
        return EXIT_OK
    _emit(args, {"termination": orb.termination.value, "points": len(orb), "note": po.note,
                 "map": orb.map_descriptor, "last": orb.points[-1].tolist()})
    return EXIT_OK


def _read_points(path: Path) -> np.ndarray:
    rows = []
    for line in path.read_text().splitlines():
        parts = [s for s in line.replace(",", " ").split() if s]
        try:
            vals = [float(s) for s in parts]
        except ValueError:
            continue  # header
        rows.append(vals)
    if not rows:
        raise InputError(f"{path}: no numeric rows")
    a = np.array(rows, dtype=float)
    if a.shape[1] == 3:
        a = a[:, 1:]  # k, x, y
    return a


def cmd_dim(args) -> int:
    pts = _read_points(args.orbit)
    cfg = EstimatorConfig(seed=args.seed, eps_min=args.eps_min, eps_max=args.eps_max)
    if args.method == "boxcount":
        est = estimate_dim_boxcount(pts, cfg)
    elif args.method == "sausage":
        est = estimate_dim_sausage(pts, cfg)
    else:
        seq = pts[:, 0] if pts.ndim == 2 else pts
        est = estimate_dim_increment(seq)
    _emit(args, est.to_json())
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_verify
    names = None if args.all or not args.presets else args.presets
    rep = run_verify(names, _cfg(args), workers=args.workers)
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "report.json").write_text(json.dumps(rep.to_json(), indent=2) + "\n")
        (args.out / "report.csv").write_text(rep.to_csv())
        if args.figures:
            _verify_figures(args.out, names)
    if args.format == "csv":
        sys.stdout.write(rep.to_csv())
    elif args.format == "json":
        sys.stdout.write(json.dumps(rep.to_json(), indent=2) + "\n")
    else:
        raise InputError("verify writes json or csv")
    return EXIT_OK if rep.ok else EXIT_FAIL


def _verify_figures(out: Path, names) -> None:
    from .plotting import emit_plot
    for name in names or list(PRESETS):
        po = preset_orbit(get_preset(name))
        if po is None:
            continue
        emit_plot(po.orbit, "svg", out / f"{name}.svg", po.curve, f"{name}: {po.note}")
        emit_plot(po.orbit, "csv", out / f"{name}.csv")


def cmd_sweep(args) -> int:
    cfg = SweepConfig(n1=args.n1, n2=args.n2, curve_samples=args.curve_samples,
                      max_iter=args.max_iter, workers=args.workers,
                      estimate_dims=not args.no_dims)
    res = run_sweep(Unfolding(args.unfolding), cfg)
    if args.format == "json":
        _emit(args, res.to_json())
    else:
        from .plotting import emit_plot
        if args.out is None:
            if args.format == "svg":
                raise InputError("svg output needs --out")
            sys.stdout.write(res.to_csv())
        else:
            emit_plot(res, args.format, args.out)
    return EXIT_OK


def cmd_infinity(args) -> int:
    model = NilpotentModel(Fraction(args.a), args.m, Fraction(args.b), args.n)
    chart = Chart(args.chart)
    cs = compactify(model, chart)
    out = {"chart": chart.value, "field": cs.field.to_json(), "divisor": list(cs.divisor),
           "predicted": str(predicted_dim_infinity(args.m, args.n, chart))}
    if args.m == args.n + 1 and chart is Chart.U2:
        out["note"] = "m = n+1 read as the value 1 - 1/(n+1)"
    status = EXIT_OK
    if args.verify:
        pred, est = verify_dim_infinity(model, chart, _cfg(args))
        out["estimated"] = est.value
        out["fit"] = est.fit.to_json() if est.fit else None
        out["pass"] = abs(est.value - float(pred)) <= args.dim_tol
        status = EXIT_OK if out["pass"] else EXIT_FAIL
    _emit(args, out)
    return status


def cmd_dual(args) -> int:
    res = dual_box_dimension(args.k)
    out = res.to_json()
    status = EXIT_OK
    if args.verify:
        pred, est = verify_saddle_infinity(args.k, _cfg(args))
        out["estimated"] = est.value
        out["fit"] = est.fit.to_json() if est.fit else None
        out["increment_exponent"] = saddle_increment_exponent(args.k)
        out["pass"] = abs(est.value - float(pred)) <= args.dim_tol
        status = EXIT_OK if out["pass"] else EXIT_FAIL
    _emit(args, out)
    return status


def cmd_plot(args) -> int:
    from .plotting import emit_plot
    if args.out is None:
        raise InputError("plot needs --out")
    fmt = "csv" if args.format == "csv" else "svg"
    if args.sweep:
        res = run_sweep(Unfolding(args.sweep), SweepConfig(n1=args.n, n2=args.n))
        emit_plot(res, fmt, args.out)
        return EXIT_OK
    p = get_preset(args.preset)
    po = preset_orbit(p)
    if po is None:
        raise InputError(f"preset {p.name} carries annotations only")
    emit_plot(po.orbit, fmt, args.out, po.curve, f"{p.name}: {po.note}")
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="nilfrac",
                                 description="Nilpotent singularities and fractal dimension of orbits.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="type of a nilpotent singular point")
    _model_args(p)
    p.add_argument("--field", default=None, help="JSON file with P and Q term lists")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("separatrix", parents=[common], help="separatrix expansions")
    _model_args(p)
    p.add_argument("--field", default=None, help="JSON file with P and Q term lists")
    p.add_argument("--terms", type=int, default=6)
    p.set_defaults(func=cmd_separatrix)

    p = sub.add_parser("orbit", parents=[common], help="orbit of the unit-time map")
    _model_args(p)
    p.add_argument("--field", default=None, help="JSON field; orbit from (x0, y0) without projection")
    p.add_argument("--branch", type=int, default=0)
    p.add_argument("--x0", type=float, default=0.5)
    p.add_argument("--y0", type=float, default=None)
    p.add_argument("--floor", type=float, default=DEFAULT_FLOOR)
    p.add_argument("--max-iter", type=int, default=100_000)
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("dim", parents=[common], help="dimension of a point set from a CSV file")
    p.add_argument("--orbit", type=Path, required=True, help="CSV with k,x,y or x,y or one column")
    p.add_argument("--eps-min", type=float, default=None)
    p.add_argument("--eps-max", type=float, default=None)
    p.add_argument("--method", choices=("boxcount", "sausage", "increment"), default="boxcount")
    p.set_defaults(func=cmd_dim)

    p = sub.add_parser("verify", parents=[common], help="check presets against reference values")
    p.add_argument("presets", nargs="*")
    p.add_argument("--all", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--figures", action="store_true", help="also write orbit SVG and CSV to --out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", parents=[common], help="parameter sweep of an unfolding")
    p.add_argument("--unfolding", choices=[u.value for u in Unfolding], default="bt")
    p.add_argument("--n1", type=int, default=41)
    p.add_argument("--n2", type=int, default=41)
    p.add_argument("--curve-samples", type=int, default=4)
    p.add_argument("--max-iter", type=int, default=20_000)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--no-dims", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("infinity", parents=[common], help="charts at infinity")
    p.add_argument("--a", default="1")
    p.add_argument("--b", default="1")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--chart", choices=[c.value for c in Chart], required=True)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--dim-tol", type=float, default=0.05)
    p.set_defaults(func=cmd_infinity)

    p = sub.add_parser("dual", parents=[common], help="weak saddle and dual box dimension")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--dim-tol", type=float, default=0.05)
    p.set_defaults(func=cmd_dual)

    p = sub.add_parser("plot", parents=[common], help="render a preset orbit or a sweep")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--preset")
    g.add_argument("--sweep", choices=[u.value for u in Unfolding])
    p.add_argument("--n", type=int, default=21, help="grid size for --sweep")
    p.set_defaults(func=cmd_plot)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (InputError, ValueError, OSError) as exc:
        print(f"nilfrac: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NilfracError as exc:
        print(f"nilfrac: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
