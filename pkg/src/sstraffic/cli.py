"""Command-line interface: ``sstraffic {generate,estimate,mux,experiment,calibrate}``."""
from __future__ import annotations

import argparse
import json
import secrets
import sys
from pathlib import Path

from . import experiments as exp
from .hurst import DEFAULT_GRID, Method, ScaleGrid, estimate
from .multiplex import mux_report
from .synthesis import DEFAULT_PHI, Ar1Params, FgnParams, generate_ar1, generate_fgn, generate_white
from .tableio import dumps_json, export_trace, import_trace
from .traffic_model import calibrate, transform


def _write(data: bytes, output: str | None) -> None:
    if output in (None, "-"):
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        Path(output).write_bytes(data)


def _grid(args) -> ScaleGrid:
    return ScaleGrid(
        min_scale=args.min_scale if args.min_scale is not None else DEFAULT_GRID.min_scale,
        max_scale_fraction=(
            args.max_scale_fraction if args.max_scale_fraction is not None else DEFAULT_GRID.max_scale_fraction
        ),
        points_per_decade=(
            args.points_per_decade if args.points_per_decade is not None else DEFAULT_GRID.points_per_decade
        ),
    )


def _add_grid_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--method", choices=[m.value for m in Method], default=Method.DFA.value)
    p.add_argument("--min-scale", type=int)
    p.add_argument("--max-scale-fraction", type=float)
    p.add_argument("--points-per-decade", type=int)


def cmd_generate(args) -> None:
    seed = args.seed
    if seed is None:
        seed = secrets.randbits(64)
    print(f"seed={seed}", file=sys.stderr)
    if args.kind == "fgn":
        x = generate_fgn(FgnParams(args.hurst, args.length, seed))
    elif args.kind == "ar1":
        x = generate_ar1(Ar1Params(args.phi, args.length, seed))
    else:
        x = generate_white(args.length, seed)
    _write(export_trace(transform(x, calibrate(args.mean, args.cv))), args.output)


def cmd_estimate(args) -> None:
    trace = import_trace(Path(args.trace).read_bytes(), source=args.trace)
    est = estimate(trace, args.method, _grid(args))
    _write(dumps_json(est.to_dict()), args.output)


def cmd_mux(args) -> None:
    if len(args.traces) < 2:
        raise ValueError("mux needs at least two trace files")
    traces = [import_trace(Path(p).read_bytes(), source=p) for p in args.traces]
    hursts = None
    if args.hursts:
        hursts = [float(v) for v in args.hursts.split(",")]
    report = mux_report(traces, hursts, args.method, _grid(args))
    _write(dumps_json(report.to_dict()), args.output)


def cmd_experiment(args) -> None:
    if args.seed is None:
        raise ValueError("experiment requires an explicit --seed")
    data = {}
    if args.config:
        data = json.loads(Path(args.config).read_text())
    if args.scenario:
        data["scenario"] = args.scenario
    data["base_seed"] = args.seed
    flags = {
        "h_values": [float(v) for v in args.h_values.split(",")] if args.h_values else None,
        "ratio_grid": [float(v) for v in args.ratio_grid.split(",")] if args.ratio_grid else None,
        "base_cv": args.base_cv,
        "length": args.length,
        "replications": args.replications,
        "estimator": args.method,
        "ar_phi": args.phi,
    }
    data.update({k: v for k, v in flags.items() if v is not None})
    config = exp.ExperimentConfig.from_dict(data)
    table = exp.run_experiment(config, workers=args.workers)
    fmt = args.format
    if fmt is None:
        fmt = "json" if args.output and args.output.endswith(".json") else "csv"
    _write(exp.export_table(table, fmt), args.output)


def cmd_calibrate(args) -> None:
    c = calibrate(args.mean, args.cv)
    _write(dumps_json({"b": c.b, "k": c.k, "target_mean": c.target_mean, "target_cv": c.target_cv}), args.output)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sstraffic", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="synthesize a traffic trace as CSV")
    p.add_argument("--kind", choices=["fgn", "white", "ar1"], default="fgn")
    p.add_argument("--hurst", type=float, default=0.8)
    p.add_argument("--phi", type=float, default=DEFAULT_PHI)
    p.add_argument("--mean", type=float, default=1.0)
    p.add_argument("--cv", type=float, default=1.2)
    p.add_argument("--length", type=int, default=1000)
    p.add_argument("--seed", type=int, help="64-bit seed; drawn from OS entropy and echoed if omitted")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("estimate", help="estimate the Hurst exponent of a trace file")
    p.add_argument("trace")
    _add_grid_flags(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("mux", help="multiplex trace files and report H, CV and R1/R2")
    p.add_argument("traces", nargs="+")
    p.add_argument("--hursts", help="comma-separated known Hurst exponents, parallel to the traces")
    _add_grid_flags(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_mux)

    p = sub.add_parser("experiment", help="run a Monte Carlo ratio sweep")
    p.add_argument("--config", help="JSON file with ExperimentConfig keys")
    p.add_argument("--scenario", choices=[s.value for s in exp.Scenario])
    p.add_argument("--h-values")
    p.add_argument("--ratio-grid")
    p.add_argument("--base-cv", type=float)
    p.add_argument("--length", type=int)
    p.add_argument("--replications", type=int)
    p.add_argument("--method", choices=[m.value for m in Method])
    p.add_argument("--phi", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("calibrate", help="print model coefficients b, k for a mean and CV")
    p.add_argument("--mean", type=float, required=True)
    p.add_argument("--cv", type=float, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_calibrate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ValueError, ArithmeticError, RuntimeError, OSError, KeyError, TypeError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"sstraffic {args.command}: error: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
