"""Command line entry point.

Exit status: 0 when every check passes, 1 when a check fails or a
numerical routine gives up, 2 for bad input (files, schemas, invariants,
suite/model mismatch).
"""

import argparse
import os
import sys
from pathlib import Path

from .errors import InputError, SkCollapseError
from .models import bundled, bundled_names, load_model, parse_json
from .plotting import render_figures
from .report import dumps, load_report, report_stem, write_report
from .suites import SUITES, ExperimentSpec, run_suite

OUT_ENV = "SKCOLLAPSE_OUT"
DEFAULT_OUT = "skcollapse-out"


def _floats(text):
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("sweep must not be empty")
    return values


def _resolve_model(ref):
    path = Path(ref)
    if path.exists():
        return load_model(path)
    if ref in bundled_names():
        return load_model(bundled(ref))
    raise InputError(f"model file not found and no bundled model is named {ref!r}", ref)


def _out_dir(args):
    return Path(args.out or os.environ.get(OUT_ENV) or DEFAULT_OUT)


def build_parser():
    p = argparse.ArgumentParser(prog="skcollapse",
                                description="Verify special Kähler, semi-flat and collapse identities.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check a model file against its schema and invariants")
    v.add_argument("--model", required=True, help="path to a model JSON file or a bundled model name")

    r = sub.add_parser("run", help="run a verification suite")
    r.add_argument("suite", choices=SUITES)
    r.add_argument("--model", required=True, help="path to a model JSON file or a bundled model name")
    r.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})")
    r.add_argument("--t-sweep", type=_floats, help="comma separated t values")
    r.add_argument("--rho-sweep", type=_floats, help="comma separated rho values")
    r.add_argument("--resolution", type=int, help="mesh or lattice grid resolution")
    r.add_argument("--tolerance", type=float, help="override the default tolerance of residual checks")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--no-plots", action="store_true", help="skip PNG figures")

    rep = sub.add_parser("report", help="re-emit CSV files and figures from a JSON summary")
    rep.add_argument("summary", help="report JSON written by 'run'")
    rep.add_argument("--out", help="output directory (default: next to the summary)")

    sub.add_parser("models", help="list bundled models")
    return p


def _print_records(summary, stream):
    for rec in summary["records"]:
        flag = "PASS" if rec["pass"] else "FAIL"
        stream.write(f"{flag}  {rec['name']:<40s} measured={rec['measured']!s:<28s} "
                     f"tol={rec['tolerance']}\n")


def cmd_validate(args):
    model = _resolve_model(args.model)
    print(f"ok  {model.kind} {model.name} sha256={model.hash}")
    return 0


def cmd_run(args):
    model = _resolve_model(args.model)
    spec = ExperimentSpec(args.suite, model, args.t_sweep, args.rho_sweep, args.resolution,
                          args.tolerance, args.seed)
    # round-trip through the serialized form so `report` replots exactly the same numbers
    summary = parse_json(dumps(run_suite(spec).to_json()))
    out = _out_dir(args)
    paths = write_report(summary, out)
    if not args.no_plots:
        paths += render_figures(summary, out, report_stem(summary))
    _print_records(summary, sys.stdout)
    for p in paths:
        print(f"wrote {p}")
    return 0 if summary["passed"] else 1


def cmd_report(args):
    summary = load_report(args.summary)
    out = Path(args.out) if args.out else Path(args.summary).parent
    paths = write_report(summary, out) + render_figures(summary, out, report_stem(summary))
    _print_records(summary, sys.stdout)
    for p in paths:
        print(f"wrote {p}")
    return 0 if summary.get("passed") else 1


def cmd_models(args):
    for name in bundled_names():
        print(name)
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    handler = {"validate": cmd_validate, "run": cmd_run, "report": cmd_report, "models": cmd_models}
    try:
        return handler[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SkCollapseError as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
