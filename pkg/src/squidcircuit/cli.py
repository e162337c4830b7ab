"""Command-line interface: ``simulate``, ``fit``, ``calibrate``, ``emit-plot-data``.

Exit status 0 on success, 2 for usage errors, 3 for data or schema
problems and 4 for fit failures. Failures print a JSON error document on
stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional

from .bundle import (PIPELINES, RUNNERS, read_profile, run_calibration, validate_bundle,
                     write_profile)
from .config import RunConfig
from .errors import (ConfigError, DataQualityError, DomainError, FitError, SolverError,
                     SquidCircuitError)
from .io import read_json, write_curves, write_json, write_trace
from .plotdata import FIGURES, UnknownFigureError, emit_plot_data
from .simulate import SCENARIOS, simulate

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_FIT = 0, 2, 3, 4


class UsageError(SquidCircuitError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common(sup=False):
    p = _Parser(add_help=False)
    d = argparse.SUPPRESS if sup else None
    p.add_argument("--config", default=d, help="run configuration (JSON)")
    p.add_argument("--seed", type=int, default=d if sup else 0, help="random seed (u64)")
    p.add_argument("--out", default=d if sup else ".", help="output directory")
    p.add_argument("--jobs", type=int, default=d if sup else 1, help="worker threads for batches")
    return p


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="squidcircuit", parents=[_common()],
                 description="Nanobridge SQUID resonator modelling and analysis.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    child = [_common(sup=True)]

    s = sub.add_parser("simulate", parents=child, help="generate a synthetic measurement set")
    s.add_argument("scenario", choices=SCENARIOS)

    f = sub.add_parser("fit", parents=child, help="run an analysis pipeline on input files")
    f.add_argument("--pipeline", required=True, choices=PIPELINES)
    f.add_argument("inputs", nargs="*", help="trace/table files or a manifest.json")

    c = sub.add_parser("calibrate", parents=child, help="attenuation profile from a noise-trace bundle")
    c.add_argument("bundle", help="calibration_traces.csv with its JSON sidecar")

    e = sub.add_parser("emit-plot-data", parents=child, help="CSV tables for one figure from a bundle")
    e.add_argument("--figure", required=True, help=f"one of {', '.join(FIGURES)}")
    e.add_argument("bundle", help="result bundle (bundle.json)")
    return ap


def _config(args) -> RunConfig:
    return RunConfig.load(args.config) if args.config else RunConfig.from_dict({})


def cmd_simulate(args) -> dict:
    cfg = _config(args)
    sc = simulate(cfg, args.scenario, seed=args.seed)
    path = sc.write(args.out)
    return {"manifest": path, "files": len(sc.traces) + len(sc.tables)}


def cmd_fit(args) -> dict:
    if not args.inputs:
        raise UsageError("fit needs at least one input file")
    cfg = _config(args)
    bundle, extra = RUNNERS[args.pipeline](args.inputs, cfg, jobs=args.jobs, seed=args.seed)
    validate_bundle(bundle)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "bundle.json")
    write_json(path, bundle)
    # intermediate artifacts next to the bundle
    if isinstance(extra, dict):
        cdir = os.path.join(args.out, "corrected")
        os.makedirs(cdir, exist_ok=True)
        for name, tr in extra.items():
            write_trace(os.path.join(cdir, name), tr)
    for name, table in bundle.get("artifacts", {}).items():
        write_curves(os.path.join(args.out, f"{name}.csv"), table["columns"],
                     ([("" if v is None else v) for v in r] for r in table["rows"]))
    return {"bundle": path}


def cmd_calibrate(args) -> dict:
    cfg = _config(args)
    if not os.path.exists(args.bundle):
        raise DataQualityError(f"input file not found: {args.bundle}")
    bundle, prof = run_calibration(args.bundle, cfg, seed=args.seed)
    validate_bundle(bundle)
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "attenuation_profile.csv")
    write_profile(csv_path, prof)
    write_json(os.path.join(args.out, "attenuation_summary.json"), bundle)
    # reload check: the written profile must read back to the same numbers
    back = read_profile(csv_path)
    if back.attenuation.shape != prof.attenuation.shape:
        raise DataQualityError("attenuation profile failed to reload")
    return {"profile": csv_path, "mean_attenuation_db": bundle["results"]["mean_attenuation_db"]}


def cmd_emit(args) -> dict:
    if args.figure not in FIGURES:
        raise UnknownFigureError(f"unknown figure id {args.figure!r}; valid ids: {', '.join(FIGURES)}")
    if not os.path.exists(args.bundle):
        raise DataQualityError(f"input file not found: {args.bundle}")
    bundle = read_json(args.bundle)
    validate_bundle(bundle)
    return {"csv": emit_plot_data(bundle, args.figure, args.out)}


COMMANDS = {"simulate": cmd_simulate, "fit": cmd_fit, "calibrate": cmd_calibrate,
            "emit-plot-data": cmd_emit}


def _exit_code(exc) -> int:
    if isinstance(exc, (UsageError, UnknownFigureError)):
        return EXIT_USAGE
    if isinstance(exc, (FitError, SolverError)):
        return EXIT_FIT
    if isinstance(exc, (ConfigError, DataQualityError, DomainError, OSError, ValueError)):
        return EXIT_DATA
    return EXIT_FIT


def _error_doc(exc, code) -> str:
    err = {"type": type(exc).__name__, "message": str(exc), "exit_code": code}
    if isinstance(exc, ConfigError) and exc.path:
        err["path"] = exc.path
    diag = getattr(exc, "diagnostics", None)
    if diag:
        err["diagnostics"] = {k: (v if isinstance(v, (int, float, str, list, type(None))) else repr(v))
                              for k, v in diag.items()}
    return json.dumps({"error": err}, sort_keys=True, default=repr)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(_error_doc(exc, EXIT_USAGE), file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        info = COMMANDS[args.command](args)
    except Exception as exc:  # every failure becomes a structured error document
        code = _exit_code(exc)
        print(_error_doc(exc, code), file=sys.stderr)
        return code
    print(json.dumps(info, sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
