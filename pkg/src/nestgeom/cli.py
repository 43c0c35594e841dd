"""Command-line surface: nest | search | sweep | analyze.

Exit codes are stable: 0 success, 2 configuration, 3 non-recurrent
termination, 4 renormalizable termination, 5 precision exhausted,
6 target not realized, 7 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from .errors import NestgeomError, NotRealized, ParameterOutOfRange, ParseError
from .nest import TERM_NONRECURRENT, TERM_PRECISION, TERM_RENORMALIZABLE
from .runio import (
    RunConfig,
    combinatorics_records_from_file,
    nest_csv_rows,
    read_csv,
    record_from_json,
    record_to_json,
    run_nest_pipeline,
    write_csv,
)
from .search import SearchTarget, search_parameter

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NONRECURRENT = 3
EXIT_RENORMALIZABLE = 4
EXIT_PRECISION = 5
EXIT_NOT_REALIZED = 6
EXIT_IO = 7

_TERMINATION_CODES = {
    TERM_NONRECURRENT: EXIT_NONRECURRENT,
    TERM_RENORMALIZABLE: EXIT_RENORMALIZABLE,
    TERM_PRECISION: EXIT_PRECISION,
    None: EXIT_OK,
}


def _add_common(ap: argparse.ArgumentParser) -> None:
    ap.add_argument("--param", help="family parameter as a decimal string")
    ap.add_argument("--target", help="named target or a target JSON file")
    ap.add_argument("--prec", type=int, default=256, help="starting precision, bits")
    ap.add_argument("--prec-max", type=int, default=4096, help="precision ceiling, bits")
    ap.add_argument("--levels", type=int, default=16, help="deepest nest level to build")
    ap.add_argument("--orbit-cap", type=int, default=10**6)
    ap.add_argument("--return-cap", type=int, default=10**4)
    ap.add_argument("--renorm-horizon", type=int, default=64,
                    help="trapping horizon for the renormalizable flag; 0 disables")
    ap.add_argument("--delta", default="0.01", help="small-factor threshold")
    ap.add_argument("--digits", type=int, default=40, help="search digits")
    ap.add_argument("--depth", type=int, default=8, help="search target depth")
    ap.add_argument("--out", help="output path (stdout when omitted)")
    ap.add_argument("--format", choices=("json", "csv"), default="json")
    ap.add_argument("--grid", type=int, default=2, help="sweep grid size")
    ap.add_argument("--range", dest="range_", metavar="LO:HI",
                    help="sweep parameter range, e.g. 1.7:2.0")


def _config_from_args(args) -> RunConfig:
    return RunConfig(
        parameter=args.param,
        target=args.target,
        precision_start=args.prec,
        precision_max=args.prec_max,
        max_levels=args.levels,
        orbit_cap=args.orbit_cap,
        return_cap=args.return_cap,
        renorm_horizon=args.renorm_horizon,
        delta=args.delta,
        digits=args.digits,
        search_depth=args.depth,
        format=args.format,
    )


def _emit(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
        return
    with open(out_path, "w", newline="") as fh:
        fh.write(text)


def cmd_nest(args) -> int:
    config = _config_from_args(args)
    try:
        config.validate()
        if not config.parameter:
            raise ValueError("nest needs --param")
    except (ValueError, ParseError, ParameterOutOfRange) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        record = run_nest_pipeline(config)
    except (ParseError, ParameterOutOfRange) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if config.format == "csv":
            import io as _io
            buf = _io.StringIO()
            write_csv(nest_csv_rows(record), buf)
            _emit(buf.getvalue(), args.out)
        else:
            _emit(record_to_json(record), args.out)
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    return _TERMINATION_CODES.get(record["results"]["termination"], EXIT_OK)


def _resolve_target(spec: str, depth: int) -> SearchTarget:
    if os.path.exists(spec):
        with open(spec) as fh:
            records = combinatorics_records_from_file(fh.read())
        return SearchTarget.from_records(records)
    return SearchTarget.named(spec, depth=depth)


def cmd_search(args) -> int:
    if not args.target:
        print("search needs --target", file=sys.stderr)
        return EXIT_CONFIG
    try:
        target = _resolve_target(args.target, args.depth)
    except NestgeomError as exc:
        print(f"target error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        print(f"target error: malformed target file: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        result = search_parameter(target, digits=args.digits)
    except NotRealized as exc:
        print(f"not realized: {exc} (matched depth {exc.matched_depth})", file=sys.stderr)
        return EXIT_NOT_REALIZED
    payload = {
        "schema_version": 1,
        "target": {"kind": target.kind, "depth": target.depth},
        "parameter": result.a_text,
        "digits": args.digits,
        "matched_depth": result.matched_depth,
        "probes": result.probes,
        "transcript": result.transcript,
    }
    try:
        _emit(json.dumps(payload, sort_keys=True, indent=1), args.out)
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _grid_parameters(range_: str, grid: int) -> list[str]:
    lo_s, hi_s = range_.split(":", 1)
    lo, hi = Fraction(lo_s), Fraction(hi_s)
    if not (Fraction(3, 2) < lo < hi <= 2):
        raise ValueError(f"range {range_} must sit inside (3/2, 2]")
    if grid < 2:
        raise ValueError("grid must be at least 2")
    step = (hi - lo) / (grid - 1)
    out = []
    for i in range(grid):
        val = lo + step * i
        out.append(_fraction_to_decimal(val, 40))
    return out


def _fraction_to_decimal(fr: Fraction, digits: int) -> str:
    sign = "-" if fr < 0 else ""
    fr = abs(fr)
    whole = fr.numerator // fr.denominator
    rem = fr - whole
    scaled = rem * 10**digits
    frac_digits = f"{scaled.numerator // scaled.denominator:0{digits}d}".rstrip("0")
    return f"{sign}{whole}.{frac_digits}" if frac_digits else f"{sign}{whole}"


def _sweep_row(payload: tuple[str, dict]) -> dict:
    a_text, cfg_dict = payload
    config = RunConfig(**{**cfg_dict, "parameter": a_text})
    try:
        record = run_nest_pipeline(config)
    except NestgeomError as exc:
        return {"a": a_text, "depth": "", "termination": f"error:{type(exc).__name__}",
                "trigger_level": "", "rho": ""}
    res = record["results"]
    geom = res["geometry"]
    trigger = geom["trigger"]
    decay = geom["decay"]
    return {
        "a": a_text,
        "depth": res["depth"],
        "termination": res["termination"] or "",
        "trigger_level": "" if trigger is None else trigger["level"],
        "rho": "" if decay is None else decay["rho"],
    }


def cmd_sweep(args) -> int:
    if not args.range_:
        print("sweep needs --range LO:HI", file=sys.stderr)
        return EXIT_CONFIG
    config = _config_from_args(args)
    try:
        config.validate()
        params = _grid_parameters(args.range_, args.grid)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    cfg_dict = {**config.__dict__, "parameter": None, "target": None}
    payloads = [(a, cfg_dict) for a in params]
    workers = int(os.environ.get("NESTGEOM_WORKERS", "1"))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_row, payloads))
    else:
        rows = [_sweep_row(p) for p in payloads]
    try:
        if config.format == "csv":
            import io as _io
            buf = _io.StringIO()
            write_csv(rows, buf)
            _emit(buf.getvalue(), args.out)
        else:
            _emit(json.dumps(rows, sort_keys=True, indent=1), args.out)
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_analyze(args) -> int:
    """Re-derive decay/trigger analysis from a stored run record."""
    if not args.target:
        print("analyze needs --target RECORD.json", file=sys.stderr)
        return EXIT_CONFIG
    try:
        with open(args.target) as fh:
            record = record_from_json(fh.read())
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except json.JSONDecodeError as exc:
        print(f"config error: malformed record: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    from .geometry import decay_fit, small_factor_trigger

    geom = record["results"]["geometry"]
    lambdas = [lam["float"] for lam in geom["lambdas"]]
    nc_lams = [lam["float"] for lam in geom["noncentral_lambdas"]]
    delta = float(args.delta)
    fit = decay_fit(nc_lams)
    trig = small_factor_trigger(lambdas, delta)
    payload = {
        "schema_version": 1,
        "source_parameter": record["results"]["parameter"]["dec"],
        "delta": delta,
        "decay": None if fit is None else {
            "C": fit.C, "rho": fit.rho, "residual": fit.residual,
            "accepted": fit.accepted, "points": fit.points},
        "trigger": None if trig is None else {"level": trig[0], "delta": trig[1]},
    }
    try:
        _emit(json.dumps(payload, sort_keys=True, indent=1), args.out)
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="nestgeom",
                                 description="principal nests and scaling geometry "
                                             "of quadratic unimodal maps")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, fn in (("nest", cmd_nest), ("search", cmd_search),
                     ("sweep", cmd_sweep), ("analyze", cmd_analyze)):
        sp = sub.add_parser(name)
        _add_common(sp)
        sp.set_defaults(fn=fn)
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except NestgeomError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
