"""Command-line interface.

Subcommands::

    height     exact height of one projective point
    scan       delta scan over sampled fibers (JSON + CSV)
    calibrate  turn a scan into a c_cal fixture (JSON)
    nt         doubling tables with telescoping verdicts (JSON)
    check-hi   height-comparison check against a calibration (JSON + CSV)
    check-s5   Veronese / Segre / blow-up morphism checks (JSON)
    divisor    split a configured divisor and print local equations (JSON)

Exit codes: 0 all verdicts hold, 1 some verdict failed, 2 bad usage or
configuration, 3 a resource guard tripped.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Optional

from .. import __version__
from ..errors import ConfigError, HeightLabError, ResourceLimitError
from ..exact_arith import Rationals, parse_base_field
from ..heights import normalize_point, weil_height
from .config import ExperimentConfig, config_from_dict, load_config
from .expressions import parse_expression
from .runs import (HI_CSV_FIELDS, SCAN_CSV_FIELDS, calibrate, calibration_for,
                   run_convergence_tables, run_divisor_report,
                   run_height_inequality, run_morphism_checks, scan_family,
                   write_csv_rows, write_json_report)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heightlab",
        description="exact heights for elliptic families over Q and F_p(u)")
    parser.add_argument("--version", action="version",
                        version=f"heightlab {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE",
                        help="TOML experiment configuration")
    common.add_argument("--seed", type=int, metavar="N",
                        help="override the PRNG seed")
    common.add_argument("--field", metavar="LABEL",
                        help="override the base field: Q, F5(u), or Fp(u):5")
    common.add_argument("--out", metavar="DIR",
                        help="directory for report files (default: "
                             "config out_dir or the current directory)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_height = sub.add_parser(
        "height", parents=[common],
        help="exact height of one point, coordinates separated by ':'")
    p_height.add_argument("--point", required=True, metavar="X:Y:...",
                          help="coordinate expressions, e.g. '2:-9:8' or "
                               "'u^2:u+1'")

    sub.add_parser("scan", parents=[common],
                   help="tabulate delta([N]P) = |h([2]P) - 4 h(P)| over "
                        "sampled fibers")
    sub.add_parser("calibrate", parents=[common],
                   help="write a c_cal calibration fixture from a scan")

    p_nt = sub.add_parser("nt", parents=[common],
                          help="doubling tables q_l = h([2^l]P)/4^l")
    p_nt.add_argument("--calibration", metavar="FILE",
                      help="calibration fixture (default: calibrate in-line)")

    p_hi = sub.add_parser("check-hi", parents=[common],
                          help="check |estimate - h_L(P)| <= c_cal*lambda "
                               "+ error bound")
    p_hi.add_argument("--calibration", metavar="FILE",
                      help="calibration fixture (default: calibrate in-line)")

    sub.add_parser("check-s5", parents=[common],
                   help="Veronese, Segre and blow-up height comparisons")
    sub.add_parser("divisor", parents=[common],
                   help="split the configured divisor into effective parts")
    return parser


def _load(args) -> ExperimentConfig:
    overrides = {"seed": args.seed, "field": args.field}
    if args.config is not None:
        return load_config(args.config, overrides)
    return config_from_dict({}, overrides)


def _out_dir(args, config: ExperimentConfig) -> str:
    return args.out or config.out_dir or "."


def _emit(path: str, payload: dict) -> None:
    write_json_report(path, payload)
    print(f"wrote {path}")


def _cmd_height(args) -> int:
    field = parse_base_field(args.field or "Q")
    texts = args.point.split(":")
    if len(texts) < 2:
        raise ConfigError("--point needs at least two ':'-separated "
                          "coordinates")
    coords = []
    for text in texts:
        value = parse_expression(text, field)
        if isinstance(field, Rationals):
            if not value.is_constant():
                raise ConfigError(
                    f"coordinate {text!r} is not a rational constant")
            coords.append(Fraction(value.constant_value()))
        else:
            coords.append(value)
    point = normalize_point(field, coords)
    h = weil_height(point)
    print(json.dumps({
        "field": args.field or "Q",
        "coordinates": point.coordinate_texts(),
        "height": h.value,
        "log_height": h.log_value(),
    }, sort_keys=True, indent=2))
    return 0


def _cmd_scan(args) -> int:
    config = _load(args)
    report = scan_family(config)
    out = _out_dir(args, config)
    _emit(os.path.join(out, "scan.json"), report.payload())
    write_csv_rows(os.path.join(out, "scan.csv"), SCAN_CSV_FIELDS,
                   list(report.rows))
    print(f"wrote {os.path.join(out, 'scan.csv')}")
    print(f"rows: {len(report.rows)}  max delta/lambda: "
          f"{report.empirical_max!r}")
    return 0


def _cmd_calibrate(args) -> int:
    config = _load(args)
    result = calibrate(config)
    out = _out_dir(args, config)
    _emit(os.path.join(out, "calibration.json"), result.payload())
    print(f"c_cal = {result.c_cal!r} "
          f"(empirical max {result.empirical_max!r} over "
          f"{result.sample_rows} rows)")
    return 0


def _cmd_nt(args) -> int:
    config = _load(args)
    cal = calibration_for(config, args.calibration)
    report = run_convergence_tables(config, cal)
    out = _out_dir(args, config)
    _emit(os.path.join(out, "tables.json"), report.payload())
    bad = [e for e in report.entries if not e["telescoping_ok"]]
    print(f"tables: {len(report.entries)}  telescoping failures: {len(bad)}")
    return 0 if not bad else 1


def _cmd_check_hi(args) -> int:
    config = _load(args)
    cal = calibration_for(config, args.calibration)
    report = run_height_inequality(config, cal)
    out = _out_dir(args, config)
    _emit(os.path.join(out, "hi.json"), report.payload())
    write_csv_rows(os.path.join(out, "hi.csv"), HI_CSV_FIELDS,
                   list(report.rows))
    print(f"wrote {os.path.join(out, 'hi.csv')}")
    verdict = "PASS" if report.all_ok else "FAIL"
    print(f"height inequality: {verdict} "
          f"({len(report.rows)} points, c_cal {report.c_cal!r})")
    return 0 if report.all_ok else 1


def _cmd_check_s5(args) -> int:
    config = _load(args)
    report = run_morphism_checks(config)
    out = _out_dir(args, config)
    _emit(os.path.join(out, "morphisms.json"), report.payload())
    verdict = "PASS" if report.all_ok else "FAIL"
    print(f"morphism checks: {verdict}")
    return 0 if report.all_ok else 1


def _cmd_divisor(args) -> int:
    config = _load(args)
    report = run_divisor_report(config)
    out = _out_dir(args, config)
    _emit(os.path.join(out, "divisor.json"), report.payload())
    body = report.divisor
    print(f"D = {body['divisor']}")
    print(f"positive part: {body['positive_part']}")
    print(f"denominator support: {body['denominator_support']}")
    return 0


_COMMANDS = {
    "height": _cmd_height,
    "scan": _cmd_scan,
    "calibrate": _cmd_calibrate,
    "nt": _cmd_nt,
    "check-hi": _cmd_check_hi,
    "check-s5": _cmd_check_s5,
    "divisor": _cmd_divisor,
}


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 3
    except HeightLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
