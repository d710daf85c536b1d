"""Command line interface.

Subcommands: generate (configurations / return sets), hierarchy,
analyze, scan, oracle-check.  Exit codes: 0 success, 2 config error,
3 insufficient window, 4 invariant/oracle failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from .config import RunConfig, build_system, load_config, _parse_theta
from .errors import EXIT_INVARIANT, EXIT_OK, RotfactorError
from .hierarchy import build_combinatorial_data
from .io_formats import write_hierarchy_json, write_pointset
from .pipeline import oracle_check, run_pipeline


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, help="path to the run config")
    p.add_argument("--levels", type=int, default=None, help="override max level")
    p.add_argument(
        "--theta", default=None,
        help="semicolon-separated theta vectors, e.g. '1/4; 1/3' "
             "(components space-separated for d > 1)",
    )
    p.add_argument("--k", choices=["1", "d", "both"], default=None)
    p.add_argument("--format", choices=["json", "csv"], default=None)
    p.add_argument("--output", default=None, help="output path (default stdout)")
    p.add_argument("--no-timestamp", action="store_true")
    p.add_argument("--window-margin", type=float, default=None)
    p.add_argument("--strict-well-distributed", action="store_true")


def _load(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(args.config)
    if args.levels is not None:
        cfg.levels = args.levels
    if args.theta is not None:
        cfg.thetas = [
            _parse_theta(chunk, cfg.dimension)
            for chunk in args.theta.split(";")
            if chunk.strip()
        ]
    if args.k is not None:
        cfg.k_mode = args.k
    if args.format is not None:
        cfg.output_format = args.format
    if args.output is not None:
        cfg.output_path = args.output
    if args.no_timestamp:
        cfg.timestamp = False
    if args.window_margin is not None:
        cfg.window_margin = args.window_margin
    if args.strict_well_distributed:
        cfg.strict_well_distributed = True
    return cfg


def _emit(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_generate(args: argparse.Namespace) -> int:
    cfg = _load(args)
    system = build_system(cfg)
    sets = system.return_sets(cfg.levels)
    out = []
    import io

    for rs in sets:
        buf = io.StringIO()
        write_pointset(rs.base, buf)
        out.append(f"# level {rs.level}\n" + buf.getvalue())
    _emit("".join(out), cfg.output_path)
    return EXIT_OK


def cmd_hierarchy(args: argparse.Namespace) -> int:
    cfg = _load(args)
    system = build_system(cfg)
    data = build_combinatorial_data(system.return_sets(cfg.levels))
    import io

    buf = io.StringIO()
    write_hierarchy_json(data, buf)
    _emit(buf.getvalue(), cfg.output_path)
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    cfg = _load(args)
    report = run_pipeline(cfg)
    text = (
        report.to_csv() if cfg.output_format == "csv" else report.to_json()
    )
    _emit(text, cfg.output_path)
    return EXIT_OK


def cmd_scan(args: argparse.Namespace) -> int:
    cfg = _load(args)
    cfg.scan = True
    cfg.thetas = cfg.thetas or []
    report = run_pipeline(cfg)
    doc = {"config": report.document["config"], "scan": report.document["scan"]}
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", cfg.output_path)
    return EXIT_OK


def cmd_oracle_check(args: argparse.Namespace) -> int:
    cfg = _load(args)
    report = oracle_check(cfg)
    _emit(
        json.dumps({"ok": report.ok, "checks": report.rows},
                   indent=2, sort_keys=True) + "\n",
        cfg.output_path,
    )
    if not report.ok:
        mism = report.first_mismatch()
        print(f"oracle mismatch: {mism}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="rotfactor",
        description=(
            "Return-time combinatorics of minimal Z^d-actions and the "
            "finite-scale rotation-factor criterion."
        ),
    )
    subs = parser.add_subparsers(dest="command", required=True)
    for name, fn in [
        ("generate", cmd_generate),
        ("hierarchy", cmd_hierarchy),
        ("analyze", cmd_analyze),
        ("scan", cmd_scan),
        ("oracle-check", cmd_oracle_check),
    ]:
        sp = subs.add_parser(name)
        _add_common(sp)
        sp.set_defaults(fn=fn)
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except RotfactorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
