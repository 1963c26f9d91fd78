"""Command-line entry point: ``activesub analyze|sample|optimize|diagnose``.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import csvio
from .config import load_analysis_config, load_optimize_config
from .design import lhs_sample
from .diagnosis import Thresholds, diagnose
from .errors import ActiveSubError, ConfigError
from .functions import REGISTRY, get_function
from .pipeline import analyze, dump_json, optimize

logger = logging.getLogger("activesub")


def cmd_analyze(args) -> int:
    report, payload = analyze(load_analysis_config(args.config))
    print(f"explained_1={report.explained_1:.6g} explained_2={report.explained_2:.6g} "
          f"r2_quadratic_1d={report.r2_quadratic_1d:.4g}")
    print("flags: " + (", ".join(report.flags) or "(none)"))
    print(report.recommendation)
    return 0


def cmd_sample(args) -> int:
    if args.problem in REGISTRY:
        fn = get_function(args.problem, args.dimension)
        design = lhs_sample(fn.space, args.k, args.seed)
        if not args.no_eval:
            design = design.with_responses(fn.evaluate_many(design.X, args.objective))
    else:
        space = csvio.read_bounds_csv(args.problem)
        design = lhs_sample(space, args.k, args.seed)
    csvio.emit_design_csv(design, args.out)
    print(f"wrote {design.k} designs to {args.out}")
    return 0


def cmd_optimize(args) -> int:
    result = optimize(load_optimize_config(args.config))
    print(f"best_y={result.best_y!r} after {len(result.history)} evaluations")
    if result.error:
        print(f"stopped early: {result.error}", file=sys.stderr)
        return 3
    return 0


def cmd_diagnose(args) -> int:
    reduced, y = csvio.read_reduced_csv(args.reduced)
    eigen_path = Path(args.eigen) if args.eigen else Path(args.reduced).with_name("eigen_decay.csv")
    if not eigen_path.exists():
        raise ConfigError(f"eigenvalue file not found: {eigen_path} (pass --eigen)")
    report = diagnose(reduced, y, csvio.read_eigen_csv(eigen_path), thresholds=Thresholds())
    text = json.dumps(report.to_dict(), sort_keys=True, indent=2)
    if args.out:
        dump_json(report.to_dict(), args.out)
    print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="activesub", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="discover the active subspace and diagnose the problem")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sample", help="write a Latin hypercube design as CSV")
    p.add_argument("--problem", required=True, help="builtin name or a lower,upper bounds CSV")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--dimension", type=int, default=None, help="dimension for zakharov")
    p.add_argument("--objective", type=int, default=0)
    p.add_argument("--no-eval", action="store_true", help="omit the y column for builtin problems")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("optimize", help="run EGO on a builtin problem")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("diagnose", help="re-run the diagnosis rules on a reduced.csv")
    p.add_argument("--reduced", required=True)
    p.add_argument("--eigen", default=None, help="eigen_decay.csv (default: next to --reduced)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_diagnose)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ActiveSubError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except np.linalg.LinAlgError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
