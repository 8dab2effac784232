"""wittkit command line: run one verification suite against a spec file.

Exit status is 0 when every check matched the expected structure, 1 when
some check found a mathematical mismatch, and 2 for usage or parse errors.
"""

from __future__ import annotations

import argparse
import os
import sys

from .foundations import Window
from .io.expr import ParseError
from .io.report import to_json, to_text
from .io.specfile import load_spec
from .runner import SUITES, UsageError, run_suite


def _seed_default() -> int:
    raw = os.environ.get("WITTKIT_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wittkit", description="Exact checks on generalized Witt algebras "
                                 "and their intermediate-series modules.")
    ap.add_argument("suite", choices=SUITES, help="which suite to run")
    ap.add_argument("--spec", required=True, metavar="FILE", help="spec file")
    ap.add_argument("--module", action="append", default=[], metavar="NAME",
                    help="module from the spec to use (repeatable; default: all)")
    ap.add_argument("--window-gamma", type=int, metavar="N", help="lattice coordinate bound")
    ap.add_argument("--window-level", type=int, metavar="M", help="multi-index level bound")
    ap.add_argument("--margin", type=int, metavar="R", help="margin ring around the window")
    ap.add_argument("--trials", type=int, default=100, metavar="K", help="random samples (default 100)")
    ap.add_argument("--seed", type=int, default=None, metavar="S",
                    help="random seed (default: $WITTKIT_SEED or 0)")
    ap.add_argument("--format", choices=("text", "json"), default="text")
    ap.add_argument("--out", metavar="FILE", help="write the report here instead of stdout")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        spec = load_spec(args.spec)
    except OSError as e:
        ap.print_usage(sys.stderr)
        print(f"wittkit: cannot read spec: {e}", file=sys.stderr)
        return 2
    except ParseError as e:
        print(f"{args.spec}:{e}", file=sys.stderr)
        return 2
    w = spec.window
    seed = _seed_default() if args.seed is None else args.seed
    try:
        try:
            window = Window(
                w.gamma_bound if args.window_gamma is None else args.window_gamma,
                w.level_bound if args.window_level is None else args.window_level,
                w.margin if args.margin is None else args.margin,
            )
        except ValueError as e:
            raise UsageError(str(e)) from None
        report = run_suite(args.suite, spec, args.module or None, window, seed, args.trials)
    except UsageError as e:
        ap.print_usage(sys.stderr)
        print(f"wittkit: {e}", file=sys.stderr)
        return 2
    text = to_json(report) if args.format == "json" else to_text(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report["status"] == "match" else 1


if __name__ == "__main__":
    sys.exit(main())
