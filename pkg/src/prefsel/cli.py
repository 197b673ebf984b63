"""Command line front end.

    prefsel <mode> --table t.csv --prefs p.txt [--gamma N] [--p X] [--C X]
            [--epsilon X] [--max-selected L] [--format json|markdown|csv]
            [--out path] [--scale lo,hi]

Exit codes: 0 success, 1 input error, 2 infeasible or inconsistent
judgments, 3 resource limit.  PREFSEL_NODE_BUDGET overrides the solver's
node budget.

``rank`` mode orders the alternatives by the representative (maximal-margin)
value function fitted on all criteria.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .analysis import DomainError
from .disaggregation import InconsistencyError
from .io_cli import (FORMATS, MODES, ProjectConfig, Report, load_performance_csv,
                     load_preferences, run)
from .milp import ResourceLimitError
from ._simplex import NumericalError

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INFEASIBLE = 2
EXIT_RESOURCE = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prefsel",
        description="Infer selected criteria and piecewise-linear value "
                    "functions from pairwise judgments.")
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        sp = sub.add_parser(mode)
        sp.add_argument("--table", required=True, help="performance CSV")
        sp.add_argument("--prefs", required=True, help="judgment lines")
        sp.add_argument("--gamma", type=int, default=5,
                        help="subintervals per criterion (default 5)")
        sp.add_argument("--p", type=float, default=0.0,
                        help="weight of the slope-deviation bound")
        sp.add_argument("--C", type=float, default=1.0,
                        help="weight of the empirical error")
        sp.add_argument("--epsilon", type=float, default=0.01,
                        help="strict-preference margin")
        sp.add_argument("--max-selected", type=int, default=None)
        sp.add_argument("--format", choices=FORMATS, default="json")
        sp.add_argument("--out", type=Path, default=None)
        sp.add_argument("--scale", default="0,1",
                        help="criterion scale as 'low,high' (default 0,1)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        low, high = (float(t) for t in args.scale.split(","))
    except ValueError:
        print(f"prefsel: bad --scale {args.scale!r}", file=sys.stderr)
        return EXIT_INPUT
    budget = None
    if os.environ.get("PREFSEL_NODE_BUDGET"):
        try:
            budget = int(os.environ["PREFSEL_NODE_BUDGET"])
        except ValueError:
            print("prefsel: PREFSEL_NODE_BUDGET must be an integer",
                  file=sys.stderr)
            return EXIT_INPUT
    try:
        table = load_performance_csv(args.table, gamma=args.gamma,
                                     default_scale=(low, high))
        statements = load_preferences(args.prefs, set(table.alternatives))
        config = ProjectConfig(mode=args.mode, gamma=args.gamma, p=args.p,
                               C=args.C, epsilon=args.epsilon,
                               max_selected=args.max_selected, fmt=args.format)
        progress = None
        if args.mode in ("enumerate", "relevance"):
            def progress(found):  # streamed so long runs show life
                print(f"found {{{', '.join(sorted(found))}}}", file=sys.stderr)
        report = run(config, table, statements, node_budget=budget,
                     on_set=progress)
    except FileNotFoundError as exc:
        print(f"prefsel: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DomainError as exc:
        print(f"prefsel: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InconsistencyError as exc:
        print(f"prefsel: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ResourceLimitError, NumericalError) as exc:
        print(f"prefsel: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    text = report.render(args.format)
    if args.out is not None:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
