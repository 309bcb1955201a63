"""Command-line entry: render a figure from a spec file or flags."""
from __future__ import annotations

import argparse
import sys

from .render import ColumnError, PlotSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ghzdist-plots",
                                     description="render comparison figures from "
                                                 "distillation result CSVs")
    parser.add_argument("--spec", help="JSON file with PlotSpec fields")
    parser.add_argument("--csv", action="append", default=[],
                        help="input CSV (repeatable)")
    parser.add_argument("--output", help="output image path")
    parser.add_argument("--layout", choices=("stacked", "side_by_side"),
                        default="stacked")
    parser.add_argument("--title", default="")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.spec:
            with open(args.spec) as fh:
                spec = PlotSpec.from_json(fh.read())
        else:
            if not args.csv or not args.output:
                print("ghzdist-plots: need --spec or both --csv and --output",
                      file=sys.stderr)
                return 2
            spec = PlotSpec(csv_paths=tuple(args.csv), output=args.output,
                            layout=args.layout, title=args.title)
        path = render(spec)
    except ColumnError as exc:
        print(f"ghzdist-plots: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"ghzdist-plots: {exc}", file=sys.stderr)
        return 2
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
