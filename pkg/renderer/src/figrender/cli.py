"""`render` command: turn jcdephase CSV files into figure images.

Usage:
    render --figure 2a --in fig2a.csv --out fig2a.png
    render --figure A3 --in a3a.csv a3e.csv ... --out figA3.png

Panel ids take one CSV; composite ids (2, 3, 4, A3) take one CSV per panel
in the documented order.  Exit codes: 0 ok, 2 bad input or malformed CSV.
"""

from __future__ import annotations

import argparse
import sys

import matplotlib

matplotlib.use("Agg")

from .figures import FIGURE_IDS, render_figure
from .reader import CsvFormatError, read_table


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="render", description=__doc__.splitlines()[0])
    parser.add_argument("--figure", required=True, metavar="ID",
                        help=f"figure id, one of: {', '.join(FIGURE_IDS)}")
    parser.add_argument("--in", dest="inputs", required=True, nargs="+", metavar="CSV",
                        help="input CSV file(s) produced by jcdephase")
    parser.add_argument("--out", required=True, metavar="PATH", help="output image path")
    parser.add_argument("--dpi", type=int, default=150)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        tables = [read_table(path) for path in args.inputs]
        fig = render_figure(args.figure, tables)
        fig.savefig(args.out, dpi=args.dpi)
    except (CsvFormatError, OSError) as exc:
        print(f"render: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
