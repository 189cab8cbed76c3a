"""Command-line interface: `gravwell-plot <report-dir> [--figure <id>]
[--format svg|png] [--out DIR]`.

The report directory is either a single case output (contains report.json)
or a suite root holding several of them.
"""

from __future__ import annotations

import argparse
import sys

from .figures import FIGURES, PlotInputError, render


def main(argv=None):
    parser = argparse.ArgumentParser(prog="gravwell-plot", description="render figures from gravwell outputs")
    parser.add_argument("report_dir")
    parser.add_argument("--figure", choices=sorted(FIGURES), default=None)
    parser.add_argument("--format", choices=("svg", "png"), default="svg")
    parser.add_argument("--out", default=None, help="write figures here instead of next to the CSVs")
    args = parser.parse_args(argv)
    try:
        written = render(args.report_dir, args.figure, args.format, args.out)
    except PlotInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
