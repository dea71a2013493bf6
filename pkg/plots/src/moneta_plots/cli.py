"""Command-line interface: ``plot <fig1|fig2|fig3|fig4> --in <dir> --out <file>``."""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from .figures import PlotError, render


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot",
        description="Render a figure from a moneta artifact directory",
    )
    parser.add_argument("kind", choices=["fig1", "fig2", "fig3", "fig4"])
    parser.add_argument("--in", dest="in_dir", required=True, help="artifact directory")
    parser.add_argument("--out", dest="out_file", required=True, help="output image file")
    return parser


def cli_dispatch(argv: Optional[List[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        render(args.kind, args.in_dir, args.out_file)
    except PlotError as e:
        print(f"error: PlotError: {e}", file=sys.stderr)
        return 1
    print(f"wrote {args.out_file}")
    return 0


def main() -> None:
    sys.exit(cli_dispatch())


if __name__ == "__main__":
    main()
