"""CLI: ``banditplots render --spec figure.json --out fig.png``."""

from __future__ import annotations

import argparse
import sys

from .figures import FigureSpec, FigureSpecError, render_figure


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="banditplots",
        description="Render multi-panel log-log figures from aggregate CSVs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render a figure spec to an image")
    p.add_argument("--spec", required=True, help="figure spec JSON")
    p.add_argument("--out", required=True, help="output image path (PNG)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec.load(args.spec)
        render_figure(spec, args.out)
    except FigureSpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
