"""Entry point: render <figure-id> --data-dir <dir> --out <dir>."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .io import SchemaError
from .recipes import FIGURE_IDS, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="render",
        description="Render revdiss figure datasets (CSV + meta) into images.",
    )
    parser.add_argument(
        "figure_id",
        nargs="?",
        help=f"one of: {', '.join(FIGURE_IDS)}",
    )
    parser.add_argument("--all", action="store_true", help="render every figure")
    parser.add_argument("--data-dir", default=".", help="directory with fig<id>.csv")
    parser.add_argument("--out", default=".", help="output directory for images")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if not args.all and args.figure_id is None:
        print(
            f"error: give a figure id or --all; valid: {', '.join(FIGURE_IDS)}",
            file=sys.stderr,
        )
        return 1
    ids = list(FIGURE_IDS) if args.all else [args.figure_id]
    data_dir = Path(args.data_dir)
    out_dir = Path(args.out)
    for figure_id in ids:
        try:
            path = render(figure_id, data_dir, out_dir)
        except FileNotFoundError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        except SchemaError as exc:
            print(f"schema mismatch: {exc}", file=sys.stderr)
            return 1
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
