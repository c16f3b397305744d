"""figure-gen --panel <kind> --csv <path:label> [--csv ...] --out <path>"""

from __future__ import annotations

import argparse
import sys

from .panels import PANEL_KINDS, PanelError, PanelSpec, render


def parse_input(arg: str) -> tuple[str, str]:
    """Split ``path:label``; a bare path labels itself by its stem."""
    path, sep, label = arg.rpartition(":")
    if not sep or not path:
        from pathlib import Path

        return arg, Path(arg).stem
    return path, label


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figure-gen", description="Render comparison panels from run CSVs"
    )
    parser.add_argument("--panel", required=True, choices=PANEL_KINDS)
    parser.add_argument(
        "--csv",
        action="append",
        required=True,
        metavar="PATH:LABEL",
        help="input CSV with display label (repeatable)",
    )
    parser.add_argument("--out", required=True, help="output image path (.pdf or .svg)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = PanelSpec(
            panel=args.panel,
            inputs=tuple(parse_input(c) for c in args.csv),
            out=args.out,
        )
        path = render(spec)
    except PanelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
