"""Command line entry point: render the figure gallery from a preset directory.

Exit codes: 0 success, 2 bad input (missing directory, malformed CSV,
unknown style).
"""

from __future__ import annotations

import argparse
import sys

from .csvio import SchemaError
from .render import STYLES, OverlaySpec, gallery


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quapiplot",
        description="Render figures from quapidyn CSV output.",
    )
    parser.add_argument("--preset-dir", required=True,
                        help="directory holding the CSV files to plot")
    parser.add_argument("--out", required=True,
                        help="directory to write images into")
    parser.add_argument("--style", default="default", choices=sorted(STYLES),
                        help="figure style (default: %(default)s)")
    parser.add_argument("--format", default="png", choices=("png", "svg"),
                        help="image format (default: %(default)s)")
    parser.add_argument("--overlay", default=None,
                        help="two-column CSV of external data points drawn "
                             "onto the reference-coherence panel")
    parser.add_argument("--overlay-scale", type=float, default=1.0,
                        help="multiply overlay values by this factor "
                             "(default: %(default)s)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    overlay = None
    if args.overlay is not None:
        overlay = OverlaySpec(path=args.overlay, scale=args.overlay_scale)
    try:
        rendered, skipped = gallery(args.preset_dir, args.out,
                                    style=args.style, fmt=args.format,
                                    overlay=overlay)
    except (SchemaError, FileNotFoundError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    for name in skipped:
        print(f"skipped {name}: no t_fs time axis, nothing to plot")
    print(f"wrote {len(rendered)} figure(s) to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
