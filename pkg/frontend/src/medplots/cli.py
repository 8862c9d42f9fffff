"""render_figs: turn a sweep results CSV into publication-style figures."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import KINDS, FigureSpec, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="render_figs", description=__doc__)
    parser.add_argument("--input", type=Path, required=True, help="results CSV from the sweep pipeline")
    parser.add_argument("--kind", choices=list(KINDS), required=True)
    parser.add_argument("--out", type=Path, required=True, help="output image path (png/svg/pdf)")
    parser.add_argument("--overlay-baseline", action="store_true")
    parser.add_argument("--overlay-fit", action="store_true")
    parser.add_argument("--fit-json", type=Path, default=None, help="use coefficients from a fit JSON instead of refitting")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(
        input_csv=args.input,
        kind=args.kind,
        output=args.out,
        overlay_baseline=args.overlay_baseline,
        overlay_fit=args.overlay_fit,
        fit_json=args.fit_json,
    )
    try:
        render(spec)
    except (SchemaError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
