"""Command line wrapper: one figure per invocation.

    spinpump-figs <family> --input data.csv --out figure.png [--offset X]
                  [--xlim a,b] [--ylim a,b]

Exit codes: 0 success, 2 unusable input (schema mismatch, empty file),
in which case no output file is written.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import FAMILIES, FigureSpec, SchemaError, render


def _limits(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(tok) for tok in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected 'low,high', got {text!r}") from exc
    return lo, hi


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="spinpump-figs")
    ap.add_argument("family", choices=FAMILIES)
    ap.add_argument("--input", required=True, help="CSV emitted by the spinpump CLI")
    ap.add_argument("--out", required=True, help="output image path")
    ap.add_argument("--offset", type=float, default=1.1, help="waterfall trace offset")
    ap.add_argument("--xlim", type=_limits, default=None)
    ap.add_argument("--ylim", type=_limits, default=None)
    args = ap.parse_args(argv)
    spec = FigureSpec(
        family=args.family,
        input_path=Path(args.input),
        output_path=Path(args.out),
        offset=args.offset,
        xlim=args.xlim,
        ylim=args.ylim,
    )
    try:
        out = render(spec)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
