from __future__ import annotations

import argparse
import sys

from .figures import FIGURES, QUANTITIES, FigureSpec, render
from .tables import SchemaError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotkit", description="render figures from simulation CSV output"
    )
    parser.add_argument("--in", dest="input_csv", required=True, help="averages or tails CSV")
    parser.add_argument("--figure", choices=FIGURES, required=True)
    parser.add_argument("--out", required=True, help="output image (.png or .svg)")
    parser.add_argument("--overlay-fit", action="store_true")
    parser.add_argument("--fits", help="fits CSV for overlay lines")
    parser.add_argument("--quantity", choices=QUANTITIES, default="ergotropy")
    return parser


def main(argv=None) -> int:
    ns = _build_parser().parse_args(argv)
    try:
        spec = FigureSpec(
            input_csv=ns.input_csv,
            figure=ns.figure,
            output=ns.out,
            overlay_fit=ns.overlay_fit,
            fits_csv=ns.fits,
            quantity=ns.quantity,
        )
        result = render(spec)
    except (SchemaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {result.output} ({result.n_series} series)")
    for note in result.annotations:
        where = f"d={note['d']}" if "d" in note else f"ell={note['ell']:.6g}"
        print(f"  fit {note['measure']} {where}: slope {note['slope']:.6g}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
