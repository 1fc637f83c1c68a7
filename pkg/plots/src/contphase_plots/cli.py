"""render_fig: draw a figure from a contphase CSV sweep table.

    render_fig --input sweep.csv --kind transmission-compare --output fig.png

Exit codes: 0 success, 1 malformed input or unknown kind.
"""

from __future__ import annotations

import argparse
import sys

from .render import FIGURE_KINDS, PlotJob, RenderError, render


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="render_fig",
        description="Render contphase sweep CSVs to figures.")
    parser.add_argument("--input", required=True, help="CSV file to plot")
    parser.add_argument("--kind", required=True, choices=FIGURE_KINDS)
    parser.add_argument("--output", required=True, help="image file to write")
    args = parser.parse_args(argv)
    try:
        job = PlotJob(input_csv=args.input, kind=args.kind,
                      output_image=args.output)
        render(job)
    except (RenderError, OSError, ValueError) as e:
        print(f"render_fig: {e}", file=sys.stderr)
        return 1
    print(f"wrote {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
