"""Regenerate every figure preset as CSV + SVG under one output directory.

    python scripts/reproduce_figures.py --out runs/figures
    python scripts/reproduce_figures.py fig2a fig3c --jobs 4

The detuned heatmaps (fig5a-c) dominate the cost: about 25 s, 90 s and
12 min on a single core. Pass --skip-heatmaps to leave them out.
"""

import argparse
import sys
import time

from wgqed.cli import main as cli_main
from wgqed.sweep import PRESETS


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("names", nargs="*", help="presets to run (default: all)")
    ap.add_argument("--out", default="runs/figures")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--skip-heatmaps", action="store_true")
    args = ap.parse_args(argv)

    names = args.names or list(PRESETS)
    if args.skip_heatmaps:
        names = [n for n in names if PRESETS[n].plot != "heatmap"]
    status = 0
    for name in names:
        t0 = time.perf_counter()
        code = cli_main(["preset", name, "--out", args.out, "--jobs", str(args.jobs)])
        print(f"{name}: exit {code} in {time.perf_counter() - t0:.1f} s", file=sys.stderr)
        status = status or code
    return status


if __name__ == "__main__":
    sys.exit(main())
