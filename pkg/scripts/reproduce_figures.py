"""Write the CSV data for every figure into an output directory.

Usage: python scripts/reproduce_figures.py [OUTDIR] [--jobs N]
"""

import argparse
import pathlib
import time

from batterycharge.cli import FIGURES, SweepConfig, run_figure


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("outdir", nargs="?", default="figures")
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    out = pathlib.Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    for fig in FIGURES:
        t0 = time.perf_counter()
        text = run_figure(SweepConfig.for_figure(fig, jobs=args.jobs))
        path = out / f"{fig}.csv"
        path.write_text(text, newline="")
        print(f"{path}  {text.count(chr(10)) - 1} rows  {time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()
