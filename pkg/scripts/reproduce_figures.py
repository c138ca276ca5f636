"""Regenerate the CSV data behind every figure preset.

    python3 scripts/reproduce_figures.py [--out figures] [--only fig2a fig5]

Spectrum and steady-state sweeps run at step 0.01; dynamics at the default
dt = 0.005, t_max = 200.  Expect several minutes on one core.
"""
import argparse
import sys
import time

from giantqed.cli import PRESETS, main

DEFAULT = ["fig2a", "fig2b", "fig2c", "fig2d", "fig2e", "fig2f", "fig2g", "fig2h", "fig2i",
           "fig3a", "fig3b", "fig4a", "fig4b", "fig4c", "fig5"]


def run(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--out", default="figures")
    ap.add_argument("--only", nargs="*", choices=sorted(PRESETS))
    ap.add_argument("--jobs", type=int, default=0)
    args = ap.parse_args(argv)
    status = 0
    for name in args.only or DEFAULT:
        t0 = time.perf_counter()
        extra = ["--jobs", str(args.jobs)] if args.jobs else []
        rc = main(["figure", name, "--out", args.out] + extra)
        print(f"{name}: exit {rc} in {time.perf_counter() - t0:.1f}s", file=sys.stderr)
        status = max(status, rc)
    return status


if __name__ == "__main__":
    sys.exit(run())
