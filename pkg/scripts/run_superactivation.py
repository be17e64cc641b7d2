"""Run the two-copy coherent information experiment over a list of (l, p) points.

Writes one JSON report and one lambda-scan CSV per point into the output directory.
"""
import argparse
from pathlib import Path

from su2cov.cli import main


def parse_args():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", nargs="+", default=["2:0.1045", "1:0", "2:0"],
                    help="l:p pairs")
    ap.add_argument("--grid", type=int, default=100_001)
    ap.add_argument("--outdir", default="results/superactivation")
    return ap.parse_args()


def run():
    args = parse_args()
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for point in args.points:
        l, p = point.split(":")
        out = outdir / f"l{l}_p{p}.json"
        code = main(["superactivation", "--l", l, "--p", p, "--grid", str(args.grid), "--out", str(out)])
        print(f"l={l} p={p} -> {out} (exit {code})")


if __name__ == "__main__":
    run()
