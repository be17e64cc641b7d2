"""Produce CSV tables for plots: PPT regions, minimum output entropy curves, Cov22 minimizer map."""
import argparse
from pathlib import Path

from su2cov.cli import main


def run():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="results/figures")
    ap.add_argument("--grid", type=int, default=201)
    args = ap.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    g = str(args.grid)
    jobs = {
        "ppt_cov22.csv": ["ppt-region", "--family", "cov22", "--grid", g],
        "minimizer_cov22.csv": ["moe", "--family", "cov22", "--grid", g],
    }
    for l in (2, 3, 4):
        jobs[f"ppt_cov1l_l{l}.csv"] = ["ppt-region", "--family", "cov1l", "--l", str(l), "--grid", g]
        jobs[f"moe_cov1l_l{l}.csv"] = ["moe", "--family", "cov1l", "--l", str(l), "--grid", g]
    for name, argv in jobs.items():
        code = main(argv + ["--format", "csv", "--out", str(out / name)])
        print(f"{name}: exit {code}")


if __name__ == "__main__":
    run()
