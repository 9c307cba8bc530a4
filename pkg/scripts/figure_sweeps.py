"""Write the rate-vs-M (N=50, K=70, alpha=0.97) and rate-vs-alpha
(N=30, K=45, M=2) sweeps as CSV.

    python scripts/figure_sweeps.py --outdir results

Plot with any tool, e.g. gnuplot:
    set datafile separator ','; plot 'results/fig2.csv' u 4:5 w lp t 'r_c', '' u 4:6 w lp t 'r_b', '' u 4:9 w lp t 'cut-set'
"""

import argparse
from pathlib import Path

from hetcache.experiments import run_preset, sweep_csv


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--outdir", default="results")
    args = parser.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    for name in ("fig2", "fig3"):
        rows = run_preset(name)
        (out / f"{name}.csv").write_text(sweep_csv(rows))
        gap = max(float(r.r_b - r.r_c) for r in rows)
        print(f"{name}: {len(rows)} points, largest r_b - r_c = {gap:.4f} -> {out / (name + '.csv')}")


if __name__ == "__main__":
    main()
