"""Weyl ratio of round spheres and the index after which it stays above 1/2."""
import argparse
from pathlib import Path

import numpy as np

from spectral_dumbbell import io
from spectral_dumbbell.experiments import run_weyl_experiment
from spectral_dumbbell.planner import sphere_dip


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--dims", default="2,3,4,5,6")
    p.add_argument("--kmax", type=int, default=10**6)
    p.add_argument("--out", type=Path, default=Path("results/weyl"))
    args = p.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    for n in (int(d) for d in args.dims.split(",")):
        t = run_weyl_experiment(n, args.kmax)
        # thin the plot series logarithmically; the full table goes to CSV
        idx = np.unique(np.geomspace(1, args.kmax, 2000).astype(int)) - 1
        io.write_plot_data(args.out / f"weyl_ratio_n{n}.csv", t.k[idx], t.ratio[idx], "k", "ratio")
        dips = ", ".join(f"{sphere_dip(n, l):.4f}" for l in range(1, 6))
        print(f"n={n}: k1={t.k1}  ratio at kmax={t.ratio[-1]:.6f}  first block minima: {dips}")


if __name__ == "__main__":
    main()
