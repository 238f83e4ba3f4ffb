"""Thin-neck dumbbell sweep: spectrum and isoperimetric ratio as the neck shrinks."""
import argparse
import sys
from pathlib import Path

from spectral_dumbbell import io
from spectral_dumbbell.experiments import run_dumbbell_convergence


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--h", type=float, default=0.5)
    p.add_argument("--deltas", default="0.3,0.2,0.15,0.1,0.075")
    p.add_argument("--level", type=int, default=4)
    p.add_argument("--num", type=int, default=10)
    p.add_argument("--out", type=Path, default=Path("results/dumbbell"))
    args = p.parse_args()

    deltas = [float(d) for d in args.deltas.split(",")]
    table = run_dumbbell_convergence(args.h, deltas, args.level, args.num)
    args.out.mkdir(parents=True, exist_ok=True)
    io.write_table(args.out / "dumbbell.csv", table.header(), table.records(), table.metadata)

    print(f"{'delta':>7} {'lambda_1':>10} {'lambda_2':>10} {'lambda_7':>10} {'I':>8}")
    for r in table.rows:
        if r.ok:
            print(f"{r.delta:7.3f} {r.values[1]:10.5f} {r.values[2]:10.5f} "
                  f"{r.values[7]:10.5f} {r.iso.ratio:8.4f}")
        else:
            print(f"{r.delta:7.3f} failed: {r.error}", file=sys.stderr)
    print(f"two-sphere limit: I = {table.limit_iso.ratio:.4f}, first Dirichlet value of the "
          f"segment = {table.segment.values[0]:.4f}")
    return 1 if table.failed else 0


if __name__ == "__main__":
    sys.exit(main())
