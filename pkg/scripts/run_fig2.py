#!/usr/bin/env python3
"""Plant-parameter sweep on the scalar linear plant.

The pole location a moves from stable to increasingly unstable while the
computation time stays fixed at tau = 0.3. The percentage improvement of
the buffered controllers over the baseline grows with a.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from anyctrl.experiments import builtin_experiment, run_sweep, write_sweep_csv


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--runs", type=int, default=200)
    parser.add_argument("--horizon", type=int, default=10_000)
    parser.add_argument("--grid", type=float, nargs="+",
                        default=[0.9, 1.1, 1.3, 1.5])
    parser.add_argument("--out", default="fig2.csv")
    args = parser.parse_args()

    spec = builtin_experiment("fig2", seed=args.seed, runs=args.runs,
                              horizon=args.horizon, grid=args.grid)
    rows = run_sweep(spec)
    write_sweep_csv(rows, args.out)
    for row in rows:
        print(f"a={row['grid_value']:g}  baseline={row['cost_baseline']:.6g}  "
              f"a1={row['cost_a1']:.6g} ({row['impr_a1_pct']:+.2f}%)  "
              f"a2={row['cost_a2']:.6g} ({row['impr_a2_pct']:+.2f}%)")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
