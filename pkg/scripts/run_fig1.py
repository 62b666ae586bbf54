#!/usr/bin/env python3
"""Execution-time sweep on the cubic benchmark plant.

Compares the baseline controller against both buffered variants over a
grid of per-input computation times and writes one CSV row per grid
point. Costs climb steeply with the computation time; past tau = 0.3 the
baseline loop escapes to the overflow guard in every run.
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
                        default=[0.1, 0.2, 0.3, 0.4, 0.5])
    parser.add_argument("--out", default="fig1.csv")
    args = parser.parse_args()

    spec = builtin_experiment("fig1", seed=args.seed, runs=args.runs,
                              horizon=args.horizon, grid=args.grid)
    rows = run_sweep(spec)
    write_sweep_csv(rows, args.out)
    for row in rows:
        print(f"tau={row['grid_value']:g}  baseline={row['cost_baseline']:.6g} "
              f"(div {row['diverged_baseline']})  a1={row['cost_a1']:.6g}  "
              f"a2={row['cost_a2']:.6g}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
