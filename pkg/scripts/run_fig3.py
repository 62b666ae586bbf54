#!/usr/bin/env python3
"""Buffer-size study on an unstable scalar linear plant (a = 1.7).

Caps the number of buffer slots the anytime controllers may use. A cap
of one slot recovers the baseline controller exactly; three slots are
already close to the uncapped optimum.
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
    parser.add_argument("--grid", type=int, nargs="+", default=[1, 2, 3, 4])
    parser.add_argument("--out", default="fig3.csv")
    args = parser.parse_args()

    spec = builtin_experiment("fig3", seed=args.seed, runs=args.runs,
                              horizon=args.horizon, grid=args.grid)
    rows = run_sweep(spec)
    write_sweep_csv(rows, args.out)
    for row in rows:
        print(f"cap={row['grid_value']:g}  baseline={row['cost_baseline']:.6g}  "
              f"a1={row['cost_a1']:.6g}  a2={row['cost_a2']:.6g}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
