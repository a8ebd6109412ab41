"""Oscillation metrics at m=401 as the step varies from N=4 to N=6 steps per cell."""

import argparse

import numpy as np

from impactlab.analysis import oscillation_report
from impactlab.reference import build_impact_solution
from impactlab.solver import RunConfig, ShockLocked, run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=401)
    ap.add_argument("--center-cells", type=int, default=0, help="cells around x=0 left out of the metrics")
    ap.add_argument("--values", type=float, nargs="*", default=list(np.arange(4.0, 6.01, 0.25)))
    args = ap.parse_args()
    sol = build_impact_solution(RunConfig())
    print(f"{'N':>6} {'dt':>11} {'cfl':>7} {'band':>10} {'alt':>6} {'clusters':>8}")
    for n in args.values:
        res = run(RunConfig(m=args.m, policy=ShockLocked(n)))
        rep = oscillation_report(res, sol, margin_cells=10, center_cells=args.center_cells)
        print(f"{n:6.3f} {res.dt_used:11.4e} {res.effective_cfl:7.4f} {rep.band_width:10.3e} "
              f"{rep.alternation_fraction:6.3f} {rep.cluster_count:8d}")


if __name__ == "__main__":
    main()
