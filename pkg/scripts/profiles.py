"""Final m=401 profiles for CFL 0.9, N=5 and N=5.5 with the exact solution, as CSV."""

import argparse
import csv
from pathlib import Path

import numpy as np

from impactlab.reference import build_impact_solution, evaluate
from impactlab.solver import FixedCfl, RunConfig, ShockLocked, run

CASES = {
    "cfl09": FixedCfl(0.9),
    "locked5": ShockLocked(5),
    "locked55": ShockLocked(5.5),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=401)
    ap.add_argument("--out", type=Path, default=Path("profiles"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    sol = build_impact_solution(RunConfig())
    for name, policy in CASES.items():
        res = run(RunConfig(m=args.m, policy=policy))
        q = res.primitives()
        ex = evaluate(sol, res.grid.centers, res.t_end)
        path = args.out / f"{name}_m{args.m}.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "rho", "u", "p", "rho_exact", "u_exact", "p_exact"])
            for row in zip(res.grid.centers, q.rho, q.u, q.p, ex.rho, ex.u, ex.p):
                w.writerow([f"{v:.17g}" for v in row])
        inner = np.abs(res.grid.centers) < 0.3
        print(f"{name}: dt={res.dt_used:.5e} cfl={res.effective_cfl:.4f} "
              f"rho range |x|<0.3 [{q.rho[inner].min():.4f}, {q.rho[inner].max():.4f}] -> {path}")


if __name__ == "__main__":
    main()
