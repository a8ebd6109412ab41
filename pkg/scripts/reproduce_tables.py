"""Convergence tables for the impact problem, side by side with the published ones.

    python3 scripts/reproduce_tables.py               # CFL 0.9 and shock-locked N=5
    python3 scripts/reproduce_tables.py --max-m 6401  # quicker
    python3 scripts/reproduce_tables.py --overshoot   # shock-locked run past t_final
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

import tables  # noqa: E402
from impactlab.analysis import FIELDS, convergence_study, doubling_family  # noqa: E402
from impactlab.solver import FixedCfl, RunConfig, ShockLocked  # noqa: E402


def fmt_rate(k):
    return "   -  " if k is None else f"{k:6.3f}"


def show(title, rows, published):
    ref = {r[0]: r for r in published}
    print(f"\n{title}")
    print(f"{'m':>7} " + " ".join(f"{'e_' + f:>10} {'k':>6} {'table':>10}" for f in FIELDS))
    for row in rows:
        pub = ref.get(row.m)
        cells = []
        for j, f in enumerate(FIELDS):
            shown = f"{pub[1 + 2 * j]:10.3e}" if pub else " " * 10
            cells.append(f"{row.error(f):10.4e} {fmt_rate(row.kappa(f))} {shown}")
        print(f"{row.m:7d} " + " ".join(cells))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-m", type=int, default=25601)
    ap.add_argument("--flux", default="roe", choices=["roe", "roe-fd", "exact"])
    ap.add_argument("--overshoot", action="store_true", help="shock-locked runs take whole steps past t_final")
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    ms = doubling_family(51, args.max_m)
    landing = "overshoot" if args.overshoot else "clip"
    studies = [
        ("CFL 0.9", RunConfig(policy=FixedCfl(0.9), flux=args.flux), tables.CFL09),
        (f"shock-locked N=5 ({landing})", RunConfig(policy=ShockLocked(5, landing=landing), flux=args.flux), tables.LOCKED5),
    ]
    for title, cfg, published in studies:
        t0 = time.perf_counter()
        rows = convergence_study(ms, cfg, jobs=args.jobs)
        show(f"{title}, flux={args.flux}  [{time.perf_counter() - t0:.0f} s]", rows, published)


if __name__ == "__main__":
    main()
