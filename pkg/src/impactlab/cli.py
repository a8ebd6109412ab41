"""Command-line driver: ``impactlab run | converge | sweep-dt``.

Settings come from built-in defaults (the impact problem), then an optional
flat YAML config file, then command-line flags, later sources winning.
Exit codes: 0 success, 2 configuration error, 3 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import yaml

from .analysis import (
    FIELDS,
    ConvergenceRow,
    StudyError,
    convergence_study,
    doubling_family,
    field_values,
    l1_error,
    oscillation_report,
)
from .gas import GasModel, PrimitiveState
from .reference import build_impact_solution, evaluate
from .solver import (
    FLUXES,
    BlowUpError,
    ConfigError,
    FixedCfl,
    FixedDt,
    RunConfig,
    ShockLocked,
    run,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3

RUN_KEYS = {
    "m": int,
    "cfl": float,
    "dt": float,
    "steps_per_cell": float,
    "shock_speed": float,
    "landing": str,
    "flux": str,
    "entropy_fix": bool,
    "entropy_fix_coeff": float,
    "t_final": float,
    "gamma": float,
    "left": list,
    "right": list,
}
STUDY_KEYS = {
    "resolutions": list,
    "min_m": int,
    "max_m": int,
    "jobs": int,
    "n_values": list,
    "margin": int,
    "center_cells": int,
    "out_dir": str,
}
POLICY_KEYS = ("cfl", "dt", "steps_per_cell")

PROFILE_HEADER = ["x", "numerical", "exact"]
TABLE_HEADER = ["m", "e_rho", "kappa_rho", "e_u", "kappa_u", "e_p", "kappa_p"]
SWEEP_HEADER = [
    "N",
    "dt",
    "effective_cfl",
    "band_width",
    "total_variation",
    "alternation_fraction",
    "cluster_count",
]


def fmt(x) -> str:
    """Round-trip precision for CSV; empty-safe for undefined rates."""
    if x is None:
        return "nan"
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".17g")


def short(x) -> str:
    return "--" if x is None else format(float(x), ".4g")


# ------------------------------------------------------------------ settings


def load_config_file(path) -> Dict:
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh) or {}
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a flat key: value mapping")
    known = {**RUN_KEYS, **STUDY_KEYS}
    for key, value in data.items():
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
        kind = known[key]
        if kind is float and isinstance(value, int) and not isinstance(value, bool):
            data[key] = float(value)
        elif kind is float and not isinstance(value, float):
            raise ConfigError(f"config key {key!r} must be a number, got {value!r}")
        elif kind is not float and not isinstance(value, kind):
            raise ConfigError(f"config key {key!r} must be {kind.__name__}, got {value!r}")
    return data


def merge_settings(file_values: Dict, flag_values: Dict) -> Dict:
    """Flags over file values; a policy set on the flag level replaces the file's."""
    for level, values in (("config file", file_values), ("command line", flag_values)):
        given = [k for k in POLICY_KEYS if values.get(k) is not None]
        if len(given) > 1:
            raise ConfigError(f"{level} sets more than one time-step policy: {', '.join(given)}")
    merged = dict(file_values)
    if any(flag_values.get(k) is not None for k in POLICY_KEYS):
        for k in POLICY_KEYS:
            merged.pop(k, None)
    merged.update({k: v for k, v in flag_values.items() if v is not None})
    return merged


def _state(values, name) -> PrimitiveState:
    if len(values) != 3:
        raise ConfigError(f"{name} state needs three numbers (rho, u, p), got {values!r}")
    try:
        return PrimitiveState(*(float(v) for v in values))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} state must be numeric, got {values!r}") from exc


def build_run_config(settings: Dict) -> RunConfig:
    gamma = settings.get("gamma", 1.4)
    try:
        gas = GasModel(gamma)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    left = _state(settings.get("left", [1.0, 2.0, 1.0 / gamma]), "left")
    right = _state(settings.get("right", [1.0, -2.0, 1.0 / gamma]), "right")
    landing = settings.get("landing")
    if settings.get("dt") is not None:
        policy = FixedDt(settings["dt"], **({"landing": landing} if landing else {}))
    elif settings.get("steps_per_cell") is not None:
        kw = {"landing": landing} if landing else {}
        policy = ShockLocked(settings["steps_per_cell"], settings.get("shock_speed"), **kw)
    else:
        policy = FixedCfl(settings.get("cfl", 0.9), **({"landing": landing} if landing else {}))
    return RunConfig(
        m=settings.get("m", 401),
        t_final=settings.get("t_final", 0.5),
        gas=gas,
        policy=policy,
        flux=settings.get("flux", "roe"),
        entropy_fix=bool(settings.get("entropy_fix", False)),
        entropy_fix_coeff=settings.get("entropy_fix_coeff", 0.1),
        left_state=left,
        right_state=right,
    )


def config_echo(cfg: RunConfig) -> Dict:
    """Flat settings that rebuild ``cfg`` exactly through :func:`build_run_config`."""
    out = {
        "m": cfg.m,
        "t_final": cfg.t_final,
        "gamma": cfg.gas.gamma,
        "flux": cfg.flux,
        "entropy_fix": cfg.entropy_fix,
        "entropy_fix_coeff": cfg.entropy_fix_coeff,
        "left": [float(v) for v in cfg.left_state.as_tuple()],
        "right": [float(v) for v in cfg.right_state.as_tuple()],
        "landing": cfg.policy.landing,
    }
    pol = cfg.policy
    if isinstance(pol, FixedCfl):
        out["cfl"] = pol.cfl
    elif isinstance(pol, FixedDt):
        out["dt"] = pol.dt
    else:
        out["steps_per_cell"] = pol.steps_per_cell
        if pol.shock_speed is not None:
            out["shock_speed"] = pol.shock_speed
    return out


# ---------------------------------------------------------------------- I/O


def write_csv(path: Path, header: Sequence[str], rows: List[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def read_csv(path) -> List[Dict[str, float]]:
    with open(path, newline="") as fh:
        return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def table_rows(rows: List[ConvergenceRow]):
    return [[r.m, r.e_rho, r.kappa_rho, r.e_u, r.kappa_u, r.e_p, r.kappa_p] for r in rows]


def print_table(rows: List[ConvergenceRow], out=None) -> None:
    out = out or sys.stdout
    print(f"{'m':>8} {'e_rho':>10} {'k':>6} {'e_u':>10} {'k':>6} {'e_p':>10} {'k':>6}", file=out)
    for r in rows:
        cells = [f"{r.m:>8d}"]
        for f in FIELDS:
            cells.append(f"{r.error(f):>10.4g}")
            cells.append(f"{short(r.kappa(f)):>6}")
        print(" ".join(cells), file=out)


# ------------------------------------------------------------------ commands


def cmd_run(cfg: RunConfig, out_dir: Path) -> int:
    result = run(cfg)
    sol = build_impact_solution(cfg)
    exact = evaluate(sol, result.grid.centers, result.t_end)
    errors = {}
    for f in FIELDS:
        num = field_values(result, f)
        write_csv(
            out_dir / f"profile_{f}.csv",
            PROFILE_HEADER,
            list(zip(result.grid.centers, num, getattr(exact, f))),
        )
        errors[f] = l1_error(result, sol, f)
    meta = {
        "command": "run",
        "config": config_echo(cfg),
        "steps_taken": result.steps_taken,
        "dt_used": result.dt_used,
        "effective_cfl": result.effective_cfl,
        "lambda_max": result.lambda_max,
        "t_end": result.t_end,
        "shock_speed": sol.shock_speed,
        "l1_errors": errors,
        "wall_time": result.wall_time,
    }
    (out_dir / "run_metadata.json").write_text(json.dumps(meta, indent=2) + "\n")
    (out_dir / "run_config.yaml").write_text(yaml.safe_dump(config_echo(cfg), sort_keys=False))
    print(f"m={cfg.m} steps={result.steps_taken} dt={short(result.dt_used)} "
          f"effective_cfl={short(result.effective_cfl)} t_end={short(result.t_end)}")
    print("L1 errors: " + " ".join(f"{f}={short(errors[f])}" for f in FIELDS))
    print(f"wrote profiles to {out_dir}")
    return EXIT_OK


def cmd_converge(template: RunConfig, resolutions: List[int], out_dir: Path, jobs: int = 1) -> int:
    if not resolutions:
        raise ConfigError("empty resolution list")
    for m in resolutions:
        if m < 3:
            raise ConfigError(f"resolution m={m} violates m >= 3")
    rows = convergence_study(resolutions, template, jobs=jobs)
    write_csv(out_dir / "convergence.csv", TABLE_HEADER, table_rows(rows))
    (out_dir / "converge_config.yaml").write_text(
        yaml.safe_dump({**config_echo(template), "resolutions": sorted(resolutions)}, sort_keys=False)
    )
    print_table(rows)
    return EXIT_OK


def cmd_sweep_dt(
    template: RunConfig,
    n_values: List[float],
    out_dir: Path,
    margin: int = 10,
    center_cells: int = 0,
) -> int:
    if not n_values:
        raise ConfigError("empty steps-per-cell list")
    for n in n_values:
        if not n > 0:
            raise ConfigError(f"steps per cell must be positive, got {n}")
    sol = build_impact_solution(template)
    shock_speed = getattr(template.policy, "shock_speed", None)
    landing = getattr(template.policy, "landing", "clip")
    landing = landing if landing in ("clip", "overshoot") else "clip"
    rows = []
    for n in n_values:
        cfg = replace(template, policy=ShockLocked(n, shock_speed, landing))
        result = run(cfg)
        rep = oscillation_report(result, sol, margin, center_cells)
        rows.append([n, result.dt_used, result.effective_cfl, rep.band_width,
                     rep.total_variation, rep.alternation_fraction, rep.cluster_count])
        print(f"N={n:g} dt={short(result.dt_used)} cfl={short(result.effective_cfl)} "
              f"band={short(rep.band_width)} alt={short(rep.alternation_fraction)} "
              f"clusters={rep.cluster_count}")
    write_csv(out_dir / "sweep_dt.csv", SWEEP_HEADER, rows)
    return EXIT_OK


# ---------------------------------------------------------------- arguments


def _csv_list(kind):
    def parse(text):
        try:
            return [kind(t) for t in text.split(",") if t.strip()]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from exc
    return parse


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat YAML file of settings")
    common.add_argument("--out-dir", help="directory for output files (default: current)")
    common.add_argument("--m", type=int, help="number of grid points (>= 3)")
    pol = common.add_mutually_exclusive_group()
    pol.add_argument("--cfl", type=float, help="fixed Courant number")
    pol.add_argument("--dt", type=float, help="fixed time step")
    pol.add_argument("--steps-per-cell", type=float, dest="steps_per_cell",
                     help="shock-locked step: shock crosses a cell in N steps")
    common.add_argument("--shock-speed", type=float, dest="shock_speed",
                        help="override the derived shock speed for --steps-per-cell")
    common.add_argument("--landing", choices=["even", "clip", "overshoot"],
                        help="how the last step meets t_final")
    common.add_argument("--flux", choices=FLUXES)
    common.add_argument("--entropy-fix", action="store_true", default=None, dest="entropy_fix",
                        help="Harten entropy fix (roe-fd flux only)")
    common.add_argument("--t-final", type=float, dest="t_final")
    common.add_argument("--gamma", type=float)
    common.add_argument("--left", type=float, nargs=3, metavar=("RHO", "U", "P"))
    common.add_argument("--right", type=float, nargs=3, metavar=("RHO", "U", "P"))

    parser = argparse.ArgumentParser(prog="impactlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="single simulation with profiles")
    conv = sub.add_parser("converge", parents=[common], help="grid convergence study")
    conv.add_argument("--resolutions", type=_csv_list(int), help="comma-separated m values")
    conv.add_argument("--min-m", type=int, dest="min_m")
    conv.add_argument("--max-m", type=int, dest="max_m")
    conv.add_argument("--jobs", type=int)
    sweep = sub.add_parser("sweep-dt", parents=[common], help="oscillation metrics versus steps per cell")
    sweep.add_argument("--n-values", type=_csv_list(float), dest="n_values",
                       help="comma-separated steps-per-cell values")
    sweep.add_argument("--margin", type=int, help="cells excluded next to each shock (default 10)")
    sweep.add_argument("--center-cells", type=int, dest="center_cells",
                       help="cells excluded on each side of x = 0 (default 0)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    if flags.get("left") is not None:
        flags["left"] = list(flags["left"])
    if flags.get("right") is not None:
        flags["right"] = list(flags["right"])
    try:
        file_values = load_config_file(args.config) if args.config else {}
        settings = merge_settings(file_values, flags)
        run_settings = {k: v for k, v in settings.items() if k in RUN_KEYS}
        out_dir = Path(settings.get("out_dir") or ".")
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.command == "sweep-dt":
            run_settings = {k: v for k, v in run_settings.items() if k not in POLICY_KEYS}
            run_settings["steps_per_cell"] = 1.0  # placeholder; each N replaces it
        cfg = build_run_config(run_settings)

        if args.command == "run":
            return cmd_run(cfg, out_dir)
        if args.command == "converge":
            if settings.get("resolutions") is not None:
                ms = [int(m) for m in settings["resolutions"]]
            else:
                ms = doubling_family(settings.get("min_m", 51), settings.get("max_m", 25601))
            return cmd_converge(cfg, ms, out_dir, jobs=settings.get("jobs", 1))
        n_values = settings.get("n_values")
        if n_values is None:
            n_values = [5.0, 5.5]
        return cmd_sweep_dt(cfg, [float(n) for n in n_values], out_dir,
                            settings.get("margin", 10), settings.get("center_cells", 0))
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StudyError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except BlowUpError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
