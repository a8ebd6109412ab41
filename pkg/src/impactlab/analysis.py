"""Error norms, convergence tables and post-shock oscillation diagnostics."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence

import numpy as np

from .reference import ImpactSolution, build_impact_solution, evaluate
from .solver import BlowUpError, RunConfig, SimulationResult, run

FIELDS = ("rho", "u", "p")


@dataclass(frozen=True)
class ConvergenceRow:
    m: int
    e_rho: float
    e_u: float
    e_p: float
    kappa_rho: Optional[float] = None
    kappa_u: Optional[float] = None
    kappa_p: Optional[float] = None

    def error(self, name: str) -> float:
        return getattr(self, f"e_{name}")

    def kappa(self, name: str) -> Optional[float]:
        return getattr(self, f"kappa_{name}")


@dataclass(frozen=True)
class OscillationReport:
    region: tuple  # (first, last) cell index, inclusive
    band_width: float
    total_variation: float
    alternation_fraction: float
    cluster_count: int


class StudyError(RuntimeError):
    """One member of a convergence study failed."""

    def __init__(self, m: int, cause: Exception):
        self.m = m
        self.cause = cause
        super().__init__(f"resolution m={m} failed: {cause}")


def field_values(result: SimulationResult, name: str) -> np.ndarray:
    q = result.primitives()
    return np.asarray(getattr(q, name))


def l1_error(result: SimulationResult, sol: ImpactSolution, name: str) -> float:
    """dx * sum_i |q_i - q_exact(x_i, t_end)| for one primitive field.

    The reference is sampled at cell centers, not averaged over cells.
    """
    if name not in FIELDS:
        raise ValueError(f"field must be one of {FIELDS}, got {name!r}")
    exact = evaluate(sol, result.grid.centers, result.t_end)
    diff = field_values(result, name) - np.asarray(getattr(exact, name))
    return float(result.grid.dx * np.sum(np.abs(diff)))


def rate(e_coarse: float, e_fine: float) -> Optional[float]:
    """Observed order log2(e_coarse / e_fine); ``None`` when undefined."""
    if not (e_coarse > 0.0 and e_fine > 0.0):
        return None
    return math.log2(e_coarse / e_fine)


def rows_from_errors(ms: Sequence[int], errors: Dict[str, Sequence[float]]) -> List[ConvergenceRow]:
    """Attach rates to per-resolution errors, sorted by increasing m."""
    order = sorted(range(len(ms)), key=lambda k: ms[k])
    rows = []
    prev = None
    for k in order:
        e = {f: float(errors[f][k]) for f in FIELDS}
        kap = {f: (rate(prev[f], e[f]) if prev is not None else None) for f in FIELDS}
        rows.append(
            ConvergenceRow(
                m=int(ms[k]),
                e_rho=e["rho"],
                e_u=e["u"],
                e_p=e["p"],
                kappa_rho=kap["rho"],
                kappa_u=kap["u"],
                kappa_p=kap["p"],
            )
        )
        prev = e
    return rows


def doubling_family(m_min: int = 51, m_max: int = 25601) -> List[int]:
    """51, 101, 201, ... : each grid halves the previous spacing."""
    if m_min < 3 or m_max < m_min:
        raise ValueError(f"bad resolution range [{m_min}, {m_max}]")
    ms = [m_min]
    while 2 * ms[-1] - 1 <= m_max:
        ms.append(2 * ms[-1] - 1)
    return ms


def _member(args):
    cfg, sol = args
    try:
        result = run(cfg)
        return cfg.m, {f: l1_error(result, sol, f) for f in FIELDS}, None
    except (BlowUpError, ArithmeticError, ValueError) as exc:
        return cfg.m, None, exc


def convergence_study(
    resolutions: Sequence[int],
    template: RunConfig,
    sol: Optional[ImpactSolution] = None,
    jobs: int = 1,
) -> List[ConvergenceRow]:
    """Run ``template`` at each resolution and tabulate L1 errors and rates.

    ``sol`` defaults to the exact solution of the template's data. With
    ``jobs > 1`` members run in separate processes; the table order does not
    depend on completion order.

    Raises
    ------
    StudyError
        Naming the first (smallest) resolution that failed.
    """
    if not resolutions:
        raise ValueError("empty resolution list")
    ms = sorted(int(m) for m in resolutions)
    sol = sol if sol is not None else build_impact_solution(template)
    tasks = [(replace(template, m=m), sol) for m in ms]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_member, tasks))
    else:
        outcomes = []
        for task in tasks:
            outcomes.append(_member(task))
            if outcomes[-1][2] is not None:
                break
    for m, _, exc in outcomes:
        if exc is not None:
            raise StudyError(m, exc) from exc
    errors = {f: [] for f in FIELDS}
    for _, errs, _ in outcomes:
        for f in FIELDS:
            errors[f].append(errs[f])
    return rows_from_errors(ms, errors)


def post_shock_region(
    result: SimulationResult,
    shock_speed: float,
    margin_cells: int,
    center_cells: Optional[int] = None,
) -> tuple:
    """Index arrays (left, right) of cells strictly between the two shocks.

    Cells within margin_cells of either shock are dropped, as are cells within
    center_cells of the impact point (none by default), where the
    start-up transient leaves a permanent dip in density.
    """
    center_cells = 0 if center_cells is None else center_cells
    if margin_cells < 0 or center_cells < 0:
        raise ValueError("margins must be non-negative")
    x = result.grid.centers
    dx = result.grid.dx
    reach = shock_speed * result.t_end - margin_cells * dx
    inner = center_cells * dx * (1.0 - 1e-9)
    keep = np.abs(x) < reach
    if center_cells > 0:
        keep &= np.abs(x) >= inner
    left = np.nonzero(keep & (x < 0.0))[0]
    right = np.nonzero(keep & (x >= 0.0))[0]
    if left.size + right.size == 0:
        raise ValueError(f"post-shock region is empty for margin {margin_cells}")
    return left, right


def cluster_count(values: np.ndarray, band_width: Optional[float] = None, gap_fraction: float = 0.2) -> int:
    """Single-linkage clusters on the line with gap threshold gap_fraction * band."""
    v = np.sort(np.asarray(values, dtype=float))
    band = v[-1] - v[0] if band_width is None else band_width
    if band <= 0.0:
        return 1
    return 1 + int(np.count_nonzero(np.diff(v) > gap_fraction * band))


def density_metrics(*segments: np.ndarray):
    """(band_width, total_variation, alternation_fraction, cluster_count).

    Each segment is a run of adjacent cells; differences are never taken across
    segment boundaries, while band and clusters use all values together.
    """
    segs = [np.asarray(r, dtype=float) for r in segments if len(r) > 0]
    if not segs:
        raise ValueError("no values")
    allv = np.concatenate(segs)
    band = float(allv.max() - allv.min())
    tv = 0.0
    flips = pairs = 0
    for r in segs:
        d = np.diff(r)
        tv += float(np.sum(np.abs(d)))
        if d.size >= 2:
            flips += int(np.count_nonzero(d[1:] * d[:-1] < 0.0))
            pairs += d.size - 1
    alt = flips / pairs if pairs else 0.0
    return band, tv, alt, cluster_count(allv, band)


def oscillation_report(
    result: SimulationResult,
    sol: ImpactSolution,
    margin_cells: int = 10,
    center_cells: Optional[int] = None,
) -> OscillationReport:
    left, right = post_shock_region(result, sol.shock_speed, margin_cells, center_cells)
    rho = field_values(result, "rho")
    band, tv, alt, clusters = density_metrics(rho[left], rho[right])
    both = np.concatenate([left, right])
    return OscillationReport(
        region=(int(both.min()), int(both.max())),
        band_width=band,
        total_variation=tv,
        alternation_fraction=alt,
        cluster_count=clusters,
    )
