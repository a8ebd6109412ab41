"""First-order Godunov finite-volume solver for the 1D impact problem."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .gas import (
    ConservativeState,
    DomainError,
    GasModel,
    PrimitiveState,
    check_primitive,
    prim_to_cons,
)
from ._kernels import exact_sweep, roe_state_sweep, roe_sweep
from .riemann import exact_star, roe_averages

GAMMA = 1.4
IMPACT_LEFT = PrimitiveState(1.0, 2.0, 1.0 / GAMMA)
IMPACT_RIGHT = PrimitiveState(1.0, -2.0, 1.0 / GAMMA)


class ConfigError(ValueError):
    pass


class BlowUpError(RuntimeError):
    """Positivity was lost during time stepping."""

    def __init__(self, step: int, cell: int, state, reason: str = "positivity lost"):
        self.step = step
        self.cell = cell
        self.state = state
        super().__init__(f"{reason} at step {step}, cell {cell}: (rho, mom, ener) = {state}")


@dataclass(frozen=True)
class Grid:
    m: int
    dx: float
    centers: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class FixedCfl:
    """Courant-number controlled step, recomputed every step.

    ``landing="even"`` spreads the remaining time over the fewest equal
    steps that respect the Courant limit, so the run ends on ``t_final``
    without a short last step. ``landing="clip"`` takes full CFL steps and
    shortens only the last one.
    """

    cfl: float = 0.9
    landing: str = "even"

    def __post_init__(self):
        if not 0.0 < self.cfl <= 1.0:
            raise ConfigError(f"cfl must lie in (0, 1], got {self.cfl}")
        if self.landing not in ("even", "clip"):
            raise ConfigError(f"landing must be 'even' or 'clip', got {self.landing!r}")


def _check_fixed_landing(landing):
    if landing not in ("clip", "overshoot"):
        raise ConfigError(f"landing must be 'clip' or 'overshoot', got {landing!r}")


@dataclass(frozen=True)
class FixedDt:
    """Constant step.

    ``landing="clip"`` shortens the last step to end on ``t_final``;
    ``landing="overshoot"`` keeps every step full and stops at the first
    step boundary at or after ``t_final``.
    """

    dt: float
    landing: str = "clip"

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        _check_fixed_landing(self.landing)


@dataclass(frozen=True)
class ShockLocked:
    """Shock crosses one cell in exactly ``steps_per_cell`` steps.

    ``shock_speed=None`` derives S from the exact Riemann solution of the
    run's initial data. ``landing`` as for :class:`FixedDt`.
    """

    steps_per_cell: float
    shock_speed: Optional[float] = None
    landing: str = "clip"

    def __post_init__(self):
        _check_fixed_landing(self.landing)
        if not self.steps_per_cell > 0.0:
            raise ConfigError(f"steps_per_cell must be positive, got {self.steps_per_cell}")
        if self.shock_speed is not None and not self.shock_speed > 0.0:
            raise ConfigError(f"shock_speed must be positive, got {self.shock_speed}")


TimeStepPolicy = Union[FixedCfl, FixedDt, ShockLocked]

# "roe": physical flux of Roe's linearized Riemann solution at x/t = 0
# "roe-fd": Roe's flux-difference formula
FLUXES = ("roe", "roe-fd", "exact")


@dataclass(frozen=True)
class RunConfig:
    m: int = 401
    t_final: float = 0.5
    gas: GasModel = GasModel(GAMMA)
    policy: TimeStepPolicy = FixedCfl(0.9)
    flux: str = "roe"
    entropy_fix: bool = False
    entropy_fix_coeff: float = 0.1
    left_state: PrimitiveState = IMPACT_LEFT
    right_state: PrimitiveState = IMPACT_RIGHT

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 3:
            raise ConfigError(f"m must be an integer >= 3, got {self.m}")
        if not self.t_final > 0.0:
            raise ConfigError(f"t_final must be positive, got {self.t_final}")
        if self.flux not in FLUXES:
            raise ConfigError(f"flux must be one of {FLUXES}, got {self.flux!r}")
        if self.entropy_fix and self.flux != "roe-fd":
            raise ConfigError("the entropy fix applies to the 'roe-fd' flux only")
        if not self.entropy_fix_coeff > 0.0:
            raise ConfigError(f"entropy_fix_coeff must be positive, got {self.entropy_fix_coeff}")
        try:
            check_primitive(self.left_state)
            check_primitive(self.right_state)
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc


@dataclass
class SimulationResult:
    config: RunConfig
    grid: Grid
    final_states: np.ndarray  # (3, m) conservative
    initial_states: np.ndarray
    steps_taken: int
    dt_used: float
    effective_cfl: float
    lambda_max: float
    wall_time: float
    t_end: float
    boundary_flux_integral: np.ndarray  # sum of dt * (F_right - F_left) over the run
    dt_history: np.ndarray = field(repr=False)

    @property
    def conservative(self) -> ConservativeState:
        return ConservativeState.from_array(self.final_states)

    def primitives(self) -> PrimitiveState:
        rho, mom, ener = self.final_states
        u = mom / rho
        p = (self.config.gas.gamma - 1.0) * (ener - 0.5 * mom * u)
        return PrimitiveState(rho, u, p)


def build_grid(m: int) -> Grid:
    if int(m) != m or m < 3:
        raise ConfigError(f"m must be an integer >= 3, got {m}")
    m = int(m)
    # i/(m-1) keeps both endpoints and the midpoint of odd m exact
    centers = -0.5 + np.arange(m) / (m - 1)
    centers[-1] = 0.5
    return Grid(m=m, dx=1.0 / (m - 1), centers=centers)


def init_impact(grid: Grid, cfg: RunConfig) -> np.ndarray:
    """Cell averages of the two-state data, discontinuity at x = 0."""
    UL = prim_to_cons(cfg.left_state, cfg.gas).as_array()
    UR = prim_to_cons(cfg.right_state, cfg.gas).as_array()
    w = np.clip((0.0 - (grid.centers - 0.5 * grid.dx)) / grid.dx, 0.0, 1.0)
    U = w * UL[:, None] + (1.0 - w) * UR[:, None]
    # keep untouched cells bit-exact
    U[:, w == 1.0] = UL[:, None]
    U[:, w == 0.0] = UR[:, None]
    return U


def shock_speed_of(cfg: RunConfig) -> float:
    """Right-moving shock speed of the initial Riemann problem."""
    star = exact_star(cfg.left_state, cfg.right_state, cfg.gas)
    return float(star.s_right)


def _primitive_arrays(U: np.ndarray, gamma: float):
    rho, mom, ener = U
    u = mom / rho
    p = (gamma - 1.0) * (ener - 0.5 * mom * u)
    return rho, u, p


def _with_ghosts(U: np.ndarray, cfg: RunConfig) -> PrimitiveState:
    rho, u, p = _primitive_arrays(U, cfg.gas.gamma)
    L, R = cfg.left_state, cfg.right_state
    return PrimitiveState(
        np.concatenate(([L.rho], rho, [R.rho])),
        np.concatenate(([L.u], u, [R.u])),
        np.concatenate(([L.p], p, [R.p])),
    )


def _split(q: PrimitiveState):
    left = PrimitiveState(q.rho[:-1], q.u[:-1], q.p[:-1])
    right = PrimitiveState(q.rho[1:], q.u[1:], q.p[1:])
    return left, right


def max_wave_speed(U: np.ndarray, cfg: RunConfig) -> float:
    """Largest |Roe eigenvalue| over all interfaces, ghost interfaces included."""
    left, right = _split(_with_ghosts(U, cfg))
    avg = roe_averages(left, right, cfg.gas)
    return float(np.max(np.abs(avg.u_hat) + avg.a_hat))


def compute_dt(
    states: np.ndarray,
    grid: Grid,
    policy: TimeStepPolicy,
    cfg: RunConfig,
    shock_speed: Optional[float] = None,
    wave_speed: Optional[float] = None,
) -> float:
    """Time step for the current states under ``policy``.

    ``wave_speed`` may be passed when the caller already has it; otherwise
    it is recomputed from ``states``.
    """
    if isinstance(policy, FixedDt):
        return policy.dt
    if isinstance(policy, ShockLocked):
        S = policy.shock_speed or shock_speed or shock_speed_of(cfg)
        return grid.dx / (policy.steps_per_cell * S)
    if isinstance(policy, FixedCfl):
        lam = max_wave_speed(states, cfg) if wave_speed is None else wave_speed
        if not lam > 0.0:
            raise ConfigError("maximum wave speed is zero; fixed-CFL step undefined")
        return policy.cfl * grid.dx / lam
    raise ConfigError(f"unknown time-step policy {policy!r}")


def interface_fluxes(U: np.ndarray, cfg: RunConfig):
    """Fluxes at all m+1 interfaces and the maximum Roe wave speed.

    Raises
    ------
    DomainError
        If a Roe average has no real sound speed or the exact solver fails.
    """
    q = _with_ghosts(U, cfg)
    F = np.empty((3, q.rho.shape[0] - 1))
    g = cfg.gas.gamma
    if cfg.flux == "roe":
        lam = roe_state_sweep(q.rho, q.u, q.p, g, F)
    elif cfg.flux == "roe-fd":
        fix = cfg.entropy_fix_coeff if cfg.entropy_fix else 0.0
        lam = roe_sweep(q.rho, q.u, q.p, g, fix, F)
    else:
        lam = exact_sweep(q.rho, q.u, q.p, g, F)
    if lam == -1.0:
        raise DomainError("Roe average has non-positive squared sound speed")
    if lam == -2.0:
        raise DomainError("exact Riemann solver failed (vacuum or no convergence)")
    return F, lam


def _check_positivity(U: np.ndarray, gamma: float, step: int) -> None:
    rho, u, p = _primitive_arrays(U, gamma)
    bad = ~((rho > 0.0) & (p > 0.0) & np.isfinite(p))
    if np.any(bad):
        i = int(np.argmax(bad))
        raise BlowUpError(step, i, tuple(float(v) for v in U[:, i]))


def _update(U, F, dt, dx):
    return U - (dt / dx) * (F[:, 1:] - F[:, :-1])


def step(states: np.ndarray, grid: Grid, dt: float, cfg: RunConfig, step_index: int = 0) -> np.ndarray:
    """One forward-Euler conservative update with frozen inflow ghost cells."""
    try:
        F, _ = interface_fluxes(states, cfg)
    except DomainError as exc:
        raise BlowUpError(step_index, -1, None, reason=str(exc)) from exc
    U = _update(states, F, dt, grid.dx)
    _check_positivity(U, cfg.gas.gamma, step_index)
    return U


def run(cfg: RunConfig, callback: Optional[Callable[[int, float, np.ndarray], None]] = None) -> SimulationResult:
    """Integrate from t = 0 to exactly ``cfg.t_final``.

    How the run meets ``t_final`` is set by the policy's ``landing``
    field; ``result.t_end`` records where it actually stopped. ``callback`` is
    invoked as ``callback(step, t, U)`` after every step; it must not
    modify ``U``.

    Raises
    ------
    BlowUpError
        If any cell loses positivity.
    """
    wall0 = time.perf_counter()
    grid = build_grid(cfg.m)
    U0 = init_impact(grid, cfg)
    U = U0
    policy = cfg.policy
    S = None
    if isinstance(policy, ShockLocked):
        S = policy.shock_speed or shock_speed_of(cfg)

    t = 0.0
    n = 0
    dts = []
    boundary = np.zeros(3)
    lam_max = 0.0
    cfl_max = 0.0
    dt_used = None
    while t < cfg.t_final:
        try:
            F, lam = interface_fluxes(U, cfg)
        except DomainError as exc:
            raise BlowUpError(n + 1, -1, None, reason=str(exc)) from exc
        dt = compute_dt(U, grid, policy, cfg, shock_speed=S, wave_speed=lam)
        last = t + dt >= cfg.t_final
        if isinstance(policy, FixedCfl) and policy.landing == "even":
            remaining = cfg.t_final - t
            k = math.ceil(remaining / dt * (1.0 - 1e-12))
            dt = remaining / k
            last = k == 1
        if policy.landing == "overshoot":
            t_next = (n + 1) * dt
            dt_used = dt
            cfl_max = max(cfl_max, dt * lam / grid.dx)
        elif last:
            dt = cfg.t_final - t
            t_next = cfg.t_final
        else:
            t_next = t + dt
            dt_used = dt
            cfl_max = max(cfl_max, dt * lam / grid.dx)
        lam_max = max(lam_max, lam)
        U = _update(U, F, dt, grid.dx)
        n += 1
        _check_positivity(U, cfg.gas.gamma, n)
        boundary += dt * (F[:, -1] - F[:, 0])
        dts.append(dt)
        t = t_next
        if callback is not None:
            callback(n, t, U)

    if dt_used is None:  # a single clipped step
        dt_used = dts[-1]
        cfl_max = dt_used * lam_max / grid.dx
    return SimulationResult(
        config=cfg,
        grid=grid,
        final_states=U,
        initial_states=U0,
        steps_taken=n,
        dt_used=float(dt_used),
        effective_cfl=float(cfl_max),
        lambda_max=float(lam_max),
        wall_time=time.perf_counter() - wall0,
        t_end=t,
        boundary_flux_integral=boundary,
        dt_history=np.asarray(dts),
    )
