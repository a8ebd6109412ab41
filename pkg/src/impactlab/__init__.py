"""First-order Godunov laboratory for the symmetric impact problem."""

from .gas import (
    ConservativeState,
    DomainError,
    FluxVector,
    GasModel,
    PrimitiveState,
    cons_to_prim,
    max_signal_speed,
    physical_flux,
    prim_to_cons,
    sound_speed,
)
from .riemann import (
    RoeAverages,
    StarState,
    VacuumError,
    exact_flux,
    exact_sample,
    exact_star,
    roe_averages,
    roe_flux,
    roe_godunov_flux,
    roe_state,
)
from .solver import (
    BlowUpError,
    ConfigError,
    FixedCfl,
    FixedDt,
    Grid,
    RunConfig,
    ShockLocked,
    SimulationResult,
    build_grid,
    compute_dt,
    init_impact,
    run,
    step,
)
from .reference import ImpactSolution, build_impact_solution, evaluate
from .analysis import (
    ConvergenceRow,
    OscillationReport,
    convergence_study,
    l1_error,
    oscillation_report,
)

__version__ = "0.1.0"
