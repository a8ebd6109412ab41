"""Entropy-satisfying exact solution of two-state Riemann data at any (x, t)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gas import GasModel, PrimitiveState
from .riemann import SHOCK, StarState, exact_sample, exact_star


@dataclass(frozen=True)
class ImpactSolution:
    star: StarState
    left_state: PrimitiveState
    right_state: PrimitiveState
    gas: GasModel
    shock_speed: float

    @property
    def post_shock(self) -> PrimitiveState:
        return PrimitiveState(self.star.rho_star_right, self.star.u_star, self.star.p_star)


def build_impact_solution(cfg) -> ImpactSolution:
    """Exact solution for the two states of a :class:`RunConfig`.

    ``shock_speed`` is the speed of the right-going wave. For equal states
    the waves have zero strength and it reduces to the right sound speed
    shifted by the flow velocity.
    """
    star = exact_star(cfg.left_state, cfg.right_state, cfg.gas)
    return ImpactSolution(
        star=star,
        left_state=cfg.left_state,
        right_state=cfg.right_state,
        gas=cfg.gas,
        shock_speed=float(star.s_right),
    )


def evaluate(sol: ImpactSolution, x, t: float) -> PrimitiveState:
    """Exact primitive state at positions ``x`` (scalar or array) and time ``t``.

    At ``t = 0`` the initial data are returned, left state for ``x < 0``.
    """
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    L, R = sol.left_state, sol.right_state
    if t == 0:
        x = np.asarray(x, dtype=float)
        left = x < 0.0
        out = [np.where(left, a, b) for a, b in zip(L.as_tuple(), R.as_tuple())]
        if np.ndim(x) == 0:
            out = [float(v) for v in out]
        return PrimitiveState(*out)
    return exact_sample(sol.star, L, R, np.asarray(x, dtype=float) / t, sol.gas)


def both_shocks(sol: ImpactSolution) -> bool:
    return sol.star.left_wave == SHOCK and sol.star.right_wave == SHOCK
