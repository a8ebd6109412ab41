"""Exact and Roe approximate Riemann solvers for the ideal-gas Euler equations.

Every routine is vectorized: pass scalar states for a single interface or
array-valued states for a whole row of interfaces.

References
----------
Toro, E. F., *Riemann Solvers and Numerical Methods for Fluid Dynamics*,
3rd ed., Springer, 2009, ch. 4 (exact solver) and ch. 11 (Roe).
Roe, P. L., J. Comput. Phys. 43 (1981) 357-372.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .gas import (
    DomainError,
    FluxVector,
    GasModel,
    Number,
    PrimitiveState,
    check_primitive,
    physical_flux,
    prim_to_cons,
    sound_speed,
    total_enthalpy,
)

SHOCK = "shock"
RAREFACTION = "rarefaction"

NEWTON_MAX_ITER = 100
P_RTOL = 1e-12
P_FLOOR = 1e-12


class VacuumError(DomainError):
    """The two states separate fast enough to open a vacuum."""


class RiemannConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class StarState:
    """Wave structure of an exact Riemann solution.

    ``s_left`` and ``s_right`` are the outermost signal speeds. For a shock
    they equal the shock speed; for a rarefaction they are the head speed and
    the matching ``*_tail`` field holds the tail speed. For shocks the tail
    field repeats the shock speed so that ``s_left <= left_tail <= u_star``
    always holds.
    """

    p_star: Number
    u_star: Number
    rho_star_left: Number
    rho_star_right: Number
    left_wave: object
    right_wave: object
    s_left: Number
    s_right: Number
    left_tail: Number
    right_tail: Number


@dataclass(frozen=True)
class RoeAverages:
    rho_hat: Number
    u_hat: Number
    h_hat: Number
    a_hat: Number
    lam: tuple
    wave_strengths: tuple

    def eigenvectors(self):
        """Right eigenvectors r_1, r_2, r_3 as (3, ...) arrays."""
        u, h, a = self.u_hat, self.h_hat, self.a_hat
        one = np.ones_like(np.asarray(u, dtype=float))
        return (
            np.array([one, u - a, h - u * a]),
            np.array([one, u, 0.5 * u * u]),
            np.array([one, u + a, h + u * a]),
        )


# ---------------------------------------------------------------- exact solver


def _pressure_function(p, rho_k, p_k, a_k, g):
    """Toro's f_K(p) and its derivative for one side, vectorized."""
    A = 2.0 / ((g + 1.0) * rho_k)
    B = (g - 1.0) / (g + 1.0) * p_k
    shock = p > p_k
    with np.errstate(invalid="ignore", divide="ignore"):
        root = np.sqrt(A / (p + B))
        f_shock = (p - p_k) * root
        df_shock = root * (1.0 - 0.5 * (p - p_k) / (B + p))
        ratio = p / p_k
        z = (g - 1.0) / (2.0 * g)
        f_rare = 2.0 * a_k / (g - 1.0) * (ratio**z - 1.0)
        df_rare = ratio ** (-(g + 1.0) / (2.0 * g)) / (rho_k * a_k)
    return np.where(shock, f_shock, f_rare), np.where(shock, df_shock, df_rare)


def pressure_residual(p, left: PrimitiveState, right: PrimitiveState, gas: GasModel):
    """f_L(p) + f_R(p) + (u_R - u_L); its root is the star pressure."""
    g = gas.gamma
    aL, aR = sound_speed(left, gas), sound_speed(right, gas)
    fL, _ = _pressure_function(p, left.rho, left.p, aL, g)
    fR, _ = _pressure_function(p, right.rho, right.p, aR, g)
    return fL + fR + (right.u - left.u)


def _two_rarefaction_guess(left, right, aL, aR, g):
    z = (g - 1.0) / (2.0 * g)
    num = aL + aR - 0.5 * (g - 1.0) * (right.u - left.u)
    den = aL / left.p**z + aR / right.p**z
    return (num / den) ** (1.0 / z)


def _bisect_pressure(left, right, gas, aL, aR, du):
    g = gas.gamma
    lo = np.full(np.shape(du), P_FLOOR)
    hi = np.maximum(left.p, right.p) * np.ones(np.shape(du))

    def resid(p):
        fL, _ = _pressure_function(p, left.rho, left.p, aL, g)
        fR, _ = _pressure_function(p, right.rho, right.p, aR, g)
        return fL + fR + du

    # residual is increasing in p; widen hi until the root is bracketed
    for _ in range(200):
        bad = resid(hi) < 0.0
        if not np.any(bad):
            break
        hi = np.where(bad, 2.0 * hi, hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        neg = resid(mid) < 0.0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
        if np.all(hi - lo <= P_RTOL * hi):
            return 0.5 * (lo + hi)
    raise RiemannConvergenceError("bisection on the pressure function did not converge")


def star_pressure(left: PrimitiveState, right: PrimitiveState, gas: GasModel):
    """Root of the pressure function.

    Newton from the two-rarefaction guess; entries still unconverged after
    ``NEWTON_MAX_ITER`` iterations fall back to bisection.
    """
    g = gas.gamma
    aL, aR = sound_speed(left, gas), sound_speed(right, gas)
    du = right.u - left.u
    if np.any(2.0 / (g - 1.0) * (aL + aR) <= du):
        raise VacuumError("Riemann data generate vacuum")

    p = np.maximum(_two_rarefaction_guess(left, right, aL, aR, g), P_FLOOR)
    done = np.zeros(np.shape(p), dtype=bool)
    for _ in range(NEWTON_MAX_ITER):
        fL, dfL = _pressure_function(p, left.rho, left.p, aL, g)
        fR, dfR = _pressure_function(p, right.rho, right.p, aR, g)
        p_new = p - (fL + fR + du) / (dfL + dfR)
        p_new = np.where(np.isfinite(p_new), np.maximum(p_new, P_FLOOR), P_FLOOR)
        change = np.abs(p_new - p) <= P_RTOL * p_new
        p = np.where(done, p, p_new)
        done = done | change
        if np.all(done):
            return p

    if np.ndim(p) == 0:
        return _bisect_pressure(left, right, gas, aL, aR, du)
    sel = ~done
    sub = lambda q: PrimitiveState(*(np.broadcast_to(c, p.shape)[sel] for c in q.as_tuple()))
    p = p.copy()
    lsub, rsub = sub(left), sub(right)
    p[sel] = _bisect_pressure(
        lsub, rsub, gas, sound_speed(lsub, gas), sound_speed(rsub, gas), rsub.u - lsub.u
    )
    return p


def _side_star(p_star, u_star, q, a, g, sign):
    """Star density and wave speeds on one side; sign=-1 left, +1 right."""
    shock = p_star > q.p
    gm = (g - 1.0) / (g + 1.0)
    ratio = p_star / q.p
    rho_shock = q.rho * (ratio + gm) / (gm * ratio + 1.0)
    rho_rare = q.rho * ratio ** (1.0 / g)
    speed_shock = q.u + sign * a * np.sqrt((g + 1.0) / (2.0 * g) * ratio + (g - 1.0) / (2.0 * g))
    a_star = a * ratio ** ((g - 1.0) / (2.0 * g))
    head = q.u + sign * a
    tail = u_star + sign * a_star
    rho_s = np.where(shock, rho_shock, rho_rare)
    outer = np.where(shock, speed_shock, head)
    inner = np.where(shock, speed_shock, tail)
    kind = np.where(shock, SHOCK, RAREFACTION)
    if np.ndim(kind) == 0:
        kind = str(kind)
        rho_s, outer, inner = float(rho_s), float(outer), float(inner)
    return rho_s, outer, inner, kind


def exact_star(left: PrimitiveState, right: PrimitiveState, gas: GasModel) -> StarState:
    """Solve the Riemann problem for the star region.

    Raises
    ------
    VacuumError
        If the data would create a vacuum.
    RiemannConvergenceError
        If neither Newton nor the bisection fallback converges.
    """
    check_primitive(left)
    check_primitive(right)
    g = gas.gamma
    aL, aR = sound_speed(left, gas), sound_speed(right, gas)
    p_star = star_pressure(left, right, gas)
    fL, _ = _pressure_function(p_star, left.rho, left.p, aL, g)
    fR, _ = _pressure_function(p_star, right.rho, right.p, aR, g)
    u_star = 0.5 * (left.u + right.u) + 0.5 * (fR - fL)
    rho_l, s_l, tail_l, kind_l = _side_star(p_star, u_star, left, aL, g, -1.0)
    rho_r, s_r, tail_r, kind_r = _side_star(p_star, u_star, right, aR, g, +1.0)
    if np.ndim(p_star) == 0:
        p_star, u_star = float(p_star), float(u_star)
    return StarState(p_star, u_star, rho_l, rho_r, kind_l, kind_r, s_l, s_r, tail_l, tail_r)


def exact_sample(
    star: StarState,
    left: PrimitiveState,
    right: PrimitiveState,
    xi: Number,
    gas: GasModel,
) -> PrimitiveState:
    """Self-similar solution at ``xi = x / t``.

    A point sitting exactly on a shock gets the star-side value.
    """
    g = gas.gamma
    xi = np.asarray(xi, dtype=float)
    aL, aR = sound_speed(left, gas), sound_speed(right, gas)
    p_s, u_s = star.p_star, star.u_star
    left_shock = star.p_star > left.p
    right_shock = star.p_star > right.p

    c1 = 2.0 / (g + 1.0)
    c2 = (g - 1.0) / (g + 1.0)
    expo = 2.0 / (g - 1.0)
    with np.errstate(invalid="ignore"):
        # left fan
        a_fl = c1 * aL + c2 * (left.u - xi)
        u_fl = c1 * (aL + 0.5 * (g - 1.0) * left.u + xi)
        rho_fl = left.rho * (a_fl / aL) ** expo
        p_fl = left.p * (a_fl / aL) ** (g * expo)
        # right fan
        a_fr = c1 * aR - c2 * (right.u - xi)
        u_fr = c1 * (-aR + 0.5 * (g - 1.0) * right.u + xi)
        rho_fr = right.rho * (a_fr / aR) ** expo
        p_fr = right.p * (a_fr / aR) ** (g * expo)

    # left of contact
    in_left = np.where(left_shock, xi < star.s_left, xi <= star.s_left)
    in_lfan = ~left_shock & (xi > star.s_left) & (xi < star.left_tail)
    # right of contact
    in_right = np.where(right_shock, xi > star.s_right, xi >= star.s_right)
    in_rfan = ~right_shock & (xi < star.s_right) & (xi > star.right_tail)
    on_left = xi < u_s

    def pick(lv, lfan, lstar, rstar, rfan, rv):
        left_side = np.where(in_left, lv, np.where(in_lfan, lfan, lstar))
        right_side = np.where(in_right, rv, np.where(in_rfan, rfan, rstar))
        out = np.where(on_left, left_side, right_side)
        return float(out) if np.ndim(out) == 0 else out

    rho = pick(left.rho, rho_fl, star.rho_star_left, star.rho_star_right, rho_fr, right.rho)
    u = pick(left.u, u_fl, u_s, u_s, u_fr, right.u)
    p = pick(left.p, p_fl, p_s, p_s, p_fr, right.p)
    return PrimitiveState(rho, u, p)


def exact_flux(left: PrimitiveState, right: PrimitiveState, gas: GasModel) -> FluxVector:
    """Godunov flux from the exact solution sampled at x/t = 0."""
    star = exact_star(left, right, gas)
    return physical_flux(exact_sample(star, left, right, 0.0, gas), gas)


def rankine_hugoniot_residual(pre: PrimitiveState, post: PrimitiveState, speed, gas: GasModel):
    """Relative residual of S [U] = [F(U)] across a discontinuity.

    Returns the largest component of ``|S (U_post - U_pre) - (F_post - F_pre)|``
    scaled by the largest flux magnitude involved.
    """
    Upre = prim_to_cons(pre, gas).as_array()
    Upost = prim_to_cons(post, gas).as_array()
    Fpre = physical_flux(pre, gas).as_array()
    Fpost = physical_flux(post, gas).as_array()
    resid = np.abs(speed * (Upost - Upre) - (Fpost - Fpre))
    scale = np.maximum.reduce(
        [np.abs(Fpre), np.abs(Fpost), np.abs(speed * Upre), np.abs(speed * Upost)]
    ).max(axis=0)
    return np.max(resid / scale, axis=0)


# ------------------------------------------------------------------------- Roe


def roe_averages(left: PrimitiveState, right: PrimitiveState, gas: GasModel) -> RoeAverages:
    g = gas.gamma
    sl, sr = np.sqrt(left.rho), np.sqrt(right.rho)
    w = sl + sr
    u = (sl * left.u + sr * right.u) / w
    h = (sl * total_enthalpy(left, gas) + sr * total_enthalpy(right, gas)) / w
    a2 = (g - 1.0) * (h - 0.5 * u * u)
    if not np.all(np.asarray(a2) > 0.0):
        raise DomainError("Roe average has non-positive squared sound speed")
    a = np.sqrt(a2)

    UL, UR = prim_to_cons(left, gas), prim_to_cons(right, gas)
    d1, d2, d3 = UR.rho - UL.rho, UR.mom - UL.mom, UR.ener - UL.ener
    alpha2 = (g - 1.0) / a2 * (d1 * (h - u * u) + u * d2 - d3)
    alpha1 = (d1 * (u + a) - d2 - a * alpha2) / (2.0 * a)
    alpha3 = d1 - (alpha1 + alpha2)
    return RoeAverages(
        rho_hat=sl * sr,
        u_hat=u,
        h_hat=h,
        a_hat=a,
        lam=(u - a, u, u + a),
        wave_strengths=(alpha1, alpha2, alpha3),
    )


def harten_abs(lam, delta):
    """|lam| smoothed to a parabola inside |lam| < delta."""
    mag = np.abs(lam)
    with np.errstate(invalid="ignore", divide="ignore"):
        smooth = (lam * lam + delta * delta) / (2.0 * delta)
    return np.where(mag < delta, smooth, mag)


def roe_flux(
    left: PrimitiveState,
    right: PrimitiveState,
    gas: GasModel,
    entropy_fix: Optional[float] = None,
    averages: Optional[RoeAverages] = None,
) -> FluxVector:
    """Roe flux ``(F_L + F_R)/2 - sum_k |lam_k| alpha_k r_k / 2``.

    Parameters
    ----------
    entropy_fix
        ``None`` (default) disables the fix. A float ``c`` enables Harten
        smoothing with threshold ``delta = c * a_hat``.
    averages
        Precomputed :func:`roe_averages` for the same pair, to avoid
        recomputing them inside a time loop.
    """
    avg = averages if averages is not None else roe_averages(left, right, gas)
    FL, FR = physical_flux(left, gas), physical_flux(right, gas)
    if entropy_fix is None:
        mags = [np.abs(l) for l in avg.lam]
    else:
        delta = entropy_fix * avg.a_hat
        mags = [harten_abs(l, delta) for l in avg.lam]
    r1, r2, r3 = avg.eigenvectors()
    a1, a2, a3 = avg.wave_strengths
    diss = mags[0] * a1 * r1 + mags[1] * a2 * r2 + mags[2] * a3 * r3
    return FluxVector(
        0.5 * (FL.mass + FR.mass) - 0.5 * diss[0],
        0.5 * (FL.momentum + FR.momentum) - 0.5 * diss[1],
        0.5 * (FL.energy + FR.energy) - 0.5 * diss[2],
    )


def roe_state(
    left: PrimitiveState,
    right: PrimitiveState,
    gas: GasModel,
    averages: Optional[RoeAverages] = None,
) -> PrimitiveState:
    """State of Roe's linearized Riemann solution on the ray x/t = 0.

    ``U* = U_L + sum over waves with lam_k < 0 of alpha_k r_k``; a wave with
    lam_k == 0 contributes half, which keeps the flux mirror-equivariant.
    Nothing guarantees positivity of the result for strong jumps.
    """
    avg = averages if averages is not None else roe_averages(left, right, gas)
    UL = prim_to_cons(left, gas)
    s = [UL.rho, UL.mom, UL.ener]
    moved = np.zeros(np.shape(avg.u_hat), dtype=bool)
    for lam, alpha, r in zip(avg.lam, avg.wave_strengths, avg.eigenvectors()):
        # a wave sitting exactly on x/t = 0 contributes half its jump
        weight = np.where(np.asarray(lam) < 0.0, 1.0, np.where(np.asarray(lam) == 0.0, 0.5, 0.0))
        moved |= (weight > 0.0) & (np.asarray(alpha) != 0.0)
        for c in range(3):
            s[c] = np.where(weight > 0.0, s[c] + weight * alpha * r[c], s[c])
    rho, mom, ener = s
    u = mom / rho
    p = (gas.gamma - 1.0) * (ener - 0.5 * mom * u)
    # when no wave crosses to the left, or all do, the interface takes a data
    # state directly; no conversion roundoff enters and roe_state(q, q) == q
    all_right = ~moved
    all_left = np.asarray(avg.lam[2]) < 0.0
    rho = np.where(all_right, left.rho, np.where(all_left, right.rho, rho))
    u = np.where(all_right, left.u, np.where(all_left, right.u, u))
    p = np.where(all_right, left.p, np.where(all_left, right.p, p))
    if np.ndim(rho) == 0:
        rho, u, p = float(rho), float(u), float(p)
    return PrimitiveState(rho, u, p)


def roe_godunov_flux(
    left: PrimitiveState,
    right: PrimitiveState,
    gas: GasModel,
    averages: Optional[RoeAverages] = None,
) -> FluxVector:
    """Physical flux of :func:`roe_state`.

    This is the Godunov flux with the exact Riemann solution replaced by
    Roe's linearization. It differs from :func:`roe_flux` whenever a wave
    straddles x/t = 0 with the others on both sides.
    """
    return physical_flux(roe_state(left, right, gas, averages), gas)
