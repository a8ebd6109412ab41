"""Compiled interface sweeps used by the time loop.

Each sweep reproduces a reference routine in :mod:`impactlab.riemann` with
the same formulas and operation order; the test suite checks every pair.
All sweeps write ``F[:, j]`` for the interface between entries j and j+1 and
return the largest Roe wave speed ``|u_hat| + a_hat``, or -1.0 when a Roe
average has no real sound speed.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _roe_avg(rl, ul, pl, rr, ur, pr, gamma):
    g1 = gamma - 1.0
    gg = gamma / g1
    sl = math.sqrt(rl)
    sr = math.sqrt(rr)
    w = sl + sr
    hl = gg * pl / rl + 0.5 * ul * ul
    hr = gg * pr / rr + 0.5 * ur * ur
    uh = (sl * ul + sr * ur) / w
    hh = (sl * hl + sr * hr) / w
    a2 = g1 * (hh - 0.5 * uh * uh)
    return uh, hh, a2


@njit(cache=True, inline="always")
def _strengths(rl, ul, pl, rr, ur, pr, g1, uh, hh, a2, a):
    d1 = rr - rl
    d2 = rr * ur - rl * ul
    d3 = (rr * (pr / (rr * g1) + 0.5 * ur * ur)) - (rl * (pl / (rl * g1) + 0.5 * ul * ul))
    al2 = g1 / a2 * (d1 * (hh - uh * uh) + uh * d2 - d3)
    al1 = (d1 * (uh + a) - d2 - a * al2) / (2.0 * a)
    al3 = d1 - (al1 + al2)
    return al1, al2, al3


@njit(cache=True)
def roe_sweep(rho, u, p, gamma, fix_coeff, F):
    """Flux-difference Roe flux; ``fix_coeff <= 0`` disables the entropy fix."""
    g1 = gamma - 1.0
    lam_max = 0.0
    for j in range(rho.shape[0] - 1):
        rl, ul, pl = rho[j], u[j], p[j]
        rr, ur, pr = rho[j + 1], u[j + 1], p[j + 1]
        uh, hh, a2 = _roe_avg(rl, ul, pl, rr, ur, pr, gamma)
        if not a2 > 0.0:
            return -1.0
        a = math.sqrt(a2)
        lam_max = max(lam_max, abs(uh) + a)
        al1, al2, al3 = _strengths(rl, ul, pl, rr, ur, pr, g1, uh, hh, a2, a)

        m1 = abs(uh - a)
        m2 = abs(uh)
        m3 = abs(uh + a)
        if fix_coeff > 0.0:
            delta = fix_coeff * a
            if m1 < delta:
                m1 = ((uh - a) * (uh - a) + delta * delta) / (2.0 * delta)
            if m2 < delta:
                m2 = (uh * uh + delta * delta) / (2.0 * delta)
            if m3 < delta:
                m3 = ((uh + a) * (uh + a) + delta * delta) / (2.0 * delta)

        diss0 = m1 * al1 * 1.0 + m2 * al2 * 1.0 + m3 * al3 * 1.0
        diss1 = m1 * al1 * (uh - a) + m2 * al2 * uh + m3 * al3 * (uh + a)
        diss2 = m1 * al1 * (hh - uh * a) + m2 * al2 * (0.5 * uh * uh) + m3 * al3 * (hh + uh * a)

        el = pl / g1 + 0.5 * rl * ul * ul
        er = pr / g1 + 0.5 * rr * ur * ur
        ml = rl * ul
        mr = rr * ur
        F[0, j] = 0.5 * (ml + mr) - 0.5 * diss0
        F[1, j] = 0.5 * ((ml * ul + pl) + (mr * ur + pr)) - 0.5 * diss1
        F[2, j] = 0.5 * (ul * (el + pl) + ur * (er + pr)) - 0.5 * diss2
    return lam_max


@njit(cache=True, inline="always")
def _side_weight(lam):
    if lam < 0.0:
        return 1.0
    if lam == 0.0:
        return 0.5
    return 0.0


@njit(cache=True)
def roe_state_sweep(rho, u, p, gamma, F):
    """Physical flux of Roe's linearized Riemann solution at x/t = 0."""
    g1 = gamma - 1.0
    lam_max = 0.0
    for j in range(rho.shape[0] - 1):
        rl, ul, pl = rho[j], u[j], p[j]
        rr, ur, pr = rho[j + 1], u[j + 1], p[j + 1]
        uh, hh, a2 = _roe_avg(rl, ul, pl, rr, ur, pr, gamma)
        if not a2 > 0.0:
            return -1.0
        a = math.sqrt(a2)
        lam_max = max(lam_max, abs(uh) + a)
        al1, al2, al3 = _strengths(rl, ul, pl, rr, ur, pr, g1, uh, hh, a2, a)

        # weight 1 for left-going waves, 1/2 for a wave sitting on x/t = 0
        w1 = _side_weight(uh - a)
        w2 = _side_weight(uh)
        w3 = _side_weight(uh + a)
        moved = (w1 > 0.0 and al1 != 0.0) or (w2 > 0.0 and al2 != 0.0) or (w3 > 0.0 and al3 != 0.0)
        if not moved:
            s0, us, ps = rl, ul, pl
        elif uh + a < 0.0:
            s0, us, ps = rr, ur, pr
        else:
            s0 = rl
            s1 = rl * ul
            s2 = rl * (pl / (rl * g1) + 0.5 * ul * ul)
            if w1 > 0.0:
                s0 = s0 + w1 * al1
                s1 = s1 + w1 * al1 * (uh - a)
                s2 = s2 + w1 * al1 * (hh - uh * a)
            if w2 > 0.0:
                s0 = s0 + w2 * al2
                s1 = s1 + w2 * al2 * uh
                s2 = s2 + w2 * al2 * (0.5 * uh * uh)
            if w3 > 0.0:
                s0 = s0 + w3 * al3
                s1 = s1 + w3 * al3 * (uh + a)
                s2 = s2 + w3 * al3 * (hh + uh * a)
            us = s1 / s0
            ps = g1 * (s2 - 0.5 * s1 * us)
        es = ps / g1 + 0.5 * s0 * us * us
        ms = s0 * us
        F[0, j] = ms
        F[1, j] = ms * us + ps
        F[2, j] = us * (es + ps)
    return lam_max


@njit(cache=True, inline="always")
def _fk(pp, rk, pk, ak, g):
    """Toro's pressure function for one side and its derivative."""
    if pp > pk:
        A = 2.0 / ((g + 1.0) * rk)
        B = (g - 1.0) / (g + 1.0) * pk
        root = math.sqrt(A / (pp + B))
        return (pp - pk) * root, root * (1.0 - 0.5 * (pp - pk) / (B + pp))
    ratio = pp / pk
    # ratio^(-(g+1)/(2g)) = ratio^z / ratio with z = (g-1)/(2g): one power only
    q = ratio ** ((g - 1.0) / (2.0 * g))
    return 2.0 * ak / (g - 1.0) * (q - 1.0), q / (ratio * rk * ak)


@njit(cache=True)
def _star_pressure(rl, ul, pl, al, rr, ur, pr, ar, g):
    z = (g - 1.0) / (2.0 * g)
    du = ur - ul
    num = al + ar - 0.5 * (g - 1.0) * du
    den = al / pl**z + ar / pr**z
    pp = max((num / den) ** (1.0 / z), 1e-12)
    for _ in range(100):
        fl, dfl = _fk(pp, rl, pl, al, g)
        fr, dfr = _fk(pp, rr, pr, ar, g)
        p_new = pp - (fl + fr + du) / (dfl + dfr)
        if not math.isfinite(p_new) or p_new < 1e-12:
            p_new = 1e-12
        if abs(p_new - pp) <= 1e-12 * p_new:
            return p_new
        pp = p_new
    # bisection fallback
    lo = 1e-12
    hi = max(pl, pr)
    for _ in range(200):
        fl, _d = _fk(hi, rl, pl, al, g)
        fr, _d = _fk(hi, rr, pr, ar, g)
        if fl + fr + du >= 0.0:
            break
        hi = 2.0 * hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fl, _d = _fk(mid, rl, pl, al, g)
        fr, _d = _fk(mid, rr, pr, ar, g)
        if fl + fr + du < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * hi:
            return 0.5 * (lo + hi)
    return -1.0


@njit(cache=True)
def exact_sweep(rho, u, p, gamma, F):
    """Godunov flux from the exact Riemann solution sampled at x/t = 0.

    Returns -2.0 on vacuum generation or root-finder failure.
    """
    g = gamma
    g1 = g - 1.0
    lam_max = 0.0
    for j in range(rho.shape[0] - 1):
        rl, ul, pl = rho[j], u[j], p[j]
        rr, ur, pr = rho[j + 1], u[j + 1], p[j + 1]
        uh, hh, a2 = _roe_avg(rl, ul, pl, rr, ur, pr, gamma)
        if not a2 > 0.0:
            return -1.0
        lam_max = max(lam_max, abs(uh) + math.sqrt(a2))

        if rl == rr and ul == ur and pl == pr:
            # uniform data: the solution is the state itself
            r0, u0, p0 = rl, ul, pl
            e0 = p0 / g1 + 0.5 * r0 * u0 * u0
            m0 = r0 * u0
            F[0, j] = m0
            F[1, j] = m0 * u0 + p0
            F[2, j] = u0 * (e0 + p0)
            continue
        al = math.sqrt(g * pl / rl)
        ar = math.sqrt(g * pr / rr)
        if 2.0 / g1 * (al + ar) <= ur - ul:
            return -2.0
        ps = _star_pressure(rl, ul, pl, al, rr, ur, pr, ar, g)
        if ps < 0.0:
            return -2.0
        fl, _d = _fk(ps, rl, pl, al, g)
        fr, _d = _fk(ps, rr, pr, ar, g)
        us = 0.5 * (ul + ur) + 0.5 * (fr - fl)

        c1 = 2.0 / (g + 1.0)
        c2 = g1 / (g + 1.0)
        expo = 2.0 / g1
        if 0.0 < us:
            # left of the contact
            ratio = ps / pl
            if ps > pl:
                s = ul - al * math.sqrt((g + 1.0) / (2.0 * g) * ratio + g1 / (2.0 * g))
                if 0.0 < s:
                    r0, u0, p0 = rl, ul, pl
                else:
                    r0, u0, p0 = rl * (ratio + c2) / (c2 * ratio + 1.0), us, ps
            else:
                head = ul - al
                tail = us - al * ratio ** (g1 / (2.0 * g))
                if 0.0 <= head:
                    r0, u0, p0 = rl, ul, pl
                elif 0.0 < tail:
                    af = c1 * al + c2 * ul
                    r0 = rl * (af / al) ** expo
                    u0 = c1 * (al + 0.5 * g1 * ul)
                    p0 = pl * (af / al) ** (g * expo)
                else:
                    r0, u0, p0 = rl * ratio ** (1.0 / g), us, ps
        else:
            ratio = ps / pr
            if ps > pr:
                s = ur + ar * math.sqrt((g + 1.0) / (2.0 * g) * ratio + g1 / (2.0 * g))
                if 0.0 > s:
                    r0, u0, p0 = rr, ur, pr
                else:
                    r0, u0, p0 = rr * (ratio + c2) / (c2 * ratio + 1.0), us, ps
            else:
                head = ur + ar
                tail = us + ar * ratio ** (g1 / (2.0 * g))
                if 0.0 >= head:
                    r0, u0, p0 = rr, ur, pr
                elif 0.0 > tail:
                    af = c1 * ar - c2 * ur
                    r0 = rr * (af / ar) ** expo
                    u0 = c1 * (-ar + 0.5 * g1 * ur)
                    p0 = pr * (af / ar) ** (g * expo)
                else:
                    r0, u0, p0 = rr * ratio ** (1.0 / g), us, ps

        e0 = p0 / g1 + 0.5 * r0 * u0 * u0
        m0 = r0 * u0
        F[0, j] = m0
        F[1, j] = m0 * u0 + p0
        F[2, j] = u0 * (e0 + p0)
    return lam_max
