"""Ideal-gas Euler state algebra.

State containers hold either scalars or equally shaped numpy arrays, so the
same functions serve single-state checks and whole-grid sweeps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

Number = Union[float, np.ndarray]


class DomainError(ValueError):
    """A state left the physically admissible set (rho <= 0 or p <= 0)."""


@dataclass(frozen=True)
class GasModel:
    gamma: float = 1.4

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise DomainError(f"gamma must exceed 1, got {self.gamma!r}")


@dataclass(frozen=True)
class PrimitiveState:
    rho: Number
    u: Number
    p: Number

    def as_tuple(self):
        return (self.rho, self.u, self.p)

    def mirrored(self) -> "PrimitiveState":
        """Same state seen in the reflected frame x -> -x."""
        return PrimitiveState(self.rho, -self.u, self.p)


@dataclass(frozen=True)
class ConservativeState:
    rho: Number
    mom: Number
    ener: Number

    def as_array(self) -> np.ndarray:
        return np.array([self.rho, self.mom, self.ener], dtype=float)

    @classmethod
    def from_array(cls, U) -> "ConservativeState":
        U = np.asarray(U, dtype=float)
        return cls(U[0], U[1], U[2])


@dataclass(frozen=True)
class FluxVector:
    mass: Number
    momentum: Number
    energy: Number

    def as_array(self) -> np.ndarray:
        return np.array([self.mass, self.momentum, self.energy], dtype=float)


def check_primitive(q: PrimitiveState) -> None:
    rho, p = np.asarray(q.rho), np.asarray(q.p)
    if not (np.all(rho > 0.0) and np.all(p > 0.0)):
        raise DomainError(f"non-positive density or pressure in {q!r}")


# Error-free transformations (Dekker/Knuth). The kinetic energy is carried to
# double-double precision so that the conversions below round once on the
# total energy and the roundtrip loses only what the stored E and rho*u lose.
_SPLIT = 134217729.0  # 2**27 + 1


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a):
    c = _SPLIT * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a, b):
    x = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return x, al * bl - (((x - ah * bh) - al * bh) - ah * bl)


def prim_to_cons(q: PrimitiveState, gas: GasModel) -> ConservativeState:
    check_primitive(q)
    rho, u, p = q.rho, q.u, q.p
    t, t_err = _two_prod(rho, u)
    k, k_err = _two_prod(t, u)
    k_err = k_err + t_err * u
    s, s_err = _two_sum(p / (gas.gamma - 1.0), 0.5 * k)
    return ConservativeState(rho, t, s + (s_err + 0.5 * k_err))


def cons_to_prim(U: ConservativeState, gas: GasModel) -> PrimitiveState:
    """Invert :func:`prim_to_cons`.

    Raises
    ------
    DomainError
        If the density or the recovered pressure is not strictly positive.
        Inside a time loop this is how a blow-up first shows itself.
    """
    rho = np.asarray(U.rho, dtype=float)
    if not np.all(rho > 0.0):
        raise DomainError(f"non-positive density in {U!r}")
    u = U.mom / U.rho
    # kinetic energy mom^2 / (2 rho) with its rounding error kept
    m2, m2_err = _two_prod(U.mom, U.mom)
    k = m2 / U.rho
    kr, kr_err = _two_prod(k, U.rho)
    k_err = ((m2 - kr) - kr_err + m2_err) / U.rho
    d, d_err = _two_sum(U.ener, -0.5 * k)
    p = (gas.gamma - 1.0) * (d + (d_err - 0.5 * k_err))
    if not np.all(np.asarray(p) > 0.0):
        raise DomainError(f"non-positive pressure recovered from {U!r}")
    return PrimitiveState(U.rho, u, p)


def physical_flux(q: PrimitiveState, gas: GasModel) -> FluxVector:
    rho, u, p = q.rho, q.u, q.p
    ener = p / (gas.gamma - 1.0) + 0.5 * rho * u * u
    mass = rho * u
    return FluxVector(mass, mass * u + p, u * (ener + p))


def sound_speed(q: PrimitiveState, gas: GasModel) -> Number:
    return np.sqrt(gas.gamma * q.p / q.rho)


def max_signal_speed(q: PrimitiveState, gas: GasModel) -> Number:
    return np.abs(q.u) + sound_speed(q, gas)


def total_enthalpy(q: PrimitiveState, gas: GasModel) -> Number:
    """H = (rho E + p) / rho."""
    return gas.gamma / (gas.gamma - 1.0) * q.p / q.rho + 0.5 * q.u * q.u
