"""Construction and verification of steady solutions.

Smooth steady solutions with nonzero velocity are isentropic and carry a
constant triplet (q0, H0, s0): momentum, total enthalpy h + phi and specific
entropy.  Density then solves the scalar equation

    gamma*kappa/(gamma-1) * rho^(gamma-1) + q0^2/(2 rho^2) + phi = H0,

with kappa = exp(-s0).  The residual of that equation has a single minimum at
the sonic density rho_s = (q0^2/(gamma*kappa))^(1/(gamma+1)); the subsonic
root lies above rho_s, the supersonic one below.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .euler import (
    ConservedState,
    GasModel,
    PrimitiveState,
    specific_entropy,
    total_enthalpy,
)


class EquilibriumDomainError(ValueError):
    """The requested steady state does not exist at this potential value."""


class ConvergenceError(RuntimeError):
    """Root finding for the steady density did not converge."""


class Branch(enum.Enum):
    SUBSONIC = "subsonic"
    SUPERSONIC = "supersonic"


@dataclass(frozen=True)
class EquilibriumTriplet:
    """Constants (q0, H0, s0) characterizing a moving steady solution."""

    q0: float
    H0: float
    s0: float

    @property
    def kappa(self) -> float:
        return math.exp(-self.s0)


@dataclass
class IssResidual:
    """Jumps of (q, H, s) across an interface and their Euclidean norm."""

    dq: np.ndarray | float
    dH: np.ndarray | float
    ds: np.ndarray | float
    norm: np.ndarray | float


def hydrostatic_isentropic(phi, H0, kappa, gas: GasModel) -> PrimitiveState:
    """Isentropic atmosphere: u = 0, rho = ((gamma-1)(H0-phi)/(gamma kappa))^(1/(gamma-1)),
    p = kappa rho^gamma.  Fails where the atmosphere is cut off (radicand <= 0)."""
    radicand = (gas.gamma - 1.0) * (H0 - np.asarray(phi, dtype=float)) / (gas.gamma * kappa)
    if np.any(~(radicand > 0.0)):
        raise EquilibriumDomainError("atmosphere cutoff: H0 - phi must stay positive")
    rho = radicand ** (1.0 / (gas.gamma - 1.0))
    return PrimitiveState(rho, np.zeros_like(rho), kappa * rho**gas.gamma)


def hydrostatic_isothermal(phi, rt) -> PrimitiveState:
    """Isothermal atmosphere: rho = exp(-phi/RT), p = RT*rho, u = 0."""
    if not rt > 0.0:
        raise ValueError("RT must be positive")
    rho = np.exp(-np.asarray(phi) / rt)
    return PrimitiveState(rho, np.zeros_like(rho), rt * rho)


def sonic_density(q0, kappa, gas: GasModel) -> float:
    return float((q0 * q0 / (gas.gamma * kappa)) ** (1.0 / (gas.gamma + 1.0)))


def _density_residual(rho, phi, trip: EquilibriumTriplet, gas: GasModel):
    g, k = gas.gamma, trip.kappa
    return g * k / (g - 1.0) * rho ** (g - 1.0) + trip.q0**2 / (2.0 * rho * rho) + phi - trip.H0


def _density_residual_prime(rho, trip: EquilibriumTriplet, gas: GasModel):
    g, k = gas.gamma, trip.kappa
    return g * k * rho ** (g - 2.0) - trip.q0**2 / rho**3


def _solve_density(phi, trip, gas, branch, tol, max_iter) -> float:
    rho_s = sonic_density(trip.q0, trip.kappa, gas)
    f = lambda r: _density_residual(r, phi, trip, gas)
    if f(rho_s) > 0.0:
        raise EquilibriumDomainError(
            f"no steady density at phi={phi}: residual at sonic point is positive"
        )
    subsonic = branch is Branch.SUBSONIC

    rho = 1.5 * rho_s if subsonic else 0.5 * rho_s
    on_branch = (lambda r: r > rho_s) if subsonic else (lambda r: 0.0 < r < rho_s)
    for _ in range(max_iter):
        fr = f(rho)
        if abs(fr) <= tol:
            return rho
        step = fr / _density_residual_prime(rho, trip, gas)
        nxt = rho - step
        if not on_branch(nxt) or not np.isfinite(nxt):
            break
        if nxt == rho:
            break
        rho = nxt
    else:
        fr = f(rho)
        if abs(fr) <= tol:
            return rho

    # residual is strictly monotone on each side of rho_s: bisection always works
    if subsonic:
        lo, hi = rho_s, 2.0 * rho_s
        while f(hi) < 0.0:
            hi *= 2.0
            if hi > 1e200:
                raise ConvergenceError("bisection bracket expansion failed")
    else:
        lo, hi = rho_s / 2.0, rho_s
        while f(lo) < 0.0:
            lo *= 0.5
            if lo < 1e-200:
                raise ConvergenceError("bisection bracket expansion failed")
    # on the subsonic side f increases with rho, on the supersonic side it decreases
    increasing = subsonic
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if abs(fm) <= tol or (hi - lo) <= np.finfo(float).eps * hi:
            if abs(fm) <= tol:
                return mid
            break
        if (fm < 0.0) == increasing:
            lo = mid
        else:
            hi = mid
    mid = 0.5 * (lo + hi)
    if abs(f(mid)) <= tol:
        return mid
    raise ConvergenceError(f"density iteration stalled at residual {f(mid):.3e}")


def moving_equilibrium(
    trip: EquilibriumTriplet,
    phi,
    gas: GasModel,
    branch: Branch = Branch.SUBSONIC,
    tol: float = 1e-14,
    max_iter: int = 100,
) -> PrimitiveState:
    """Steady state with momentum q0 != 0 at potential value(s) phi.

    Newton from 1.5*rho_s (subsonic) or 0.5*rho_s (supersonic) with analytic
    derivative; falls back to bisection on the branch bracket if Newton
    leaves the branch.
    """
    if trip.q0 == 0.0:
        raise ValueError("q0 = 0 is degenerate; use hydrostatic_isentropic")
    phi_arr = np.atleast_1d(np.asarray(phi, dtype=float))
    rho = np.array([_solve_density(p, trip, gas, branch, tol, max_iter) for p in phi_arr])
    if np.ndim(phi) == 0:
        rho = rho[0]
    return PrimitiveState(rho, trip.q0 / rho, trip.kappa * rho**gas.gamma)


def iss_residual(wl: ConservedState, wr: ConservedState, phil, phir, gas: GasModel) -> IssResidual:
    """Jumps of the steady triplet across an interface; the norm vanishes iff
    the pair is an interface steady solution."""
    dq = wr.q - wl.q
    dH = total_enthalpy(wr, phir, gas) - total_enthalpy(wl, phil, gas)
    ds = specific_entropy(wr, gas) - specific_entropy(wl, gas)
    return IssResidual(dq, dH, ds, np.sqrt(dq * dq + dH * dH + ds * ds))
