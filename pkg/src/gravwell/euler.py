"""State algebra and thermodynamics for the ideal-gas Euler system with gravity.

All operations accept scalars or numpy arrays and are pure; they raise
:class:`InadmissibleState` when fed states outside the open admissible set
(positive density and pressure).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class InadmissibleState(ValueError):
    """A state left the admissible set {rho > 0, p > 0}."""


class SolverFailure(RuntimeError):
    """An iterative component failed to produce a usable result."""


@dataclass(frozen=True)
class GasModel:
    """Ideal gas closed by p = (gamma - 1)(E - kinetic energy)."""

    gamma: float

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError(f"adiabatic index must exceed 1, got {self.gamma}")


@dataclass
class ConservedState:
    """Conserved variables (rho, q = rho*u, E).

    ``q_t`` holds the tangential momentum rho*v when an interface of the 2D
    system is solved in its normal direction; it is None in pure 1D.
    """

    rho: np.ndarray | float
    q: np.ndarray | float
    E: np.ndarray | float
    q_t: np.ndarray | float | None = None


@dataclass
class PrimitiveState:
    """Primitive variables (rho, u, p), plus tangential velocity v in 2D."""

    rho: np.ndarray | float
    u: np.ndarray | float
    p: np.ndarray | float
    v: np.ndarray | float | None = None


def _require_positive(value, what):
    # strict inequality: the admissible set is open
    if np.any(~(np.asarray(value) > 0.0)):
        raise InadmissibleState(f"non-positive {what} (min {np.min(value)})")


def kinetic_energy(w: ConservedState):
    ke = 0.5 * w.q * w.q / w.rho
    if w.q_t is not None:
        ke = ke + 0.5 * w.q_t * w.q_t / w.rho
    return ke


def pressure(w: ConservedState, gas: GasModel):
    """p = (gamma - 1)(E - |q|^2 / (2 rho)), with the full kinetic energy in 2D."""
    _require_positive(w.rho, "density")
    return (gas.gamma - 1.0) * (w.E - kinetic_energy(w))


def sound_speed(w: ConservedState, gas: GasModel):
    p = pressure(w, gas)
    _require_positive(p, "pressure")
    return np.sqrt(gas.gamma * p / w.rho)


def specific_entropy(w: ConservedState, gas: GasModel):
    """s = -log(p / rho^gamma)."""
    p = pressure(w, gas)
    _require_positive(p, "pressure")
    return gas.gamma * np.log(w.rho) - np.log(p)


def enthalpy(w: ConservedState, gas: GasModel):
    """h = (E + p) / rho."""
    p = pressure(w, gas)
    _require_positive(p, "pressure")
    return (w.E + p) / w.rho


def total_enthalpy(w: ConservedState, phi, gas: GasModel):
    """h + phi; constant along a steady solution."""
    return enthalpy(w, gas) + phi


def physical_flux(w: ConservedState, gas: GasModel):
    """Flux (rho u, rho u^2 + p, u (E + p)); appends rho*u*v in 2D.

    Returns a stacked array whose leading axis matches the component layout
    of :class:`ConservedState`.
    """
    p = pressure(w, gas)
    _require_positive(p, "pressure")
    u = w.q / w.rho
    parts = [w.q, w.q * u + p, u * (w.E + p)]
    if w.q_t is not None:
        parts.append(w.q_t * u)
    return np.stack([np.asarray(c, dtype=float) for c in np.broadcast_arrays(*parts)])


def primitive_to_conserved(prim: PrimitiveState, gas: GasModel) -> ConservedState:
    _require_positive(prim.rho, "density")
    _require_positive(prim.p, "pressure")
    E = prim.p / (gas.gamma - 1.0) + 0.5 * prim.rho * prim.u * prim.u
    q_t = None
    if prim.v is not None:
        E = E + 0.5 * prim.rho * prim.v * prim.v
        q_t = prim.rho * prim.v
    return ConservedState(prim.rho, prim.rho * prim.u, E, q_t)


def conserved_to_primitive(w: ConservedState, gas: GasModel) -> PrimitiveState:
    p = pressure(w, gas)
    _require_positive(p, "pressure")
    v = None if w.q_t is None else w.q_t / w.rho
    return PrimitiveState(w.rho, w.q / w.rho, p, v)


def is_admissible(w: ConservedState, gas: GasModel) -> bool:
    """True iff rho > 0 and p > 0 everywhere (strict)."""
    rho = np.asarray(w.rho)
    if np.any(~(rho > 0.0)) or np.any(~np.isfinite(rho)):
        return False
    p = (gas.gamma - 1.0) * (np.asarray(w.E) - kinetic_energy(w))
    return bool(np.all(p > 0.0) and np.all(np.isfinite(p)))


def state_from_field(field: np.ndarray) -> ConservedState:
    """View a component-major (3, ...) field as a state (zero copy)."""
    assert field.shape[0] == 3
    return ConservedState(field[0], field[1], field[2])
