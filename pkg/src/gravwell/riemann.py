"""Two-intermediate-state interface solver with gravity source averages.

The solver replaces the interface Riemann fan by two constant states
W_L*, W_R* separated by a stationary wave and bounded by symmetric speeds
-lambda, +lambda.  Their construction enforces, simultaneously,

  * integral consistency with the exact fan (HLL averages plus source
    averages Sq, SE),
  * exact preservation of interface steady solutions,
  * positive intermediate densities via an enlargement of lambda,
  * a single intermediate entropy s* = (rho s)_HLL / rho_HLL that realizes
    the discrete entropy inequalities.

Everything is vectorized over batches of interfaces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import euler
from .euler import ConservedState, GasModel, SolverFailure

MAX_DOUBLINGS = 40


@dataclass
class HllAverages:
    """Single-state HLL averages, including the entropy density (rho s)_HLL
    and, for 2D interfaces, the tangential momentum average."""

    rho: np.ndarray
    q: np.ndarray
    E: np.ndarray
    rho_s: np.ndarray
    rho_v: np.ndarray | None = None


@dataclass
class InterfaceResolution:
    """Resolved interface: wave speed, intermediate states, source averages
    and diagnostics used by the detector and the entropy checks."""

    lam: np.ndarray
    w_star_l: ConservedState
    w_star_r: ConservedState
    sq: np.ndarray
    se: np.ndarray
    s_star: np.ndarray
    delta_rho: np.ndarray
    y: np.ndarray
    q2_tilde: np.ndarray
    n_negative_q2: int = 0


def wave_speed(wl, wr, lam_factor, gas: GasModel):
    """lambda = Lambda * max(|u_L| + c_L, |u_R| + c_R), Lambda >= 1."""
    if lam_factor < 1.0:
        raise ValueError("wave-speed factor must be >= 1")
    al = np.abs(wl.q / wl.rho) + euler.sound_speed(wl, gas)
    ar = np.abs(wr.q / wr.rho) + euler.sound_speed(wr, gas)
    return lam_factor * np.maximum(al, ar)


def hll_averages(wl, wr, lam, gas: GasModel) -> HllAverages:
    fl = euler.physical_flux(wl, gas)
    fr = euler.physical_flux(wr, gas)
    inv2l = 0.5 / lam
    rho = 0.5 * (wl.rho + wr.rho) - (fr[0] - fl[0]) * inv2l
    q = 0.5 * (wl.q + wr.q) - (fr[1] - fl[1]) * inv2l
    E = 0.5 * (wl.E + wr.E) - (fr[2] - fl[2]) * inv2l
    sl = euler.specific_entropy(wl, gas)
    sr = euler.specific_entropy(wr, gas)
    ul, ur = wl.q / wl.rho, wr.q / wr.rho
    rho_s = 0.5 * (wl.rho * sl + wr.rho * sr) - (wr.rho * sr * ur - wl.rho * sl * ul) * inv2l
    rho_v = None
    if wl.q_t is not None:
        rho_v = 0.5 * (wl.q_t + wr.q_t) - (fr[3] - fl[3]) * inv2l
    return HllAverages(rho, q, E, rho_s, rho_v)


def psi(y):
    """Smooth cutoff cos(pi y / 2) exp(-2 y^2): one at y = 0, zero at y = 1
    and at infinity, bounded by one."""
    y = np.asarray(y, dtype=float)
    with np.errstate(under="ignore"):
        return np.cos(0.5 * np.pi * y) * np.exp(-2.0 * y * y)


def _jump_structure(wl, wr, phil, phir, gas):
    """Potential/enthalpy jumps with the degenerate-case bookkeeping.

    Returns (dphi, ratio, no_phi_jump, flat_enthalpy); ratio = dphi/dh is only
    meaningful where neither degeneracy flag is set.
    """
    dphi = np.asarray(phir - phil, dtype=float)
    dh = np.asarray(euler.enthalpy(wr, gas) - euler.enthalpy(wl, gas), dtype=float)
    eps_a = 1e-14 * (1.0 + np.abs(phil) + np.abs(phir))
    no_phi_jump = np.abs(dphi) <= eps_a
    flat_enthalpy = ~no_phi_jump & (np.abs(dh) <= eps_a)
    safe = np.where(no_phi_jump | flat_enthalpy, 1.0, dh)
    ratio = np.where(no_phi_jump | flat_enthalpy, 0.0, dphi / safe)
    return dphi, ratio, no_phi_jump, flat_enthalpy


def delta_rho(wl, wr, phil, phir, gas):
    """Density split ([rho]/2) psi(y) with y = 1 + [phi]/[h].

    Degenerate cases: [phi] ~ 0 maps to y = 1 (psi = 0) and [h] ~ 0 with a
    genuine potential jump maps to the y -> inf limit (psi = 0).
    """
    _, ratio, no_phi_jump, flat_enthalpy = _jump_structure(wl, wr, phil, phir, gas)
    zero = no_phi_jump | flat_enthalpy
    y = np.where(no_phi_jump, 1.0, np.where(flat_enthalpy, np.inf, 1.0 + ratio))
    dr = 0.5 * (wr.rho - wl.rho) * np.where(zero, 0.0, psi(np.where(zero, 0.0, y)))
    return dr, y


def source_energy(wl, wr, phil, phir, dx):
    """SE = -(q_L + q_R)/2 * [phi]/dx, consistent with -q d_x(phi)."""
    return -0.5 * (wl.q + wr.q) * (phir - phil) / dx


def source_momentum(wl, wr, phil, phir, dx, gas: GasModel):
    """Sq = -(harmonic rho mean) [phi]/dx + (eps/dx) psi(1 + ([phi]/[h])^3).

    The correction eps vanishes cubically for smooth data and restores the
    jump of q^2/rho + p across interface steady solutions.
    """
    dphi, ratio, no_phi_jump, flat_enthalpy = _jump_structure(wl, wr, phil, phir, gas)
    harm = 2.0 * wl.rho * wr.rho / (wl.rho + wr.rho)
    g = gas.gamma
    es_mean = 0.5 * (np.exp(-euler.specific_entropy(wl, gas)) + np.exp(-euler.specific_entropy(wr, gas)))
    eps = es_mean * (
        (wr.rho**g - wl.rho**g)
        - harm * g / (g - 1.0) * (wr.rho ** (g - 1.0) - wl.rho ** (g - 1.0))
    )
    cutoff = psi(1.0 + ratio**3)
    cutoff = np.where(no_phi_jump | flat_enthalpy, 0.0, cutoff)
    return -harm * dphi / dx + eps * cutoff / dx


def q2_tilde(rho_l_star, rho_r_star, e_hat, s_star, gas: GasModel):
    """Squared-momentum average closing the intermediate entropy equality."""
    g = gas.gamma
    pw = rho_l_star**g + rho_r_star**g
    harm = 2.0 * rho_l_star * rho_r_star / (rho_l_star + rho_r_star)
    return harm * (2.0 * e_hat - np.exp(-s_star) * pw / (g - 1.0))


def delta_E(rho_l_star, rho_r_star, e_hat, q2t, gas: GasModel):
    """Energy split making both intermediate states share one entropy."""
    g = gas.gamma
    a = rho_l_star**g
    b = rho_r_star**g
    return (b * (e_hat - q2t / (2.0 * rho_l_star)) - a * (e_hat - q2t / (2.0 * rho_r_star))) / (a + b)


def resolve(wl, wr, phil, phir, dx, lam_factor, gas: GasModel) -> InterfaceResolution:
    """Assemble the full interface resolution for batches of interfaces.

    When the inputs carry a tangential momentum, its intermediate states are
    (rho v)_HLL -/+ delta(rho v) with delta(rho v) = delta_rho (rho v)_HLL /
    rho_HLL, and the entropy closure works on the energy minus the per-side
    tangential kinetic energy so that constant tangential velocities and
    grid-aligned steady solutions are preserved exactly.
    """
    if not euler.is_admissible(wl, gas) or not euler.is_admissible(wr, gas):
        raise euler.InadmissibleState("interface solver fed inadmissible states")
    lam = np.asarray(wave_speed(wl, wr, lam_factor, gas), dtype=float).copy()
    dr, y = delta_rho(wl, wr, phil, phir, gas)

    # |delta_rho| is independent of lambda while rho_HLL grows towards the
    # arithmetic mean, which strictly dominates |[rho]|/2: doubling terminates.
    for attempt in range(MAX_DOUBLINGS + 1):
        rho_hll = 0.5 * (wl.rho + wr.rho) - (wr.q - wl.q) / (2.0 * lam)
        bad = ~(rho_hll > np.abs(dr))
        if not np.any(bad):
            break
        if attempt == MAX_DOUBLINGS:
            raise SolverFailure("wave-speed enlargement cap exceeded")
        lam = np.where(bad, 2.0 * lam, lam)

    hll = hll_averages(wl, wr, lam, gas)
    sq = source_momentum(wl, wr, phil, phir, dx, gas)
    se = source_energy(wl, wr, phil, phir, dx)
    q_hat = hll.q + sq * dx / (2.0 * lam)
    e_hat = hll.E + se * dx / (2.0 * lam)
    s_star = hll.rho_s / hll.rho

    rho_l_star = hll.rho - dr
    rho_r_star = hll.rho + dr

    qt_l = qt_r = None
    e_eff, delta_t = e_hat, 0.0
    if wl.q_t is not None:
        d_rho_v = dr * hll.rho_v / hll.rho
        qt_l = hll.rho_v - d_rho_v
        qt_r = hll.rho_v + d_rho_v
        t_l = qt_l * qt_l / (2.0 * rho_l_star)
        t_r = qt_r * qt_r / (2.0 * rho_r_star)
        e_eff = e_hat - 0.5 * (t_l + t_r)
        delta_t = 0.5 * (t_r - t_l)

    q2t = q2_tilde(rho_l_star, rho_r_star, e_eff, s_star, gas)
    de = delta_E(rho_l_star, rho_r_star, e_eff, q2t, gas) + delta_t

    return InterfaceResolution(
        lam=lam,
        w_star_l=ConservedState(rho_l_star, q_hat, e_hat - de, qt_l),
        w_star_r=ConservedState(rho_r_star, q_hat, e_hat + de, qt_r),
        sq=np.asarray(sq, dtype=float),
        se=np.asarray(se, dtype=float),
        s_star=np.asarray(s_star, dtype=float),
        delta_rho=np.asarray(dr, dtype=float),
        y=np.asarray(y, dtype=float),
        q2_tilde=np.asarray(q2t, dtype=float),
        n_negative_q2=int(np.count_nonzero(np.asarray(q2t) < 0.0)),
    )
