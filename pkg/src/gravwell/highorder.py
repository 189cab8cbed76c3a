"""Second- and third-order extension with steady-state-detector blending.

Reconstruction is done in primitive variables: relaxed minmod slopes for order 2 and
a mean-preserving parabola with a TVD interface-value check for order 3.
Each interface carries a weight theta in [0, 1] built from the steady
detector sigma (the ISS residual norm): theta -> 0 reverts interface values,
interface potentials and the source term to the first-order well-balanced
scheme, theta -> 1 keeps the full reconstruction plus an in-cell quadrature
of the source.  Time stepping is SSPRK2 (order 2) or SSPRK3 (order 3) with
forward-Euler stages of the blended spatial operator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import euler, fv1d, riemann
from .equilibrium import iss_residual
from .euler import ConservedState, GasModel, InadmissibleState
from .fv1d import GHOST, BoundarySpec, Grid1D, cfl_dt, fill_ghosts
from .potentials import GAUSS2_NODES, GAUSS2_WEIGHTS

SLACK_FACTOR = 0.5
# relaxation of the two-argument minmod towards the central slope; 1.0 is the
# classic limiter, values in (1, 2] stay TVD while avoiding the heavy
# extremum clipping that costs the order-2 scheme its convergence rate
MINMOD_RELAX = 1.3


def minmod(a, b):
    out = np.where(np.abs(a) < np.abs(b), a, b)
    return np.where(a * b > 0.0, out, 0.0)


def limited_slope(dm, dp):
    """Three-argument minmod of (MINMOD_RELAX*dm, (dm+dp)/2, MINMOD_RELAX*dp)."""
    a = MINMOD_RELAX * dm
    b = 0.5 * (dm + dp)
    c = MINMOD_RELAX * dp
    mag = np.minimum(np.abs(a), np.minimum(np.abs(b), np.abs(c)))
    same = (np.sign(a) == np.sign(b)) & (np.sign(b) == np.sign(c))
    return np.where(same, np.sign(b) * mag, 0.0)


@dataclass
class Reconstruction:
    """Per-cell polynomial in primitive variables: w(xi) = c0 + c1 xi + c2 xi^2
    with xi = x - x_i; the cell mean of the polynomial equals the cell average."""

    degree: int
    coef: np.ndarray  # (3, ncells, 3)

    def eval(self, xi):
        c = self.coef
        return c[..., 0] + xi * (c[..., 1] + xi * c[..., 2])

    def face_values(self, dx):
        """(left face value, right face value) per cell."""
        return self.eval(-0.5 * dx), self.eval(0.5 * dx)


def reconstruct(prim, d, dx):
    """Limited reconstruction of a (3, ncells) primitive field.

    d=1: relaxed three-argument minmod slopes.  d=2: centered parabola through the three cell
    averages; a cell falls back to the minmod slope when either of its
    interface values leaves the neighbor cell-average bounds by more than
    SLACK_FACTOR * min(|second difference|) over the three-cell
    neighborhood.  The slack vanishes at isolated discontinuities and covers
    the legitimate interface overshoot at smooth extrema.
    """
    ncells = prim.shape[1]
    coef = np.zeros((3, ncells, 3))
    coef[..., 0] = prim
    dm = prim[:, 1:-1] - prim[:, :-2]
    dp = prim[:, 2:] - prim[:, 1:-1]
    mid = slice(1, ncells - 1)
    if d == 1:
        coef[:, mid, 1] = limited_slope(dm, dp) / dx
        return Reconstruction(1, coef)

    d2 = dp - dm
    c2 = d2 / (2.0 * dx * dx)
    c1 = (prim[:, 2:] - prim[:, :-2]) / (2.0 * dx)
    c0 = prim[:, mid] - d2 / 24.0
    v_left = c0 - 0.5 * dx * c1 + 0.25 * dx * dx * c2
    v_right = c0 + 0.5 * dx * c1 + 0.25 * dx * dx * c2

    pad = np.empty_like(prim)
    pad[:, mid] = np.abs(d2)
    pad[:, 0] = pad[:, 1]
    pad[:, -1] = pad[:, -2]
    slack = SLACK_FACTOR * np.minimum(pad[:, :-2], np.minimum(pad[:, mid], pad[:, 2:]))

    w_i = prim[:, mid]
    lo_l = np.minimum(prim[:, :-2], w_i) - slack
    hi_l = np.maximum(prim[:, :-2], w_i) + slack
    lo_r = np.minimum(prim[:, 2:], w_i) - slack
    hi_r = np.maximum(prim[:, 2:], w_i) + slack
    ok = (v_left >= lo_l) & (v_left <= hi_l) & (v_right >= lo_r) & (v_right <= hi_r)

    coef[:, mid, 0] = np.where(ok, c0, w_i)
    coef[:, mid, 1] = np.where(ok, c1, limited_slope(dm, dp) / dx)
    coef[:, mid, 2] = np.where(ok, c2, 0.0)
    return Reconstruction(2, coef)


def sigma(wl, wr, phil, phir, gas):
    """Steady-solution detector: norm of the (q, H, s) interface jumps."""
    return iss_residual(wl, wr, phil, phir, gas).norm


def theta(sig, dx, C, d):
    """theta = sigma / (sigma + (dx/C)^(d+1)); C = 0 or sigma = 0 give 0."""
    sig = np.asarray(sig, dtype=float)
    C = np.asarray(C, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        tau = np.where(C > 0.0, (dx / np.where(C > 0.0, C, 1.0)) ** (d + 1), np.inf)
        th = np.where(sig > 0.0, sig / (sig + tau), 0.0)
    return np.where(np.isfinite(th), th, 1.0)


def rate_coefficient(w_n, w_nm1, dt, c_theta):
    """Per-interface C from the time rate of change of the two adjoining
    cells (Euclidean norm over components)."""
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    rate = np.sqrt(np.sum((w_n - w_nm1) ** 2, axis=0)) / dt
    l = slice(GHOST - 1, w_n.shape[1] - GHOST)
    r = slice(GHOST, w_n.shape[1] - GHOST + 1)
    return c_theta * 0.5 * (rate[l] + rate[r])


def bootstrap_rate_coefficient(w, grid: Grid1D, bc: BoundarySpec, t, gas, lam_factor, c_theta):
    """C for the first step, from the first-order spatial operator.

    (W^1 - W^0)/dt of a forward-Euler step equals the spatial operator
    applied to W^0 independently of dt, so this is the same quantity the
    two-snapshot formula measures, available before any step is taken.
    On steady data it vanishes and locks the well-balanced branch.
    """
    wf = fill_ghosts(w.copy(), grid, bc, t, gas)
    res = fv1d.resolve_interfaces(wf, grid, gas, lam_factor)
    n = grid.n
    star_l = np.stack([res.w_star_l.rho, res.w_star_l.q, res.w_star_l.E])
    star_r = np.stack([res.w_star_r.rho, res.w_star_r.q, res.w_star_r.E])
    wi = wf[:, GHOST : GHOST + n]
    rhs = (
        res.lam[1 : n + 1] * (star_l[:, 1 : n + 1] - wi)
        + res.lam[0:n] * (star_r[:, 0:n] - wi)
    ) / grid.dx
    rate = np.zeros(wf.shape[1])
    rate[GHOST : GHOST + n] = np.sqrt(np.sum(rhs**2, axis=0))
    rate[:GHOST] = rate[GHOST]
    rate[GHOST + n :] = rate[GHOST + n - 1]
    l = slice(GHOST - 1, wf.shape[1] - GHOST)
    r = slice(GHOST, wf.shape[1] - GHOST + 1)
    return c_theta * 0.5 * (rate[l] + rate[r])


def blended_interface_values(recon: Reconstruction, prim, grid: Grid1D, th):
    """Convex blend between cell averages and reconstructed face values,
    per interface side, in primitive variables; the interface potentials are
    blended the same way between cell averages and the pointwise value."""
    n = grid.n
    dx = grid.dx
    v_minus_all, v_plus_all = recon.face_values(dx)
    l = slice(GHOST - 1, GHOST + n)
    r = slice(GHOST, GHOST + n + 1)
    prim_minus = (1.0 - th) * prim[:, l] + th * v_plus_all[:, l]
    prim_plus = (1.0 - th) * prim[:, r] + th * v_minus_all[:, r]
    phi_face = grid.potential.phi(grid.interface_positions())
    phi_minus = (1.0 - th) * grid.phi_bar[l] + th * phi_face
    phi_plus = (1.0 - th) * grid.phi_bar[r] + th * phi_face
    return prim_minus, prim_plus, phi_minus, phi_plus


def ho_source(recon: Reconstruction, grid: Grid1D, th, res):
    """Blended source: quadrature source weighted by the mean theta of the
    cell's interfaces plus the (1 - theta)-weighted interface source halves,
    so both theta = 0 gives the first-order well-balanced source and
    theta = 1 gives the pure quadrature."""
    n, dx = grid.n, grid.dx
    interior = slice(GHOST, GHOST + n)
    xq = grid.centers[interior][None, :] + 0.5 * dx * GAUSS2_NODES[:, None]
    xi = 0.5 * dx * GAUSS2_NODES[:, None]
    c = recon.coef[:, interior, :]
    rho_q = c[0, :, 0] + xi * (c[0, :, 1] + xi * c[0, :, 2])
    u_q = c[1, :, 0] + xi * (c[1, :, 1] + xi * c[1, :, 2])
    dphi_q = grid.potential.dphi(xq)
    s_check = np.zeros((3, n))
    s_check[1] = 0.5 * np.sum(GAUSS2_WEIGHTS[:, None] * (-rho_q * dphi_q), axis=0)
    s_check[2] = 0.5 * np.sum(GAUSS2_WEIGHTS[:, None] * (-rho_q * u_q * dphi_q), axis=0)

    s_if = np.zeros((3, n + 1))
    s_if[1] = res.sq
    s_if[2] = res.se
    th_l, th_r = th[0:n], th[1 : n + 1]
    blended = 0.5 * (th_l + th_r) * s_check + 0.5 * (
        (1.0 - th_r) * s_if[:, 1 : n + 1] + (1.0 - th_l) * s_if[:, 0:n]
    )
    return blended, s_check


def ho_operator(w, grid: Grid1D, gas: GasModel, d, C, lam_factor):
    """Fluxes and blended source of the order-(d+1) scheme for a field whose
    ghosts are already filled.  dt-independent."""
    n, dx = grid.n, grid.dx
    prim_state = euler.conserved_to_primitive(euler.state_from_field(w), gas)
    prim = np.stack([np.asarray(prim_state.rho), np.asarray(prim_state.u), np.asarray(prim_state.p)])
    recon = reconstruct(prim, d, dx)

    l = slice(GHOST - 1, GHOST + n)
    r = slice(GHOST, GHOST + n + 1)
    wl = ConservedState(w[0, l], w[1, l], w[2, l])
    wr = ConservedState(w[0, r], w[1, r], w[2, r])
    sig = sigma(wl, wr, grid.phi_bar[l], grid.phi_bar[r], gas)
    th = theta(sig, dx, C, d)

    pm, pp, phim, phip = blended_interface_values(recon, prim, grid, th)
    if np.any(pm[0] <= 0) or np.any(pm[2] <= 0) or np.any(pp[0] <= 0) or np.any(pp[2] <= 0):
        raise InadmissibleState("blended interface values left the admissible set")
    wm = euler.primitive_to_conserved(euler.PrimitiveState(pm[0], pm[1], pm[2]), gas)
    wp = euler.primitive_to_conserved(euler.PrimitiveState(pp[0], pp[1], pp[2]), gas)
    res = riemann.resolve(wm, wp, phim, phip, dx, lam_factor, gas)

    fm = euler.physical_flux(wm, gas)
    fp = euler.physical_flux(wp, gas)
    star_l = np.stack([res.w_star_l.rho, res.w_star_l.q, res.w_star_l.E])
    star_r = np.stack([res.w_star_r.rho, res.w_star_r.q, res.w_star_r.E])
    arr_m = np.stack([wm.rho, wm.q, wm.E])
    arr_p = np.stack([wp.rho, wp.q, wp.E])
    flux = 0.5 * (fm + fp) - 0.5 * res.lam * (star_l - arr_m) + 0.5 * res.lam * (star_r - arr_p)

    source, _ = ho_source(recon, grid, th, res)
    return flux, source, res, th


def _combine(w, flux, source, grid: Grid1D, dt, gas):
    out = w.copy()
    n = grid.n
    out[:, GHOST : GHOST + n] = (
        w[:, GHOST : GHOST + n]
        - dt / grid.dx * (flux[:, 1 : n + 1] - flux[:, 0:n])
        + dt * source
    )
    if not euler.is_admissible(euler.state_from_field(out[:, GHOST : GHOST + n]), gas):
        raise InadmissibleState("stage update left the admissible set")
    return out


def ssprk_step(w, grid: Grid1D, bc: BoundarySpec, t, gas: GasModel, d, C, lam_factor=1.0, cfl=0.9, dt_max=None, max_halvings=10):
    """One SSPRK2 (d=1) or SSPRK3 (d=2) step; rejects and halves dt on stage
    inadmissibility.  Returns (field, dt, filled step-start field, info)."""
    order = d + 1
    w0 = fill_ghosts(w.copy(), grid, bc, t, gas, order=order)
    flux0, src0, res0, th0 = ho_operator(w0, grid, gas, d, C, lam_factor)
    dt = cfl_dt(res0, grid, cfl)
    if dt_max is not None:
        dt = min(dt, dt_max)

    for _ in range(max_halvings + 1):
        try:
            w1 = _combine(w0, flux0, src0, grid, dt, gas)
            w1 = fill_ghosts(w1, grid, bc, t + dt, gas, order=order)
            flux1, src1, _, _ = ho_operator(w1, grid, gas, d, C, lam_factor)
            if d == 1:
                w2 = _combine(w1, flux1, src1, grid, dt, gas)
                out = w0.copy()
                out[:, GHOST:-GHOST] = 0.5 * (w0[:, GHOST:-GHOST] + w2[:, GHOST:-GHOST])
            else:
                w2 = _combine(w1, flux1, src1, grid, dt, gas)
                w2[:, GHOST:-GHOST] = 0.75 * w0[:, GHOST:-GHOST] + 0.25 * w2[:, GHOST:-GHOST]
                w2 = fill_ghosts(w2, grid, bc, t + 0.5 * dt, gas, order=order)
                flux2, src2, _, _ = ho_operator(w2, grid, gas, d, C, lam_factor)
                w3 = _combine(w2, flux2, src2, grid, dt, gas)
                out = w0.copy()
                out[:, GHOST:-GHOST] = (
                    w0[:, GHOST:-GHOST] / 3.0 + 2.0 / 3.0 * w3[:, GHOST:-GHOST]
                )
            if not euler.is_admissible(euler.state_from_field(out[:, GHOST:-GHOST]), gas):
                raise InadmissibleState("combined stage left the admissible set")
            return out, dt, w0, {"res": res0, "theta": th0}
        except InadmissibleState:
            dt *= 0.5
    raise euler.SolverFailure("SSPRK step rejected after maximum dt halvings")
