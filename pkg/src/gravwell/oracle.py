"""Reference solutions: exact Riemann solver for the homogeneous system, the
closed-form unsteady solution for a linear potential, and the plain HLL
scheme with centered source discretization used as a non-well-balanced
baseline and a fine-grid reference.
"""

from __future__ import annotations

import numpy as np

from . import euler
from .euler import ConservedState, GasModel, InadmissibleState
from .fv1d import GHOST, BoundarySpec, Grid1D, fill_ghosts


# --- exact Riemann solver ---------------------------------------------------


def _pressure_function(p, rho_k, p_k, c_k, gas):
    """f_K(p) and its derivative for the star-pressure equation."""
    g = gas.gamma
    if p > p_k:  # shock
        a = 2.0 / ((g + 1.0) * rho_k)
        b = (g - 1.0) / (g + 1.0) * p_k
        root = np.sqrt(a / (p + b))
        f = (p - p_k) * root
        df = root * (1.0 - 0.5 * (p - p_k) / (b + p))
    else:  # rarefaction
        f = 2.0 * c_k / (g - 1.0) * ((p / p_k) ** ((g - 1.0) / (2.0 * g)) - 1.0)
        df = 1.0 / (rho_k * c_k) * (p / p_k) ** (-(g + 1.0) / (2.0 * g))
    return f, df


def star_state(prim_l, prim_r, gas: GasModel, tol=1e-12, max_iter=200):
    """(p*, u*) from the two-nonlinear-wave pressure equation.

    Newton from the two-rarefaction approximation (exact when both waves are
    rarefactions, hence robust near vacuum); falls back to bisection when an
    iterate leaves (0, p_max].
    """
    rho_l, u_l, p_l = prim_l
    rho_r, u_r, p_r = prim_r
    g = gas.gamma
    c_l = np.sqrt(g * p_l / rho_l)
    c_r = np.sqrt(g * p_r / rho_r)
    du = u_r - u_l
    if du >= 2.0 * (c_l + c_r) / (g - 1.0):
        return 0.0, 0.5 * (u_l + u_r)  # vacuum generation: no star region

    z = (g - 1.0) / (2.0 * g)
    p_tr = ((c_l + c_r - 0.5 * (g - 1.0) * du) / (c_l / p_l**z + c_r / p_r**z)) ** (1.0 / z)
    p = max(p_tr, 1e-300)

    def total(p):
        fl, dfl = _pressure_function(p, rho_l, p_l, c_l, gas)
        fr, dfr = _pressure_function(p, rho_r, p_r, c_r, gas)
        return fl + fr + du, dfl + dfr

    p_max = 10.0 * max(p_l, p_r)
    while total(p_max)[0] < 0.0:
        p_max *= 10.0
    ok = False
    for _ in range(max_iter):
        f, df = total(p)
        step = f / df
        p_new = p - step
        if not (0.0 < p_new <= p_max):
            break
        if abs(p_new - p) <= tol * p_new:
            p = p_new
            ok = True
            break
        p = p_new
    if not ok:
        lo, hi = 1e-300, p_max
        for _ in range(400):
            p = 0.5 * (lo + hi)
            if total(p)[0] > 0.0:
                hi = p
            else:
                lo = p
            if hi - lo <= tol * hi:
                break
        p = 0.5 * (lo + hi)
    fl, _ = _pressure_function(p, rho_l, p_l, c_l, gas)
    fr, _ = _pressure_function(p, rho_r, p_r, c_r, gas)
    u = 0.5 * (u_l + u_r) + 0.5 * (fr - fl)
    return p, u


def exact_riemann(prim_l, prim_r, gas: GasModel, xi):
    """Sampled solution (rho, u, p) of the homogeneous Riemann problem at
    similarity coordinates xi = x/t (scalar or array).

    Vacuum-generating data are sampled with an explicit vacuum region
    between the two rarefaction tails.
    """
    rho_l, u_l, p_l = prim_l
    rho_r, u_r, p_r = prim_r
    g = gas.gamma
    c_l = np.sqrt(g * p_l / rho_l)
    c_r = np.sqrt(g * p_r / rho_r)
    xi = np.asarray(xi, dtype=float)
    rho = np.empty_like(xi)
    u = np.empty_like(xi)
    p = np.empty_like(xi)

    vacuum = (u_r - u_l) >= 2.0 * (c_l + c_r) / (g - 1.0)
    if vacuum:
        s_l_tail = u_l + 2.0 * c_l / (g - 1.0)
        s_r_tail = u_r - 2.0 * c_r / (g - 1.0)
        left_fan = (xi >= u_l - c_l) & (xi < s_l_tail)
        right_fan = (xi > s_r_tail) & (xi <= u_r + c_r)
        rho[...] = 0.0
        u[...] = 0.0
        p[...] = 0.0
        m = xi <= u_l - c_l
        rho[m], u[m], p[m] = rho_l, u_l, p_l
        m = xi >= u_r + c_r
        rho[m], u[m], p[m] = rho_r, u_r, p_r
        uf = 2.0 / (g + 1.0) * (c_l + 0.5 * (g - 1.0) * u_l + xi[left_fan])
        cf = c_l + 0.5 * (g - 1.0) * (u_l - uf)
        rho[left_fan] = rho_l * (cf / c_l) ** (2.0 / (g - 1.0))
        u[left_fan] = uf
        p[left_fan] = p_l * (cf / c_l) ** (2.0 * g / (g - 1.0))
        uf = 2.0 / (g + 1.0) * (-c_r + 0.5 * (g - 1.0) * u_r + xi[right_fan])
        cf = c_r - 0.5 * (g - 1.0) * (u_r - uf)
        rho[right_fan] = rho_r * (cf / c_r) ** (2.0 / (g - 1.0))
        u[right_fan] = uf
        p[right_fan] = p_r * (cf / c_r) ** (2.0 * g / (g - 1.0))
        return rho, u, p

    p_s, u_s = star_state(prim_l, prim_r, gas)

    left = xi <= u_s
    # left wave
    if p_s > p_l:  # shock
        s = u_l - c_l * np.sqrt((g + 1.0) / (2.0 * g) * p_s / p_l + (g - 1.0) / (2.0 * g))
        rho_s = rho_l * ((p_s / p_l + (g - 1.0) / (g + 1.0)) / ((g - 1.0) / (g + 1.0) * p_s / p_l + 1.0))
        m = left & (xi <= s)
        rho[m], u[m], p[m] = rho_l, u_l, p_l
        m = left & (xi > s)
        rho[m], u[m], p[m] = rho_s, u_s, p_s
    else:  # rarefaction
        c_s = c_l * (p_s / p_l) ** ((g - 1.0) / (2.0 * g))
        head, tail = u_l - c_l, u_s - c_s
        m = left & (xi <= head)
        rho[m], u[m], p[m] = rho_l, u_l, p_l
        m = left & (xi >= tail)
        rho[m] = rho_l * (p_s / p_l) ** (1.0 / g)
        u[m], p[m] = u_s, p_s
        m = left & (xi > head) & (xi < tail)
        uf = 2.0 / (g + 1.0) * (c_l + 0.5 * (g - 1.0) * u_l + xi[m])
        cf = c_l + 0.5 * (g - 1.0) * (u_l - uf)
        rho[m] = rho_l * (cf / c_l) ** (2.0 / (g - 1.0))
        u[m] = uf
        p[m] = p_l * (cf / c_l) ** (2.0 * g / (g - 1.0))

    right = ~left
    if p_s > p_r:  # shock
        s = u_r + c_r * np.sqrt((g + 1.0) / (2.0 * g) * p_s / p_r + (g - 1.0) / (2.0 * g))
        rho_s = rho_r * ((p_s / p_r + (g - 1.0) / (g + 1.0)) / ((g - 1.0) / (g + 1.0) * p_s / p_r + 1.0))
        m = right & (xi >= s)
        rho[m], u[m], p[m] = rho_r, u_r, p_r
        m = right & (xi < s)
        rho[m], u[m], p[m] = rho_s, u_s, p_s
    else:
        c_s = c_r * (p_s / p_r) ** ((g - 1.0) / (2.0 * g))
        head, tail = u_r + c_r, u_s + c_s
        m = right & (xi >= head)
        rho[m], u[m], p[m] = rho_r, u_r, p_r
        m = right & (xi <= tail)
        rho[m] = rho_r * (p_s / p_r) ** (1.0 / g)
        u[m], p[m] = u_s, p_s
        m = right & (xi < head) & (xi > tail)
        uf = 2.0 / (g + 1.0) * (-c_r + 0.5 * (g - 1.0) * u_r + xi[m])
        cf = c_r - 0.5 * (g - 1.0) * (u_r - uf)
        rho[m] = rho_r * (cf / c_r) ** (2.0 / (g - 1.0))
        u[m] = uf
        p[m] = p_r * (cf / c_r) ** (2.0 * g / (g - 1.0))

    return rho, u, p


# --- closed-form unsteady solution for phi(x) = x ---------------------------


def exact_unsteady(x, t, u0=1.0, k=5):
    """Traveling-wave solution for the linear potential phi(x) = x:
    rho = 1 + sin(k pi (x - u0 t))/5, u = u0,
    p = 9/2 - (x - u0 t) + cos(k pi (x - u0 t))/(5 k pi)."""
    x = np.asarray(x, dtype=float)
    arg = k * np.pi * (x - u0 * t)
    rho = 1.0 + 0.2 * np.sin(arg)
    p = 4.5 - (x - u0 * t) + np.cos(arg) / (5.0 * k * np.pi)
    return rho, np.full_like(rho, float(u0)), p


# --- plain HLL baseline (symmetric wave speeds, centered source) ------------


def hll_flux(w, grid: Grid1D, gas: GasModel, lam_factor):
    """Symmetric-speed HLL flux (F_L + F_R)/2 - lam (W_R - W_L)/2 at the n+1
    interfaces, plus the per-interface wave speeds."""
    from . import riemann

    n = grid.n
    l = slice(GHOST - 1, GHOST + n)
    r = slice(GHOST, GHOST + n + 1)
    wl = ConservedState(w[0, l], w[1, l], w[2, l])
    wr = ConservedState(w[0, r], w[1, r], w[2, r])
    lam = riemann.wave_speed(wl, wr, lam_factor, gas)
    fl = euler.physical_flux(wl, gas)
    fr = euler.physical_flux(wr, gas)
    warr_l = np.stack([wl.rho, wl.q, wl.E])
    warr_r = np.stack([wr.rho, wr.q, wr.E])
    return 0.5 * (fl + fr) - 0.5 * lam * (warr_r - warr_l), lam


def hll_centered_step(w, grid: Grid1D, bc: BoundarySpec, t, gas: GasModel, lam_factor=1.0, cfl=0.9, dt_max=None):
    """Non-well-balanced reference scheme: plain HLL flux plus the centered
    source (0, -rho_i [phi]_c/(2dx), -q_i [phi]_c/(2dx))."""
    w = fill_ghosts(w.copy(), grid, bc, t, gas)
    flux, lam = hll_flux(w, grid, gas, lam_factor)
    dt = cfl * 0.5 * grid.dx / float(np.max(lam))
    if dt_max is not None:
        dt = min(dt, dt_max)
    n = grid.n
    interior = slice(GHOST, GHOST + n)
    dphi = (grid.phi_bar[GHOST + 1 : GHOST + n + 1] - grid.phi_bar[GHOST - 1 : GHOST + n - 1]) / (2.0 * grid.dx)
    src = np.zeros((3, n))
    src[1] = -w[0, interior] * dphi
    src[2] = -w[1, interior] * dphi
    out = w.copy()
    out[:, interior] = w[:, interior] - dt / grid.dx * (flux[:, 1 : n + 1] - flux[:, 0:n]) + dt * src
    if not euler.is_admissible(euler.state_from_field(out[:, interior]), gas):
        raise InadmissibleState("HLL baseline produced an inadmissible cell")
    return out, dt


def hll_centered_step_2d(w, grid, bc, gas: GasModel, lam_factor=1.0, cfl=0.9, dt_max=None):
    """2D analogue of the HLL baseline with centered sources per direction."""
    from . import riemann
    from .fv2d import BoundarySpec2D, Grid2D, fill_ghosts_2d  # noqa: F401

    w = fill_ghosts_2d(w.copy(), grid, bc)
    nx, ny = grid.nx, grid.ny
    jj = slice(1, ny + 1)
    ii = slice(1, nx + 1)

    wl = ConservedState(w[0, 0 : nx + 1, jj], w[1, 0 : nx + 1, jj], w[3, 0 : nx + 1, jj], w[2, 0 : nx + 1, jj])
    wr = ConservedState(w[0, 1 : nx + 2, jj], w[1, 1 : nx + 2, jj], w[3, 1 : nx + 2, jj], w[2, 1 : nx + 2, jj])
    lam_x = riemann.wave_speed(wl, wr, lam_factor, gas)
    flx = 0.5 * (euler.physical_flux(wl, gas) + euler.physical_flux(wr, gas))
    flx -= 0.5 * lam_x * np.stack([wr.rho - wl.rho, wr.q - wl.q, wr.E - wl.E, wr.q_t - wl.q_t])

    wb = ConservedState(w[0, ii, 0 : ny + 1], w[2, ii, 0 : ny + 1], w[3, ii, 0 : ny + 1], w[1, ii, 0 : ny + 1])
    wt = ConservedState(w[0, ii, 1 : ny + 2], w[2, ii, 1 : ny + 2], w[3, ii, 1 : ny + 2], w[1, ii, 1 : ny + 2])
    lam_y = riemann.wave_speed(wb, wt, lam_factor, gas)
    fly = 0.5 * (euler.physical_flux(wb, gas) + euler.physical_flux(wt, gas))
    fly -= 0.5 * lam_y * np.stack([wt.rho - wb.rho, wt.q - wb.q, wt.E - wb.E, wt.q_t - wb.q_t])

    dt = cfl * 0.5 * min(grid.dx / float(np.max(lam_x)), grid.dy / float(np.max(lam_y)))
    if dt_max is not None:
        dt = min(dt, dt_max)

    wi = w[:, ii, jj]
    dphix = (grid.phi_bar[2 : nx + 2, jj] - grid.phi_bar[0:nx, jj]) / (2.0 * grid.dx)
    dphiy = (grid.phi_bar[ii, 2 : ny + 2] - grid.phi_bar[ii, 0:ny]) / (2.0 * grid.dy)
    src = np.zeros_like(wi)
    src[1] = -wi[0] * dphix
    src[2] = -wi[0] * dphiy
    src[3] = -wi[1] * dphix - wi[2] * dphiy

    # map rotated flux components (rho, q_n, E, q_t) back to (rho, qx, qy, E)
    fx = np.stack([flx[0], flx[1], flx[3], flx[2]])
    fy = np.stack([fly[0], fly[3], fly[1], fly[2]])
    out = w.copy()
    out[:, ii, jj] = (
        wi
        - dt / grid.dx * (fx[:, 1 : nx + 1, :] - fx[:, 0:nx, :])
        - dt / grid.dy * (fy[:, :, 1 : ny + 1] - fy[:, :, 0:ny])
        + dt * src
    )
    interior = out[:, ii, jj]
    state = ConservedState(interior[0], interior[1], interior[3], interior[2])
    if not euler.is_admissible(state, gas):
        raise InadmissibleState("2D HLL baseline produced an inadmissible cell")
    return out, dt


def block_average(x_fine, v_fine, edges_coarse):
    """Exact cell-average restriction of a fine-grid piecewise-constant field
    onto coarse cells with the given edges (overlap-weighted; the ratio need
    not be an integer)."""
    x_fine = np.asarray(x_fine)
    dxf = x_fine[1] - x_fine[0]
    lo_f = x_fine - 0.5 * dxf
    hi_f = x_fine + 0.5 * dxf
    v = np.asarray(v_fine)
    out = np.empty((v.shape[0], len(edges_coarse) - 1))
    for k in range(len(edges_coarse) - 1):
        a, b = edges_coarse[k], edges_coarse[k + 1]
        widths = np.clip(np.minimum(hi_f, b) - np.maximum(lo_f, a), 0.0, None)
        total = float(np.sum(widths))
        out[:, k] = v @ widths / total
    return out
