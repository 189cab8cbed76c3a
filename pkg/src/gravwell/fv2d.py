"""Dimension-by-dimension Cartesian 2D extension (first order).

Fields have shape (4, nx+2, ny+2) with components (rho, qx, qy, E) and one
ghost layer.  Both direction sweeps reuse the 1D interface solver in the
rotated frame (normal momentum, tangential momentum) and are accumulated in
a single unsplit forward-Euler update.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import euler, riemann
from .euler import ConservedState, GasModel, InadmissibleState
from .potentials import Potential2D

GHOST2 = 1


@dataclass
class Grid2D:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int
    ny: int
    potential: Potential2D
    dx: float = field(init=False)
    dy: float = field(init=False)
    xc: np.ndarray = field(init=False)
    yc: np.ndarray = field(init=False)
    phi_bar: np.ndarray = field(init=False)

    def __post_init__(self):
        self.dx = (self.x_max - self.x_min) / self.nx
        self.dy = (self.y_max - self.y_min) / self.ny
        self.xc = self.x_min + (np.arange(-GHOST2, self.nx + GHOST2) + 0.5) * self.dx
        self.yc = self.y_min + (np.arange(-GHOST2, self.ny + GHOST2) + 0.5) * self.dy
        xg, yg = np.meshgrid(self.xc, self.yc, indexing="ij")
        self.phi_bar = self.potential.cell_average(xg, yg, self.dx, self.dy)


@dataclass
class BoundarySpec2D:
    """Per-axis boundary kind: 'periodic' or 'neumann'."""

    x: str = "periodic"
    y: str = "periodic"


def apply_phi_bc_2d(grid: Grid2D, bc: BoundarySpec2D):
    p = grid.phi_bar
    if bc.x == "periodic":
        p[0, :] = p[grid.nx, :]
        p[grid.nx + 1, :] = p[1, :]
    elif bc.x == "neumann":
        p[0, :] = p[1, :]
        p[grid.nx + 1, :] = p[grid.nx, :]
    if bc.y == "periodic":
        p[:, 0] = p[:, grid.ny]
        p[:, grid.ny + 1] = p[:, 1]
    elif bc.y == "neumann":
        p[:, 0] = p[:, 1]
        p[:, grid.ny + 1] = p[:, grid.ny]


def fill_ghosts_2d(w, grid: Grid2D, bc: BoundarySpec2D):
    nx, ny = grid.nx, grid.ny
    if bc.x == "periodic":
        w[:, 0, :] = w[:, nx, :]
        w[:, nx + 1, :] = w[:, 1, :]
    elif bc.x == "neumann":
        w[:, 0, :] = w[:, 1, :]
        w[:, nx + 1, :] = w[:, nx, :]
    else:
        raise ValueError(f"unknown x boundary {bc.x}")
    if bc.y == "periodic":
        w[:, :, 0] = w[:, :, ny]
        w[:, :, ny + 1] = w[:, :, 1]
    elif bc.y == "neumann":
        w[:, :, 0] = w[:, :, 1]
        w[:, :, ny + 1] = w[:, :, ny]
    else:
        raise ValueError(f"unknown y boundary {bc.y}")
    return w


def _resolve_x(w, grid: Grid2D, gas, lam_factor):
    """Interfaces between (i, j) and (i+1, j), i = 0..nx, interior j."""
    nx, ny = grid.nx, grid.ny
    jj = slice(1, ny + 1)
    wl = ConservedState(w[0, 0 : nx + 1, jj], w[1, 0 : nx + 1, jj], w[3, 0 : nx + 1, jj], w[2, 0 : nx + 1, jj])
    wr = ConservedState(w[0, 1 : nx + 2, jj], w[1, 1 : nx + 2, jj], w[3, 1 : nx + 2, jj], w[2, 1 : nx + 2, jj])
    return riemann.resolve(
        wl, wr, grid.phi_bar[0 : nx + 1, jj], grid.phi_bar[1 : nx + 2, jj], grid.dx, lam_factor, gas
    )


def _resolve_y(w, grid: Grid2D, gas, lam_factor):
    """Interfaces between (i, j) and (i, j+1), j = 0..ny, interior i."""
    nx, ny = grid.nx, grid.ny
    ii = slice(1, nx + 1)
    wl = ConservedState(w[0, ii, 0 : ny + 1], w[2, ii, 0 : ny + 1], w[3, ii, 0 : ny + 1], w[1, ii, 0 : ny + 1])
    wr = ConservedState(w[0, ii, 1 : ny + 2], w[2, ii, 1 : ny + 2], w[3, ii, 1 : ny + 2], w[1, ii, 1 : ny + 2])
    return riemann.resolve(
        wl, wr, grid.phi_bar[ii, 0 : ny + 1], grid.phi_bar[ii, 1 : ny + 2], grid.dy, lam_factor, gas
    )


def _stack_x(state):
    # rotated state (rho, q=qx, E, q_t=qy) back to field order (rho, qx, qy, E)
    return np.stack([state.rho, state.q, state.q_t, state.E])


def _stack_y(state):
    return np.stack([state.rho, state.q_t, state.q, state.E])


def step_2d(w, grid: Grid2D, bc: BoundarySpec2D, t, gas: GasModel, lam_factor=1.0, cfl=0.9, dt_max=None):
    """One unsplit forward-Euler step; returns (field, dt, (res_x, res_y))."""
    w = fill_ghosts_2d(w.copy(), grid, bc)
    res_x = _resolve_x(w, grid, gas, lam_factor)
    res_y = _resolve_y(w, grid, gas, lam_factor)
    dt = cfl * 0.5 * min(grid.dx / float(np.max(res_x.lam)), grid.dy / float(np.max(res_y.lam)))
    if dt_max is not None:
        dt = min(dt, dt_max)

    nx, ny = grid.nx, grid.ny
    wi = w[:, 1 : nx + 1, 1 : ny + 1]
    star_l_x = _stack_x(res_x.w_star_l)
    star_r_x = _stack_x(res_x.w_star_r)
    star_l_y = _stack_y(res_y.w_star_l)
    star_r_y = _stack_y(res_y.w_star_r)

    out = w.copy()
    out[:, 1 : nx + 1, 1 : ny + 1] = (
        wi
        + dt / grid.dx * (
            res_x.lam[1 : nx + 1, :] * (star_l_x[:, 1 : nx + 1, :] - wi)
            + res_x.lam[0:nx, :] * (star_r_x[:, 0:nx, :] - wi)
        )
        + dt / grid.dy * (
            res_y.lam[:, 1 : ny + 1] * (star_l_y[:, :, 1 : ny + 1] - wi)
            + res_y.lam[:, 0:ny] * (star_r_y[:, :, 0:ny] - wi)
        )
    )
    interior = out[:, 1 : nx + 1, 1 : ny + 1]
    state = ConservedState(interior[0], interior[1], interior[3], interior[2])
    if not euler.is_admissible(state, gas):
        raise InadmissibleState("2D update produced an inadmissible cell")
    return out, dt, (res_x, res_y)


def totals_2d(w, grid: Grid2D):
    return grid.dx * grid.dy * np.sum(w[:, 1 : grid.nx + 1, 1 : grid.ny + 1], axis=(1, 2))
