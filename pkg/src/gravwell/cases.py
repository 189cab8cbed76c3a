"""Case registry: declarative setups for every experiment the solver
reproduces, from the accuracy study to the 2D implosion.

Each case provides defaults (grid, time horizon, scheme parameters), an
initializer, boundary conditions and, where available, a reference solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import fv1d, fv2d, oracle
from .equilibrium import (
    Branch,
    EquilibriumTriplet,
    hydrostatic_isentropic,
    moving_equilibrium,
)
from .euler import GasModel
from .fv1d import GHOST, BoundarySpec, EquilibriumBC, ExactBC, Grid1D, NeumannBC
from .fv2d import BoundarySpec2D, Grid2D
from .potentials import (
    GAUSS3_NODES,
    GAUSS3_WEIGHTS,
    PHI_GAUSSIAN_2D,
    PHI_LINEAR,
    PHI_NONE,
    PHI_QUADRATIC_WELL,
    PHI_SINE,
    PHI_SIN_Y,
    PHI_VORTEX,
    POTENTIALS_1D,
    gauss3_average,
    vortex_potential_radial,
)


@dataclass
class CaseConfig:
    """Declarative description of a run; field defaults come from the case
    registry and may be overridden by config files or CLI flags."""

    case: str
    dim: int = 1
    x_min: float = 0.0
    x_max: float = 1.0
    y_min: float = 0.0
    y_max: float = 1.0
    n: int = 50
    ny: int | None = None
    gamma: float = 1.4
    lam_factor: float = 1.0
    c_theta: float = 1.0
    cfl: float = 1.0
    order: int = 1
    t_final: float = 1.0
    snapshots: int = 4
    scheme: str = "wb"  # "wb" | "hll"
    branch: str = "subsonic"
    amplitude: float = 0.0
    potential: str = "none"
    track_entropy: bool = False
    seed: int = 0
    output: str = "out"
    grids: tuple = ()  # eoc case only
    params: dict = field(default_factory=dict)

    @property
    def gas(self) -> GasModel:
        return GasModel(self.gamma)


HYDRO_H0 = 1.4 / 0.4  # kappa = 1 form of the isentropic reference atmosphere
MOVING_TRIPLET = EquilibriumTriplet(q0=1.0, H0=5.0, s0=0.0)
PULSE = lambda x: np.exp(-100.0 * (x - 0.5) ** 2)


def hydro_state_of_phi(gas):
    def state(phi):
        st = hydrostatic_isentropic(phi, HYDRO_H0, 1.0, gas)
        return st.rho, np.zeros_like(np.asarray(st.rho, dtype=float)), st.p

    return state


def moving_state_of_phi(gas, trip=MOVING_TRIPLET, branch=Branch.SUBSONIC):
    def state(phi):
        st = moving_equilibrium(trip, phi, gas, branch)
        return st.rho, st.u, st.p

    return state


def field_from_primitives(grid: Grid1D, rho, u, p, gas):
    w = np.zeros((3, grid.n + 2 * GHOST))
    w[0] = rho
    w[1] = rho * u
    w[2] = p / (gas.gamma - 1.0) + 0.5 * rho * u * u
    return w


def gauss_average_primitive_field(grid: Grid1D, prim_of_x, gas):
    """Cell averages (3-pt Gauss) of conserved variables built from a
    pointwise primitive profile prim_of_x(x) -> (rho, u, p)."""

    def comp(idx):
        def f(x):
            rho, u, p = prim_of_x(x)
            if idx == 0:
                return rho
            if idx == 1:
                return rho * u
            return p / (gas.gamma - 1.0) + 0.5 * rho * u * u

        return f

    w = np.zeros((3, grid.n + 2 * GHOST))
    for i in range(3):
        w[i] = gauss3_average(comp(i), grid.centers, grid.dx)
    return w


@dataclass
class Setup1D:
    grid: Grid1D
    w0: np.ndarray
    bc: BoundarySpec
    reference: Callable | None = None  # reference(grid, t) -> (3, n) interior field
    steady: np.ndarray | None = None  # interior steady field for perturbation cases


@dataclass
class Setup2D:
    grid: Grid2D
    w0: np.ndarray
    bc: BoundarySpec2D
    reference: Callable | None = None
    steady: np.ndarray | None = None


# --- 1D equilibria ----------------------------------------------------------


def _equilibrium_setup(cfg: CaseConfig, potential, state_of_phi, periodic):
    gas = cfg.gas
    grid = Grid1D(cfg.x_min, cfg.x_max, cfg.n, potential)
    if periodic:
        bc = BoundarySpec.periodic()
    else:
        bc = BoundarySpec(EquilibriumBC(state_of_phi), EquilibriumBC(state_of_phi))
    fv1d.apply_phi_bc(grid, bc)
    rho, u, p = state_of_phi(grid.phi_bar)
    w0 = field_from_primitives(grid, rho, u, p, gas)
    steady = w0[:, grid.interior].copy()

    def reference(grid_, t):
        return steady

    return Setup1D(grid, w0, bc, reference, steady)


def setup_hydro(cfg: CaseConfig):
    potential = POTENTIALS_1D[cfg.potential]
    return _equilibrium_setup(cfg, potential, hydro_state_of_phi(cfg.gas), periodic=cfg.potential == "phi2")


def setup_moving(cfg: CaseConfig):
    potential = POTENTIALS_1D[cfg.potential]
    branch = Branch(cfg.branch)
    return _equilibrium_setup(
        cfg, potential, moving_state_of_phi(cfg.gas, MOVING_TRIPLET, branch), periodic=cfg.potential == "phi2"
    )


def setup_perturbed(cfg: CaseConfig):
    """Pressure pulse of amplitude A on top of a hydrostatic or moving
    equilibrium; Dirichlet ghosts hold the unperturbed steady state."""
    gas = cfg.gas
    grid = Grid1D(cfg.x_min, cfg.x_max, cfg.n, PHI_QUADRATIC_WELL)
    kind = cfg.params["background"]
    state_of_phi = hydro_state_of_phi(gas) if kind == "hydro" else moving_state_of_phi(gas)
    bc = BoundarySpec(EquilibriumBC(state_of_phi), EquilibriumBC(state_of_phi))
    fv1d.apply_phi_bc(grid, bc)
    rho, u, p = state_of_phi(grid.phi_bar)
    steady = field_from_primitives(grid, rho, u, p, gas)
    p_pert = p + cfg.amplitude * gauss3_average(PULSE, grid.centers, grid.dx)
    w0 = field_from_primitives(grid, rho, u, p_pert, gas)
    return Setup1D(grid, w0, bc, None, steady[:, grid.interior].copy())


def setup_moving_boundary_perturbed(cfg: CaseConfig):
    gas = cfg.gas
    grid = Grid1D(cfg.x_min, cfg.x_max, cfg.n, PHI_QUADRATIC_WELL)
    state_of_phi = moving_state_of_phi(gas)
    amp = cfg.amplitude

    def forced_u(t, u_eq):
        return u_eq + amp * math.sin(8.0 * math.pi * t)

    bc = BoundarySpec(EquilibriumBC(state_of_phi), EquilibriumBC(state_of_phi, u_of_t=forced_u))
    fv1d.apply_phi_bc(grid, bc)
    rho, u, p = state_of_phi(grid.phi_bar)
    w0 = field_from_primitives(grid, rho, u, p, gas)
    return Setup1D(grid, w0, bc, None, w0[:, grid.interior].copy())


# --- 1D Riemann problems -----------------------------------------------------


def _riemann_setup(cfg: CaseConfig, prim_l, prim_r, potential=PHI_NONE, x0=0.5):
    gas = cfg.gas
    grid = Grid1D(cfg.x_min, cfg.x_max, cfg.n, potential)
    bc = BoundarySpec(NeumannBC(), NeumannBC())
    fv1d.apply_phi_bc(grid, bc)

    def prim_of_x(x):
        left = np.asarray(x) < x0
        rho = np.where(left, prim_l[0], prim_r[0])
        u = np.where(left, prim_l[1], prim_r[1])
        p = np.where(left, prim_l[2], prim_r[2])
        return rho, u, p

    w0 = gauss_average_primitive_field(grid, prim_of_x, gas)

    def reference(grid_, t):
        x = grid_.centers[grid_.interior]
        if t <= 0.0:
            rho, u, p = prim_of_x(x)
        else:
            rho, u, p = oracle.exact_riemann(prim_l, prim_r, gas, (x - x0) / t)
        out = np.zeros((3, grid_.n))
        out[0] = rho
        out[1] = rho * u
        out[2] = p / (gas.gamma - 1.0) + 0.5 * rho * u * u
        return out

    return Setup1D(grid, w0, bc, reference)


def setup_sod(cfg):
    return _riemann_setup(cfg, (1.0, 0.0, 1.0), (0.125, 0.0, 0.1))


def setup_double_rarefaction(cfg):
    return _riemann_setup(cfg, (1.0, -10.0 / 3.0, 1.0), (1.0, 10.0 / 3.0, 1.0))


def setup_stationary_shock(cfg):
    return _riemann_setup(cfg, (24.0 / 25.0, 25.0 / 12.0, 17.0 / 6.0), (1.0, 2.0, 3.0))


def gravity_rp_sides(gas):
    """Left state from the subsonic moving branch of (q=0.5, s=0, H=6);
    right state hydrostatic with kappa = 3/4 and H = 3 (q = 0)."""
    left = EquilibriumTriplet(q0=0.5, H0=6.0, s0=0.0)

    def prim_left(phi):
        st = moving_equilibrium(left, phi, gas, Branch.SUBSONIC)
        return st.rho, st.u, st.p

    def prim_right(phi):
        st = hydrostatic_isentropic(phi, 3.0, 0.75, gas)
        return st.rho, np.zeros_like(np.asarray(st.rho, dtype=float)), st.p

    return prim_left, prim_right


def setup_gravity_rp(cfg: CaseConfig):
    gas = cfg.gas
    grid = Grid1D(cfg.x_min, cfg.x_max, cfg.n, PHI_QUADRATIC_WELL)
    bc = BoundarySpec(NeumannBC(), NeumannBC())
    fv1d.apply_phi_bc(grid, bc)
    prim_left, prim_right = gravity_rp_sides(gas)
    x0 = 0.5
    rho_l, u_l, p_l = prim_left(grid.phi_bar)
    rho_r, u_r, p_r = prim_right(grid.phi_bar)
    left = grid.centers < x0
    rho = np.where(left, rho_l, rho_r)
    u = np.where(left, u_l, u_r)
    p = np.where(left, p_l, p_r)
    w0 = field_from_primitives(grid, rho, u, p, gas)

    def reference(grid_, t):
        return reference_fine_hll(cfg, t, n_ref=int(cfg.params.get("n_ref", 2000)))

    return Setup1D(grid, w0, bc, reference)


def reference_fine_hll(cfg: CaseConfig, t_final, n_ref=2000):
    """Fine-grid HLL run with centered sources, restricted onto the coarse
    grid by exact block averaging."""
    gas = cfg.gas
    setup = setup_gravity_rp(replace(cfg, n=n_ref))
    grid, w, bc = setup.grid, setup.w0, setup.bc
    t = 0.0
    while t < t_final - 1e-13:
        w, dt = oracle.hll_centered_step(w, grid, bc, t, gas, cfg.lam_factor, cfg.cfl, dt_max=t_final - t)
        t += dt
    coarse_edges = cfg.x_min + np.arange(cfg.n + 1) * (cfg.x_max - cfg.x_min) / cfg.n
    return oracle.block_average(grid.centers[grid.interior], w[:, grid.interior], coarse_edges)


# --- accuracy study ----------------------------------------------------------


def setup_eoc(cfg: CaseConfig):
    gas = cfg.gas
    grid = Grid1D(cfg.x_min, cfg.x_max, cfg.n, PHI_LINEAR)
    exact = lambda x, t: oracle.exact_unsteady(x, t, u0=cfg.params.get("u0", 1.0), k=cfg.params.get("k", 5))
    bc = BoundarySpec(ExactBC(exact), ExactBC(exact))
    fv1d.apply_phi_bc(grid, bc)
    w0 = gauss_average_primitive_field(grid, lambda x: exact(x, 0.0), gas)

    def reference(grid_, t):
        w = gauss_average_primitive_field(grid_, lambda x: exact(x, t), gas)
        return w[:, grid_.interior]

    return Setup1D(grid, w0, bc, reference)


# --- 2D cases -----------------------------------------------------------------


def steady2d_state(gas, phi):
    """Grid-aligned moving equilibrium u1 = 1, rho*u2 = 1, s0 = 0, H0 = 10
    (total enthalpy including the transverse kinetic energy)."""
    trip = EquilibriumTriplet(q0=1.0, H0=10.0 - 0.5, s0=0.0)
    st = moving_equilibrium(trip, phi, gas)
    return st.rho, st.u, st.p


def setup_steady2d(cfg: CaseConfig):
    gas = cfg.gas
    ny = cfg.ny or cfg.n
    grid = Grid2D(cfg.x_min, cfg.x_max, cfg.y_min, cfg.y_max, cfg.n, ny, PHI_SIN_Y)
    bc = BoundarySpec2D("periodic", "periodic")
    fv2d.apply_phi_bc_2d(grid, bc)
    rho_c, u2_c, p_c = steady2d_state(gas, grid.phi_bar[1, :])
    rho = np.tile(rho_c, (cfg.n + 2, 1))
    u2 = np.tile(u2_c, (cfg.n + 2, 1))
    p = np.tile(p_c, (cfg.n + 2, 1))
    w0 = np.zeros((4, cfg.n + 2, ny + 2))
    w0[0] = rho
    w0[1] = rho
    w0[2] = rho * u2
    w0[3] = p / (gas.gamma - 1.0) + 0.5 * rho * (1.0 + u2 * u2)
    steady = w0[:, 1:-1, 1:-1].copy()
    return Setup2D(grid, w0, bc, lambda g, t: steady, steady)


def setup_steady2d_perturbed(cfg: CaseConfig):
    base = setup_steady2d(cfg)
    xg, yg = np.meshgrid(base.grid.xc, base.grid.yc, indexing="ij")
    r2 = (xg - 0.5) ** 2 + (yg - 0.5) ** 2
    base.w0[0] += cfg.amplitude * np.exp(-50.0 * r2)
    return base


def vortex_setup(r, rt=4.0, r_c=0.6):
    """Angular velocity, potential, hydrostatic density and full pressure of
    the stationary vortex at radius r."""
    r = np.asarray(r, dtype=float)
    u_theta = np.where(r <= 0.2, 5.0 * r, np.where(r <= 0.4, 2.0 - 5.0 * r, 0.0))
    phi = vortex_potential_radial(r, r_c)
    rho = np.exp(-phi / rt)
    p1 = lambda rr: 1.0 - np.exp(-12.5 * rr * rr / rt)
    p21 = math.exp(-(0.5 + math.log(5.0)) / rt) / ((rt - 1.0) * (rt - 0.5))
    p22 = math.exp(math.log(5.0) / rt) * (rt * (4.0 * rt - 2.5) + 0.5)

    def p2(rr):
        rr = np.asarray(rr, dtype=float)
        safe = np.where(rr > 0, rr, 1.0)
        poly = -2.0 + 10.0 * rr * (1.0 - 2.0 * rt) + rt * (6.0 - 4.0 * rt) + 12.5 * rr * rr * (rt - 1.0)
        return p21 * (p22 + safe ** (-1.0 / rt) * poly)

    p_vort = rt * np.where(
        r <= 0.2, p1(r), np.where(r <= 0.4, p1(0.2) + p2(r), p1(0.2) + p2(0.4))
    )
    p = rt * rho + p_vort
    return u_theta, phi, rho, p


def setup_vortex2d(cfg: CaseConfig):
    gas = cfg.gas
    rt = cfg.params.get("rt", 4.0)
    r_c = cfg.params.get("r_c", 0.6)
    ny = cfg.ny or cfg.n
    grid = Grid2D(cfg.x_min, cfg.x_max, cfg.y_min, cfg.y_max, cfg.n, ny, PHI_VORTEX)
    bc = BoundarySpec2D("periodic", "periodic")
    fv2d.apply_phi_bc_2d(grid, bc)

    def conserved_at(x, y):
        r = np.sqrt((x - 0.5) ** 2 + (y - 0.5) ** 2)
        u_theta, _, rho, p = vortex_setup(r, rt, r_c)
        safe = np.where(r > 0, r, 1.0)
        u = np.where(r > 0, -u_theta * (y - 0.5) / safe, 0.0)
        v = np.where(r > 0, u_theta * (x - 0.5) / safe, 0.0)
        E = p / (gas.gamma - 1.0) + 0.5 * rho * (u * u + v * v)
        return np.stack([rho, rho * u, rho * v, E])

    w0 = _gauss9_average_2d(conserved_at, grid)
    steady = w0[:, 1:-1, 1:-1].copy()
    return Setup2D(grid, w0, bc, lambda g, t: steady, steady)


def _gauss9_average_2d(fn, grid: Grid2D):
    xg, yg = np.meshgrid(grid.xc, grid.yc, indexing="ij")
    acc = None
    for wi, ni in zip(GAUSS3_WEIGHTS, GAUSS3_NODES):
        for wj, nj in zip(GAUSS3_WEIGHTS, GAUSS3_NODES):
            val = fn(xg + 0.5 * grid.dx * ni, yg + 0.5 * grid.dy * nj)
            acc = wi * wj * val if acc is None else acc + wi * wj * val
    return 0.25 * acc


def setup_implosion2d(cfg: CaseConfig):
    gas = cfg.gas
    ny = cfg.ny or cfg.n
    grid = Grid2D(cfg.x_min, cfg.x_max, cfg.y_min, cfg.y_max, cfg.n, ny, PHI_GAUSSIAN_2D)
    bc = BoundarySpec2D("neumann", "neumann")
    fv2d.apply_phi_bc_2d(grid, bc)

    def conserved_at(x, y):
        r = np.sqrt((x - 0.5) ** 2 + (y - 0.5) ** 2)
        inside = r < 0.25
        rho = np.where(inside, 1.0, 0.125)
        p = np.where(inside, 1.0, 0.1)
        zeros = np.zeros_like(rho)
        return np.stack([rho, zeros, zeros, p / (gas.gamma - 1.0)])

    w0 = _gauss9_average_2d(conserved_at, grid)
    return Setup2D(grid, w0, bc, None)


# --- registry -----------------------------------------------------------------


@dataclass(frozen=True)
class CaseEntry:
    description: str
    defaults: dict
    setup: Callable


REGISTRY = {
    "eoc_exact": CaseEntry(
        "accuracy study on the traveling-wave solution, orders 1-3, grids 16*2^j",
        dict(dim=1, x_min=0.0, x_max=2.0, t_final=0.1, potential="linear",
             grids=(16, 32, 64, 128, 256, 512, 1024), snapshots=2,
             params={"u0": 1.0, "k": 5}),
        setup_eoc,
    ),
    "hydro_phi1": CaseEntry(
        "isentropic hydrostatic atmosphere, quadratic-well potential",
        dict(n=50, t_final=1.0, potential="phi1", track_entropy=False),
        setup_hydro,
    ),
    "hydro_phi2": CaseEntry(
        "isentropic hydrostatic atmosphere, sine potential, periodic",
        dict(n=50, t_final=1.0, potential="phi2"),
        setup_hydro,
    ),
    "moving_phi1": CaseEntry(
        "moving equilibrium (q0=1, H0=5, s0=0), quadratic-well potential",
        dict(n=50, t_final=1.0, potential="phi1"),
        setup_moving,
    ),
    "moving_phi2": CaseEntry(
        "moving equilibrium (q0=1, H0=5, s0=0), sine potential, periodic",
        dict(n=50, t_final=1.0, potential="phi2"),
        setup_moving,
    ),
    "hydro_perturbed_a4": CaseEntry(
        "pressure pulse 1e-4 on the hydrostatic atmosphere",
        dict(n=50, t_final=0.075, potential="phi1", amplitude=1e-4, order=2,
             snapshots=4, params={"background": "hydro"}),
        setup_perturbed,
    ),
    "hydro_perturbed_a12": CaseEntry(
        "pressure pulse 1e-12 on the hydrostatic atmosphere",
        dict(n=50, t_final=0.075, potential="phi1", amplitude=1e-12, order=2,
             snapshots=4, params={"background": "hydro"}),
        setup_perturbed,
    ),
    "moving_perturbed_a4": CaseEntry(
        "pressure pulse 1e-4 on the moving equilibrium",
        dict(n=50, t_final=0.075, potential="phi1", amplitude=1e-4, order=2,
             snapshots=4, params={"background": "moving"}),
        setup_perturbed,
    ),
    "moving_perturbed_a12": CaseEntry(
        "pressure pulse 1e-12 on the moving equilibrium",
        dict(n=50, t_final=0.075, potential="phi1", amplitude=1e-12, order=2,
             snapshots=4, params={"background": "moving"}),
        setup_perturbed,
    ),
    "moving_boundary_perturbed": CaseEntry(
        "boundary velocity forcing 1e-8 sin(8 pi t) on the moving equilibrium",
        dict(n=512, t_final=0.72, potential="phi1", amplitude=1e-8, order=2,
             lam_factor=5.0, snapshots=4),
        setup_moving_boundary_perturbed,
    ),
    "sod": CaseEntry(
        "Sod shock tube (no gravity)",
        dict(n=75, t_final=0.1644, potential="none", order=1, snapshots=2,
             track_entropy=True),
        setup_sod,
    ),
    "double_rarefaction": CaseEntry(
        "double rarefaction, near-vacuum center (no gravity)",
        dict(n=75, t_final=0.09, potential="none", order=1, snapshots=2,
             track_entropy=True),
        setup_double_rarefaction,
    ),
    "stationary_shock": CaseEntry(
        "stationary shock wave (no gravity), C_theta = 3",
        dict(n=75, t_final=0.25, potential="none", order=1, c_theta=3.0, snapshots=2),
        setup_stationary_shock,
    ),
    "gravity_rp": CaseEntry(
        "Riemann problem in the quadratic gravitational well, steady-variable data",
        dict(n=75, t_final=0.2, potential="phi1", order=1, snapshots=2,
             track_entropy=True, params={"n_ref": 2000}),
        setup_gravity_rp,
    ),
    "vortex2d": CaseEntry(
        "stationary isothermal vortex in a piecewise radial potential",
        dict(dim=2, n=64, t_final=0.5, cfl=0.9, snapshots=2,
             params={"rt": 4.0, "r_c": 0.6}),
        setup_vortex2d,
    ),
    "steady2d": CaseEntry(
        "grid-aligned moving equilibrium, phi = sin(2 pi y)",
        dict(dim=2, n=32, t_final=1.0, cfl=0.9, snapshots=2),
        setup_steady2d,
    ),
    "steady2d_perturbed": CaseEntry(
        "density pulse 1e-5 on the grid-aligned equilibrium",
        dict(dim=2, n=256, t_final=0.2, cfl=0.9, amplitude=1e-5, snapshots=4),
        setup_steady2d_perturbed,
    ),
    "implosion2d": CaseEntry(
        "radial implosion in a Gaussian potential well",
        dict(dim=2, n=256, t_final=0.125, cfl=0.5, snapshots=4),
        setup_implosion2d,
    ),
}


def make_config(case: str, **overrides) -> CaseConfig:
    if case not in REGISTRY:
        raise KeyError(f"unknown case {case!r}; see list-cases")
    merged = dict(REGISTRY[case].defaults)
    merged.update(overrides)
    if "c_theta" not in merged and merged.get("order", 1) == 3:
        merged["c_theta"] = 0.15
    return CaseConfig(case=case, **merged)


def build_setup(cfg: CaseConfig):
    return REGISTRY[cfg.case].setup(cfg)
