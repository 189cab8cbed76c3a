"""Run driver: time integration, error norms, EOC, CSV and report emission.

A run writes, under <output>/<case>/:
  snapshot_<k>.csv    cell-center fields at scheduled times
                      (1D: x,rho,u,p,q,E,s,H; 2D: x,y,rho,u,v,p)
  reference.csv       reference solution at the final time (if available)
  steady.csv          unperturbed background (perturbation cases)
  perturbation_<k>.csv  W - W_steady per component (perturbation cases)
  eoc.csv             error ladder of the accuracy study (eoc_exact only)
  report.json         metrics, conservation ledger, timings, thresholds
"""

from __future__ import annotations

import json
import math
import os
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import cases, euler, fv1d, fv2d, highorder, oracle
from .cases import CaseConfig, Setup1D, Setup2D, build_setup, make_config
from .euler import GasModel
from .fv1d import GHOST, Grid1D


@dataclass
class RunReport:
    case: str
    config: dict
    metrics: dict = field(default_factory=dict)
    conservation: dict = field(default_factory=dict)
    entropy_violation_max: float | None = None
    n_negative_q2: int = 0
    wallclock: float = 0.0
    csv_paths: list = field(default_factory=list)
    thresholds: dict = field(default_factory=dict)
    passed: bool = True

    def to_json(self):
        def clean(v):
            if isinstance(v, float) and not math.isfinite(v):
                return None
            if isinstance(v, dict):
                return {k: clean(x) for k, x in v.items()}
            if isinstance(v, (list, tuple)):
                return [clean(x) for x in v]
            return v

        return json.dumps(clean(asdict(self)), indent=2, default=str)


def error_norms(num, ref, dx):
    """L2 = sqrt(dx sum e^2), Linf, plus both norms relative to the reference."""
    num = np.asarray(num, dtype=float)
    ref = np.asarray(ref, dtype=float)
    if num.size == 0 or num.shape != ref.shape:
        raise ValueError("fields must be nonempty and of equal shape")
    e = num - ref
    l1 = dx * float(np.sum(np.abs(e)))
    l2 = math.sqrt(dx * float(np.sum(e * e)))
    linf = float(np.max(np.abs(e)))
    ref_l2 = math.sqrt(dx * float(np.sum(ref * ref)))
    ref_linf = float(np.max(np.abs(ref)))
    return {
        "l1": l1,
        "l2": l2,
        "linf": linf,
        "rel_l2": l2 / ref_l2 if ref_l2 > 0 else math.inf,
        "rel_linf": linf / ref_linf if ref_linf > 0 else math.inf,
    }


def eoc(errors, ns):
    """Observed orders log(e_prev/e_next)/log(n_next/n_prev); None where an
    error vanishes (steady case)."""
    if len(errors) != len(ns) or len(errors) < 2:
        raise ValueError("need matching error/grid lists of length >= 2")
    out = []
    for (e0, n0), (e1, n1) in zip(zip(errors, ns), zip(errors[1:], ns[1:])):
        if e0 <= 0.0 or e1 <= 0.0:
            out.append(None)
        else:
            out.append(math.log(e0 / e1) / math.log(n1 / n0))
    return out


# --- time integration ---------------------------------------------------------


ETAS = {"s": lambda s: s, "exp_s": np.exp}


@dataclass
class Trace1D:
    grid: Grid1D
    snapshots: list  # [(t, interior field (3, n))]
    entropy_violation_max: float | None
    n_negative_q2: int
    totals_initial: np.ndarray
    totals_final: np.ndarray
    mass_drift_max: float


def integrate_1d(cfg: CaseConfig, setup: Setup1D, snapshot_times=None):
    gas = cfg.gas
    grid, bc = setup.grid, setup.bc
    w = setup.w0.copy()
    t = 0.0
    if snapshot_times is None:
        snapshot_times = np.linspace(0.0, cfg.t_final, max(2, cfg.snapshots))
    pending = sorted(set(float(x) for x in snapshot_times))
    snaps = []
    if pending and pending[0] <= 1e-14:
        snaps.append((0.0, w[:, grid.interior].copy()))
        pending.pop(0)

    tot0 = fv1d.totals(w, grid)
    mass_drift = 0.0
    viol = -math.inf if cfg.track_entropy else None
    neg_q2 = 0

    d = cfg.order - 1
    C = None
    w_prev = dt_prev = None
    while t < cfg.t_final - 1e-13:
        ahead = [p - t for p in pending if p > t + 1e-12]
        dt_cap = min([cfg.t_final - t] + ahead)
        if cfg.scheme == "hll":
            w_new, dt = oracle.hll_centered_step(w, grid, bc, t, gas, cfg.lam_factor, cfg.cfl, dt_max=dt_cap)
            res = None
        elif d == 0:
            wf = fv1d.fill_ghosts(w.copy(), grid, bc, t, gas)
            res = fv1d.resolve_interfaces(wf, grid, gas, cfg.lam_factor)
            dt = min(fv1d.cfl_dt(res, grid, cfg.cfl), dt_cap)
            w_new = fv1d.ars_update(wf, res, grid, dt)
            if not euler.is_admissible(euler.state_from_field(w_new[:, grid.interior]), gas):
                raise euler.InadmissibleState("first-order update left the admissible set")
            if cfg.track_entropy:
                for eta in ETAS.values():
                    viol = max(viol, fv1d.entropy_step_diagnostic(wf, w_new, res, dt, grid, eta, gas, form="fan"))
            neg_q2 += res.n_negative_q2
        else:
            if C is None:
                C = highorder.bootstrap_rate_coefficient(w, grid, bc, t, gas, cfg.lam_factor, cfg.c_theta)
            w_new, dt, wf, info = highorder.ssprk_step(
                w, grid, bc, t, gas, d, C, cfg.lam_factor, cfg.cfl, dt_max=dt_cap
            )
            if w_prev is not None:
                C = highorder.rate_coefficient(wf, w_prev, dt_prev, cfg.c_theta)
            w_prev, dt_prev = wf, dt
            neg_q2 += info["res"].n_negative_q2
        w = w_new
        t += dt
        mass_drift = max(mass_drift, abs(fv1d.totals(w, grid)[0] - tot0[0]) / max(abs(tot0[0]), 1e-300))
        while pending and t >= pending[0] - 1e-12:
            snaps.append((t, w[:, grid.interior].copy()))
            pending.pop(0)
    if not snaps or snaps[-1][0] < cfg.t_final - 1e-12:
        snaps.append((t, w[:, grid.interior].copy()))
    return Trace1D(grid, snaps, viol, neg_q2, tot0, fv1d.totals(w, grid), mass_drift)


@dataclass
class Trace2D:
    grid: fv2d.Grid2D
    snapshots: list
    totals_initial: np.ndarray
    totals_final: np.ndarray
    mass_drift_max: float


def integrate_2d(cfg: CaseConfig, setup: Setup2D, snapshot_times=None):
    gas = cfg.gas
    grid, bc = setup.grid, setup.bc
    w = setup.w0.copy()
    t = 0.0
    if snapshot_times is None:
        snapshot_times = np.linspace(0.0, cfg.t_final, max(2, cfg.snapshots))
    pending = sorted(set(float(x) for x in snapshot_times))
    snaps = []
    if pending and pending[0] <= 1e-14:
        snaps.append((0.0, w[:, 1:-1, 1:-1].copy()))
        pending.pop(0)
    tot0 = fv2d.totals_2d(w, grid)
    mass_drift = 0.0
    while t < cfg.t_final - 1e-13:
        ahead = [p - t for p in pending if p > t + 1e-12]
        dt_cap = min([cfg.t_final - t] + ahead)
        if cfg.scheme == "hll":
            w, dt = oracle.hll_centered_step_2d(w, grid, bc, gas, cfg.lam_factor, cfg.cfl, dt_max=dt_cap)
        else:
            w, dt, _ = fv2d.step_2d(w, grid, bc, t, gas, cfg.lam_factor, cfg.cfl, dt_max=dt_cap)
        t += dt
        mass_drift = max(mass_drift, abs(fv2d.totals_2d(w, grid)[0] - tot0[0]) / max(abs(tot0[0]), 1e-300))
        while pending and t >= pending[0] - 1e-12:
            snaps.append((t, w[:, 1:-1, 1:-1].copy()))
            pending.pop(0)
    if not snaps or snaps[-1][0] < cfg.t_final - 1e-12:
        snaps.append((t, w[:, 1:-1, 1:-1].copy()))
    return Trace2D(grid, snaps, tot0, fv2d.totals_2d(w, grid), mass_drift)


# --- CSV emission ---------------------------------------------------------------


def _fmt(v):
    return f"{v:.17g}"


def write_csv_1d(path, grid: Grid1D, w_int, gas: GasModel):
    x = grid.centers[grid.interior]
    phi = grid.phi_bar[grid.interior]
    state = euler.state_from_field(w_int)
    p = euler.pressure(state, gas)
    s = euler.specific_entropy(state, gas)
    h = euler.total_enthalpy(state, phi, gas)
    u = w_int[1] / w_int[0]
    with open(path, "w") as f:
        f.write("x,rho,u,p,q,E,s,H\n")
        for k in range(len(x)):
            f.write(
                ",".join(
                    _fmt(v)
                    for v in (x[k], w_int[0, k], u[k], p[k], w_int[1, k], w_int[2, k], s[k], h[k])
                )
                + "\n"
            )
    return path


def write_csv_2d(path, grid: fv2d.Grid2D, w_int, gas: GasModel):
    x = grid.xc[1:-1]
    y = grid.yc[1:-1]
    state = euler.ConservedState(w_int[0], w_int[1], w_int[3], w_int[2])
    p = euler.pressure(state, gas)
    with open(path, "w") as f:
        f.write("x,y,rho,u,v,p\n")
        for i in range(len(x)):
            for j in range(len(y)):
                f.write(
                    ",".join(
                        _fmt(v)
                        for v in (
                            x[i], y[j], w_int[0, i, j],
                            w_int[1, i, j] / w_int[0, i, j],
                            w_int[2, i, j] / w_int[0, i, j],
                            p[i, j],
                        )
                    )
                    + "\n"
                )
    return path


def write_perturbation_csv(path, grid: Grid1D, w_int, steady):
    x = grid.centers[grid.interior]
    d = w_int - steady
    with open(path, "w") as f:
        f.write("x,drho,dq,dE\n")
        for k in range(len(x)):
            f.write(",".join(_fmt(v) for v in (x[k], d[0, k], d[1, k], d[2, k])) + "\n")
    return path


# --- case execution --------------------------------------------------------------


VARS_1D = ("rho", "q", "E")


def _store_error_metrics(metrics, prefix, num, ref, dx):
    for i, name in enumerate(VARS_1D):
        for key, val in error_norms(num[i], ref[i], dx).items():
            metrics[f"{prefix}{name}_{key}"] = val


def run_case(cfg: CaseConfig) -> RunReport:
    t0 = time.perf_counter()
    out_dir = os.path.join(cfg.output, cfg.case)
    os.makedirs(out_dir, exist_ok=True)
    report = RunReport(case=cfg.case, config={**asdict(cfg)})

    if cfg.case == "eoc_exact":
        _run_eoc_case(cfg, out_dir, report)
    elif cfg.dim == 1:
        _run_case_1d(cfg, out_dir, report)
    else:
        _run_case_2d(cfg, out_dir, report)

    report.wallclock = time.perf_counter() - t0
    report.passed = check_thresholds(report)
    with open(os.path.join(out_dir, "report.json"), "w") as f:
        f.write(report.to_json())
    return report


def _run_case_1d(cfg, out_dir, report):
    gas = cfg.gas
    setup = build_setup(cfg)
    trace = integrate_1d(cfg, setup)
    for k, (t, w_int) in enumerate(trace.snapshots):
        path = os.path.join(out_dir, f"snapshot_{k}.csv")
        write_csv_1d(path, trace.grid, w_int, gas)
        report.csv_paths.append(path)
        if setup.steady is not None:
            ppath = os.path.join(out_dir, f"perturbation_{k}.csv")
            write_perturbation_csv(ppath, trace.grid, w_int, setup.steady)
            report.csv_paths.append(ppath)

    t_end, w_end = trace.snapshots[-1]
    if setup.reference is not None:
        ref = setup.reference(trace.grid, t_end)
        _store_error_metrics(report.metrics, "", w_end, ref, trace.grid.dx)
        rpath = os.path.join(out_dir, "reference.csv")
        write_csv_1d(rpath, trace.grid, ref, gas)
        report.csv_paths.append(rpath)
    if setup.steady is not None:
        spath = os.path.join(out_dir, "steady.csv")
        write_csv_1d(spath, trace.grid, setup.steady, gas)
        report.csv_paths.append(spath)
        dev = np.abs(w_end - setup.steady)
        report.metrics["background_max"] = float(
            np.max(dev[:, np.abs(trace.grid.centers[trace.grid.interior] - 0.5) > 0.3])
            if np.any(np.abs(trace.grid.centers[trace.grid.interior] - 0.5) > 0.3)
            else np.max(dev)
        )
        report.metrics["perturbation_max"] = float(np.max(dev))
    state = euler.state_from_field(w_end)
    report.metrics["min_rho"] = float(np.min(w_end[0]))
    report.metrics["min_p"] = float(np.min(euler.pressure(state, gas)))
    report.entropy_violation_max = trace.entropy_violation_max
    if trace.entropy_violation_max is not None:
        report.metrics["entropy_violation_max"] = trace.entropy_violation_max
    report.n_negative_q2 = trace.n_negative_q2
    report.conservation = {
        "initial": trace.totals_initial.tolist(),
        "final": trace.totals_final.tolist(),
        "mass_drift_max": trace.mass_drift_max,
    }


def _run_case_2d(cfg, out_dir, report):
    gas = cfg.gas
    setup = build_setup(cfg)
    trace = integrate_2d(cfg, setup)
    for k, (t, w_int) in enumerate(trace.snapshots):
        path = os.path.join(out_dir, f"snapshot_{k}.csv")
        write_csv_2d(path, trace.grid, w_int, gas)
        report.csv_paths.append(path)
    if setup.steady is not None:
        spath = os.path.join(out_dir, "steady.csv")
        write_csv_2d(spath, trace.grid, setup.steady, gas)
        report.csv_paths.append(spath)
    t_end, w_end = trace.snapshots[-1]
    if setup.reference is not None:
        ref = setup.reference(trace.grid, t_end)
        da = trace.grid.dx * trace.grid.dy
        state_n = euler.ConservedState(w_end[0], w_end[1], w_end[3], w_end[2])
        state_r = euler.ConservedState(ref[0], ref[1], ref[3], ref[2])
        p_n = euler.pressure(state_n, gas)
        p_r = euler.pressure(state_r, gas)
        for name, a, b in (("rho", w_end[0], ref[0]), ("p", p_n, p_r)):
            for key, val in error_norms(a, b, da).items():
                report.metrics[f"{name}_{key}"] = val
    state = euler.ConservedState(w_end[0], w_end[1], w_end[3], w_end[2])
    report.metrics["min_rho"] = float(np.min(w_end[0]))
    report.metrics["min_p"] = float(np.min(euler.pressure(state, gas)))
    report.conservation = {
        "initial": trace.totals_initial.tolist(),
        "final": trace.totals_final.tolist(),
        "mass_drift_max": trace.mass_drift_max,
    }


def _run_eoc_case(cfg, out_dir, report):
    gas = cfg.gas
    grids = list(cfg.grids) or [16 * 2**j for j in range(7)]
    rows = []
    for order in (1, 2, 3):
        errors = []
        for n in grids:
            sub = cases.make_config(
                cfg.case, n=n, order=order, t_final=cfg.t_final, output=cfg.output,
                cfl=cfg.cfl, lam_factor=cfg.lam_factor, grids=tuple(grids),
                params=cfg.params,
            )
            setup = build_setup(sub)
            trace = integrate_1d(sub, setup, snapshot_times=[sub.t_final])
            t_end, w_end = trace.snapshots[-1]
            ref = setup.reference(trace.grid, t_end)
            err = {
                name: error_norms(w_end[i], ref[i], trace.grid.dx)["l2"]
                for i, name in enumerate(VARS_1D)
            }
            errors.append(err)
        orders = eoc([e["rho"] for e in errors], grids)
        for j, n in enumerate(grids):
            rows.append(
                dict(
                    scheme=f"order{order}", n=n,
                    l2_rho=errors[j]["rho"], l2_q=errors[j]["q"], l2_E=errors[j]["E"],
                    eoc_rho=orders[j - 1] if j > 0 else None,
                )
            )
        report.metrics[f"eoc_rho_order{order}_final"] = orders[-1]
        report.metrics[f"l2_rho_order{order}_finest"] = errors[-1]["rho"]
    path = os.path.join(out_dir, "eoc.csv")
    with open(path, "w") as f:
        f.write("scheme,n,l2_rho,l2_q,l2_E,eoc_rho\n")
        for r in rows:
            eoc_s = "" if r["eoc_rho"] is None else _fmt(r["eoc_rho"])
            f.write(
                f"{r['scheme']},{r['n']},{_fmt(r['l2_rho'])},{_fmt(r['l2_q'])},{_fmt(r['l2_E'])},{eoc_s}\n"
            )
    report.csv_paths.append(path)


def check_thresholds(report: RunReport) -> bool:
    ok = True
    for name, bound in report.thresholds.get("max", {}).items():
        val = report.metrics.get(name)
        ok &= val is not None and val <= bound
    for name, bound in report.thresholds.get("min", {}).items():
        val = report.metrics.get(name)
        ok &= val is not None and val >= bound
    return bool(ok)
