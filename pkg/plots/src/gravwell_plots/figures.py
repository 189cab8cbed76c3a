"""Figure builders for gravwell output directories.

Everything here works off the documented file contract only: snapshot CSVs
(x,rho,u,p,q,E,s,H in 1D; x,y,rho,u,v,p in 2D), reference.csv, steady.csv,
perturbation_<k>.csv, eoc.csv and report.json.  Nothing is recomputed from
solver internals.  Styles are fixed so identical inputs give identical
files.
"""

from __future__ import annotations

import csv
import glob
import json
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

plt.rcParams.update({"figure.dpi": 110, "svg.hashsalt": "gravwell"})

SLOPE_GUIDES = (1, 2, 3)


class PlotInputError(RuntimeError):
    """Missing or malformed CSV inputs."""


def read_csv_columns(path, expected=None):
    if not os.path.exists(path):
        raise PlotInputError(f"missing input file: {path}")
    with open(path) as f:
        reader = csv.reader(f)
        header = next(reader)
        rows = list(reader)
    if expected is not None and header != list(expected):
        raise PlotInputError(f"{path}: expected columns {expected}, found {header}")
    out = {}
    arr = list(zip(*rows)) if rows else [[] for _ in header]
    for i, name in enumerate(header):
        col = arr[i]
        try:
            out[name] = np.array(col, dtype=float)
        except ValueError:
            out[name] = np.array(col)
    return out


def snapshot_paths(case_dir):
    paths = sorted(
        glob.glob(os.path.join(case_dir, "snapshot_*.csv")),
        key=lambda p: int(os.path.basename(p).split("_")[1].split(".")[0]),
    )
    if not paths:
        raise PlotInputError(f"no snapshots in {case_dir}")
    return paths


def snapshot_times(case_dir):
    report = os.path.join(case_dir, "report.json")
    if os.path.exists(report):
        with open(report) as f:
            cfg = json.load(f).get("config", {})
        return cfg.get("t_final")
    return None


def figure_eoc(case_dir):
    """Log-log error-vs-N plot: one series per scheme plus slope guides."""
    cols = read_csv_columns(
        os.path.join(case_dir, "eoc.csv"), ["scheme", "n", "l2_rho", "l2_q", "l2_E", "eoc_rho"]
    )
    # scheme column came through the float parser; reread as text
    with open(os.path.join(case_dir, "eoc.csv")) as f:
        reader = csv.DictReader(f)
        rows = list(reader)
    schemes = []
    for row in rows:
        if row["scheme"] not in schemes:
            schemes.append(row["scheme"])
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for scheme in schemes:
        ns = np.array([float(r["n"]) for r in rows if r["scheme"] == scheme])
        errs = np.array([float(r["l2_rho"]) for r in rows if r["scheme"] == scheme])
        ax.loglog(ns, errs, marker="o", label=scheme)
        for r in rows:
            if r["scheme"] == scheme and r["eoc_rho"]:
                ax.annotate(
                    f"{float(r['eoc_rho']):.2f}",
                    (float(r["n"]), float(r["l2_rho"])),
                    textcoords="offset points",
                    xytext=(4, 4),
                    fontsize=7,
                )
    n_ref = np.array([min(float(r["n"]) for r in rows), max(float(r["n"]) for r in rows)])
    e_top = max(float(r["l2_rho"]) for r in rows)
    for slope in SLOPE_GUIDES:
        ax.loglog(
            n_ref,
            e_top * (n_ref / n_ref[0]) ** (-slope),
            linestyle="--",
            linewidth=0.8,
            color="gray",
            label=f"slope {slope}",
        )
    ax.set_xlabel("N")
    ax.set_ylabel(r"$L^2$ error ($\rho$)")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    return fig


def figure_riemann(case_dir, variables=("rho", "u", "p")):
    """Final snapshot against the reference solution, one panel per variable."""
    snap = read_csv_columns(snapshot_paths(case_dir)[-1])
    ref_path = os.path.join(case_dir, "reference.csv")
    ref = read_csv_columns(ref_path) if os.path.exists(ref_path) else None
    fig, axes = plt.subplots(1, len(variables), figsize=(4.0 * len(variables), 3.4))
    for ax, var in zip(np.atleast_1d(axes), variables):
        if ref is not None:
            ax.plot(ref["x"], ref[var], color="black", linewidth=1.0, label="reference")
        ax.plot(snap["x"], snap[var], marker=".", markersize=3, linestyle="none", label="numerical")
        ax.set_xlabel("x")
        ax.set_ylabel(var)
        ax.grid(True, alpha=0.3)
    np.atleast_1d(axes)[0].legend(fontsize=8)
    fig.tight_layout()
    return fig


def figure_riemann_steady_vars(case_dir):
    return figure_riemann(case_dir, variables=("q", "s", "H"))


def figure_perturbation(case_dir):
    """W - W_steady per component, all stored snapshot times overlaid."""
    paths = sorted(
        glob.glob(os.path.join(case_dir, "perturbation_*.csv")),
        key=lambda p: int(os.path.basename(p).split("_")[1].split(".")[0]),
    )
    if not paths:
        raise PlotInputError(f"no perturbation files in {case_dir}")
    fig, axes = plt.subplots(1, 3, figsize=(12.0, 3.4))
    labels = {"drho": r"$\rho-\rho_{eq}$", "dq": r"$q-q_{eq}$", "dE": r"$E-E_{eq}$"}
    for k, path in enumerate(paths):
        cols = read_csv_columns(path, ["x", "drho", "dq", "dE"])
        for ax, var in zip(axes, ("drho", "dq", "dE")):
            ax.plot(cols["x"], cols[var], linewidth=1.0, label=f"snapshot {k}")
    for ax, var in zip(axes, ("drho", "dq", "dE")):
        ax.set_xlabel("x")
        ax.set_ylabel(labels[var])
        ax.grid(True, alpha=0.3)
    axes[0].legend(fontsize=7)
    fig.tight_layout()
    return fig


def figure_heatmap(case_dir):
    """Density (or its deviation from the steady background) at every stored
    time, on one shared color scale."""
    paths = snapshot_paths(case_dir)
    steady_path = os.path.join(case_dir, "steady.csv")
    steady = read_csv_columns(steady_path) if os.path.exists(steady_path) else None
    frames = []
    for path in paths:
        cols = read_csv_columns(path, ["x", "y", "rho", "u", "v", "p"])
        x = np.unique(cols["x"])
        y = np.unique(cols["y"])
        rho = cols["rho"].reshape(len(x), len(y))
        if steady is not None:
            rho = rho - steady["rho"].reshape(len(x), len(y))
        frames.append((x, y, rho))
    vmin = min(f[2].min() for f in frames)
    vmax = max(f[2].max() for f in frames)
    fig, axes = plt.subplots(1, len(frames), figsize=(3.4 * len(frames), 3.2))
    for ax, (x, y, rho) in zip(np.atleast_1d(axes), frames):
        im = ax.pcolormesh(x, y, rho.T, vmin=vmin, vmax=vmax, shading="nearest")
        ax.set_aspect("equal")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
    fig.colorbar(im, ax=list(np.atleast_1d(axes)), shrink=0.85)
    return fig


FIGURES = {
    "eoc": (figure_eoc, ("eoc_exact",)),
    "riemann_primitive": (figure_riemann, ("sod", "double_rarefaction", "stationary_shock")),
    "riemann_steady_vars": (figure_riemann_steady_vars, ("gravity_rp",)),
    "perturbation": (
        figure_perturbation,
        (
            "hydro_perturbed_a4", "hydro_perturbed_a12",
            "moving_perturbed_a4", "moving_perturbed_a12",
            "moving_boundary_perturbed",
        ),
    ),
    "heatmap": (figure_heatmap, ("vortex2d", "steady2d", "steady2d_perturbed", "implosion2d")),
}


def figure_ids_for_case(case):
    return [fig_id for fig_id, (_, cases) in FIGURES.items() if case in cases]


def discover_cases(report_dir):
    """Case directories under a suite root, or the directory itself if it is
    a single case output."""
    if not os.path.isdir(report_dir):
        raise PlotInputError(f"not a directory: {report_dir}")
    if os.path.exists(os.path.join(report_dir, "report.json")):
        return {os.path.basename(os.path.normpath(report_dir)): report_dir}
    found = {}
    for entry in sorted(os.listdir(report_dir)):
        sub = os.path.join(report_dir, entry)
        if os.path.isdir(sub) and os.path.exists(os.path.join(sub, "report.json")):
            found[entry] = sub
    if not found:
        raise PlotInputError(f"no case outputs under {report_dir}")
    return found


def render(report_dir, figure_id=None, fmt="svg", out_dir=None):
    """Render the requested (or all applicable) figures; returns the list of
    written files."""
    cases = discover_cases(report_dir)
    written = []
    for case, case_dir in cases.items():
        for fig_id in figure_ids_for_case(case):
            if figure_id is not None and fig_id != figure_id:
                continue
            builder, _ = FIGURES[fig_id]
            fig = builder(case_dir)
            target_dir = out_dir or case_dir
            os.makedirs(target_dir, exist_ok=True)
            path = os.path.join(target_dir, f"{case}_{fig_id}.{fmt}")
            fig.savefig(path, metadata={"Date": None} if fmt == "svg" else None)
            plt.close(fig)
            written.append(path)
    if figure_id is not None and not written:
        raise PlotInputError(f"figure {figure_id!r} does not apply to any case in {report_dir}")
    return written
