"""Gravitational potentials and their cell averages.

Cell averages use 3-point Gauss-Legendre quadrature (exact for the quadratic
well, spectrally accurate for the trigonometric ones).  1D potentials carry
an analytic derivative for the high-order source quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

GAUSS3_NODES = np.array([-math.sqrt(3.0 / 5.0), 0.0, math.sqrt(3.0 / 5.0)])
GAUSS3_WEIGHTS = np.array([5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])
GAUSS2_NODES = np.array([-1.0 / math.sqrt(3.0), 1.0 / math.sqrt(3.0)])
GAUSS2_WEIGHTS = np.array([1.0, 1.0])


@dataclass(frozen=True)
class Potential1D:
    name: str
    phi: Callable
    dphi: Callable

    def cell_average(self, centers, dx):
        """3-point Gauss average of phi over cells of width dx."""
        centers = np.asarray(centers, dtype=float)
        x = centers[..., None] + 0.5 * dx * GAUSS3_NODES
        return 0.5 * np.sum(GAUSS3_WEIGHTS * self.phi(x), axis=-1)


@dataclass(frozen=True)
class Potential2D:
    name: str
    phi: Callable  # phi(x, y)

    def cell_average(self, xc, yc, dx, dy):
        """Tensor 3x3 Gauss average over cells centered at (xc, yc)."""
        xc = np.asarray(xc, dtype=float)
        yc = np.asarray(yc, dtype=float)
        acc = 0.0
        for wi, ni in zip(GAUSS3_WEIGHTS, GAUSS3_NODES):
            for wj, nj in zip(GAUSS3_WEIGHTS, GAUSS3_NODES):
                acc = acc + wi * wj * self.phi(xc + 0.5 * dx * ni, yc + 0.5 * dy * nj)
        return 0.25 * acc


def gauss3_average(fn, centers, dx):
    """Cell averages of an arbitrary scalar function of x."""
    centers = np.asarray(centers, dtype=float)
    x = centers[..., None] + 0.5 * dx * GAUSS3_NODES
    return 0.5 * np.sum(GAUSS3_WEIGHTS * fn(x), axis=-1)


PHI_QUADRATIC_WELL = Potential1D("phi1", lambda x: 0.5 * (x - 0.5) ** 2, lambda x: x - 0.5)
PHI_SINE = Potential1D("phi2", np.sin, np.cos)
PHI_LINEAR = Potential1D("linear", lambda x: np.asarray(x, dtype=float), lambda x: np.ones_like(np.asarray(x, dtype=float)))
PHI_NONE = Potential1D("none", lambda x: np.zeros_like(np.asarray(x, dtype=float)), lambda x: np.zeros_like(np.asarray(x, dtype=float)))

POTENTIALS_1D = {p.name: p for p in (PHI_QUADRATIC_WELL, PHI_SINE, PHI_LINEAR, PHI_NONE)}


def _gaussian_well(x, y):
    return -np.exp(-50.0 * ((x - 0.5) ** 2 + (y - 0.5) ** 2))


def _sin_2pi_y(x, y):
    return np.sin(2.0 * np.pi * y) + 0.0 * np.asarray(x, dtype=float)


PHI_GAUSSIAN_2D = Potential2D("gaussian2d", _gaussian_well)
PHI_SIN_Y = Potential2D("sin2piy", _sin_2pi_y)


def vortex_potential_radial(r, r_c=0.6):
    """Piecewise radial potential of the stationary-vortex setup."""
    r = np.asarray(r, dtype=float)
    a = r_c / (r_c - 0.4)
    b = 1.0 / (r_c - 0.4)
    with np.errstate(divide="ignore", invalid="ignore"):
        mid = 0.5 - math.log(0.2) + np.log(np.where(r > 0, r, 1.0))
    outer = math.log(2.0) - 0.5 * a + 2.5 * a * r - 1.25 * b * r * r
    cap = math.log(2.0) - 0.5 * a + 1.25 * b * r_c * r_c
    return np.where(
        r <= 0.2,
        12.5 * r * r,
        np.where(r <= 0.4, mid, np.where(r <= r_c, outer, cap)),
    )


PHI_VORTEX = Potential2D(
    "vortex_piecewise",
    lambda x, y: vortex_potential_radial(np.sqrt((x - 0.5) ** 2 + (y - 0.5) ** 2)),
)

POTENTIALS_2D = {p.name: p for p in (PHI_GAUSSIAN_2D, PHI_SIN_Y, PHI_VORTEX)}
