"""One-dimensional test problems driven straight through the sweep kernel."""

from __future__ import annotations

import math

import numpy as np

from .physics import PRS, RHO, VX, BX, BY, Constants, fast_speed
from .ppm1d import Strip1D, as_scheme, sweep_1d
from .reference import exact_riemann_cell_averages, hll_mhd

SOD_LEFT = (1.0, 0.0, 1.0)
SOD_RIGHT = (0.125, 0.0, 0.1)


def fill_ghosts(w, g, boundary):
    if boundary == "periodic":
        w[..., :g] = w[..., -2 * g:-g]
        w[..., -g:] = w[..., g:2 * g]
    elif boundary == "outflow":
        w[..., :g] = w[..., g:g + 1]
        w[..., -g:] = w[..., -g - 1:-g]
    else:
        raise ValueError(f"unknown boundary {boundary!r}")


def evolve_1d(w0, dx, t_end, c: Constants = Constants(), boundary="outflow", cfl=0.5, scheme=None):
    """Advance a primitive strip ``(8, N)`` to ``t_end``; returns ``(w, steps)``."""
    scheme = as_scheme(scheme)
    g = scheme.ghost
    n = w0.shape[-1]
    w = np.zeros((8, n + 2 * g))
    w[:, g:-g] = w0
    t, steps = 0.0, 0
    while t < t_end * (1.0 - 1e-14):
        fill_ghosts(w, g, boundary)
        inner = w[:, g:-g]
        speed = np.max(np.abs(inner[VX]) + fast_speed(inner, 0.0, 0, c))
        dt = min(cfl * np.min(dx) / speed, t_end - t)
        w[:, g:-g] = sweep_1d(Strip1D(w, dx, ghost=g), dt, c, scheme)
        t += dt
        steps += 1
    return w[:, g:-g], steps


def sod_problem(n=512, gamma=5.0 / 3.0, t_end=0.2, scheme=None):
    """Sod tube on [0, 1]: density L1 error against the exact solution."""
    x = (np.arange(n) + 0.5) / n
    w0 = np.zeros((8, n))
    w0[RHO] = np.where(x < 0.5, SOD_LEFT[0], SOD_RIGHT[0])
    w0[PRS] = np.where(x < 0.5, SOD_LEFT[2], SOD_RIGHT[2])
    w, _ = evolve_1d(w0, 1.0 / n, t_end, Constants(gamma=gamma), scheme=scheme)
    exact = exact_riemann_cell_averages(SOD_LEFT, SOD_RIGHT, gamma, np.linspace(0.0, 1.0, n + 1), 0.5, t_end)
    return float(np.mean(np.abs(w[RHO] - exact[0]))), w, exact


def sine_average(n, amplitude=0.2):
    """Exact cell averages of ``1 + amplitude*sin(2 pi x)`` on ``n`` cells of [0, 1]."""
    e = np.arange(n + 1) / n
    return 1.0 + amplitude * (np.cos(2 * np.pi * e[:-1]) - np.cos(2 * np.pi * e[1:])) * n / (2 * np.pi)


def advection_error(n, velocity=1.0, cfl=0.5, scheme=None):
    """L1 density error after a sine wave crosses a periodic box once."""
    w0 = np.zeros((8, n))
    w0[RHO] = sine_average(n)
    w0[VX] = velocity
    w0[PRS] = 1.0
    w, _ = evolve_1d(w0, 1.0 / n, 1.0 / abs(velocity), Constants(), "periodic", cfl, scheme)
    return float(np.mean(np.abs(w[RHO] - w0[RHO])))


def convergence_order(coarse=64, fine=128, scheme=None):
    e1 = advection_error(coarse, scheme=scheme)
    e2 = advection_error(fine, scheme=scheme)
    return math.log(e1 / e2) / math.log(fine / coarse), e1, e2


def brio_wu_state(n):
    x = (np.arange(n) + 0.5) / n
    left = x < 0.5
    w = np.zeros((8, n))
    w[RHO] = np.where(left, 1.0, 0.125)
    w[PRS] = np.where(left, 1.0, 0.1)
    w[BX] = 0.75
    w[BY] = np.where(left, 1.0, -1.0)
    return w


def brio_wu_problem(n=800, reference_cells=8000, t_end=0.1, scheme=None):
    """Brio-Wu tube (gamma 2): density L1 error against a fine first-order HLL run."""
    c = Constants(gamma=2.0)
    w, _ = evolve_1d(brio_wu_state(n), 1.0 / n, t_end, c, scheme=scheme)
    ref = brio_wu_state(reference_cells)
    zero = np.zeros(reference_cells)
    out = hll_mhd(ref[RHO], zero, zero, zero, ref[BY], zero, ref[PRS], 0.75, 2.0, 1.0 / reference_cells, t_end)
    coarse = out[0].reshape(n, reference_cells // n).mean(axis=1)
    return float(np.mean(np.abs(w[RHO] - coarse))), w, coarse
