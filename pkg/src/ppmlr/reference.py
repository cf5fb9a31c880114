"""Reference solutions used to check the solver.

These are written independently of :mod:`ppmlr.ppm1d` and share no code with
it: an exact Riemann solver for the Euler equations and a first-order HLL
scheme for ideal MHD (``mu0 = 1``).
"""

from __future__ import annotations

import math

import numpy as np


def _pressure_function(p, rho, pk, ck, gamma):
    # Toro, Riemann Solvers and Numerical Methods for Fluid Dynamics, sec. 4.2
    if p > pk:
        a = 2.0 / ((gamma + 1.0) * rho)
        b = (gamma - 1.0) / (gamma + 1.0) * pk
        sq = math.sqrt(a / (p + b))
        f = (p - pk) * sq
        df = sq * (1.0 - 0.5 * (p - pk) / (b + p))
    else:
        pr = p / pk
        f = 2.0 * ck / (gamma - 1.0) * (pr ** ((gamma - 1.0) / (2.0 * gamma)) - 1.0)
        df = 1.0 / (rho * ck) * pr ** (-(gamma + 1.0) / (2.0 * gamma))
    return f, df


def star_state(left, right, gamma, tol=1e-14, max_iter=100):
    """Pressure and velocity between the nonlinear waves.

    ``left`` and ``right`` are ``(rho, u, p)`` tuples.
    """
    rl, ul, pl = left
    rr, ur, pr = right
    cl = math.sqrt(gamma * pl / rl)
    cr = math.sqrt(gamma * pr / rr)
    if 2.0 * (cl + cr) / (gamma - 1.0) <= ur - ul:
        raise ValueError("initial data generate vacuum")
    p = max(0.5 * (pl + pr) - 0.125 * (ur - ul) * (rl + rr) * (cl + cr), tol)
    for _ in range(max_iter):
        fl, dfl = _pressure_function(p, rl, pl, cl, gamma)
        fr, dfr = _pressure_function(p, rr, pr, cr, gamma)
        p_new = p - (fl + fr + ur - ul) / (dfl + dfr)
        p_new = max(p_new, tol)
        change = 2.0 * abs(p_new - p) / (p_new + p)
        p = p_new
        if change < tol:
            break
    fl, _ = _pressure_function(p, rl, pl, cl, gamma)
    fr, _ = _pressure_function(p, rr, pr, cr, gamma)
    u = 0.5 * (ul + ur) + 0.5 * (fr - fl)
    return p, u


def exact_riemann(left, right, gamma, xi):
    """Sample the exact Euler Riemann solution at similarity coordinates ``xi = x/t``.

    Returns
    -------
    rho, u, p : ndarray
    """
    rl, ul, pl = left
    rr, ur, pr = right
    ps, us = star_state(left, right, gamma)
    cl = math.sqrt(gamma * pl / rl)
    cr = math.sqrt(gamma * pr / rr)
    g1 = (gamma - 1.0) / (gamma + 1.0)
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    rho = np.empty_like(xi)
    u = np.empty_like(xi)
    p = np.empty_like(xi)
    for i, s in enumerate(xi):
        if s <= us:
            if ps > pl:
                rho_s = rl * (ps / pl + g1) / (g1 * ps / pl + 1.0)
                sl = ul - cl * math.sqrt((gamma + 1.0) / (2.0 * gamma) * ps / pl + (gamma - 1.0) / (2.0 * gamma))
                state = (rl, ul, pl) if s <= sl else (rho_s, us, ps)
            else:
                rho_s = rl * (ps / pl) ** (1.0 / gamma)
                cs = cl * (ps / pl) ** ((gamma - 1.0) / (2.0 * gamma))
                head, tail = ul - cl, us - cs
                if s <= head:
                    state = (rl, ul, pl)
                elif s >= tail:
                    state = (rho_s, us, ps)
                else:
                    uf = 2.0 / (gamma + 1.0) * (cl + 0.5 * (gamma - 1.0) * ul + s)
                    cf = 2.0 / (gamma + 1.0) * (cl + 0.5 * (gamma - 1.0) * (ul - s))
                    rf = rl * (cf / cl) ** (2.0 / (gamma - 1.0))
                    state = (rf, uf, pl * (cf / cl) ** (2.0 * gamma / (gamma - 1.0)))
        else:
            if ps > pr:
                rho_s = rr * (ps / pr + g1) / (g1 * ps / pr + 1.0)
                sr = ur + cr * math.sqrt((gamma + 1.0) / (2.0 * gamma) * ps / pr + (gamma - 1.0) / (2.0 * gamma))
                state = (rr, ur, pr) if s >= sr else (rho_s, us, ps)
            else:
                rho_s = rr * (ps / pr) ** (1.0 / gamma)
                cs = cr * (ps / pr) ** ((gamma - 1.0) / (2.0 * gamma))
                head, tail = ur + cr, us + cs
                if s >= head:
                    state = (rr, ur, pr)
                elif s <= tail:
                    state = (rho_s, us, ps)
                else:
                    uf = 2.0 / (gamma + 1.0) * (-cr + 0.5 * (gamma - 1.0) * ur + s)
                    cf = 2.0 / (gamma + 1.0) * (cr - 0.5 * (gamma - 1.0) * (ur - s))
                    rf = rr * (cf / cr) ** (2.0 / (gamma - 1.0))
                    state = (rf, uf, pr * (cf / cr) ** (2.0 * gamma / (gamma - 1.0)))
        rho[i], u[i], p[i] = state
    return rho, u, p


def exact_riemann_cell_averages(left, right, gamma, edges, x0, t, sub=64):
    """Cell-averaged exact density, velocity and pressure on the given edges.

    Averages use ``sub`` midpoint samples per cell so that discontinuities
    inside a cell are weighted by the fraction they cover.
    """
    edges = np.asarray(edges, dtype=float)
    n = edges.size - 1
    frac = (np.arange(sub) + 0.5) / sub
    x = edges[:-1, None] + (edges[1:] - edges[:-1])[:, None] * frac[None, :]
    rho, u, p = exact_riemann(left, right, gamma, ((x - x0) / t).ravel())
    return (rho.reshape(n, sub).mean(axis=1), u.reshape(n, sub).mean(axis=1),
            p.reshape(n, sub).mean(axis=1))


# --- first-order HLL for ideal MHD -------------------------------------------

def _mhd_flux(U, bx, gamma):
    rho = U[0]
    u, v, w = U[1] / rho, U[2] / rho, U[3] / rho
    by, bz, e = U[4], U[5], U[6]
    b2 = bx * bx + by * by + bz * bz
    p = (gamma - 1.0) * (e - 0.5 * rho * (u * u + v * v + w * w) - 0.5 * b2)
    pt = p + 0.5 * b2
    vb = u * bx + v * by + w * bz
    F = np.empty_like(U)
    F[0] = rho * u
    F[1] = rho * u * u + pt - bx * bx
    F[2] = rho * u * v - bx * by
    F[3] = rho * u * w - bx * bz
    F[4] = by * u - bx * v
    F[5] = bz * u - bx * w
    F[6] = (e + pt) * u - bx * vb
    a2 = gamma * p / rho
    ca2 = b2 / rho
    cax2 = bx * bx / rho
    cf = np.sqrt(0.5 * (a2 + ca2 + np.sqrt(np.maximum((a2 + ca2) ** 2 - 4.0 * a2 * cax2, 0.0))))
    return F, u, cf


def hll_mhd(rho, u, v, w, by, bz, p, bx, gamma, dx, t_end, cfl=0.8):
    """Evolve a 1D MHD state with first-order HLL fluxes and outflow edges.

    Variables are cell averages on a uniform grid; ``bx`` is the constant
    normal field. Returns the primitive state ``(rho, u, v, w, by, bz, p)``
    at ``t_end``.
    """
    U = np.empty((7, rho.size))
    U[0] = rho
    U[1], U[2], U[3] = rho * u, rho * v, rho * w
    U[4], U[5] = by, bz
    U[6] = p / (gamma - 1.0) + 0.5 * rho * (u * u + v * v + w * w) + 0.5 * (bx * bx + by * by + bz * bz)
    t = 0.0
    while t < t_end:
        Ug = np.concatenate([U[:, :1], U, U[:, -1:]], axis=1)
        F, vel, cf = _mhd_flux(Ug, bx, gamma)
        dt = cfl * dx / np.max(np.abs(vel) + cf)
        if t + dt > t_end:
            dt = t_end - t
        ul, ur = Ug[:, :-1], Ug[:, 1:]
        fl, fr = F[:, :-1], F[:, 1:]
        sl = np.minimum(vel[:-1] - cf[:-1], vel[1:] - cf[1:])
        sr = np.maximum(vel[:-1] + cf[:-1], vel[1:] + cf[1:])
        hll = (sr * fl - sl * fr + sl * sr * (ur - ul)) / (sr - sl)
        flux = np.where(sl >= 0.0, fl, np.where(sr <= 0.0, fr, hll))
        U = U - dt / dx * (flux[:, 1:] - flux[:, :-1])
        t += dt
    rho = U[0]
    u, v, w = U[1] / rho, U[2] / rho, U[3] / rho
    by, bz = U[4], U[5]
    p = (gamma - 1.0) * (U[6] - 0.5 * rho * (u * u + v * v + w * w) - 0.5 * (bx * bx + by * by + bz * bz))
    return rho, u, v, w, by, bz, p
