"""One-dimensional PPMLR kernel.

A sweep reconstructs zone parabolas on the fixed grid, traces edge states over
the fast-wave domain of dependence, solves a two-state Lagrangian interface
problem, advances the zones in mass coordinates, and remaps the moved zones
conservatively back onto the fixed grid.

Arrays carry the cell index on the last axis; any leading axes are a batch of
independent strips. Strip fields use a local component order in which the
sweep direction is "normal":

    rho, u_n, u_t1, u_t2, b_n, b_t1, b_t2, p

which coincides with :mod:`ppmlr.physics` order for an x sweep.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .physics import Constants, enforce_pressure, prim_to_cons

RIEMANN_ITERATIONS = 5

# Lagrangian state slots. Slot 7 holds specific total energy instead of p.
L_RHO, L_U, L_V1, L_V2, L_BN, L_B1, L_B2, L_ES = range(8)
_VOLUME_FIELDS = [L_RHO, L_B1, L_B2]
_MASS_FIELDS = [L_U, L_V1, L_V2, L_ES]
_RECON_FIELDS = [0, 1, 2, 3, 5, 6, 7]


class StepRejected(RuntimeError):
    """The moved Lagrangian mesh is not usable for a remap.

    Raised when zones invert or an interface sweeps past a whole zone, which
    means the timestep violated the CFL bound.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class Scheme:
    """Reconstruction choice for a sweep.

    ``interp`` picks the interface values: ``"cw"`` is the fourth-order
    Colella-Woodward interpolation on a nonuniform mesh, ``"compact"`` the
    parabola through three neighbouring averages. ``limiter`` is
    ``"extremum"`` (flattens discontinuous extrema, keeps smooth ones with
    limited curvature) or ``"monotone"`` (the original limiter, every zone
    monotone or flat).
    """

    interp: str = "cw"
    limiter: str = "extremum"

    def __post_init__(self):
        if self.interp not in ("cw", "compact"):
            raise ValueError(f"unknown interpolation {self.interp!r}")
        if self.limiter not in ("extremum", "monotone"):
            raise ValueError(f"unknown limiter {self.limiter!r}")
        if self.interp == "compact" and self.limiter == "extremum":
            raise ValueError("the extremum limiter needs the cw interpolation")

    @property
    def radius(self):
        """Zones on each side that one parabola depends on."""
        return 1 if self.interp == "compact" else 2

    @property
    def ghost(self):
        """Ghost zones one sweep consumes on each side of the interior."""
        return 2 * self.radius + 2


DEFAULT_SCHEME = Scheme()
MONOTONE = Scheme("cw", "monotone")
COMPACT = Scheme("compact", "monotone")

# curvature slack of the extremum limiter
CURVATURE_SLACK = 1.25


def as_scheme(scheme):
    if isinstance(scheme, Scheme):
        return scheme
    if scheme is None:
        return DEFAULT_SCHEME
    named = {"ppm": DEFAULT_SCHEME, "monotone": MONOTONE, "compact": COMPACT}
    try:
        return named[scheme]
    except KeyError:
        raise ValueError(f"unknown scheme {scheme!r}") from None


def required_ghost(scheme=None):
    """Ghost cells a sweep consumes on each side of the interior."""
    return as_scheme(scheme).ghost


@dataclass
class ZoneParabola:
    """Parabolas ``a(xi) = left + xi*(right - left + six*(1 - xi))`` on ``xi in [0, 1]``."""

    left: np.ndarray
    right: np.ndarray
    avg: np.ndarray

    @property
    def six(self):
        return 6.0 * (self.avg - 0.5 * (self.left + self.right))

    def __call__(self, xi):
        d = self.right - self.left
        return self.left + xi * (d + self.six * (1.0 - xi))

    def right_average(self, y):
        """Mean over the fraction ``y`` of the zone adjacent to its right edge."""
        d = self.right - self.left
        return self.right - 0.5 * y * (d - (1.0 - (2.0 / 3.0) * y) * self.six)

    def left_average(self, y):
        """Mean over the fraction ``y`` of the zone adjacent to its left edge."""
        d = self.right - self.left
        return self.left + 0.5 * y * (d + (1.0 - (2.0 / 3.0) * y) * self.six)

    def __getitem__(self, key):
        return ZoneParabola(self.left[key], self.right[key], self.avg[key])


def _deriv_weight(nodes, i, j):
    # d/dx of the i-th Lagrange basis polynomial, evaluated at nodes[j]
    xj = nodes[j]
    if i == j:
        return sum(1.0 / (xj - xl) for l, xl in enumerate(nodes) if l != j)
    num = 1.0
    den = 1.0
    for l, xl in enumerate(nodes):
        if l != i:
            den = den * (nodes[i] - xl)
            if l != j:
                num = num * (xj - xl)
    return num / den


def compact_coefficients(h0, h1, h2):
    """Edge-value weights of the parabola matching three zone averages.

    The edge values of zone 1 are ``a1 + alpha*(a0 - a1) + beta*(a2 - a1)``.
    The parabola is the derivative of the cubic through the cumulative
    integral at the four zone edges. Returns ``(alpha_l, beta_l, alpha_r, beta_r)``.
    """
    nodes = [-h0, 0.0 * h1, h1, h1 + h2]
    # cumulative integral of unit data in zone 0 and zone 2, origin at nodes[1]
    basis0 = [-h0, 0.0, 0.0, 0.0]
    basis2 = [0.0, 0.0, 0.0, h2]
    out = []
    for j in (1, 2):
        w = [_deriv_weight(nodes, i, j) for i in range(4)]
        alpha = w[0] * basis0[0]
        beta = w[3] * basis2[3]
        out.extend([alpha, beta])
    return tuple(out)


def _compact_edges(q, dx):
    a0, a1, a2 = q[..., :-2], q[..., 1:-1], q[..., 2:]
    al, bl, ar, br = compact_coefficients(dx[..., :-2], dx[..., 1:-1], dx[..., 2:])
    d0 = a0 - a1
    d2 = a2 - a1
    left = a1 + al * d0 + bl * d2
    right = a1 + ar * d0 + br * d2
    # keep edge values between the adjacent zone averages
    left = np.minimum(np.maximum(left, np.minimum(a0, a1)), np.maximum(a0, a1))
    right = np.minimum(np.maximum(right, np.minimum(a1, a2)), np.maximum(a1, a2))
    return left, right, a1


def _cw_weights(h):
    # mesh weights of the Colella & Woodward (1984) nonuniform interpolation
    hm, h0, hp = h[..., :-2], h[..., 1:-1], h[..., 2:]
    s = h0 / (hm + h0 + hp)
    slope_r = s * (2.0 * hm + h0) / (hp + h0)
    slope_l = s * (h0 + 2.0 * hp) / (hm + h0)
    h_m1, h_0, h_1, h_2 = h[..., :-3], h[..., 1:-2], h[..., 2:-1], h[..., 3:]
    z1 = (h_m1 + h_0) / (2.0 * h_0 + h_1)
    z2 = (h_2 + h_1) / (2.0 * h_1 + h_0)
    total = h_m1 + h_0 + h_1 + h_2
    jump = h_0 / (h_0 + h_1) + 2.0 * h_1 * h_0 / (h_0 + h_1) * (z1 - z2) / total
    return slope_l, slope_r, jump, -h_0 * z1 / total, h_1 * z2 / total


def _cw_faces(q, h, limit_slopes):
    # faces[k] sits between zones k+1 and k+2 (zones 1 .. N-2 take part)
    slope_l, slope_r, jump, w_next, w_this = _cw_weights(h)
    dq = q[..., 1:] - q[..., :-1]
    dl, dr = dq[..., :-1], dq[..., 1:]
    da = slope_r * dr + slope_l * dl
    if limit_slopes:
        lim = np.minimum(np.abs(da), np.minimum(2.0 * np.abs(dl), 2.0 * np.abs(dr)))
        da = np.where(dl * dr > 0.0, np.copysign(lim, da), 0.0)
    return q[..., 1:-2] + jump * dq[..., 1:-1] + w_next * da[..., 1:] + w_this * da[..., :-1]


def _curvature(q, h):
    # second difference per zone, zones 1 .. N-2
    slope = (q[..., 1:] - q[..., :-1]) / (0.5 * (h[..., 1:] + h[..., :-1]))
    return (slope[..., 1:] - slope[..., :-1]) / (0.25 * (h[..., :-2] + 2.0 * h[..., 1:-1] + h[..., 2:]))


def _limit_curvature(k0, *others):
    # k0 when every estimate agrees in sign, capped by the slack times the others
    same = k0 != 0.0
    mag = np.abs(k0)
    for k in others:
        same &= (k > 0.0) == (k0 > 0.0)
        same &= k != 0.0
        mag = np.minimum(mag, CURVATURE_SLACK * np.abs(k))
    return np.where(same, np.copysign(mag, k0), 0.0)


def _extremum_edges(q, h):
    face = _cw_faces(q, h, limit_slopes=False)
    kappa = _curvature(q, h)
    # faces outside the range of their neighbours get a curvature-limited value
    a0, a1 = q[..., 1:-2], q[..., 2:-1]
    hf = 0.5 * (h[..., 1:-2] + h[..., 2:-1])
    outside = (face - a0) * (a1 - face) < 0.0
    kf = 3.0 * (a0 - 2.0 * face + a1) / (hf * hf)
    kf = _limit_curvature(kf, kappa[..., :-1], kappa[..., 1:])
    face = np.where(outside, 0.5 * (a0 + a1) - kf * (hf * hf) / 6.0, face)

    left, right = face[..., :-1], face[..., 1:]
    avg = q[..., 2:-2]
    hz = h[..., 2:-2]
    dl, dr = left - avg, right - avg
    extremum = (dr * dl >= 0.0) | ((q[..., 1:-3] - avg) * (avg - q[..., 3:-1]) <= 0.0)
    kp = 6.0 * (dl + dr) / (hz * hz)
    kl = _limit_curvature(kp, kappa[..., :-2], kappa[..., 1:-1], kappa[..., 2:])
    scale = np.where(kp != 0.0, kl / np.where(kp != 0.0, kp, 1.0), 0.0)
    # away from extrema pull back an edge that overshoots
    mono_left, mono_right = monotonize(left, right, avg)
    left = np.where(extremum, avg + dl * scale, mono_left)
    right = np.where(extremum, avg + dr * scale, mono_right)
    return left, right, avg


def monotonize(left, right, avg):
    """Colella-Woodward limiter: flatten extrema, pull back overshooting edges."""
    flat = (right - avg) * (avg - left) <= 0.0
    d = right - left
    six = 6.0 * (avg - 0.5 * (left + right))
    fix_left = ~flat & (d * six > d * d)
    fix_right = ~flat & (-(d * d) > d * six)
    new_left = np.where(flat, avg, np.where(fix_left, 3.0 * avg - 2.0 * right, left))
    new_right = np.where(flat, avg, np.where(fix_right, 3.0 * avg - 2.0 * left, right))
    return new_left, new_right


def reconstruct(q, dx, scheme=None):
    """Limited zone parabolas from zone averages.

    Parameters
    ----------
    q : ndarray, shape (..., N)
        Zone averages.
    dx : ndarray, broadcastable to ``q``
        Zone widths (or masses, for a remap in mass coordinates).
    scheme : Scheme or str, optional
        Defaults to cw interfaces with the extremum limiter.

    Returns
    -------
    ZoneParabola
        Parabolas for zones ``r .. N-r-1`` where ``r = scheme.radius``.
    """
    scheme = as_scheme(scheme)
    q = np.asarray(q, dtype=float)
    dx = np.asarray(dx, dtype=float)
    if dx.ndim == 0:
        dx = np.full(q.shape[-1], float(dx))
    if scheme.interp == "compact":
        left, right, avg = _compact_edges(q, dx)
    elif scheme.limiter == "extremum":
        return ZoneParabola(*_extremum_edges(q, dx))
    else:
        face = _cw_faces(q, dx, limit_slopes=True)
        left, right, avg = face[..., :-1], face[..., 1:], q[..., 2:-2]
    left, right = monotonize(left, right, avg)
    return ZoneParabola(left, right, avg)


def _fast(rho, p, bn, b1, b2, c):
    a2 = c.gamma * p / rho
    bsq = bn * bn + b1 * b1 + b2 * b2
    ca2 = bsq / (c.mu0 * rho)
    can2 = bn * bn / (c.mu0 * rho)
    s = a2 + ca2
    disc = np.maximum(s * s - 4.0 * a2 * can2, 0.0)
    return np.sqrt(0.5 * (s + np.sqrt(disc)))


@dataclass
class InterfaceSolution:
    u: np.ndarray      # normal velocity
    pi: np.ndarray     # normal stress p + (b_t^2 - b_n^2)/(2 mu0)
    v: np.ndarray      # transverse velocity, shape (2, ...)
    t: np.ndarray      # transverse stress -b_n b_t / mu0, shape (2, ...)


def interface_solve(left, right, bn, cl, cr, c: Constants):
    """Two-state Lagrangian interface problem.

    ``left``/``right`` are traced states ``(rho, u, v1, v2, b1, b2, p)`` and
    ``cl``/``cr`` the fast-wave impedances ``rho*c_f``. The normal problem is
    iterated with two-shock impedances scaled from the fast impedance; the
    transverse problem uses the fast impedance directly.
    """
    rl, ul, pl = left[0], left[1], left[6]
    rr, ur, pr = right[0], right[1], right[6]
    btl2 = left[4] * left[4] + left[5] * left[5]
    btr2 = right[4] * right[4] + right[5] * right[5]
    bn2 = bn * bn / (2.0 * c.mu0)
    peff_l = pl + btl2 / (2.0 * c.mu0)
    peff_r = pr + btr2 / (2.0 * c.mu0)
    pil = peff_l - bn2
    pir = peff_r - bn2

    pi_star = (cr * pil + cl * pir + cl * cr * (ul - ur)) / (cl + cr)
    g = (c.gamma + 1.0) / (2.0 * c.gamma)
    floor = (c.gamma - 1.0) / (2.0 * c.gamma)
    pi_min = -bn2 + 1e-10 * np.minimum(peff_l, peff_r)
    for _ in range(RIEMANN_ITERATIONS):
        pi_star = np.maximum(pi_star, pi_min)
        fl = np.maximum(1.0 + g * (pi_star - pil) / peff_l, floor)
        fr = np.maximum(1.0 + g * (pi_star - pir) / peff_r, floor)
        wl = cl * np.sqrt(fl)
        wr = cr * np.sqrt(fr)
        usl = ul - (pi_star - pil) / wl
        usr = ur + (pi_star - pir) / wr
        zl = 2.0 * wl * wl * wl / (wl * wl + cl * cl)
        zr = 2.0 * wr * wr * wr / (wr * wr + cr * cr)
        pi_star = pi_star - zl * zr * (usr - usl) / (zl + zr)
    pi_star = np.maximum(pi_star, pi_min)
    fl = np.maximum(1.0 + g * (pi_star - pil) / peff_l, floor)
    fr = np.maximum(1.0 + g * (pi_star - pir) / peff_r, floor)
    wl = cl * np.sqrt(fl)
    wr = cr * np.sqrt(fr)
    usl = ul - (pi_star - pil) / wl
    usr = ur + (pi_star - pir) / wr
    zl = 2.0 * wl * wl * wl / (wl * wl + cl * cl)
    zr = 2.0 * wr * wr * wr / (wr * wr + cr * cr)
    u_star = (zl * usl + zr * usr) / (zl + zr)

    v = np.empty((2,) + u_star.shape)
    t = np.empty((2,) + u_star.shape)
    for k in range(2):
        vl, vr = left[2 + k], right[2 + k]
        tl = -bn * left[4 + k] / c.mu0
        tr = -bn * right[4 + k] / c.mu0
        v[k] = (cl * vl + cr * vr + tl - tr) / (cl + cr)
        t[k] = (cr * tl + cl * tr + cl * cr * (vl - vr)) / (cl + cr)
    return InterfaceSolution(u_star, pi_star, v, t)


@dataclass
class LagrangianStrip:
    """Zones after the Lagrangian update, before remapping.

    ``q`` holds ``rho, u, v1, v2, b_n, b1, b2, e`` with ``e`` the specific
    total energy. ``delta[j]`` is the displacement of the left edge of zone
    ``j`` (the last entry is the right edge of the last zone), ``dx`` the moved
    widths, ``mass`` the zone masses per unit area. ``offset`` is the index of
    the first zone in the original strip.
    """

    q: np.ndarray
    dx: np.ndarray
    delta: np.ndarray
    mass: np.ndarray
    offset: int
    interface: InterfaceSolution | None = None


def lagrangian_step(w, dx, dt, bd=None, c: Constants = Constants(), scheme=None):
    """Advance zones one step in Lagrangian (mass) coordinates.

    Parameters
    ----------
    w : ndarray, shape (8, ..., N)
        Primitive strip state in local order.
    dx : ndarray
        Fixed zone widths, broadcastable to ``w[0]``.
    dt : float
    bd : ndarray, shape (3, ..., N), optional
        Dipole field in local order; only enters the wave speeds.

    Returns
    -------
    LagrangianStrip
        Zones ``r+1 .. N-r-2`` of the input strip.
    """
    w = np.asarray(w, dtype=float)
    n = w.shape[-1]
    scheme = as_scheme(scheme)
    r = scheme.radius
    dx = np.broadcast_to(np.asarray(dx, dtype=float), w.shape[1:])
    if bd is None:
        bd = np.zeros((3,) + w.shape[1:])

    par = reconstruct(w[_RECON_FIELDS], dx, scheme)
    pc = slice(r, n - r)
    wc = w[:, ..., pc]
    bdc = bd[:, ..., pc]
    cf = _fast(wc[0], wc[7], wc[4] + bdc[0], wc[5] + bdc[1], wc[6] + bdc[2], c)
    y = np.minimum(cf * dt / dx[..., pc], 1.0)

    left = par[..., :-1].right_average(y[..., :-1])
    right = par[..., 1:].left_average(y[..., 1:])
    bn = w[4]
    bn_face = 0.5 * (bn[..., r:n - r - 1] + bn[..., r + 1:n - r])
    bdl = bdc[..., :-1]
    bdr = bdc[..., 1:]
    # impedances from the traced states; the dipole enters through the total field
    cl = left[0] * _fast(left[0], left[6], bn_face + bdl[0], left[4] + bdl[1], left[5] + bdl[2], c)
    cr = right[0] * _fast(right[0], right[6], bn_face + bdr[0], right[4] + bdr[1], right[5] + bdr[2], c)
    face = interface_solve(left, right, bn_face, cl, cr, c)

    lc = slice(r + 1, n - r - 1)
    wl = w[:, ..., lc]
    dxc = dx[..., lc]
    dm = wl[0] * dxc
    delta = dt * face.u
    dxl = dxc + (delta[..., 1:] - delta[..., :-1])
    if np.any(~(dxl > 0.0)):
        idx = tuple(int(i) for i in np.argwhere(~(dxl > 0.0))[0])
        raise StepRejected(f"zone inverted during Lagrangian step at {idx}", idx)

    q = np.empty_like(wl)
    q[L_RHO] = dm / dxl
    q[L_U] = wl[1] - dt * (face.pi[..., 1:] - face.pi[..., :-1]) / dm
    for k in range(2):
        tk = face.t[k]
        q[L_V1 + k] = wl[2 + k] - dt * (tk[..., 1:] - tk[..., :-1]) / dm
    q[L_BN] = wl[4]
    flux_b = bn_face * face.v
    for k in range(2):
        q[L_B1 + k] = (wl[5 + k] * dxc + dt * (flux_b[k][..., 1:] - flux_b[k][..., :-1])) / dxl
    energy = prim_to_cons(wl, c)[7]
    work = face.pi * face.u + face.t[0] * face.v[0] + face.t[1] * face.v[1]
    q[L_ES] = energy / wl[0] - dt * (work[..., 1:] - work[..., :-1]) / dm
    return LagrangianStrip(q=q, dx=dxl, delta=delta, mass=dm, offset=r + 1, interface=face)


def remap(lag: LagrangianStrip, dx, scheme=None):
    """Conservatively remap Lagrangian zones onto the fixed zones.

    Density and transverse field are remapped by volume, velocities and
    specific energy by mass, each with parabolas built on the moved mesh and
    integrated exactly over the swept region. ``dx`` are the fixed widths of
    the same zones as ``lag``.

    Returns
    -------
    ndarray, shape (8, ..., M - 2r - 2)
        Remapped zones ``r+1 .. M-r-2`` of ``lag``, in the same layout.
    """
    q, dxl, delta, mass = lag.q, lag.dx, lag.delta, lag.mass
    m = q.shape[-1]
    scheme = as_scheme(scheme)
    r = scheme.radius
    dx = np.broadcast_to(np.asarray(dx, dtype=float), dxl.shape)
    if np.any(~(dxl > 0.0)):
        idx = tuple(int(i) for i in np.argwhere(~(dxl > 0.0))[0])
        raise StepRejected(f"moved mesh is not monotone at zone {idx}", idx)

    par_v = reconstruct(q[_VOLUME_FIELDS], dxl, scheme)
    par_m = reconstruct(q[_MASS_FIELDS], mass, scheme)

    d = delta[..., r + 1:m - r]
    donor_l = slice(r, m - r - 1)
    donor_r = slice(r + 1, m - r)
    width_l = dxl[..., donor_l]
    width_r = dxl[..., donor_r]
    pos = d > 0.0
    bad = np.where(pos, d > width_l, -d > width_r)
    if np.any(bad):
        idx = tuple(int(i) for i in np.argwhere(bad)[0])
        raise StepRejected(f"interface swept past a whole zone at {idx}", idx)
    yl = np.where(pos, d / width_l, 0.0)
    yr = np.where(pos, 0.0, -d / width_r)
    avg_v = np.where(pos, par_v[..., :-1].right_average(yl), par_v[..., 1:].left_average(yr))
    flux_v = d * avg_v
    fm = flux_v[0]
    ym_l = np.minimum(np.where(pos, fm / mass[..., donor_l], 0.0), 1.0)
    ym_r = np.minimum(np.where(pos, 0.0, -fm / mass[..., donor_r]), 1.0)
    avg_m = np.where(pos, par_m[..., :-1].right_average(ym_l), par_m[..., 1:].left_average(ym_r))
    flux_m = fm * avg_m

    cells = slice(r + 1, m - r - 1)
    qc = q[:, ..., cells]
    ratio = dxl[..., cells] / dx[..., cells]
    dxc = dx[..., cells]
    out = np.empty_like(qc)
    net_v = flux_v[..., :-1] - flux_v[..., 1:]
    for k, f in enumerate(_VOLUME_FIELDS):
        out[f] = qc[f] * ratio + net_v[k] / dxc
    net_mass = net_v[0]
    new_mass = mass[..., cells] + net_mass
    net_m = flux_m[..., :-1] - flux_m[..., 1:]
    for k, f in enumerate(_MASS_FIELDS):
        out[f] = qc[f] + (net_m[k] - qc[f] * net_mass) / new_mass
    out[L_BN] = qc[L_BN]
    return out


def lagrangian_to_primitive(q, c: Constants = Constants()):
    """Recover pressure from specific total energy; other slots pass through."""
    w = np.array(q, dtype=float)
    rho = q[L_RHO]
    v2 = q[L_U] * q[L_U] + q[L_V1] * q[L_V1] + q[L_V2] * q[L_V2]
    b2 = q[L_BN] * q[L_BN] + q[L_B1] * q[L_B1] + q[L_B2] * q[L_B2]
    p = (c.gamma - 1.0) * (rho * q[L_ES] - 0.5 * rho * v2 - b2 / (2.0 * c.mu0))
    w[7] = enforce_pressure(p, c)
    return w


@dataclass
class Strip1D:
    """A batch of strips along one direction, ghosts included.

    ``w`` has shape ``(8, ..., n + 2*ghost)`` in local component order and
    ``dx`` is broadcastable to ``w[0]``. ``bd`` is the dipole field in local
    order, or ``None``.
    """

    w: np.ndarray
    dx: np.ndarray
    ghost: int = 6
    bd: np.ndarray | None = None

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=float)
        if self.ghost < COMPACT.ghost:
            raise ValueError(f"ghost width must be at least {COMPACT.ghost}")
        if self.n < 1:
            raise ValueError("strip has no interior cells")
        if np.any(~(np.asarray(self.dx) > 0.0)):
            raise ValueError("zone widths must be positive")

    @property
    def n(self):
        return self.w.shape[-1] - 2 * self.ghost

    @property
    def interior(self):
        return self.w[..., self.ghost:self.ghost + self.n]


def sweep_1d(strip: Strip1D, dt, c: Constants = Constants(), scheme=None):
    """Advance the interior of ``strip`` one step along its direction.

    Returns the new interior primitive state, shape ``(8, ..., n)``.
    """
    scheme = as_scheme(scheme)
    g = scheme.ghost
    if strip.ghost < g:
        raise ValueError(f"{scheme} needs {g} ghost cells, strip has {strip.ghost}")
    w = strip.w
    n = w.shape[-1]
    dx = np.broadcast_to(np.asarray(strip.dx, dtype=float), w.shape[1:])
    lag = lagrangian_step(w, dx, dt, strip.bd, c, scheme)
    cells = slice(lag.offset, lag.offset + lag.q.shape[-1])
    q = remap(lag, dx[..., cells], scheme)
    # remap returns zones g .. n-g-1 of the strip
    extra = strip.ghost - g
    if extra:
        q = q[..., extra:q.shape[-1] - extra]
    return lagrangian_to_primitive(q, c)
