"""MHD state algebra with the dipole field split off.

States are stored as stacked float arrays with the field index first, so one
array of shape ``(8, ...)`` holds a whole block or a batch of strips.

Primitive order: rho, vx, vy, vz, b'x, b'y, b'z, p.
Conserved order: rho, mx, my, mz, b'x, b'y, b'z, E.

``b'`` is the deviation field ``B - B_d`` where ``B_d`` is the Earth's dipole.
Only elementary arithmetic and ``sqrt`` are used on the solver path so that
results do not depend on how arrays are batched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

RHO, VX, VY, VZ, BX, BY, BZ, PRS = range(8)
MX, MY, MZ, ENE = VX, VY, VZ, PRS
NVAR = 8

VEL = slice(VX, VZ + 1)
MAG = slice(BX, BZ + 1)

MU0_SI = 4.0e-7 * math.pi
EARTH_MOMENT_SI = 8.0e22  # A m^2

# Nondimensional defaults: length in R_E, field in nT, density in amu/cm^3.
# The moment gives a 30000 nT equatorial surface field pointing north.
EARTH_SURFACE_FIELD = 3.0e4
DEFAULT_MOMENT = (0.0, 0.0, -4.0 * math.pi * EARTH_SURFACE_FIELD)


class UnphysicalStateError(ValueError):
    """A cell reached non-positive density or pressure.

    ``index`` is the position of the first offending cell in the array that
    was being converted (excluding the field axis).
    """

    def __init__(self, message, index=None, quantity=None):
        super().__init__(message)
        self.index = index
        self.quantity = quantity


@dataclass(frozen=True)
class Constants:
    """Physical constants of a run.

    The default is the nondimensional system (``mu0 = 1``, lengths in R_E).
    """

    mu0: float = 1.0
    gamma: float = 5.0 / 3.0
    dipole_moment: tuple = field(default=DEFAULT_MOMENT)
    p_floor: float | None = None

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")
        if not self.mu0 > 0.0:
            raise ValueError(f"mu0 must be positive, got {self.mu0}")
        if len(self.dipole_moment) != 3:
            raise ValueError("dipole_moment must be a 3-vector")
        object.__setattr__(self, "dipole_moment", tuple(float(m) for m in self.dipole_moment))

    @classmethod
    def si(cls, **kw):
        """SI constants with the Earth's moment pointing geographic south."""
        kw.setdefault("mu0", MU0_SI)
        kw.setdefault("dipole_moment", (0.0, 0.0, -EARTH_MOMENT_SI))
        return cls(**kw)


def _first_bad(mask):
    idx = np.argwhere(mask)[0]
    return tuple(int(i) for i in idx)


def prim_to_cons(w, c: Constants = Constants()):
    """Convert primitive to conserved variables.

    ``E = p/(gamma-1) + rho v^2/2 + b'^2/(2 mu0)``.
    """
    w = np.asarray(w, dtype=float)
    u = np.empty_like(w)
    rho = w[RHO]
    u[RHO] = rho
    u[MX] = rho * w[VX]
    u[MY] = rho * w[VY]
    u[MZ] = rho * w[VZ]
    u[MAG] = w[MAG]
    v2 = w[VX] * w[VX] + w[VY] * w[VY] + w[VZ] * w[VZ]
    b2 = w[BX] * w[BX] + w[BY] * w[BY] + w[BZ] * w[BZ]
    u[ENE] = w[PRS] / (c.gamma - 1.0) + 0.5 * rho * v2 + b2 / (2.0 * c.mu0)
    return u


def cons_to_prim(u, c: Constants = Constants()):
    """Invert :func:`prim_to_cons`.

    Raises
    ------
    UnphysicalStateError
        If density or the recovered pressure is not positive and no pressure
        floor is configured.
    """
    u = np.asarray(u, dtype=float)
    w = np.empty_like(u)
    rho = u[RHO]
    if np.any(~(rho > 0.0)):
        idx = _first_bad(~(rho > 0.0))
        raise UnphysicalStateError(f"non-positive density at cell {idx}", idx, "rho")
    w[RHO] = rho
    w[VX] = u[MX] / rho
    w[VY] = u[MY] / rho
    w[VZ] = u[MZ] / rho
    w[MAG] = u[MAG]
    m2 = u[MX] * u[MX] + u[MY] * u[MY] + u[MZ] * u[MZ]
    b2 = u[BX] * u[BX] + u[BY] * u[BY] + u[BZ] * u[BZ]
    p = (c.gamma - 1.0) * (u[ENE] - 0.5 * m2 / rho - b2 / (2.0 * c.mu0))
    w[PRS] = enforce_pressure(p, c)
    return w


def enforce_pressure(p, c: Constants):
    """Apply the configured pressure floor, or fail on non-positive pressure."""
    bad = ~(p > 0.0)
    if c.p_floor is not None:
        return np.where(bad | (p < c.p_floor), c.p_floor, p)
    if np.any(bad):
        idx = _first_bad(bad)
        raise UnphysicalStateError(f"non-positive pressure at cell {idx}", idx, "p")
    return p


def total_pressure(w, c: Constants = Constants()):
    """``p* = p + b'^2/(2 mu0)``."""
    b2 = w[BX] * w[BX] + w[BY] * w[BY] + w[BZ] * w[BZ]
    return w[PRS] + b2 / (2.0 * c.mu0)


def total_field(w, bd):
    """``B = b' + B_d``."""
    return np.asarray(w)[MAG] + np.asarray(bd)


def dipole_field(pos, c: Constants = Constants(), moment=None):
    """Point-dipole field ``(mu0/4pi)(3(m.r^)r^ - m)/r^3``.

    ``pos`` has the vector components on the first axis, shape ``(3, ...)``.
    """
    pos = np.asarray(pos, dtype=float)
    m = np.asarray(c.dipole_moment if moment is None else moment, dtype=float)
    m = m.reshape((3,) + (1,) * (pos.ndim - 1))
    r2 = pos[0] * pos[0] + pos[1] * pos[1] + pos[2] * pos[2]
    if np.any(r2 == 0.0):
        raise ZeroDivisionError("dipole field is singular at the dipole position")
    r = np.sqrt(r2)
    mdotr = m[0] * pos[0] + m[1] * pos[1] + m[2] * pos[2]
    k = c.mu0 / (4.0 * math.pi)
    inv_r5 = 1.0 / (r2 * r2 * r)
    return k * (3.0 * mdotr * pos - m * r2) * inv_r5


def mirror_dipole_field(pos, image_center=(30.0, 0.0, 0.0), c: Constants = Constants()):
    """Field of the Earth dipole's image across the mid-plane to ``image_center``.

    The image moment is the Earth moment reflected in that plane, so the normal
    component of ``dipole + image`` vanishes on the plane.
    """
    pos = np.asarray(pos, dtype=float)
    center = np.asarray(image_center, dtype=float)
    n = center / np.linalg.norm(center)
    m = np.asarray(c.dipole_moment, dtype=float)
    m_img = m - 2.0 * np.dot(m, n) * n
    shifted = pos - center.reshape((3,) + (1,) * (pos.ndim - 1))
    return dipole_field(shifted, c, moment=m_img)


def fast_speed(w, bd, direction: int, c: Constants = Constants()):
    """Fast magnetosonic speed along ``direction`` using the total field.

    ``bd`` is the dipole field at the same cells (shape ``(3, ...)``), or zero.
    """
    rho = w[RHO]
    b = w[MAG] + bd
    a2 = c.gamma * w[PRS] / rho
    b2 = b[0] * b[0] + b[1] * b[1] + b[2] * b[2]
    ca2 = b2 / (c.mu0 * rho)
    can2 = b[direction] * b[direction] / (c.mu0 * rho)
    s = a2 + ca2
    disc = np.maximum(s * s - 4.0 * a2 * can2, 0.0)
    return np.sqrt(0.5 * (s + np.sqrt(disc)))
