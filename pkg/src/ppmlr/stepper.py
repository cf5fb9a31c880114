"""Three-dimensional time stepping of one block.

A step applies one-dimensional sweeps along each axis in turn, alternating
the order between steps. Before each sweep the ghost layers along that axis
are refreshed (by the caller's halo exchange and :func:`apply_boundaries`),
the dipole source terms whose derivatives run along that axis are evaluated
from the pre-sweep state, the strips are advanced by :func:`sweep_1d`, and
the sources are added to the result. Because every source is linear in the
spatial derivatives, the three directional parts sum to the full source.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import physics as ph
from .grid import StretchedGrid
from .physics import Constants, cons_to_prim, prim_to_cons
from .ppm1d import DEFAULT_SCHEME, Scheme, Strip1D, as_scheme, sweep_1d

FACES = ("-x", "+x", "-y", "+y", "-z", "+z")
BOUNDARY_KINDS = ("outflow", "inflow", "periodic")


def face_name(axis, side):
    return FACES[2 * axis + side]


def sweep_order(step):
    """x, y, z on even steps and z, y, x on odd ones."""
    return (0, 1, 2) if step % 2 == 0 else (2, 1, 0)


@dataclass(frozen=True)
class SolarWindParams:
    """Upstream state in nondimensional units (R_E, nT, amu/cm^3).

    The velocity unit is the Alfven speed of 1 nT in 1 amu/cm^3 (21.9 km/s),
    so the defaults are 400 km/s, 5 cm^-3, 1e5 K and a 5 nT southward IMF.
    """

    rho_sw: float = 5.0
    p_sw: float = 8.67
    v_sw: tuple = (-18.3, 0.0, 0.0)
    imf: tuple = (0.0, 0.0, -5.0)

    def __post_init__(self):
        if not (self.rho_sw > 0.0 and self.p_sw > 0.0):
            raise ValueError("solar wind density and pressure must be positive")
        object.__setattr__(self, "v_sw", tuple(float(v) for v in self.v_sw))
        object.__setattr__(self, "imf", tuple(float(b) for b in self.imf))


@dataclass(frozen=True)
class RadialProfile:
    """Spherically symmetric density and temperature inside the magnetosphere.

    ``rho(r) = rho_sw * (1 + density_boost * (r0/r)^3)`` and
    ``T(r) = T_sw * (1 + temperature_boost * (r0/r)^3)``, with ``r`` clipped
    below at ``r0``.
    """

    r0: float = 3.0
    density_boost: float = 9.0
    temperature_boost: float = 0.0

    def shape(self, r):
        s = self.r0 / np.maximum(r, self.r0)
        return s * s * s


@dataclass(frozen=True)
class Problem:
    """Initial state, boundary kinds and source switches of a run.

    ``initial(pos, bd)`` and ``inflow(pos, bd)`` map cell centers of shape
    ``(3, ...)`` and the dipole field there to a primitive state. They must
    be pointwise so that every block computes bitwise the same values.
    """

    initial: Callable
    boundary: tuple = ("outflow",) * 6
    inflow: Callable | None = None
    dipole: bool = False
    inner_radius: float | None = None

    def __post_init__(self):
        if len(self.boundary) != 6 or any(k not in BOUNDARY_KINDS for k in self.boundary):
            raise ValueError(f"boundary must list 6 kinds from {BOUNDARY_KINDS}")
        for a in range(3):
            lo, hi = self.boundary[2 * a], self.boundary[2 * a + 1]
            if (lo == "periodic") != (hi == "periodic"):
                raise ValueError(f"axis {'xyz'[a]}: periodic must be set on both faces")
        if "inflow" in self.boundary and self.inflow is None:
            raise ValueError("an inflow face needs an inflow state")


@dataclass(frozen=True)
class SolverOptions:
    constants: Constants = field(default_factory=Constants)
    scheme: Scheme = DEFAULT_SCHEME
    cfl: float = 0.5
    sources: bool = True

    def __post_init__(self):
        object.__setattr__(self, "scheme", as_scheme(self.scheme))
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError(f"cfl must be in (0, 1], got {self.cfl}")


@dataclass(eq=False)
class BlockState:
    """Fields of one block with ghost shells of width ``ghost``.

    ``w`` holds primitive variables, shape ``(8, nx+2g, ny+2g, nz+2g)``.
    ``start`` is the global index of the first interior cell on each axis.
    ``physical`` flags which of the six faces lie on the domain boundary.
    """

    w: np.ndarray
    bd: np.ndarray
    centers: tuple
    spacings: tuple
    ghost: int
    start: tuple
    shape: tuple
    boundary: tuple
    physical: tuple
    frozen: np.ndarray | None = None
    frozen_values: np.ndarray | None = None
    inflow: dict = field(default_factory=dict)
    time: float = 0.0
    step: int = 0

    @property
    def interior_slices(self):
        g = self.ghost
        return tuple(slice(g, g + n) for n in self.shape)

    @property
    def interior(self):
        return self.w[(slice(None),) + self.interior_slices]

    def copy(self):
        out = BlockState(**{k: getattr(self, k) for k in self.__dataclass_fields__})
        out.w = self.w.copy()
        return out


def _mesh(centers):
    return np.stack(np.meshgrid(*centers, indexing="ij"))


def init_block(grid: StretchedGrid, problem: Problem, c: Constants = Constants(), ghost=None,
               start=(0, 0, 0), shape=None, physical=None, scheme=None) -> BlockState:
    """Build a block of ``grid`` covering ``shape`` cells from ``start``."""
    g = as_scheme(scheme).ghost if ghost is None else int(ghost)
    if g < as_scheme(scheme).ghost:
        raise ValueError(f"ghost width {g} is below the {as_scheme(scheme).ghost} the scheme needs")
    shape = grid.shape if shape is None else tuple(shape)
    if physical is None:
        physical = (True,) * 6
    centers, spacings = [], []
    for axis, s, n in zip(grid.axes, start, shape):
        edges = axis.padded(g)[s:s + n + 2 * g + 1]
        centers.append(0.5 * (edges[:-1] + edges[1:]))
        spacings.append(edges[1:] - edges[:-1])
    pos = _mesh(centers)
    if problem.dipole:
        # a cell centred on the dipole sits inside the frozen core; give it zero field
        at_origin = (pos[0] == 0.0) & (pos[1] == 0.0) & (pos[2] == 0.0)
        bd = ph.dipole_field(np.where(at_origin, 1.0, pos), c)
        bd[:, at_origin] = 0.0
    else:
        bd = np.zeros_like(pos)
    bd.flags.writeable = False
    w = np.array(problem.initial(pos, bd), dtype=float)
    block = BlockState(w=w, bd=bd, centers=tuple(centers), spacings=tuple(spacings), ghost=g,
                       start=tuple(start), shape=shape, boundary=problem.boundary,
                       physical=tuple(physical))
    if problem.inner_radius is not None:
        p = pos[(slice(None),) + block.interior_slices]
        r2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2]
        block.frozen = r2 < problem.inner_radius * problem.inner_radius
        block.frozen_values = block.interior[:, block.frozen].copy()
    for f, kind in enumerate(problem.boundary):
        if kind == "inflow" and physical[f]:
            sl = _ghost_slab(block, f // 2, f % 2)
            block.inflow[f] = np.array(problem.inflow(pos[sl], bd[sl]), dtype=float)
    return block


def magnetosphere_problem(sw: SolarWindParams = SolarWindParams(), profile: RadialProfile = RadialProfile(),
                          c: Constants = Constants(), plane=15.0, image_center=(30.0, 0.0, 0.0),
                          inner_radius=3.0) -> Problem:
    """Initial magnetosphere: mirrored dipole inside ``x <= plane``, solar wind outside."""
    t_sw = sw.p_sw / sw.rho_sw

    def wind(pos, bd):
        w = np.empty((8,) + pos.shape[1:])
        w[ph.RHO] = sw.rho_sw
        for k in range(3):
            w[ph.VX + k] = sw.v_sw[k]
            w[ph.BX + k] = sw.imf[k] - bd[k]
        w[ph.PRS] = sw.p_sw
        return w

    def initial(pos, bd):
        w = wind(pos, bd)
        inside = pos[0] <= plane
        r = np.sqrt(pos[0] * pos[0] + pos[1] * pos[1] + pos[2] * pos[2])
        s = profile.shape(r)
        rho = sw.rho_sw * (1.0 + profile.density_boost * s)
        temp = t_sw * (1.0 + profile.temperature_boost * s)
        # the image dipole lies in the wind region, so only evaluate it inside
        mirror = ph.mirror_dipole_field(np.where(inside, pos, 0.0), image_center, c)
        w[ph.RHO] = np.where(inside, rho, w[ph.RHO])
        w[ph.PRS] = np.where(inside, rho * temp, w[ph.PRS])
        for k in range(3):
            w[ph.VX + k] = np.where(inside, 0.0, w[ph.VX + k])
            w[ph.BX + k] = np.where(inside, mirror[k], w[ph.BX + k])
        return w

    return Problem(initial=initial, boundary=("outflow", "inflow", "outflow", "outflow", "outflow", "outflow"),
                   inflow=wind, dipole=True, inner_radius=inner_radius)


def init_magnetosphere(grid: StretchedGrid, sw: SolarWindParams = SolarWindParams(),
                       c: Constants = Constants(), **kw) -> BlockState:
    """Magnetosphere initial state on a block of ``grid`` (whole grid by default)."""
    profile = kw.pop("profile", RadialProfile())
    return init_block(grid, magnetosphere_problem(sw, profile, c), c, **kw)


def compute_dt(block: BlockState, cfl=0.5, c: Constants = Constants()):
    """Largest stable step of the block interior; the caller reduces across blocks."""
    w = block.interior
    bd = block.bd[(slice(None),) + block.interior_slices]
    dt = np.inf
    for a in range(3):
        h = block.spacings[a][block.interior_slices[a]]
        h = h.reshape([-1 if i == a else 1 for i in range(3)])
        speed = np.abs(w[ph.VX + a]) + ph.fast_speed(w, bd, a, c)
        bad = ~np.isfinite(speed)
        if np.any(bad):
            idx = tuple(int(i) + s for i, s in zip(np.argwhere(bad)[0], block.start))
            raise FloatingPointError(f"non-finite wave speed at global cell {idx}")
        dt = min(dt, float(np.min(h / speed)))
    return cfl * dt


# --- boundaries ------------------------------------------------------------------

def _ghost_slab(block, axis, side):
    g, n = block.ghost, block.shape[axis]
    sl = [slice(None)] * 4
    sl[1 + axis] = slice(0, g) if side == 0 else slice(g + n, n + 2 * g)
    return tuple(sl)


def apply_boundaries(block: BlockState, axis=None):
    """Fill ghost layers on the block's physical faces (one axis or all)."""
    axes = range(3) if axis is None else (axis,)
    g = block.ghost
    for a in axes:
        n = block.shape[a]
        for side in (0, 1):
            f = 2 * a + side
            if not block.physical[f]:
                continue
            kind = block.boundary[f]
            dst = _ghost_slab(block, a, side)
            if kind == "inflow":
                block.w[dst] = block.inflow[f]
            elif kind == "outflow":
                edge = g if side == 0 else g + n - 1
                src = [slice(None)] * 4
                src[1 + a] = slice(edge, edge + 1)
                block.w[dst] = block.w[tuple(src)]
            else:
                if not block.physical[2 * a + 1 - side]:
                    raise ValueError(f"axis {'xyz'[a]}: periodic faces need a single block along the axis")
                ghosts = np.arange(-g, 0) if side == 0 else np.arange(n, n + g)
                block.w[dst] = np.take(block.w, g + np.mod(ghosts, n), axis=1 + a)
    return block


# --- sources ---------------------------------------------------------------------

def _cross(a, b):
    return np.stack([a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]])


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _axis_derivative(f, xc, axis):
    # second-order central difference on a nonuniform mesh; f spans interior +- 1
    k = 1 + axis if f.ndim == 4 else axis
    n = f.shape[k] - 2

    def take(lo):
        sl = [slice(None)] * f.ndim
        sl[k] = slice(lo, lo + n)
        return f[tuple(sl)]

    hm = (xc[1:-1] - xc[:-2]).reshape([-1 if i == axis else 1 for i in range(3)])
    hp = (xc[2:] - xc[1:-1]).reshape([-1 if i == axis else 1 for i in range(3)])
    fm, f0, fp = take(0), take(1), take(2)
    return (hm / (hp * (hm + hp))) * (fp - f0) + (hp / (hm * (hm + hp))) * (f0 - fm)


def source_terms(block: BlockState, axis=None, c: Constants = Constants()):
    """Dipole and divergence sources at the interior cells.

    Returns ``(momentum, induction, energy)`` with shapes ``(3, ...)``,
    ``(3, ...)`` and ``(...)``. With ``axis`` set only the terms whose
    derivatives run along that axis are included; the ghosts along that axis
    must be current. With ``axis=None`` all three parts are summed.
    """
    if axis is None:
        parts = [source_terms(block, a, c) for a in range(3)]
        return tuple(parts[0][i] + parts[1][i] + parts[2][i] for i in range(3))
    g = block.ghost
    sl = list(block.interior_slices)
    sl[axis] = slice(g - 1, g + block.shape[axis] + 1)
    wide = (slice(None),) + tuple(sl)
    w = block.w[wide]
    bd_wide = block.bd[wide]
    xc = block.centers[axis][sl[axis]]
    inner = [slice(None)] * 4
    inner[1 + axis] = slice(1, -1)
    inner = tuple(inner)

    db = _axis_derivative(w[ph.MAG], xc, axis)
    j = np.zeros_like(db)
    j[(axis + 1) % 3] = -db[(axis + 2) % 3]
    j[(axis + 2) % 3] = db[(axis + 1) % 3]
    dflux = _axis_derivative(_cross(w[ph.VEL], bd_wide), xc, axis)
    curl = np.zeros_like(dflux)
    curl[(axis + 1) % 3] = -dflux[(axis + 2) % 3]
    curl[(axis + 2) % 3] = dflux[(axis + 1) % 3]
    div = db[axis]

    v = w[ph.VEL][inner]
    b = w[ph.MAG][inner]
    bd = bd_wide[inner]
    force = _cross(j, bd) / c.mu0
    induction = curl - v * div
    energy = _dot(v, force) + _dot(b, curl) / c.mu0
    return force, induction, energy


def add_sources(w, sources, dt, c: Constants = Constants()):
    """Add ``dt`` times the sources to a primitive state, through conserved variables."""
    force, induction, energy = sources
    u = prim_to_cons(w, c)
    u[ph.MX:ph.MZ + 1] += dt * force
    u[ph.MAG] += dt * induction
    u[ph.ENE] += dt * energy
    return cons_to_prim(u, c)


def apply_sources(block: BlockState, dt, c: Constants = Constants(), axis=None):
    """Advance the interior by the source terms alone (all ghosts current when ``axis`` is None)."""
    s = source_terms(block, axis, c)
    block.w[(slice(None),) + block.interior_slices] = add_sources(block.interior, s, dt, c)
    return block


# --- sweeps ----------------------------------------------------------------------

def _local_order(axis):
    t1, t2 = (axis + 1) % 3, (axis + 2) % 3
    return [ph.RHO, ph.VX + axis, ph.VX + t1, ph.VX + t2, ph.BX + axis, ph.BX + t1, ph.BX + t2, ph.PRS]


def freeze_core(block: BlockState):
    if block.frozen is not None:
        inner = block.interior
        inner[:, block.frozen] = block.frozen_values


def sweep_axis(block: BlockState, axis, dt, opts: SolverOptions = SolverOptions()):
    """Sweep all strips of the block along ``axis``; ghosts along it must be current."""
    c = opts.constants
    sources = source_terms(block, axis, c) if opts.sources else None
    sl = list(block.interior_slices)
    sl[axis] = slice(None)
    sel = (slice(None),) + tuple(sl)
    order = _local_order(axis)
    w = np.moveaxis(block.w[sel][order], 1 + axis, -1)
    bd = np.moveaxis(block.bd[sel][[axis, (axis + 1) % 3, (axis + 2) % 3]], 1 + axis, -1)
    strip = Strip1D(w, block.spacings[axis], ghost=block.ghost, bd=bd)
    new = sweep_1d(strip, dt, c, opts.scheme)
    out = np.empty_like(new)
    out[order] = new
    out = np.moveaxis(out, -1, 1 + axis)
    if sources is not None:
        out = add_sources(out, sources, dt, c)
    block.w[(slice(None),) + block.interior_slices] = out
    freeze_core(block)
    return block


def step(block: BlockState, dt, order=None, opts: SolverOptions = SolverOptions(), halo=None):
    """One dimension-split step of a block.

    Physical faces are filled first, then ``halo(axis)``, if given, refreshes
    the ghost layers along ``axis`` from neighbouring blocks. ``order`` defaults to the
    alternating sequence keyed on ``block.step``.
    """
    order = sweep_order(block.step) if order is None else order
    for axis in order:
        apply_boundaries(block, axis)
        if halo is not None:
            halo(axis)
        sweep_axis(block, axis, dt, opts)
    block.time += dt
    block.step += 1
    return block
