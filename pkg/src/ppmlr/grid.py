"""Stretched Cartesian mesh: a uniform core with geometric stretching outside.

Coordinates are in Earth radii. Each axis has a block of equal cells of
width ``d_uniform`` covering ``[uniform_lo, uniform_hi]``; cells grow by a
constant ratio away from the core on both sides, with the ratio on each side
solved so that the series lands exactly on the domain edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

BISECTION_TOL = 1e-12


class GridError(ValueError):
    """An axis specification cannot be realised."""


class OutOfRangeError(ValueError):
    """A coordinate lies outside the axis."""


@dataclass(frozen=True)
class AxisSpec:
    min: float
    max: float
    uniform_lo: float
    uniform_hi: float
    d_uniform: float
    target_cells: int
    nominal_ratio: float = 1.05

    def __post_init__(self):
        all_uniform = self.uniform_lo == self.min and self.uniform_hi == self.max
        if not all_uniform and not (self.min <= self.uniform_lo < self.uniform_hi <= self.max):
            raise GridError(
                f"need min <= uniform_lo < uniform_hi <= max, got "
                f"{self.min}, {self.uniform_lo}, {self.uniform_hi}, {self.max}")
        if not self.min < self.max:
            raise GridError("axis min must be below max")
        if not self.d_uniform > 0.0:
            raise GridError("d_uniform must be positive")
        if not self.nominal_ratio > 1.0:
            raise GridError("nominal_ratio must exceed 1")
        n = self.uniform_cells
        if self.target_cells < n:
            raise GridError(f"target_cells {self.target_cells} is below the {n} uniform cells")

    @property
    def uniform_cells(self):
        span = (self.uniform_hi - self.uniform_lo) / self.d_uniform
        n = round(span)
        if abs(span - n) > 1e-9 * max(1.0, span):
            raise GridError(
                f"uniform region [{self.uniform_lo}, {self.uniform_hi}] is not a whole number "
                f"of {self.d_uniform} cells")
        return int(n)


@dataclass(frozen=True, eq=False)
class Axis:
    """Edges, centers and spacings of one axis.

    ``ratios`` holds the solved stretch ratios of the low and high sides
    (``None`` for a side without stretched cells).
    """

    edges: np.ndarray
    ratios: tuple = (None, None)
    uniform_range: tuple = field(default=(0, 0))

    def __post_init__(self):
        e = np.array(self.edges, dtype=float)
        if e.ndim != 1 or e.size < 2:
            raise GridError("an axis needs at least one cell")
        if np.any(~(np.diff(e) > 0.0)):
            raise GridError("axis edges must be strictly increasing")
        e.flags.writeable = False
        object.__setattr__(self, "edges", e)

    @property
    def n(self):
        return self.edges.size - 1

    @property
    def min(self):
        return float(self.edges[0])

    @property
    def max(self):
        return float(self.edges[-1])

    @property
    def spacings(self):
        return self.edges[1:] - self.edges[:-1]

    @property
    def centers(self):
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    def padded(self, ghost):
        """Axis extended by ``ghost`` cells on each side at the edge spacings."""
        h = self.spacings
        lo = self.edges[0] - h[0] * np.arange(ghost, 0, -1)
        hi = self.edges[-1] + h[-1] * np.arange(1, ghost + 1)
        return np.concatenate([lo, self.edges, hi])

    @classmethod
    def uniform(cls, lo, hi, n):
        edges = lo + (hi - lo) * np.arange(n + 1) / n
        edges[-1] = hi
        return cls(edges, (None, None), (0, n))


def series_length(d, ratio, n):
    """Length covered by ``n`` cells ``d*ratio, d*ratio**2, ...``."""
    if ratio == 1.0:
        return d * n
    return d * ratio * (ratio ** n - 1.0) / (ratio - 1.0)


def solve_ratio(d, n, length, side="side"):
    """Common ratio in ``(1, 2]`` for which ``n`` stretched cells close ``length``."""
    if n == 0:
        if length != 0.0:
            raise GridError(f"{side}: no stretched cells left to cover {length} R_E")
        return None
    lo, hi = 1.0, 2.0
    if series_length(d, lo, n) >= length:
        raise GridError(
            f"{side}: {n} cells of at least {d} overfill {length} R_E; no ratio above 1 closes it")
    if series_length(d, hi, n) < length:
        raise GridError(f"{side}: {n} cells cannot cover {length} R_E with a ratio up to 2")
    while True:
        mid = 0.5 * (lo + hi)
        resid = series_length(d, mid, n) - length
        if abs(resid) < BISECTION_TOL * length or mid in (lo, hi):
            return mid
        if resid > 0.0:
            hi = mid
        else:
            lo = mid


def allocate_sides(spec: AxisSpec):
    """Stretched cell counts for the low and high sides.

    The cells left over after the uniform core are split in proportion to the
    number of cells each side would need at the nominal ratio.
    """
    remaining = spec.target_cells - spec.uniform_cells
    ext = (spec.uniform_lo - spec.min, spec.max - spec.uniform_hi)
    r = spec.nominal_ratio
    w = [math.log(1.0 + e * (r - 1.0) / spec.d_uniform) / math.log(r) if e > 0 else 0.0 for e in ext]
    total = w[0] + w[1]
    if total == 0.0:
        if remaining:
            raise GridError("axis is all uniform but target_cells exceeds the uniform count")
        return 0, 0
    exact = [remaining * wi / total for wi in w]
    counts = [math.floor(x) for x in exact]
    # largest remainder; ties go to the larger side
    order = sorted(range(2), key=lambda i: (exact[i] - counts[i], w[i]), reverse=True)
    for i in order[: remaining - sum(counts)]:
        counts[i] += 1
    for i in range(2):
        if ext[i] > 0 and counts[i] == 0:
            raise GridError(f"{'low' if i == 0 else 'high'} side gets no cells")
    return counts[0], counts[1]


def build_axis(spec: AxisSpec) -> Axis:
    nu = spec.uniform_cells
    n_lo, n_hi = allocate_sides(spec)
    d = spec.d_uniform
    r_lo = solve_ratio(d, n_lo, spec.uniform_lo - spec.min, "low side")
    r_hi = solve_ratio(d, n_hi, spec.max - spec.uniform_hi, "high side")
    for name, r in (("low side", r_lo), ("high side", r_hi)):
        if r is not None and not (1.0 <= r <= spec.nominal_ratio + 0.05):
            raise GridError(f"{name}: solved ratio {r:.6f} is outside [1, {spec.nominal_ratio + 0.05}]")

    core = spec.uniform_lo + d * np.arange(nu + 1)
    core[-1] = spec.uniform_hi
    parts = []
    if n_lo:
        widths = d * r_lo ** np.arange(1, n_lo + 1)
        lo_edges = spec.uniform_lo - np.cumsum(widths)[::-1]
        lo_edges[0] = spec.min
        parts.append(lo_edges)
    parts.append(core)
    if n_hi:
        widths = d * r_hi ** np.arange(1, n_hi + 1)
        hi_edges = spec.uniform_hi + np.cumsum(widths)
        hi_edges[-1] = spec.max
        parts.append(hi_edges)
    return Axis(np.concatenate(parts), (r_lo, r_hi), (n_lo, n_lo + nu))


@dataclass(frozen=True, eq=False)
class StretchedGrid:
    x: Axis
    y: Axis
    z: Axis

    @property
    def axes(self):
        return (self.x, self.y, self.z)

    @property
    def shape(self):
        return (self.x.n, self.y.n, self.z.n)

    @property
    def cells(self):
        return self.x.n * self.y.n * self.z.n

    def volumes(self):
        hx, hy, hz = (a.spacings for a in self.axes)
        return hx[:, None, None] * hy[None, :, None] * hz[None, None, :]

    def locate(self, point):
        return tuple(locate(a, q) for a, q in zip(self.axes, point))

    @classmethod
    def uniform(cls, shape, lo, hi):
        return cls(*(Axis.uniform(l, h, n) for n, l, h in zip(shape, lo, hi)))


FULL_EXTENT = ((-100.0, 30.0), (-100.0, 100.0), (-100.0, 100.0))
FULL_CELLS = (156, 150, 150)
FULL_SPACING = 0.4
FULL_RATIO = 1.05
CORE_HALF_WIDTH = 10.0


def magnetosphere_grid(cells=FULL_CELLS, d_uniform=FULL_SPACING, ratio=FULL_RATIO,
                       extent=FULL_EXTENT, core=CORE_HALF_WIDTH):
    """Grid with a uniform cube of half-width ``core`` around the origin."""
    axes = []
    for n, (lo, hi) in zip(cells, extent):
        spec = AxisSpec(lo, hi, max(lo, -core), min(hi, core), d_uniform, n, ratio)
        axes.append(build_axis(spec))
    return StretchedGrid(*axes)


def build_default_grid() -> StretchedGrid:
    """The 156 x 150 x 150 magnetosphere grid with a 0.4 R_E core."""
    return magnetosphere_grid()


def locate(axis: Axis, q) -> int:
    """Index of the cell containing ``q``; a shared edge belongs to the lower cell."""
    q = float(q)
    if not axis.edges[0] <= q <= axis.edges[-1]:
        raise OutOfRangeError(f"{q} is outside [{axis.edges[0]}, {axis.edges[-1]}]")
    i = int(np.searchsorted(axis.edges, q, side="left")) - 1
    return max(i, 0)
