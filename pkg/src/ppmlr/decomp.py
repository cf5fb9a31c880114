"""Domain decomposition: partition rules, block layouts and halo volume."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .grid import StretchedGrid

BYTES_PER_CELL = 64  # eight float64 fields

# (nx, ny, nz) rank grids run on the magnetosphere mesh
STANDARD_CONFIGS = ((3, 1, 1), (3, 3, 3), (4, 3, 3), (6, 3, 3), (4, 5, 5), (6, 5, 5))


class PartitionError(ValueError):
    """A rank grid breaks one or more partition rules; ``violations`` lists them."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid partition: " + "; ".join(self.violations))


class UnequalTransverseWarning(UserWarning):
    pass


@dataclass(frozen=True)
class PartitionConfig:
    nx: int
    ny: int
    nz: int

    @property
    def counts(self):
        return (self.nx, self.ny, self.nz)

    @property
    def blocks(self):
        return self.nx * self.ny * self.nz

    def __str__(self):
        return f"{self.nx}x{self.ny}x{self.nz}"

    @classmethod
    def parse(cls, text):
        parts = str(text).replace("x", ",").split(",")
        if len(parts) != 3:
            raise ValueError(f"partition must have three counts, got {text!r}")
        return cls(*(int(p) for p in parts))


@dataclass(frozen=True)
class Block:
    rank: int
    index: tuple          # position in the rank grid
    start: tuple          # first interior cell on each axis
    shape: tuple
    neighbors: tuple      # rank across each face (-x, +x, -y, +y, -z, +z), None on the boundary

    @property
    def stop(self):
        return tuple(s + n for s, n in zip(self.start, self.shape))

    @property
    def physical(self):
        return tuple(n is None for n in self.neighbors)


@dataclass(frozen=True)
class BlockLayout:
    config: PartitionConfig
    grid_shape: tuple
    blocks: tuple
    ionosphere_rank: int

    @property
    def total_ranks(self):
        return self.ionosphere_rank + 1

    def owner(self, cell):
        """Rank owning a global cell index."""
        idx = tuple(c // (n // k) for c, n, k in zip(cell, self.grid_shape, self.config.counts))
        return rank_of(self.config, idx)


def rank_of(config: PartitionConfig, index):
    i, j, k = index
    return i + config.nx * (j + config.ny * k)


def _origin_on_boundary(axis, blocks):
    width = axis.n // blocks
    tol = 1e-12 * (axis.max - axis.min)
    return any(abs(axis.edges[m * width]) <= tol for m in range(1, blocks))


def violations(config: PartitionConfig, grid: StretchedGrid):
    """Every partition rule the config breaks, as readable strings."""
    out = []
    names = "xyz"
    for name, k in zip(names, config.counts):
        if k < 1:
            out.append(f"n{name} = {k} must be at least 1")
    for name, k in zip("yz", (config.ny, config.nz)):
        if k >= 1 and k % 2 == 0:
            out.append(f"n{name} = {k} must be odd")
    for name, k, n in zip(names, config.counts, grid.shape):
        if k >= 1 and n % k:
            out.append(f"n{name} = {k} does not divide the {n} {name} cells")
    if not out:
        for name, k, axis in zip(names, config.counts, grid.axes):
            if axis.min < 0.0 < axis.max and _origin_on_boundary(axis, k):
                out.append(f"the origin lies on a block boundary along {name}")
    return out


def validate(config: PartitionConfig, grid: StretchedGrid):
    """Raise :class:`PartitionError` listing every broken rule.

    A transverse grid with ``ny != nz`` is allowed but warned about.
    """
    bad = violations(config, grid)
    if bad:
        raise PartitionError(bad)
    if config.ny != config.nz:
        warnings.warn(f"ny = {config.ny} differs from nz = {config.nz}", UnequalTransverseWarning,
                      stacklevel=2)
    return True


def total_ranks(config: PartitionConfig):
    """Worker ranks plus the ionosphere rank."""
    return config.blocks + 1


def layout(config: PartitionConfig, grid: StretchedGrid) -> BlockLayout:
    validate(config, grid)
    width = tuple(n // k for n, k in zip(grid.shape, config.counts))
    blocks = []
    for k in range(config.nz):
        for j in range(config.ny):
            for i in range(config.nx):
                idx = (i, j, k)
                nbrs = []
                for axis in range(3):
                    for step in (-1, 1):
                        other = list(idx)
                        other[axis] += step
                        inside = 0 <= other[axis] < config.counts[axis]
                        nbrs.append(rank_of(config, other) if inside else None)
                blocks.append(Block(rank=rank_of(config, idx), index=idx,
                                    start=tuple(a * w for a, w in zip(idx, width)),
                                    shape=width, neighbors=tuple(nbrs)))
    return BlockLayout(config, grid.shape, tuple(blocks), config.blocks)


def tde_units(config: PartitionConfig):
    """Number of adjacent block pairs, summed over the three axes."""
    nx, ny, nz = config.counts
    return nx * ny * (nz - 1) + nx * (ny - 1) * nz + (nx - 1) * ny * nz


def exchanged_bytes(config: PartitionConfig, grid: StretchedGrid, ghost, bytes_per_cell=BYTES_PER_CELL):
    """Bytes moved by one full halo exchange, both directions of every shared face."""
    shape = grid.shape if isinstance(grid, StretchedGrid) else tuple(grid)
    width = [n // k for n, k in zip(shape, config.counts)]
    total = 0
    for axis in range(3):
        pairs = config.blocks // config.counts[axis] * (config.counts[axis] - 1)
        face = width[(axis + 1) % 3] * width[(axis + 2) % 3]
        total += pairs * face * ghost * bytes_per_cell * 2
    return total
