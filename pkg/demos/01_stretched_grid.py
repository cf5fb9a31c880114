"""Building the stretched magnetosphere mesh.

The mesh is uniform near Earth and grows geometrically toward the outer
boundaries, so most cells sit where the field changes fastest.
"""

import numpy as np

from ppmlr.grid import AxisSpec, build_axis, build_default_grid

print("=" * 60)
print(" Stretched Cartesian mesh")
print("=" * 60)

grid = build_default_grid()
print(f"\ncells per axis: {grid.shape}  ({grid.cells:,} in total)")
for name, axis in zip("xyz", grid.axes):
    lo, hi = axis.uniform_range
    print(f"  {name}: [{axis.min:g}, {axis.max:g}]  uniform cells {lo}..{hi - 1}"
          f"  side ratios {axis.ratios[0]:.5f} / {axis.ratios[1]:.5f}")

# The spacing profile along the Sun-Earth line
x = grid.x
print("\nspacing along x, every 13th cell:")
for i in range(0, x.n, 13):
    bar = "#" * int(round(x.spacings[i] / 0.2))
    print(f"  x = {x.centers[i]:8.2f}  dx = {x.spacings[i]:6.3f}  {bar}")

print(f"\nfinest spacing: {min(a.spacings.min() for a in grid.axes):.4f} R_E")
print(f"Earth sits in cell {grid.locate((0.0, 0.0, 0.0))}")

# A hand-made axis: 10 uniform cells at 0.5 inside [-2.5, 2.5], 30 stretched ones outside
spec = AxisSpec(min=-40.0, max=20.0, uniform_lo=-2.5, uniform_hi=2.5, d_uniform=0.5, target_cells=40,
                nominal_ratio=1.15)
axis = build_axis(spec)
print(f"\ncustom axis: {axis.n} cells, ratios {np.round(axis.ratios, 4)}, "
      f"sum of spacings {axis.spacings.sum():.12f}")
