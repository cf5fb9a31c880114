"""One-dimensional checks of the sweep kernel.

Each problem runs through the same reconstruct / Lagrangian step / remap
pipeline used by the three-dimensional solver, and is compared with an
independent reference solution.
"""

import numpy as np

from ppmlr.tubes import advection_error, brio_wu_problem, sod_problem

print("=" * 60)
print(" Shock tubes and smooth advection")
print("=" * 60)

# Sod: exact Riemann solution available
err, w, exact = sod_problem(256)
print(f"\nSod tube, 256 cells, t = 0.2: L1 density error {err:.2e}")
print("  x      rho(num)   rho(exact)")
for i in range(8, 256, 24):
    print(f"  {(i + 0.5) / 256:.3f}  {w[0, i]:9.5f}  {exact[0][i]:9.5f}")

# Brio-Wu: compared with a fine first-order HLL run
err, w, ref = brio_wu_problem(400, 4000)
print(f"\nBrio-Wu tube, 400 cells vs HLL on 4000: L1 density error {err:.2e}")
print(f"  density range {w[0].min():.4f} .. {w[0].max():.4f}")
print(f"  transverse field range {w[5].min():.4f} .. {w[5].max():.4f}")

# Smooth advection: the error should fall roughly eightfold per doubling
print("\nsine wave advected once around a periodic box")
prev = None
for n in (32, 64, 128):
    e = advection_error(n)
    rate = "" if prev is None else f"  order {np.log2(prev / e):.2f}"
    print(f"  N = {n:4d}  L1 = {e:.3e}{rate}")
    prev = e
