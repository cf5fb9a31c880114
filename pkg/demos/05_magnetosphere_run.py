"""A short magnetosphere run on a coarse partitioned mesh.

The solar wind enters through the sunward face and meets a dipole whose
field is mirrored across x = 15 R_E. Snapshots go to a temporary directory
and are read back.
"""

import os
import tempfile

import numpy as np

from ppmlr.cli import main
from ppmlr.snapshot import read_snapshot

CONFIG = """\
grid.cells = 12,11,11
grid.d_uniform = 4
grid.ratio = 1.3
grid.x_range = -40,20
grid.y_range = -30,30
grid.z_range = -30,30
partition.nx = 2
constants.p_floor = 0.01
run.steps = 20
run.snapshot_every = 10
run.transport = staged
"""

print("=" * 60)
print(" Magnetosphere on a 12 x 11 x 11 mesh, two blocks")
print("=" * 60)

with tempfile.TemporaryDirectory() as tmp:
    path = os.path.join(tmp, "run.cfg")
    with open(path, "w") as fh:
        fh.write(CONFIG)
    status = main(["run", "--config", path, "--out", os.path.join(tmp, "out")])
    print(f"exit status {status}")

    out = os.path.join(tmp, "out")
    for name in sorted(os.listdir(out)):
        print(f"  {name:20s} {os.path.getsize(os.path.join(out, name)):>8,d} bytes")

    first = read_snapshot(os.path.join(out, "snap_000010.pplr"))
    last = read_snapshot(os.path.join(out, "snap_000020.pplr"))
    x = 0.5 * (last.edges[0][:-1] + last.edges[0][1:])
    j, k = 5, 5
    print(f"\nalong the Sun-Earth line at t = {last.time:.4f}:")
    print("  x        rho       vx        p")
    for i in range(last.dims[0]):
        print(f"  {x[i]:7.2f} {last.fields[0, i, j, k]:8.3f} {last.fields[1, i, j, k]:9.3f} "
              f"{last.fields[7, i, j, k]:9.3f}")
    change = np.max(np.abs(last.fields[0] - first.fields[0]))
    print(f"\nlargest density change between steps 10 and 20: {change:.3f}")
