"""A bandwidth-bound speedup model.

A memory-bound kernel can run at most as much faster on the device as the
device's memory bandwidth exceeds the host's. Blocks too small to fill the
device lose efficiency in proportion to their size.
"""

from ppmlr.decomp import STANDARD_CONFIGS, PartitionConfig
from ppmlr.grid import build_default_grid
from ppmlr.perfmodel import WORKLOAD_FLOOR, BandwidthSpec, mas, predict_speedup

print("=" * 60)
print(" Maximum achievable speedup")
print("=" * 60)

spec = BandwidthSpec(device_bw=250e9, host_bw=51.2e9)
print(f"\ndevice 250 GB/s over host 51.2 GB/s: MAS = {mas(spec):.4f}")

grid = build_default_grid()
for eff in (1.0, 0.732, 0.5):
    print(f"  kernel reaching {eff:5.1%} of device bandwidth -> "
          f"{predict_speedup(PartitionConfig(3, 1, 1), grid, spec, eff):.3f}x")

print(f"\nworkload floor {WORKLOAD_FLOOR:,} cells per block; at 73.2% efficiency:")
for counts in STANDARD_CONFIGS:
    cfg = PartitionConfig(*counts)
    cells = grid.cells // cfg.blocks
    print(f"  {str(cfg):6s} {cells:>9,} cells/block  predicted {predict_speedup(cfg, grid, spec, 0.732):.3f}x")
