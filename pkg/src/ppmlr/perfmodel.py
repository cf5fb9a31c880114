"""Bandwidth-bound performance model and timing aggregation.

A memory-bound stencil code runs at most as much faster on the device as the
device's memory bandwidth exceeds the host's. Blocks too small to keep the
device busy lose efficiency linearly below a workload floor.
"""

from __future__ import annotations

from dataclasses import dataclass

from .decomp import BYTES_PER_CELL, PartitionConfig, exchanged_bytes, tde_units, total_ranks

GB = 1e9
WORKLOAD_FLOOR = 64 ** 3


@dataclass(frozen=True)
class BandwidthSpec:
    device_bw: float = 250.0 * GB
    host_bw: float = 51.2 * GB

    def __post_init__(self):
        if not (self.device_bw > 0.0 and self.host_bw > 0.0):
            raise ValueError("bandwidths must be positive")


TABLE_SPEC = BandwidthSpec()


@dataclass(frozen=True)
class StepTiming:
    rank: int
    step: int
    compute_seconds: float
    transfer_seconds: float

    def __post_init__(self):
        if self.compute_seconds < 0.0 or self.transfer_seconds < 0.0:
            raise ValueError("timings must be non-negative")


@dataclass(frozen=True)
class TimingSummary:
    records: int
    mean_compute: float
    mean_transfer: float


def mas(spec: BandwidthSpec = TABLE_SPEC):
    """Maximum achievable speedup: device over host bandwidth."""
    return spec.device_bw / spec.host_bw


def aggregate(timings):
    """Mean compute and transfer seconds per rank-step."""
    timings = list(timings)
    if not timings:
        raise ValueError("no timing records to aggregate")
    n = len(timings)
    return TimingSummary(n, sum(t.compute_seconds for t in timings) / n,
                         sum(t.transfer_seconds for t in timings) / n)


def block_efficiency(cells_per_block, floor=WORKLOAD_FLOOR):
    """Fraction of modeled efficiency retained by a block of the given size."""
    return min(1.0, cells_per_block / floor)


def predict_speedup(config: PartitionConfig, grid, spec: BandwidthSpec = TABLE_SPEC, efficiency=1.0,
                    floor=WORKLOAD_FLOOR):
    """Modeled device-over-host speedup of one block's update.

    ``efficiency`` is the fraction of device bandwidth the kernel reaches on
    a block at or above ``floor`` cells; smaller blocks scale it down.
    """
    if not 0.0 < efficiency <= 1.0:
        raise ValueError(f"efficiency must be in (0, 1], got {efficiency}")
    shape = grid.shape if hasattr(grid, "shape") else tuple(grid)
    cells = shape[0] * shape[1] * shape[2] / config.blocks
    m = mas(spec)
    return min(m * efficiency * block_efficiency(cells, floor), m)


REPORT_FIELDS = ("config", "ranks", "tde_units", "bytes_per_step", "mean_compute_s", "mean_transfer_s",
                 "predicted_speedup")


def report_row(config: PartitionConfig, grid, ghost, spec: BandwidthSpec = TABLE_SPEC, efficiency=0.732,
               timings=None, bytes_per_cell=BYTES_PER_CELL):
    summary = aggregate(timings) if timings else None
    return {
        "config": str(config),
        "ranks": total_ranks(config),
        "tde_units": tde_units(config),
        "bytes_per_step": exchanged_bytes(config, grid, ghost, bytes_per_cell),
        "mean_compute_s": summary.mean_compute if summary else float("nan"),
        "mean_transfer_s": summary.mean_transfer if summary else float("nan"),
        "predicted_speedup": predict_speedup(config, grid, spec, efficiency),
    }
