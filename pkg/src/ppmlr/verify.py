"""Verification suites: each returns a list of checks with metric and threshold."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decomp import PartitionConfig, exchanged_bytes
from .grid import StretchedGrid
from .harness import PartitionedRun
from .physics import Constants, prim_to_cons
from .stepper import Problem, SolverOptions
from .tubes import brio_wu_problem, convergence_order, sod_problem


@dataclass(frozen=True)
class Check:
    name: str
    metric: float
    threshold: float
    passed: bool
    relation: str = "<"

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: {self.metric:.6g} {self.relation} {self.threshold:g}"


def _below(name, metric, threshold):
    return Check(name, float(metric), threshold, bool(metric < threshold), "<")


def _at_least(name, metric, threshold):
    return Check(name, float(metric), threshold, bool(metric >= threshold), ">=")


def sod_suite():
    err, _, _ = sod_problem(512)
    return [_below("sod L1(rho), N=512, t=0.2", err, 0.01)]


def brio_wu_suite():
    err, _, _ = brio_wu_problem(800, 8000)
    return [_below("brio-wu L1(rho) vs HLL N=8000, N=800", err, 0.03)]


def convergence_suite():
    order, _, _ = convergence_order(64, 128)
    return [_at_least("sine advection order, N=64 -> 128", order, 2.5)]


def blast_problem(radius=0.3, p_in=10.0, p_out=0.1):
    def initial(pos, bd):
        w = np.zeros((8,) + pos.shape[1:])
        w[0] = 1.0
        r2 = pos[0] * pos[0] + pos[1] * pos[1] + pos[2] * pos[2]
        w[7] = np.where(r2 < radius * radius, p_in, p_out)
        return w
    return Problem(initial, ("periodic",) * 6)


def conserved_totals(grid: StretchedGrid, w, c: Constants = Constants()):
    u = prim_to_cons(w, c)
    vol = grid.volumes()
    return {name: float(np.sum(u[k] * vol)) for name, k in (("mass", 0), ("energy", 7))}


def conservation_suite(n=32, steps=50):
    grid = StretchedGrid.uniform((n, n, n), (-1.0, -1.0, -1.0), (1.0, 1.0, 1.0))
    run = PartitionedRun(grid, PartitionConfig(1, 1, 1), blast_problem(), SolverOptions(sources=False))
    before = conserved_totals(grid, run.gather())
    run.run(steps)
    after = conserved_totals(grid, run.gather())
    return [_below(f"relative drift of total {k}, {n}^3 blast, {steps} steps",
                   abs(after[k] - before[k]) / abs(before[k]), 1e-11) for k in before]


def partition_grid():
    # the origin falls inside a block for every rank grid used below
    return StretchedGrid.uniform((12, 12, 12), (-9.0, -6.0, -6.0), (3.0, 6.0, 6.0))


def partition_problem():
    """Magnetised flow past a weak dipole with all source terms active."""
    def initial(pos, bd):
        x, y, z = pos
        w = np.zeros((8,) + pos.shape[1:])
        r2 = x * x + y * y + z * z
        w[0] = 1.0 + 0.3 * np.where(r2 < 9.0, 1.0, 0.0) + 0.05 * np.sin(x + 2.0 * y)
        w[1] = 0.3 + 0.1 * np.cos(y)
        w[2] = -0.2 * np.sin(z)
        w[3] = 0.1
        w[4] = 0.2
        w[5] = 0.1 * np.sin(x)
        w[6] = 0.05
        w[7] = 1.0 + 0.5 * np.where(np.abs(x + 3.0) < 2.0, 1.0, 0.0)
        return w
    return Problem(initial, ("outflow",) * 6, dipole=True)


PARTITION_CONSTANTS = Constants(dipole_moment=(0.0, 0.0, -40.0))


def partition_runs(configs=((2, 1, 1), (2, 3, 3)), steps=10, transport="direct", seed=None):
    """Serial fields and partitioned fields plus ledgers for each config."""
    grid = partition_grid()
    opts = SolverOptions(constants=PARTITION_CONSTANTS)
    serial = PartitionedRun(grid, PartitionConfig(1, 1, 1), partition_problem(), opts).run(steps)
    out = {}
    for cfg in configs:
        run = PartitionedRun(grid, PartitionConfig(*cfg), partition_problem(), opts, transport, seed=seed)
        run.run(steps)
        out[cfg] = run
    return grid, serial, out


def partition_suite(configs=((2, 1, 1), (2, 3, 3)), steps=10):
    grid, serial, runs = partition_runs(configs, steps, seed=7)
    ref = serial.gather()
    checks = []
    for cfg, run in runs.items():
        w = run.gather()
        scale = np.maximum(np.abs(ref), 1e-300)
        diff = float(np.max(np.abs(w - ref) / scale))
        bitwise = bool(np.array_equal(w, ref))
        checks.append(Check(f"{cfg} vs single block after {steps} steps, max relative difference",
                            diff, 1e-13, bitwise or diff < 1e-13, "<"))
        want = exchanged_bytes(PartitionConfig(*cfg), grid, run.workers[0].block.ghost)
        worst = max(abs(r.bytes - want) for r in run.ledger.rows)
        checks.append(Check(f"{cfg} ledger bytes per step minus model", worst, 0, worst == 0, "=="))
    return checks


SUITES = {
    "sod": sod_suite,
    "brio_wu": brio_wu_suite,
    "convergence": convergence_suite,
    "conservation": conservation_suite,
    "partition": partition_suite,
}


def run_suite(name):
    if name == "all":
        return [c for suite in SUITES.values() for c in suite()]
    try:
        suite = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or all") from None
    return suite()
