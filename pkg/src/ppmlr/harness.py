"""Partitioned runs: one worker per block plus the ionosphere stub.

Every step the workers agree on the smallest stable timestep, then for each
axis of the sweep order they fill their physical ghosts, swap halos along
that axis, and sweep. Each shared face is therefore exchanged once per step
in each direction.
"""

from __future__ import annotations

import time

import numpy as np

from .decomp import PartitionConfig, layout
from .exchange import IonosphereStub, Transport, TransferLedger, Worker, exchange_axis
from .grid import StretchedGrid
from .perfmodel import StepTiming
from .stepper import Problem, SolverOptions, apply_boundaries, compute_dt, init_block, sweep_axis, sweep_order


class PartitionedRun:
    def __init__(self, grid: StretchedGrid, config: PartitionConfig, problem: Problem,
                 opts: SolverOptions = SolverOptions(), transport="direct", ghost=None, seed=None):
        self.grid = grid
        self.config = config
        self.opts = opts
        self.layout = layout(config, grid)
        for f in range(6):
            if problem.boundary[f] == "periodic" and config.counts[f // 2] > 1:
                raise ValueError(f"periodic {'xyz'[f // 2]} faces need a single block along that axis")
        self.ledger = TransferLedger(transport)
        self.transport = Transport(transport, self.ledger)
        self.seed = seed
        self.workers = []
        for b in self.layout.blocks:
            block = init_block(grid, problem, opts.constants, ghost=ghost, start=b.start, shape=b.shape,
                               physical=b.physical, scheme=opts.scheme)
            self.workers.append(Worker(b.rank, block, b.neighbors))
        self.ionosphere = IonosphereStub(self.layout.ionosphere_rank)
        self.timings: list[StepTiming] = []
        self.inner_records = []

    @property
    def step_count(self):
        return self.workers[0].block.step

    @property
    def time(self):
        return self.workers[0].block.time

    def _barrier(self):
        steps = {w.block.step for w in self.workers}
        if len(steps) != 1:
            raise RuntimeError(f"workers out of step: {sorted(steps)}")
        step = steps.pop()
        self.inner_records.append(self.ionosphere.barrier(step))
        return step

    def global_dt(self):
        return min(compute_dt(w.block, self.opts.cfl, self.opts.constants) for w in self.workers)

    def step(self, dt=None, t_end=None):
        n = self._barrier()
        if dt is None:
            dt = self.global_dt()
        if t_end is not None:
            dt = min(dt, t_end - self.time)
        self.ledger.row(n)
        compute = {w.rank: 0.0 for w in self.workers}
        transfer = dict(compute)
        for axis in sweep_order(n):
            t0 = time.perf_counter()
            for w in self.workers:
                apply_boundaries(w.block, axis)
            exchange_axis(self.workers, axis, self.transport, n,
                          None if self.seed is None else hash((self.seed, n, axis)))
            share = (time.perf_counter() - t0) / len(self.workers)
            for w in self.workers:
                transfer[w.rank] += share
                t0 = time.perf_counter()
                sweep_axis(w.block, axis, dt, self.opts)
                compute[w.rank] += time.perf_counter() - t0
        for w in self.workers:
            w.block.time += dt
            w.block.step += 1
            self.timings.append(StepTiming(w.rank, n, compute[w.rank], transfer[w.rank]))
        return dt

    def run(self, steps=None, t_end=None, callback=None):
        if steps is None and t_end is None:
            raise ValueError("give a step count or an end time")
        done = 0
        while (steps is None or done < steps) and (t_end is None or self.time < t_end * (1 - 1e-14)):
            self.step(t_end=t_end)
            done += 1
            if callback is not None:
                callback(self)
        return self

    def gather(self):
        """Interior primitive fields of the whole grid, shape ``(8, Nx, Ny, Nz)``."""
        out = np.empty((8,) + self.grid.shape)
        for w in self.workers:
            b = w.block
            sl = tuple(slice(s, s + n) for s, n in zip(b.start, b.shape))
            out[(slice(None),) + sl] = b.interior
        return out
