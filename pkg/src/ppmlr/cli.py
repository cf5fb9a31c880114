"""Command-line entry point: ``ppmlr run | verify | partition | report``.

Failures print one line ``ppmlr-error <kind>: <message>`` to stderr and exit
with a nonzero status.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys

from .config import ConfigError, RunConfig
from .decomp import STANDARD_CONFIGS, PartitionConfig, PartitionError, exchanged_bytes, tde_units, total_ranks
from .grid import GridError, build_default_grid
from .harness import PartitionedRun
from .perfmodel import REPORT_FIELDS, StepTiming, report_row
from .physics import UnphysicalStateError
from .ppm1d import StepRejected
from .snapshot import Snapshot, write_snapshot
from .stepper import magnetosphere_problem
from .verify import run_suite

EXIT_FAILED = 1
EXIT_USAGE = 2


class CliError(Exception):
    def __init__(self, kind, message, status=EXIT_USAGE):
        super().__init__(message)
        self.kind = kind
        self.status = status


def _csv(rows, fields, fh):
    writer = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow(r)


def partition_rows(grid=None, ghost=6):
    grid = build_default_grid() if grid is None else grid
    rows = []
    for counts in STANDARD_CONFIGS:
        cfg = PartitionConfig(*counts)
        rows.append({"config": str(cfg), "ranks": total_ranks(cfg), "tde_units": tde_units(cfg),
                     "exchanged_bytes": exchanged_bytes(cfg, grid, ghost)})
    return rows


def _load_config(args):
    overrides = {}
    if getattr(args, "steps", None) is not None:
        overrides["run.steps"] = args.steps
    if getattr(args, "transport", None) is not None:
        overrides["run.transport"] = args.transport
    if getattr(args, "out", None) is not None:
        overrides["run.out"] = args.out
    try:
        return RunConfig.load(args.config, overrides=overrides)
    except OSError as exc:
        raise CliError("config", f"cannot read {args.config}: {exc.strerror}") from None
    except ConfigError as exc:
        raise CliError("config", str(exc)) from None


def _snapshot(run, ghost):
    return Snapshot(run.time, run.step_count, ghost, tuple(a.edges for a in run.grid.axes), run.gather())


def cmd_run(args):
    cfg = _load_config(args)
    try:
        grid = cfg.grid()
        part = cfg.partition()
        problem = magnetosphere_problem(cfg.solar_wind(), cfg.profile(), cfg.constants(),
                                        inner_radius=cfg["run.inner_radius"])
        run = PartitionedRun(grid, part, problem, cfg.options(), cfg["run.transport"], cfg["run.ghost"],
                             cfg["run.seed"])
    except PartitionError as exc:
        raise CliError("partition", str(exc)) from None
    except (GridError, ValueError) as exc:
        raise CliError("config", str(exc)) from None

    out = cfg["run.out"]
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, "config.txt"), "w") as fh:
        fh.write(cfg.dump())
    ghost = run.workers[0].block.ghost
    every = cfg["run.snapshot_every"]
    written = []

    def save(r):
        path = os.path.join(out, f"snap_{r.step_count:06d}.pplr")
        write_snapshot(path, _snapshot(r, ghost))
        written.append(path)

    def after_step(r):
        if r.step_count % every == 0:
            save(r)

    try:
        run.run(cfg["run.steps"], cfg["run.end_time"], after_step)
    except (UnphysicalStateError, StepRejected, FloatingPointError) as exc:
        raise CliError("numerics", f"step {run.step_count}: {exc}", EXIT_FAILED) from None
    if run.step_count % every:
        save(run)

    with open(os.path.join(out, "ledger.csv"), "w") as fh:
        run.ledger.to_csv(fh)
    with open(os.path.join(out, "timing.csv"), "w") as fh:
        fields = ("rank", "step", "compute_seconds", "transfer_seconds")
        _csv(({k: getattr(t, k) for k in fields} for t in run.timings), fields, fh)
    row = report_row(part, grid, ghost, efficiency=cfg["run.efficiency"], timings=run.timings)
    with open(os.path.join(out, "report.csv"), "w") as fh:
        _csv([row], REPORT_FIELDS, fh)
    print(f"ran {run.step_count} steps to t = {run.time:.6g} on {part} "
          f"({total_ranks(part)} ranks); {len(written)} snapshots in {out}")
    _csv([row], REPORT_FIELDS, sys.stdout)
    return 0


def cmd_verify(args):
    try:
        checks = run_suite(args.suite)
    except ValueError as exc:
        raise CliError("suite", str(exc)) from None
    for c in checks:
        print(c.line())
    return 0 if all(c.passed for c in checks) else EXIT_FAILED


def cmd_partition(args):
    _csv(partition_rows(), ("config", "ranks", "tde_units", "exchanged_bytes"), sys.stdout)
    return 0


def _read_timings(path):
    with open(path) as fh:
        return [StepTiming(int(r["rank"]), int(r["step"]), float(r["compute_seconds"]),
                           float(r["transfer_seconds"])) for r in csv.DictReader(fh)]


def cmd_report(args):
    cfg = _load_config(args)
    timings = None
    if args.timings:
        try:
            timings = _read_timings(args.timings)
        except (OSError, KeyError, ValueError) as exc:
            raise CliError("timings", f"cannot use {args.timings}: {exc}") from None
    try:
        grid = cfg.grid() if args.config else build_default_grid()
    except GridError as exc:
        raise CliError("config", str(exc)) from None
    ghost = cfg["run.ghost"] or cfg.options().scheme.ghost
    configs = [cfg.partition()] if args.config else [PartitionConfig(*c) for c in STANDARD_CONFIGS]
    rows = []
    for part in configs:
        row = report_row(part, grid, ghost, efficiency=cfg["run.efficiency"], timings=timings)
        rows.append({k: ("" if isinstance(v, float) and math.isnan(v) else v) for k, v in row.items()})
    _csv(rows, REPORT_FIELDS, sys.stdout)
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(f"ppmlr-error usage: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser():
    p = _Parser(prog="ppmlr", description="PPMLR-MHD magnetosphere solver and run harness")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    r = sub.add_parser("run", help="run a partitioned magnetosphere simulation")
    r.add_argument("--config", help="key = value config file")
    r.add_argument("--steps", type=int)
    r.add_argument("--transport", choices=("staged", "direct"))
    r.add_argument("--out", help="output directory")
    r.set_defaults(func=cmd_run)
    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", default="all",
                   help="sod, brio_wu, convergence, conservation, partition or all")
    v.set_defaults(func=cmd_verify)
    t = sub.add_parser("partition", help="rank table of the standard partitions")
    t.set_defaults(func=cmd_partition)
    rep = sub.add_parser("report", help="communication and speedup model per partition")
    rep.add_argument("--config", help="report only this run's partition and grid")
    rep.add_argument("--timings", help="timing.csv from a run, for the measured columns")
    rep.set_defaults(func=cmd_report)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        return args.func(args)
    except CliError as exc:
        print(f"ppmlr-error {exc.kind}: {exc}", file=sys.stderr)
        return exc.status


if __name__ == "__main__":
    sys.exit(main())
