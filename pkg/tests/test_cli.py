import csv
import io
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from ppmlr.cli import main, partition_rows
from ppmlr.config import ConfigError, RunConfig, env_overrides, parse_text
from ppmlr.decomp import tde_units, PartitionConfig
from ppmlr.snapshot import Snapshot, SnapshotError, decode, encode, read_snapshot

TINY = """\
# a small magnetosphere that runs in well under a second per step
grid.cells = 12,11,11
grid.d_uniform = 4
grid.ratio = 1.3
grid.x_range = -40,20
grid.y_range = -30,30
grid.z_range = -30,30
partition.nx = 2
run.transport = staged
constants.p_floor = 0.01
"""


def write_config(tmp_path, extra="", name="run.cfg"):
    path = tmp_path / name
    path.write_text(TINY + extra)
    return str(path)


def run_cli(argv, capsys):
    status = main(argv)
    out, err = capsys.readouterr()
    return status, out, err


def error_line(err):
    lines = err.strip().splitlines()
    assert len(lines) == 1
    assert lines[0].startswith("ppmlr-error ")
    return lines[0]


# --- snapshots --------------------------------------------------------------------

def _snapshot(rng):
    edges = (np.linspace(0, 1, 4), np.linspace(-1, 1, 3), np.linspace(2, 3, 6))
    return Snapshot(0.125, 7, 6, edges, rng.normal(size=(8, 3, 2, 5)))


def test_snapshot_roundtrip_is_bitwise(rng):
    snap = _snapshot(rng)
    data = encode(snap)
    back = decode(data)
    assert encode(back) == data
    assert back.fields.tobytes() == snap.fields.tobytes()
    assert (back.time, back.step, back.ghost, back.dims) == (0.125, 7, 6, (3, 2, 5))


def test_snapshot_layout(rng):
    snap = _snapshot(rng)
    data = encode(snap)
    assert data[:4] == b"PPLR"
    # payload ends with the last field, x fastest
    tail = np.frombuffer(data[-8 * 30:], dtype="<f8")
    np.testing.assert_array_equal(tail, snap.fields[7].ravel(order="F"))


def test_snapshot_rejects_bad_input(rng):
    data = encode(_snapshot(rng))
    with pytest.raises(SnapshotError, match="magic"):
        decode(b"XXXX" + data[4:])
    with pytest.raises(SnapshotError, match="version"):
        decode(data[:4] + (99).to_bytes(4, "little") + data[8:])
    with pytest.raises(SnapshotError, match="payload"):
        decode(data[:-8])
    with pytest.raises(SnapshotError):
        decode(b"PP")
    with pytest.raises(SnapshotError):
        encode(Snapshot(0.0, 0, 6, (np.arange(3.0),) * 3, np.zeros((8, 3, 3, 3))))


# --- configuration ------------------------------------------------------------------

def test_config_layers_and_precedence(tmp_path):
    path = write_config(tmp_path, "run.steps = 4\n")
    cfg = RunConfig.load(path, environ={"PPMLR_RUN__STEPS": "6", "HOME": "/x"}, overrides={"run.steps": 8})
    assert cfg["run.steps"] == 8
    cfg = RunConfig.load(path, environ={"PPMLR_RUN__STEPS": "6"})
    assert cfg["run.steps"] == 6
    assert cfg["grid.cells"] == (12, 11, 11)
    assert cfg.partition() == PartitionConfig(2, 1, 1)
    assert RunConfig.load(environ={})["grid.cells"] == (30, 35, 35)  # desk preset
    full = RunConfig.load(environ={"PPMLR_GRID__PRESET": "full"})
    assert full.grid().shape == (156, 150, 150)


def test_config_rejects_mistakes(tmp_path):
    with pytest.raises(ConfigError, match="unknown key"):
        parse_text("grid.cell = 1,2,3")
    with pytest.raises(ConfigError, match="duplicate"):
        parse_text("run.steps = 1\nrun.steps = 2")
    with pytest.raises(ConfigError, match="key = value"):
        parse_text("run.steps 1")
    with pytest.raises(ConfigError, match="PPMLR_RUN__STEP"):
        env_overrides({"PPMLR_RUN__STEP": "3"})
    with pytest.raises(ConfigError, match="snapshot_every"):
        RunConfig.load(environ={"PPMLR_RUN__SNAPSHOT_EVERY": "0"})
    with pytest.raises(ConfigError, match="run.ghost"):
        RunConfig.load(environ={"PPMLR_RUN__GHOST": "4"})
    with pytest.raises(ConfigError, match="run.cfl"):
        RunConfig.load(environ={"PPMLR_RUN__CFL": "fast"})


def test_config_dump_reloads(tmp_path):
    cfg = RunConfig.load(write_config(tmp_path), environ={})
    again = tmp_path / "again.cfg"
    again.write_text(cfg.dump())
    assert RunConfig.load(str(again), environ={}).values == cfg.values


# --- subcommands --------------------------------------------------------------------

@pytest.fixture(scope="module")
def hundred_steps(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("hundred")
    cfg = tmp / "run.cfg"
    cfg.write_text(TINY + "run.steps = 100\nrun.snapshot_every = 30\n")
    out = tmp / "out"
    status = main(["run", "--config", str(cfg), "--out", str(out)])
    return status, out


def test_hundred_step_run_writes_snapshots(hundred_steps):
    status, out = hundred_steps
    assert status == 0
    snaps = sorted(p for p in os.listdir(out) if p.endswith(".pplr"))
    assert len(snaps) == math.ceil(100 / 30)
    assert snaps[-1] == "snap_000100.pplr"
    last = read_snapshot(out / snaps[-1])
    assert last.step == 100 and last.dims == (12, 11, 11)
    assert np.all(last.fields[0] > 0) and np.all(last.fields[7] > 0)
    with open(out / "ledger.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 100
    assert {r["messages"] for r in rows} == {"2"} and {r["copy_events"] for r in rows} == {"14"}
    with open(out / "timing.csv") as fh:
        assert len(list(csv.DictReader(fh))) == 200
    with open(out / "report.csv") as fh:
        (report,) = list(csv.DictReader(fh))
    assert report["config"] == "2x1x1" and report["ranks"] == "3"


def test_rerun_is_bitwise_identical(tmp_path, capsys):
    cfg = write_config(tmp_path, "run.steps = 6\nrun.snapshot_every = 3\nrun.seed = 11\n")
    outputs = []
    for name in ("a", "b"):
        status, out, _ = run_cli(["run", "--config", cfg, "--out", str(tmp_path / name)], capsys)
        assert status == 0 and "ran 6 steps" in out
        outputs.append({p: (tmp_path / name / p).read_bytes()
                        for p in sorted(os.listdir(tmp_path / name)) if p.endswith(".pplr")})
    assert list(outputs[0]) == ["snap_000003.pplr", "snap_000006.pplr"]
    assert outputs[0] == outputs[1]


def test_flags_override_config(tmp_path, capsys):
    cfg = write_config(tmp_path, "run.steps = 50\n")
    status, out, _ = run_cli(["run", "--config", cfg, "--steps", "2", "--transport", "direct",
                              "--out", str(tmp_path / "o")], capsys)
    assert status == 0
    with open(tmp_path / "o" / "ledger.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert [r["transport"] for r in rows] == ["direct", "direct"]
    assert [r["copy_events"] for r in rows] == ["2", "2"]


def test_unphysical_state_without_floor_exits_with_numerics_error(tmp_path, capsys):
    # the inflowing wind hits the resting magnetosphere across one coarse cell
    path = tmp_path / "nofloor.cfg"
    path.write_text(TINY.replace("constants.p_floor = 0.01\n", "") + "run.steps = 60\n")
    cfg = str(path)
    status, _, err = run_cli(["run", "--config", cfg, "--out", str(tmp_path / "o")], capsys)
    assert status == 1
    assert error_line(err).startswith("ppmlr-error numerics: step ")
    assert "non-positive pressure" in err


def test_even_transverse_partition_fails_with_oddness_message(tmp_path, capsys):
    cfg = write_config(tmp_path, "partition.ny = 2\npartition.nz = 2\n".replace("partition.nx = 2\n", ""))
    status, _, err = run_cli(["run", "--config", cfg, "--out", str(tmp_path / "o")], capsys)
    assert status != 0
    line = error_line(err)
    assert line.startswith("ppmlr-error partition:") and "must be odd" in line


@pytest.mark.parametrize("argv, kind", [
    (["run", "--config", "/nonexistent.cfg"], "config"),
    (["run", "--steps", "many"], "usage"),
    (["verify", "--suite", "nope"], "suite"),
    (["frobnicate"], "usage"),
    (["report", "--timings", "/nonexistent.csv"], "timings"),
])
def test_failures_are_single_line(argv, kind, capsys):
    status, _, err = run_cli(argv, capsys)
    assert status != 0
    assert error_line(err).startswith(f"ppmlr-error {kind}")


def test_env_override_failure(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("PPMLR_RUN__STEPZ", "3")
    status, _, err = run_cli(["run", "--out", str(tmp_path)], capsys)
    assert status == 2
    assert "PPMLR_RUN__STEPZ" in error_line(err)


def test_partition_table(capsys):
    status, out, _ = run_cli(["partition"], capsys)
    assert status == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["ranks"] for r in rows] == ["4", "28", "37", "55", "101", "151"]
    by_config = {r["config"]: r for r in rows}
    assert by_config["3x3x3"]["ranks"] == "28"
    for r in partition_rows():
        assert r["tde_units"] == tde_units(PartitionConfig.parse(r["config"]))


def test_report_default_and_with_timings(tmp_path, capsys, hundred_steps):
    status, out, _ = run_cli(["report"], capsys)
    assert status == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 6 and rows[0]["mean_compute_s"] == ""
    assert float(rows[0]["predicted_speedup"]) == pytest.approx(3.574, abs=5e-4)
    _, run_dir = hundred_steps
    cfg = write_config(tmp_path)
    status, out, _ = run_cli(["report", "--config", cfg, "--timings", str(run_dir / "timing.csv")], capsys)
    assert status == 0
    (row,) = list(csv.DictReader(io.StringIO(out)))
    assert row["config"] == "2x1x1" and float(row["mean_compute_s"]) > 0


def test_verify_suite(capsys):
    status, out, _ = run_cli(["verify", "--suite", "convergence"], capsys)
    assert status == 0
    assert out.startswith("PASS") and ">= 2.5" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ppmlr", "partition"], capture_output=True, text=True,
                          check=False)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "config,ranks,tde_units,exchanged_bytes"
