"""Binary snapshots of the global interior state.

Layout, all little-endian:

    magic      4 bytes  b"PPLR"
    version    u32
    dims       3 x u32  cell counts nx, ny, nz
    ghost      u32
    time       f64
    step       u64
    edges      f64 x (nx+1), then (ny+1), then (nz+1)
    tag        u32 length, then that many ASCII bytes naming the fields
    payload    f64, one field after another, x index fastest
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

MAGIC = b"PPLR"
VERSION = 1
FIELD_TAG = "rho,vx,vy,vz,bpx,bpy,bpz,p"
_HEAD = struct.Struct("<4sI3IIdQ")


class SnapshotError(ValueError):
    pass


@dataclass
class Snapshot:
    time: float
    step: int
    ghost: int
    edges: tuple
    fields: np.ndarray    # (8, nx, ny, nz)

    @property
    def dims(self):
        return tuple(e.size - 1 for e in self.edges)


def encode(snap: Snapshot) -> bytes:
    dims = snap.dims
    if snap.fields.shape != (8,) + dims:
        raise SnapshotError(f"fields have shape {snap.fields.shape}, edges imply {(8,) + dims}")
    tag = FIELD_TAG.encode("ascii")
    parts = [_HEAD.pack(MAGIC, VERSION, *dims, snap.ghost, float(snap.time), int(snap.step))]
    parts += [np.asarray(e, dtype="<f8").tobytes() for e in snap.edges]
    parts.append(struct.pack("<I", len(tag)) + tag)
    parts += [np.asarray(f, dtype="<f8").tobytes(order="F") for f in snap.fields]
    return b"".join(parts)


def decode(data: bytes) -> Snapshot:
    if len(data) < _HEAD.size:
        raise SnapshotError("file is shorter than the snapshot header")
    magic, version, nx, ny, nz, ghost, t, step = _HEAD.unpack_from(data, 0)
    if magic != MAGIC:
        raise SnapshotError(f"bad magic {magic!r}")
    if version != VERSION:
        raise SnapshotError(f"unsupported snapshot version {version}")
    pos = _HEAD.size
    edges = []
    for n in (nx, ny, nz):
        e = np.frombuffer(data, dtype="<f8", count=n + 1, offset=pos).astype(float)
        edges.append(e)
        pos += 8 * (n + 1)
    (length,) = struct.unpack_from("<I", data, pos)
    pos += 4
    tag = data[pos:pos + length].decode("ascii")
    pos += length
    if tag != FIELD_TAG:
        raise SnapshotError(f"unexpected field order {tag!r}")
    count = nx * ny * nz
    if len(data) - pos != 8 * 8 * count:
        raise SnapshotError("payload size does not match the header dimensions")
    flat = np.frombuffer(data, dtype="<f8", offset=pos).astype(float)
    fields = np.stack([flat[k * count:(k + 1) * count].reshape((nx, ny, nz), order="F") for k in range(8)])
    return Snapshot(t, step, ghost, tuple(edges), fields)


def write_snapshot(path, snap: Snapshot):
    with open(path, "wb") as fh:
        fh.write(encode(snap))


def read_snapshot(path) -> Snapshot:
    with open(path, "rb") as fh:
        return decode(fh.read())
