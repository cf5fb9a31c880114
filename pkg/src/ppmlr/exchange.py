"""Halo exchange between block workers.

Workers are isolated state machines: each owns one block and talks to its
neighbours only through :class:`HaloSlab` messages carried by a transport.
A transport moves the payload and books messages, bytes and copy events in
a :class:`TransferLedger`.

Slab payloads are ``(8, ...)`` arrays in field-major order with the three
spatial indices following in x, y, z order (C layout), ``ghost`` layers thick
along the exchange axis and covering the block interior across the face.

When a block is thinner than the ghost width, the layers it sends towards one
neighbour include ghost layers it received from the neighbour on the other
side, so halos several blocks deep are filled by forwarding. Message counts
and sizes are unchanged by this.
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, field

import numpy as np

from .stepper import FACES, BlockState

STAGING_COPIES = 6

# staging buffers of the host-routed path, three on each side of the link
STAGED_PATH = (
    "device -> pinned host (sender)",
    "pinned host -> pageable host (sender)",
    "pageable host -> send buffer (sender)",
    "receive buffer -> pageable host (receiver)",
    "pageable host -> pinned host (receiver)",
    "pinned host -> device (receiver)",
)


class ExchangeError(RuntimeError):
    pass


class ExchangeDeadlock(ExchangeError):
    """Workers are waiting for slabs that nobody will send.

    ``missing`` lists the awaited ``(src, dst, face)`` triples.
    """

    def __init__(self, missing):
        self.missing = list(missing)
        detail = ", ".join(f"(src={s}, dst={d}, face={f})" for s, d, f in self.missing)
        super().__init__(f"halo exchange stalled; missing slabs {detail}")


def opposite(face):
    return ("+" if face[0] == "-" else "-") + face[1]


def face_axis(face):
    return "xyz".index(face[1])


@dataclass
class HaloSlab:
    src_rank: int
    dst_rank: int
    face: str          # face of the sender the data leaves through
    step: int
    ghost: int
    payload: np.ndarray

    @property
    def axis(self):
        return face_axis(self.face)

    @property
    def dst_face(self):
        return opposite(self.face)

    @property
    def nbytes(self):
        return self.payload.nbytes


def _face_rows(block: BlockState, face, outgoing):
    axis = face_axis(face)
    g, n = block.ghost, block.shape[axis]
    high = face[0] == "+"
    if outgoing:
        rows = slice(n, n + g) if high else slice(g, 2 * g)
    else:
        rows = slice(g + n, n + 2 * g) if high else slice(0, g)
    sl = list(block.interior_slices)
    sl[axis] = rows
    return (slice(None),) + tuple(sl)


def pack(block: BlockState, face, src_rank=0, dst_rank=0, step=0) -> HaloSlab:
    """Copy the ``ghost`` layers next to ``face`` into a slab."""
    if face not in FACES:
        raise ValueError(f"unknown face {face!r}")
    payload = np.ascontiguousarray(block.w[_face_rows(block, face, outgoing=True)])
    return HaloSlab(src_rank, dst_rank, face, step, block.ghost, payload)


def unpack(block: BlockState, slab: HaloSlab) -> BlockState:
    """Write a neighbour's slab into the ghost shell it faces."""
    target = _face_rows(block, slab.dst_face, outgoing=False)
    expected = block.w[target].shape
    if slab.ghost != block.ghost or slab.payload.shape != expected:
        raise ValueError(
            f"slab {slab.face} from rank {slab.src_rank} has shape {slab.payload.shape} "
            f"and ghost {slab.ghost}; rank {slab.dst_rank} expects {expected} and ghost {block.ghost}")
    block.w[target] = slab.payload
    return block


# --- transports and ledger ---------------------------------------------------

@dataclass(frozen=True)
class CopyProfile:
    transfers: int
    staging: int

    @property
    def total(self):
        return self.transfers + self.staging


def transport_copy_profile(kind):
    """Copy events booked per message by each transport kind."""
    if kind == "direct":
        return CopyProfile(transfers=1, staging=0)
    if kind == "staged":
        return CopyProfile(transfers=1, staging=STAGING_COPIES)
    raise ValueError(f"unknown transport {kind!r}; use 'staged' or 'direct'")


@dataclass
class LedgerRow:
    step: int
    transport: str
    messages: int = 0
    bytes: int = 0
    copy_events: int = 0
    staging_copies: int = 0


class TransferLedger:
    """Per-step message, byte and copy counters."""

    FIELDS = ("step", "transport", "messages", "bytes", "copy_events")

    def __init__(self, transport):
        self.transport = transport
        self.rows: list[LedgerRow] = []

    def row(self, step):
        if not self.rows or self.rows[-1].step != step:
            if self.rows and step < self.rows[-1].step:
                raise ExchangeError(f"ledger step {step} precedes step {self.rows[-1].step}")
            self.rows.append(LedgerRow(step, self.transport))
        return self.rows[-1]

    def book(self, step, nbytes, profile: CopyProfile):
        r = self.row(step)
        r.messages += 1
        r.bytes += nbytes
        r.copy_events += profile.total
        r.staging_copies += profile.staging

    def totals(self):
        return LedgerRow(-1, self.transport, sum(r.messages for r in self.rows),
                         sum(r.bytes for r in self.rows), sum(r.copy_events for r in self.rows),
                         sum(r.staging_copies for r in self.rows))

    def to_csv(self, fh=None):
        out = fh if fh is not None else io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(self.FIELDS)
        for r in self.rows:
            writer.writerow([r.step, r.transport, r.messages, r.bytes, r.copy_events])
        return out.getvalue() if fh is None else None


class Transport:
    """Moves slabs between workers and books them.

    ``direct`` hands the payload over in one transfer. ``staged`` routes it
    through the host buffers of :data:`STAGED_PATH`, copying at every hop.
    Neither changes the values carried.
    """

    def __init__(self, kind="direct", ledger: TransferLedger | None = None):
        self.profile = transport_copy_profile(kind)
        self.kind = kind
        self.ledger = ledger if ledger is not None else TransferLedger(kind)

    def deliver(self, slab: HaloSlab) -> HaloSlab:
        data = slab.payload
        hops = STAGED_PATH if self.kind == "staged" else ()
        half = len(hops) // 2
        for hop in hops[:half]:
            data = data.copy()
        data = data.copy()  # the link itself
        for hop in hops[half:]:
            data = data.copy()
        self.ledger.book(slab.step, slab.nbytes, self.profile)
        return HaloSlab(slab.src_rank, slab.dst_rank, slab.face, slab.step, slab.ghost, data)


# --- workers and the exchange scheduler ----------------------------------------

@dataclass(frozen=True)
class Send:
    slab: HaloSlab


@dataclass(frozen=True)
class Recv:
    src: int
    dst: int
    face: str          # sender's face


@dataclass
class Worker:
    """One rank: a block plus its neighbour table (by face, ``None`` on the boundary)."""

    rank: int
    block: BlockState
    neighbors: tuple
    stats: dict = field(default_factory=lambda: {"sent": 0, "received": 0})

    def exchange_axis(self, axis, step):
        """Generator exchanging the ghosts along ``axis``; yields Send and Recv events."""
        lo, hi = self.neighbors[2 * axis], self.neighbors[2 * axis + 1]
        thin = self.block.shape[axis] < self.block.ghost
        up, down = FACES[2 * axis + 1], FACES[2 * axis]
        # a thick block sends at once; a thin one forwards what it received first
        if hi is not None and (not thin or lo is None):
            yield Send(pack(self.block, up, self.rank, hi, step))
        if lo is not None and (not thin or hi is None):
            yield Send(pack(self.block, down, self.rank, lo, step))
        if lo is not None:
            slab = yield Recv(lo, self.rank, up)
            unpack(self.block, slab)
            self.stats["received"] += 1
            if thin and hi is not None:
                yield Send(pack(self.block, up, self.rank, hi, step))
        if hi is not None:
            slab = yield Recv(hi, self.rank, down)
            unpack(self.block, slab)
            self.stats["received"] += 1
            if thin and lo is not None:
                yield Send(pack(self.block, down, self.rank, lo, step))


def exchange_axis(workers, axis, transport: Transport, step=0, seed=None):
    """Refresh the ghosts along ``axis`` on every worker.

    Workers are advanced cooperatively; with ``seed`` set the scheduling
    order is shuffled, which must not change any value. Raises
    :class:`ExchangeDeadlock` if some worker waits for a slab that can no
    longer arrive.
    """
    rng = random.Random(seed) if seed is not None else None
    gens = {w.rank: w.exchange_axis(axis, step) for w in workers}
    by_rank = {w.rank: w for w in workers}
    mailbox = {}
    waiting = {}
    inbox_value = {r: None for r in gens}
    started = set()
    while gens:
        progressed = False
        order = list(gens)
        if rng is not None:
            rng.shuffle(order)
        for r in order:
            if r in waiting:
                key = waiting[r]
                if key not in mailbox:
                    continue
                inbox_value[r] = mailbox.pop(key)
                del waiting[r]
            gen = gens[r]
            try:
                event = gen.send(inbox_value[r]) if r in started else next(gen)
                started.add(r)
                inbox_value[r] = None
                while isinstance(event, Send):
                    s = event.slab
                    if s.dst_rank not in gens and s.dst_rank not in by_rank:
                        raise ExchangeError(f"rank {s.src_rank} sent to unknown rank {s.dst_rank}")
                    mailbox[(s.src_rank, s.dst_rank, s.face)] = transport.deliver(s)
                    by_rank[r].stats["sent"] += 1
                    event = gen.send(None)
                key = (event.src, event.dst, event.face)
                if key in mailbox:
                    inbox_value[r] = mailbox.pop(key)
                else:
                    waiting[r] = key
            except StopIteration:
                del gens[r]
            progressed = True
        if not progressed:
            raise ExchangeDeadlock(sorted(waiting.values()))
    if mailbox:
        raise ExchangeError(f"undelivered slabs left over: {sorted(mailbox)}")


def exchange_step(workers, transport: Transport, step=0, seed=None):
    """Exchange every shared face, both ways, along all three axes."""
    for axis in range(3):
        exchange_axis(workers, axis, transport, step, seed)


# --- ionosphere stub -------------------------------------------------------------

@dataclass(frozen=True)
class InnerBoundaryRecord:
    rank: int
    step: int
    potential: float


class IonosphereStub:
    """Placeholder rank for the ionosphere: joins every barrier, returns a zero potential."""

    def __init__(self, rank):
        self.rank = rank
        self.barriers = 0

    def barrier(self, step):
        self.barriers += 1
        return InnerBoundaryRecord(self.rank, step, 0.0)
