"""The pre-shared secret string and its allocation ledger.

Both parties hold one :class:`SharedKeyStore` each. Sessions carve the pad,
test-placement string and two authentication strings off the front of the
unused region; recycled bits are appended at the tail.

Binary layout (all integers little-endian)::

    b"QKES"                   magic
    u32   version (= 1)
    u64   bit length L
    ceil(L/8) bytes           packed bits, bit i of G is bit (i % 8) of byte i // 8
    u64   cursor
    u64   qubits sent
    u32   number of ledger records, then per record:
          u16 label length, label (utf-8), u64 offset, u64 length, u8 status
    u32   number of append records, then per record:
          u16 source length, source (utf-8), u64 offset, u64 length
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass, field

import numpy as np

from .coding.linear import as_bits

MAGIC = b"QKES"
VERSION = 1
AUTH_BITS = 200


class KeyExhausted(Exception):
    """Not enough unallocated key for the requested session."""


class LedgerError(Exception):
    """An allocation was used in a way its status forbids."""


class Status(enum.IntEnum):
    ACTIVE = 0
    CONSUMED = 1
    RECYCLED = 2
    # kept for reuse by later sessions
    REUSABLE = 3
    # held back after an abort; neither spent nor reissued
    RETAINED = 4


@dataclass
class AllocationRecord:
    label: str
    offset: int
    length: int
    status: Status = Status.ACTIVE


@dataclass
class AppendRecord:
    source: str
    offset: int
    length: int


@dataclass(frozen=True)
class SessionAllocation:
    b: np.ndarray
    b_prime: np.ndarray
    c: np.ndarray
    d: np.ndarray
    labels: dict[str, str]


@dataclass(frozen=True)
class AccountingReport:
    bits_consumed: int
    bits_recycled: int
    net_cost: int
    qubits_sent: int
    bits_reusable: int = 0
    bits_retained: int = 0


@dataclass
class SharedKeyStore:
    bits: np.ndarray
    cursor: int = 0
    ledger: list[AllocationRecord] = field(default_factory=list)
    appended: list[AppendRecord] = field(default_factory=list)
    qubits_sent: int = 0

    def __post_init__(self):
        self.bits = as_bits(self.bits).copy()

    @classmethod
    def random(cls, length: int, rng: np.random.Generator) -> "SharedKeyStore":
        return cls(rng.integers(0, 2, size=length, dtype=np.uint8))

    def copy(self) -> "SharedKeyStore":
        return SharedKeyStore(
            self.bits.copy(),
            self.cursor,
            [AllocationRecord(r.label, r.offset, r.length, r.status) for r in self.ledger],
            [AppendRecord(a.source, a.offset, a.length) for a in self.appended],
            self.qubits_sent,
        )

    @property
    def remaining(self) -> int:
        return self.bits.size - self.cursor

    def __eq__(self, other) -> bool:
        if not isinstance(other, SharedKeyStore):
            return NotImplemented
        return self.to_bytes() == other.to_bytes()

    # --- ledger access --------------------------------------------------------

    def record(self, label: str) -> AllocationRecord:
        for rec in self.ledger:
            if rec.label == label:
                return rec
        raise LedgerError(f"no allocation labelled {label!r}")

    def read(self, label: str) -> np.ndarray:
        rec = self.record(label)
        if rec.status in (Status.CONSUMED, Status.RECYCLED):
            raise LedgerError(f"{label!r} is {rec.status.name.lower()} and may not be read")
        return self.bits[rec.offset : rec.offset + rec.length].copy()

    def _take(self, label: str, length: int) -> AllocationRecord:
        rec = AllocationRecord(label, self.cursor, length)
        self.cursor += length
        self.ledger.append(rec)
        return rec

    def _find_reusable(self, role: str, length: int) -> AllocationRecord | None:
        for rec in self.ledger:
            if rec.status is Status.REUSABLE and rec.label.endswith(f":{role}") and rec.length == length:
                return rec
        return None

    def _next_session(self) -> int:
        return sum(1 for rec in self.ledger if rec.label.endswith(":b"))

    # --- operations -----------------------------------------------------------

    def allocate(self, m: int, m_prime: int, auth_bits: int = AUTH_BITS, reuse: bool = True) -> SessionAllocation:
        """Take b, b', c, d from left to right.

        With ``reuse`` set, b' and d come from an earlier session's reusable
        slices of the same length when available, and only b and c are fresh.
        """
        reuse_bp = self._find_reusable("b_prime", m_prime) if reuse else None
        reuse_d = self._find_reusable("d", auth_bits) if reuse else None
        fresh = m + auth_bits + (0 if reuse_bp else m_prime) + (0 if reuse_d else auth_bits)
        if fresh > self.remaining:
            raise KeyExhausted(f"session needs {fresh} fresh bits, {self.remaining} remain")
        sid = self._next_session()
        labels = {}
        for role, length, reused in (
            ("b", m, None),
            ("b_prime", m_prime, reuse_bp),
            ("c", auth_bits, None),
            ("d", auth_bits, reuse_d),
        ):
            if reused is not None:
                reused.status = Status.ACTIVE
                labels[role] = reused.label
            else:
                labels[role] = self._take(f"s{sid}:{role}", length).label
        return SessionAllocation(
            b=self.read(labels["b"]),
            b_prime=self.read(labels["b_prime"]),
            c=self.read(labels["c"]),
            d=self.read(labels["d"]),
            labels=labels,
        )

    def take(self, role: str, length: int) -> tuple[str, np.ndarray]:
        """Allocate one fresh slice outside the four-part session layout."""
        if length > self.remaining:
            raise KeyExhausted(f"need {length} fresh bits, {self.remaining} remain")
        sid = sum(1 for rec in self.ledger if rec.label.endswith(f":{role}"))
        label = self._take(f"{role}{sid}:{role}", length).label
        return label, self.read(label)

    def _transition(self, label: str, new: Status, allowed: tuple[Status, ...] = (Status.ACTIVE,)) -> None:
        rec = self.record(label)
        if rec.status not in allowed:
            raise LedgerError(f"{label!r} is {rec.status.name.lower()}, cannot become {new.name.lower()}")
        rec.status = new

    def consume(self, label: str) -> None:
        self._transition(label, Status.CONSUMED)

    def release(self, label: str) -> None:
        """Mark an active slice reusable by a later session."""
        self._transition(label, Status.REUSABLE)

    def retain(self, label: str) -> None:
        self._transition(label, Status.RETAINED)

    def recycle(self, pad_label: str, recycled_bits) -> None:
        """Retire the pad and append its recycled replacement to the pool."""
        rec = self.record(pad_label)
        if rec.status is not Status.ACTIVE:
            raise LedgerError(f"cannot recycle {pad_label!r}: it is {rec.status.name.lower()}")
        recycled_bits = as_bits(recycled_bits)
        rec.status = Status.RECYCLED
        self.appended.append(AppendRecord(pad_label, self.bits.size, recycled_bits.size))
        self.bits = np.concatenate([self.bits, recycled_bits])

    def record_qubits(self, count: int) -> None:
        self.qubits_sent += count

    def accounting(self) -> AccountingReport:
        def total(*statuses):
            return sum(r.length for r in self.ledger if r.status in statuses)

        consumed = total(Status.CONSUMED, Status.RECYCLED)
        recycled = sum(a.length for a in self.appended)
        return AccountingReport(
            bits_consumed=consumed,
            bits_recycled=recycled,
            net_cost=consumed - recycled,
            qubits_sent=self.qubits_sent,
            bits_reusable=total(Status.REUSABLE),
            bits_retained=total(Status.RETAINED),
        )

    # --- serialisation --------------------------------------------------------

    def to_bytes(self) -> bytes:
        out = bytearray(MAGIC)
        out += struct.pack("<IQ", VERSION, self.bits.size)
        out += np.packbits(self.bits, bitorder="little").tobytes()
        out += struct.pack("<QQI", self.cursor, self.qubits_sent, len(self.ledger))
        for rec in self.ledger:
            label = rec.label.encode()
            out += struct.pack("<H", len(label)) + label
            out += struct.pack("<QQB", rec.offset, rec.length, int(rec.status))
        out += struct.pack("<I", len(self.appended))
        for app in self.appended:
            src = app.source.encode()
            out += struct.pack("<H", len(src)) + src + struct.pack("<QQ", app.offset, app.length)
        return bytes(out)

    @classmethod
    def from_bytes(cls, data: bytes) -> "SharedKeyStore":
        if data[:4] != MAGIC:
            raise ValueError("not a key store (bad magic)")
        version, nbits = struct.unpack_from("<IQ", data, 4)
        if version != VERSION:
            raise ValueError(f"unsupported key store version {version}")
        pos = 16
        nbytes = (nbits + 7) // 8
        packed = np.frombuffer(data, dtype=np.uint8, count=nbytes, offset=pos)
        bits = np.unpackbits(packed, bitorder="little")[:nbits]
        pos += nbytes
        cursor, qubits, nrec = struct.unpack_from("<QQI", data, pos)
        pos += 20
        ledger = []
        for _ in range(nrec):
            (ln,) = struct.unpack_from("<H", data, pos)
            label = data[pos + 2 : pos + 2 + ln].decode()
            pos += 2 + ln
            offset, length, status = struct.unpack_from("<QQB", data, pos)
            pos += 17
            ledger.append(AllocationRecord(label, offset, length, Status(status)))
        (napp,) = struct.unpack_from("<I", data, pos)
        pos += 4
        appended = []
        for _ in range(napp):
            (ln,) = struct.unpack_from("<H", data, pos)
            src = data[pos + 2 : pos + 2 + ln].decode()
            pos += 2 + ln
            offset, length = struct.unpack_from("<QQ", data, pos)
            pos += 16
            appended.append(AppendRecord(src, offset, length))
        return cls(bits, cursor, ledger, appended, qubits)


def allocate(store: SharedKeyStore, m: int, m_prime: int, auth_bits: int = AUTH_BITS) -> SessionAllocation:
    return store.allocate(m, m_prime, auth_bits)


def consume(store: SharedKeyStore, label: str) -> None:
    store.consume(label)


def recycle(store: SharedKeyStore, pad_label: str, recycled_bits) -> None:
    store.recycle(pad_label, recycled_bits)


def accounting(store: SharedKeyStore) -> AccountingReport:
    return store.accounting()
