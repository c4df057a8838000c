"""Messages exchanged between the two parties."""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass
from typing import Any

import numpy as np


class Party(enum.Enum):
    ALICE = "alice"
    BOB = "bob"


class MessageKind(enum.Enum):
    QUANTUM_SEQUENCE = "quantum_sequence"
    CLASSICAL_ACK = "classical_ack"
    ABORT_NOTICE = "abort_notice"
    # public disclosure of test positions/bases/values (naive baseline only)
    ANNOUNCEMENT = "announcement"

    @property
    def is_classical(self) -> bool:
        return self is not MessageKind.QUANTUM_SEQUENCE


@dataclass(frozen=True)
class ProtocolMessage:
    kind: MessageKind
    sender: Party
    payload: Any

    def digest(self) -> str:
        return payload_digest(self.payload)


def payload_digest(payload) -> str:
    h = hashlib.sha256()
    if isinstance(payload, np.ndarray):
        h.update(np.packbits(payload.astype(np.uint8), bitorder="little").tobytes())
        h.update(str(payload.size).encode())
    elif isinstance(payload, (list, tuple)):
        for item in payload:
            h.update(repr(_frame_key(item)).encode())
    else:
        h.update(repr(payload).encode())
    return h.hexdigest()[:16]


def _frame_key(item):
    # QubitFrame without importing it here
    if hasattr(item, "prep_basis"):
        return (item.position, item.prep_basis.value, item.prep_bit, item.error.name)
    return item
