"""Session transcripts and their line-delimited serialisation.

Each line of a transcript log is one JSON object with at least ``session``,
``step``, ``direction`` and ``kind``. Message records carry a ``digest``
(first 16 hex chars of SHA-256 over the payload). Every session ends with a
``kind == "outcome"`` record holding the summary row.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Any, Iterable

import numpy as np

SUMMARY_COLUMNS = (
    "session_id",
    "outcome",
    "t_x0",
    "t_z0",
    "decode_errors_corrected",
    "bits_consumed",
    "bits_recycled",
    "eve_bits_learned",
)

# carried on the final transcript record so reports can be rebuilt from logs
EXTRA_OUTCOME_FIELDS = ("protocol", "qubits_sent", "message_bits", "correct", "test_error_found")


class Outcome(enum.Enum):
    DELIVERED = "delivered"
    ABORTED_BY_BOB = "aborted_by_bob"
    ABORTED_BY_ALICE = "aborted_by_alice"
    DECODE_FAILURE = "decode_failure"

    @property
    def aborted(self) -> bool:
        return self in (Outcome.ABORTED_BY_BOB, Outcome.ABORTED_BY_ALICE)


@dataclass
class TranscriptRecord:
    step: int
    direction: str
    kind: str
    digest: str | None = None
    fields: dict[str, Any] = field(default_factory=dict)


@dataclass
class SessionTranscript:
    session_id: int = 0
    protocol: str = "p3"
    records: list[TranscriptRecord] = field(default_factory=list)
    t_x0: float | None = None
    t_z0: float | None = None
    outcome: Outcome | None = None
    decoded: np.ndarray | None = None
    quarantined: np.ndarray | None = None
    correct: bool | None = None
    recycled_bits: np.ndarray | None = None
    bob_recycled_bits: np.ndarray | None = None
    decode_errors_corrected: int = 0
    bits_consumed: int = 0
    bits_recycled: int = 0
    qubits_sent: int = 0
    message_bits: int = 0
    eve_bits_learned: int = 0
    test_error_found: bool | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    def log(self, step: int, direction: str, kind: str, digest: str | None = None, **fields) -> None:
        self.records.append(TranscriptRecord(step, direction, kind, digest, fields))

    @property
    def delivered(self) -> bool:
        return self.outcome is Outcome.DELIVERED

    def summary_row(self) -> dict[str, Any]:
        return {
            "session_id": self.session_id,
            "outcome": self.outcome.value if self.outcome else "",
            "t_x0": _fmt_rate(self.t_x0),
            "t_z0": _fmt_rate(self.t_z0),
            "decode_errors_corrected": self.decode_errors_corrected,
            "bits_consumed": self.bits_consumed,
            "bits_recycled": self.bits_recycled,
            "eve_bits_learned": self.eve_bits_learned,
        }

    def lines(self) -> list[str]:
        out = []
        for rec in self.records:
            obj = {"session": self.session_id, "step": rec.step, "direction": rec.direction, "kind": rec.kind}
            if rec.digest is not None:
                obj["digest"] = rec.digest
            obj.update(rec.fields)
            out.append(json.dumps(obj, sort_keys=True, default=_jsonable))
        final = {"session": self.session_id, "step": 99, "direction": "-", "kind": "outcome", "protocol": self.protocol}
        final.update(self.summary_row())
        final["qubits_sent"] = self.qubits_sent
        final["message_bits"] = self.message_bits
        final["correct"] = self.correct
        final["test_error_found"] = self.test_error_found
        out.append(json.dumps(final, sort_keys=True, default=_jsonable))
        return out


def _fmt_rate(rate: float | None) -> str:
    return "" if rate is None else f"{rate:.6f}"


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return "".join(str(int(b)) for b in value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, enum.Enum):
        return value.value
    raise TypeError(f"cannot serialise {type(value).__name__}")


def read_outcomes(lines: Iterable[str]) -> list[dict[str, Any]]:
    """Summary rows recovered from the outcome records of a transcript log."""
    rows = []
    for line in lines:
        line = line.strip()
        if not line:
            continue
        obj = json.loads(line)
        if obj.get("kind") == "outcome":
            row = {col: obj[col] for col in SUMMARY_COLUMNS}
            for key in EXTRA_OUTCOME_FIELDS:
                row[key] = obj.get(key)
            rows.append(row)
    rows.sort(key=lambda r: r["session_id"])
    return rows
