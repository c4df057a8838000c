"""Monte-Carlo batches of sessions, their aggregate report and output files."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Iterator

import numpy as np

from ..adversary import parse_adversary
from ..keystore import SharedKeyStore
from ..protocol import (
    SUMMARY_COLUMNS,
    LeakageEstimate,
    Outcome,
    ProtocolKind,
    SessionTranscript,
    fresh_stores,
    leakage_audit,
    plan_session,
    read_outcomes,
    run_naive_baseline,
    run_protocol1,
    run_protocol2,
    run_protocol3,
)
from ..protocol.transcript import EXTRA_OUTCOME_FIELDS
from .spec import ExperimentSpec

# Nominal BB84 cost: one sifted key bit per two qubits, no correction overhead.
BB84_QUBITS_PER_BIT = 2

SUMMARY_FILE = "summary.csv"
TRANSCRIPT_FILE = "transcripts.log"
REPORT_FILE = "report.txt"


def session_rng(seed: int, session_id: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, session_id]))


@dataclass
class SessionResult:
    transcript: SessionTranscript
    secret: tuple
    view: tuple
    recycled: tuple

    def row(self) -> dict[str, Any]:
        tr = self.transcript
        row = tr.summary_row()
        row.update({key: getattr(tr, key) for key in EXTRA_OUTCOME_FIELDS})
        return row


def _chained_stores(spec: ExperimentSpec) -> tuple[SharedKeyStore, SharedKeyStore]:
    plan = plan_session(spec.config)
    per_session = plan.block_length + plan.b_prime_length + 2 * spec.config.auth_bits
    rng = np.random.default_rng(np.random.SeedSequence(spec.seed, spawn_key=(1,)))
    alice = SharedKeyStore.random(per_session * spec.num_sessions, rng)
    return alice, alice.copy()


def run_session(
    spec: ExperimentSpec,
    session_id: int,
    stores: tuple[SharedKeyStore, SharedKeyStore] | None = None,
) -> SessionResult:
    """Session ``session_id`` of the experiment, reproducible on its own."""
    config = spec.config
    rng = session_rng(spec.seed, session_id)
    adversary = parse_adversary(spec.adversary)()
    message = rng.integers(0, 2, config.N, dtype=np.uint8)
    kind = config.protocol
    if kind is ProtocolKind.P3:
        alice, bob = stores if stores is not None else fresh_stores(config, rng)
        tr = run_protocol3(alice, bob, message, config, spec.channel, adversary, rng, session_id)
    elif kind is ProtocolKind.P1:
        key = SharedKeyStore.random(config.N, rng)
        tr = run_protocol1(config, key, message, spec.channel, rng, adversary, session_id)
    elif kind is ProtocolKind.P2:
        if adversary.name != "identity":
            raise ValueError("Protocol 2 runs without an adversary")
        tr = run_protocol2(config, rng, message, spec.channel, session_id=session_id)
    else:
        tr = run_naive_baseline(config, adversary, rng, message, spec.channel, session_id)
    recycled = tuple(tr.recycled_bits.tolist()) if tr.recycled_bits is not None else ()
    return SessionResult(tr, tuple(message.tolist()), adversary.view_symbol(), recycled)


def _run_chunk(args) -> list[SessionResult]:
    spec, ids = args
    return [run_session(spec, sid) for sid in ids]


def iter_sessions(spec: ExperimentSpec, workers: int = 1, chunk: int = 2_000) -> Iterator[SessionResult]:
    """Results in session-id order, whatever order workers finish in."""
    ids = range(spec.num_sessions)
    if spec.key_mode == "chained":
        stores = _chained_stores(spec)
        for sid in ids:
            yield run_session(spec, sid, stores)
        return
    if workers <= 1:
        for sid in ids:
            yield run_session(spec, sid)
        return
    chunks = [(spec, ids[i : i + chunk]) for i in range(0, len(ids), chunk)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for results in pool.map(_run_chunk, chunks):
            yield from results


# --- aggregation --------------------------------------------------------------


def _mean(values: Iterable[float]) -> float | None:
    values = list(values)
    return sum(values) / len(values) if values else None


@dataclass
class AggregateReport:
    protocol: str
    sessions: int
    counts: dict[str, int]
    mean_t_x0: float | None
    mean_t_z0: float | None
    bits_consumed: int
    bits_recycled: int
    qubits_sent: int
    message_bits_sent: int
    message_bits_delivered: int
    delivered_wrong: int
    undetected_sessions: int
    leaked_undetected_sessions: int
    eve_bits_learned: int
    leakage: dict[str, LeakageEstimate] = field(default_factory=dict)

    @classmethod
    def from_rows(cls, rows: list[dict[str, Any]]) -> "AggregateReport":
        if not rows:
            raise ValueError("no sessions to aggregate")
        counts = {o.value: 0 for o in Outcome}
        for row in rows:
            counts[row["outcome"]] += 1
        delivered = [r for r in rows if r["outcome"] == Outcome.DELIVERED.value]

        def rates(key):
            return (float(r[key]) for r in rows if r[key] not in ("", None))

        return cls(
            protocol=rows[0]["protocol"],
            sessions=len(rows),
            counts=counts,
            mean_t_x0=_mean(rates("t_x0")),
            mean_t_z0=_mean(rates("t_z0")),
            bits_consumed=sum(int(r["bits_consumed"]) for r in rows),
            bits_recycled=sum(int(r["bits_recycled"]) for r in rows),
            qubits_sent=sum(int(r["qubits_sent"]) for r in rows),
            message_bits_sent=sum(int(r["message_bits"]) for r in rows),
            message_bits_delivered=sum(int(r["message_bits"]) for r in delivered),
            delivered_wrong=sum(1 for r in delivered if r["correct"] is False),
            undetected_sessions=len(delivered),
            leaked_undetected_sessions=sum(1 for r in delivered if int(r["eve_bits_learned"]) > 0),
            eve_bits_learned=sum(int(r["eve_bits_learned"]) for r in rows),
        )

    @property
    def delivered(self) -> int:
        return self.counts[Outcome.DELIVERED.value]

    @property
    def delivered_fraction(self) -> float:
        return self.delivered / self.sessions

    @property
    def net_cost(self) -> int:
        return self.bits_consumed - self.bits_recycled

    @property
    def net_cost_per_delivered_bit(self) -> float | None:
        return self.net_cost / self.message_bits_delivered if self.message_bits_delivered else None

    @property
    def qubits_per_message_bit(self) -> float:
        return self.qubits_sent / self.message_bits_sent if self.message_bits_sent else 0.0

    @property
    def bb84_qubits(self) -> int:
        return BB84_QUBITS_PER_BIT * self.message_bits_sent

    @property
    def ratio_vs_bb84(self) -> float:
        return self.qubits_sent / self.bb84_qubits if self.bb84_qubits else 0.0

    @property
    def undetected_rate(self) -> float:
        return self.undetected_sessions / self.sessions

    @property
    def leaked_undetected_rate(self) -> float:
        return self.leaked_undetected_sessions / self.sessions

    def counts_match(self, other: "AggregateReport") -> bool:
        """Equal on everything derived from the per-session rows."""
        mine = {k: v for k, v in vars(self).items() if k != "leakage"}
        theirs = {k: v for k, v in vars(other).items() if k != "leakage"}
        return mine == theirs

    def to_text(self) -> str:
        def fmt(x, digits=6):
            return "n/a" if x is None else f"{x:.{digits}f}"

        lines = [
            f"protocol                   {self.protocol}",
            f"sessions                   {self.sessions}",
        ]
        lines += [f"  {name:<24} {n}" for name, n in self.counts.items()]
        lines += [
            f"delivered fraction         {fmt(self.delivered_fraction)}",
            f"delivered but wrong        {self.delivered_wrong}",
            f"mean t_x0                  {fmt(self.mean_t_x0)}",
            f"mean t_z0                  {fmt(self.mean_t_z0)}",
            "",
            "key accounting",
            f"  bits consumed            {self.bits_consumed}",
            f"  bits recycled            {self.bits_recycled}",
            f"  net cost                 {self.net_cost}",
            f"  net per delivered bit    {fmt(self.net_cost_per_delivered_bit)}",
            "",
            "transmission cost",
            f"  qubits sent              {self.qubits_sent}",
            f"  qubits per message bit   {fmt(self.qubits_per_message_bit)}",
            f"  BB84 nominal qubits      {self.bb84_qubits}  ({BB84_QUBITS_PER_BIT} per bit, sifting only)",
            f"  ratio to BB84 nominal    {fmt(self.ratio_vs_bb84)}",
            "",
            "adversary",
            f"  undetected rate          {fmt(self.undetected_rate)}",
            f"  leaked and undetected    {fmt(self.leaked_undetected_rate)}",
            f"  plaintext bits learned   {self.eve_bits_learned}",
        ]
        for name, est in self.leakage.items():
            lines.append(f"  leakage about {name:<10} {est.summary()}")
        return "\n".join(lines) + "\n"


def spec_header(spec: ExperimentSpec) -> str:
    c, ch = spec.config, spec.channel
    return (
        f"# N={c.N} t_x={c.t_x} t_z={c.t_z} delta={c.delta} r={c.r} tests={c.num_tests} "
        f"threshold={c.test_threshold:.6f}\n"
        f"# channel p_x={ch.p_x} p_y={ch.p_y} p_z={ch.p_z}  adversary={spec.adversary}  "
        f"seed={spec.seed}  key_mode={spec.key_mode}\n"
    )


def summary_csv(rows: Iterable[dict[str, Any]]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SUMMARY_COLUMNS, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    report: AggregateReport
    rows: list[dict[str, Any]]

    def report_text(self) -> str:
        return spec_header(self.spec) + self.report.to_text()


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> ExperimentResult:
    """Run every session, aggregate, and write outputs when ``spec.out_dir`` is set."""
    rows: list[dict[str, Any]] = []
    secrets, views, recycled, recycled_views = [], [], [], []
    log = None
    if spec.out_dir is not None:
        spec.out_dir.mkdir(parents=True, exist_ok=True)
        log = open(spec.out_dir / TRANSCRIPT_FILE, "w", encoding="utf-8", newline="\n")
    try:
        for result in iter_sessions(spec, workers):
            rows.append(result.row())
            if log is not None:
                log.write("\n".join(result.transcript.lines()) + "\n")
            if spec.leakage:
                secrets.append(result.secret)
                views.append(result.view)
                if result.recycled:
                    recycled.append(result.recycled)
                    recycled_views.append(result.view)
    finally:
        if log is not None:
            log.close()

    report = AggregateReport.from_rows(rows)
    if spec.leakage:
        report.leakage["message"] = leakage_audit(secrets, views)
        if recycled:
            report.leakage["recycled"] = leakage_audit(recycled, recycled_views)
    result = ExperimentResult(spec, report, rows)
    if spec.out_dir is not None:
        _write(spec.out_dir / SUMMARY_FILE, summary_csv(rows))
        _write(spec.out_dir / REPORT_FILE, result.report_text())
    return result


def _write(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def report_from_transcripts(path: str | Path) -> AggregateReport:
    """Rebuild the aggregate from a transcript log (or a directory holding one)."""
    path = Path(path)
    if path.is_dir():
        path = path / TRANSCRIPT_FILE
    with open(path, encoding="utf-8") as fh:
        return AggregateReport.from_rows(read_outcomes(fh))

