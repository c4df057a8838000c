"""Deterministic key expansion with a recyclable pad.

Alice encodes the message with the message code, pads it with b, mixes in
test qubits placed by b', and sends the sequence. Bob checks both test error
rates, answers with c (continue) or c XOR d (abort), then decrypts and
decodes. Alice accepts only the reply c. On success both replace b by its
coset label modulo the pad-coset code.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, floor

import numpy as np

from ..adversary import Adversary
from ..coding import CombinadicIndex, DecodeFailure, as_bits, combinadic_unrank
from ..keystore import SessionAllocation, SharedKeyStore
from ..messages import MessageKind, Party, ProtocolMessage, payload_digest
from ..pauli_frame import NOISELESS, Origin, PauliChannelParams, QubitFrame, measure_frame
from ..statevec import Basis, PauliOp
from .config import SessionConfig, SessionPlan, plan_session
from .link import Link
from .transcript import Outcome, SessionTranscript


def bits_to_int(bits: np.ndarray) -> int:
    """Big-endian integer value of a bit string."""
    value = 0
    for b in bits.tolist():
        value = (value << 1) | b
    return value


@dataclass(frozen=True, eq=False)
class DecoyLayout:
    positions: tuple[int, ...]
    bases: tuple[Basis, ...]
    values: np.ndarray


def decoy_layout(b_prime: np.ndarray, plan: SessionPlan) -> DecoyLayout:
    """Positions, bases and values of the test qubits, all read from b'."""
    b_prime = as_bits(b_prime)
    if b_prime.size != plan.b_prime_length:
        raise ValueError(f"b' has {b_prime.size} bits, plan needs {plan.b_prime_length}")
    total, tests = plan.sequence_length, plan.num_tests
    pos_raw = bits_to_int(b_prime[: plan.position_bits])
    basis_raw = bits_to_int(b_prime[plan.position_bits : plan.position_bits + plan.basis_bits])
    values = b_prime[plan.position_bits + plan.basis_bits :].copy()
    positions = combinadic_unrank(CombinadicIndex(total, tests, pos_raw % comb(total, tests)))
    half = tests // 2
    x_slots = set(combinadic_unrank(CombinadicIndex(tests, half, basis_raw % comb(tests, half))))
    bases = tuple(Basis.X if i in x_slots else Basis.Z for i in range(tests))
    return DecoyLayout(positions, bases, values)


def allowed_test_errors(threshold: float, count: int) -> int:
    """Largest error count whose rate over ``count`` tests stays within ``threshold``."""
    # integer comparison keeps 3/50 <= 0.06 from hinging on float rounding
    return floor(threshold * count + 1e-9)


def message_positions(layout: DecoyLayout, total: int) -> list[int]:
    tests = set(layout.positions)
    return [j for j in range(total) if j not in tests]


class Alice:
    def __init__(self, store: SharedKeyStore, config: SessionConfig, plan: SessionPlan):
        self.store = store
        self.config = config
        self.plan = plan
        self.alloc: SessionAllocation | None = None
        self.accepted: bool | None = None

    def allocate(self) -> SessionAllocation:
        self.alloc = self.store.allocate(self.plan.block_length, self.plan.b_prime_length, self.config.auth_bits)
        return self.alloc

    def prepare(self, message: np.ndarray) -> ProtocolMessage:
        plan = self.plan
        expanded = plan.message_code.encode(message)
        cipher = expanded ^ self.alloc.b
        layout = decoy_layout(self.alloc.b_prime, plan)
        frames: list[QubitFrame | None] = [None] * plan.sequence_length
        for pos, basis, value in zip(layout.positions, layout.bases, layout.values.tolist()):
            frames[pos] = QubitFrame(basis, value, PauliOp.I, Origin.TEST, pos)
        for pos, bit in zip(message_positions(layout, plan.sequence_length), cipher.tolist()):
            frames[pos] = QubitFrame(Basis.Z, bit, PauliOp.I, Origin.MESSAGE, pos)
        self.store.record_qubits(plan.sequence_length)
        return ProtocolMessage(MessageKind.QUANTUM_SEQUENCE, Party.ALICE, frames)

    def verify_reply(self, reply: ProtocolMessage) -> bool:
        payload = np.asarray(reply.payload, dtype=np.uint8)
        self.accepted = payload.size == self.alloc.c.size and bool(np.array_equal(payload, self.alloc.c))
        return self.accepted


class Bob:
    def __init__(self, store: SharedKeyStore, config: SessionConfig, plan: SessionPlan):
        self.store = store
        self.config = config
        self.plan = plan
        self.alloc: SessionAllocation | None = None
        self.t_x0: float | None = None
        self.t_z0: float | None = None
        self.continues: bool | None = None
        self._cipher: np.ndarray | None = None

    def allocate(self) -> SessionAllocation:
        self.alloc = self.store.allocate(self.plan.block_length, self.plan.b_prime_length, self.config.auth_bits)
        return self.alloc

    def measure(self, sequence: ProtocolMessage, rng: np.random.Generator) -> ProtocolMessage:
        plan = self.plan
        frames = sequence.payload
        if len(frames) != plan.sequence_length:
            raise ValueError(f"expected {plan.sequence_length} qubits, received {len(frames)}")
        self.store.record_qubits(plan.sequence_length)
        layout = decoy_layout(self.alloc.b_prime, plan)
        z_err = x_err = 0
        for pos, basis, value in zip(layout.positions, layout.bases, layout.values.tolist()):
            wrong = measure_frame(frames[pos], basis, rng) != value
            if basis is Basis.Z:
                z_err += wrong
            else:
                x_err += wrong
        k = plan.num_tests // 2
        self.t_x0 = z_err / k
        self.t_z0 = x_err / k
        self._cipher = np.array(
            [measure_frame(frames[p], Basis.Z, rng) for p in message_positions(layout, plan.sequence_length)],
            dtype=np.uint8,
        )
        limit = allowed_test_errors(self.config.test_threshold, k)
        self.continues = z_err <= limit and x_err <= limit
        if self.continues:
            return ProtocolMessage(MessageKind.CLASSICAL_ACK, Party.BOB, self.alloc.c.copy())
        return ProtocolMessage(MessageKind.ABORT_NOTICE, Party.BOB, self.alloc.c ^ self.alloc.d)

    def decode(self) -> tuple[np.ndarray, int]:
        return self.plan.message_code.decode(self._cipher ^ self.alloc.b)


def settle(store: SharedKeyStore, alloc: SessionAllocation, outcome: Outcome, recycled: np.ndarray | None) -> None:
    """Ledger transitions at the end of a session, identical for both parties."""
    labels = alloc.labels
    store.consume(labels["c"])
    if outcome.aborted:
        store.consume(labels["d"])
        store.retain(labels["b"])
        store.retain(labels["b_prime"])
        return
    store.release(labels["b_prime"])
    store.release(labels["d"])
    if outcome is Outcome.DELIVERED:
        store.recycle(labels["b"], recycled)
    else:
        store.retain(labels["b"])


def exposed_message_bits(adversary: Adversary, frames: list[QubitFrame], padded: bool) -> int:
    """Plaintext bits the adversary holds exactly (simulation bookkeeping)."""
    if padded:
        return 0
    return sum(
        1
        for hit in adversary.intercepted
        if frames[hit.position].origin is Origin.MESSAGE and hit.basis is frames[hit.position].prep_basis
    )


def run_protocol3(
    alice_store: SharedKeyStore,
    bob_store: SharedKeyStore,
    message,
    config: SessionConfig,
    channel: PauliChannelParams = NOISELESS,
    adversary: Adversary | None = None,
    rng: np.random.Generator | None = None,
    session_id: int = 0,
) -> SessionTranscript:
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    message = as_bits(message)
    if message.size != config.N:
        raise ValueError(f"message has {message.size} bits, config says N={config.N}")
    plan = plan_session(config)
    tr = SessionTranscript(session_id=session_id, protocol="p3")
    link = Link(tr, rng, adversary, channel)
    alice, bob = Alice(alice_store, config, plan), Bob(bob_store, config, plan)
    before = alice_store.accounting()

    # 2: both carve b, b', c, d off their copies of G
    alloc_a, alloc_b = alice.allocate(), bob.allocate()
    tr.log(2, "alice", "allocate", **{r: alloc_a.labels[r] for r in ("b", "b_prime", "c", "d")})
    tr.log(2, "bob", "allocate", **{r: alloc_b.labels[r] for r in ("b", "b_prime", "c", "d")})

    # 3-4: encode, encrypt, mix tests, transmit
    sent = alice.prepare(message)
    link.send(sent, step=4)

    # 5: Bob measures, checks test rates, answers
    reply = bob.measure(link.receive(Party.BOB), rng)
    tr.t_x0, tr.t_z0 = bob.t_x0, bob.t_z0
    tr.log(5, "bob", "test_rates", t_x0=bob.t_x0, t_z0=bob.t_z0, threshold=config.test_threshold)
    link.send(reply, step=5)

    # 6: Bob decrypts and decodes (only if he continued)
    decoded = None
    decode_failed = False
    if bob.continues:
        try:
            decoded, corrected = bob.decode()
            tr.decode_errors_corrected = corrected
            tr.log(6, "bob", "decode", corrected=corrected)
        except DecodeFailure as exc:
            decode_failed = True
            tr.log(6, "bob", "decode_failure", reason=str(exc))
    else:
        tr.log(5, "bob", "abort")

    # 7: Alice authenticates the reply
    accepted = alice.verify_reply(link.receive(Party.ALICE))
    tr.log(7, "alice", "auth_accept" if accepted else "abort")

    if not bob.continues:
        outcome = Outcome.ABORTED_BY_BOB
    elif not accepted:
        outcome = Outcome.ABORTED_BY_ALICE
        tr.quarantined = decoded
    elif decode_failed:
        outcome = Outcome.DECODE_FAILURE
    else:
        outcome = Outcome.DELIVERED
    tr.outcome = outcome

    # 8: replace b by its coset label
    recycled_a = recycled_b = None
    if outcome is Outcome.DELIVERED:
        recycled_a = plan.pad_coset_code.coset_index(alloc_a.b)
        recycled_b = plan.pad_coset_code.coset_index(alloc_b.b)
        tr.decoded = decoded
        tr.correct = bool(np.array_equal(decoded, message))
        tr.recycled_bits, tr.bob_recycled_bits = recycled_a, recycled_b
        tr.log(8, "alice", "recycle", payload_digest(recycled_a), length=int(recycled_a.size))
        tr.log(8, "bob", "recycle", payload_digest(recycled_b), length=int(recycled_b.size))
    settle(alice_store, alloc_a, outcome, recycled_a)
    settle(bob_store, alloc_b, outcome, recycled_b)

    after = alice_store.accounting()
    tr.bits_consumed = after.bits_consumed - before.bits_consumed
    tr.bits_recycled = after.bits_recycled - before.bits_recycled
    tr.message_bits = config.N
    tr.qubits_sent = plan.sequence_length
    tr.eve_bits_learned = exposed_message_bits(link.adversary, sent.payload, padded=True)
    return tr


def fresh_stores(config: SessionConfig, rng: np.random.Generator, slack: int = 0) -> tuple[SharedKeyStore, SharedKeyStore]:
    """Identical Alice/Bob stores sized for exactly one session (plus ``slack``)."""
    plan = plan_session(config)
    size = plan.block_length + plan.b_prime_length + 2 * config.auth_bits + slack
    alice = SharedKeyStore.random(size, rng)
    return alice, alice.copy()
