"""One-time pad carried on Z-basis qubits."""

from __future__ import annotations

import numpy as np

from ..adversary import Adversary
from ..coding import as_bits
from ..keystore import SharedKeyStore
from ..messages import MessageKind, Party, ProtocolMessage
from ..pauli_frame import NOISELESS, Origin, PauliChannelParams, QubitFrame, measure_frame
from ..statevec import Basis, PauliOp
from .config import SessionConfig
from .link import Link
from .p3 import exposed_message_bits
from .transcript import Outcome, SessionTranscript


def run_protocol1(
    config: SessionConfig,
    key,
    message,
    channel: PauliChannelParams = NOISELESS,
    rng: np.random.Generator | None = None,
    adversary: Adversary | None = None,
    session_id: int = 0,
) -> SessionTranscript:
    """Send ``message XOR key`` as Z eigenstates; Bob XORs the key back off.

    ``key`` is either a bit array (first N bits used) or a
    :class:`SharedKeyStore`, in which case N fresh bits are taken and marked
    consumed.
    """
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    message = as_bits(message)
    n = message.size
    store = key if isinstance(key, SharedKeyStore) else None
    if store is not None:
        label, pad = store.take("otp", n)
    else:
        pad = as_bits(key)
        if pad.size < n:
            raise ValueError(f"key has {pad.size} bits, message needs {n}")
        pad = pad[:n]

    tr = SessionTranscript(session_id=session_id, protocol="p1")
    link = Link(tr, rng, adversary, channel)
    frames = [QubitFrame(Basis.Z, bit, PauliOp.I, Origin.MESSAGE, j) for j, bit in enumerate((message ^ pad).tolist())]
    sent = ProtocolMessage(MessageKind.QUANTUM_SEQUENCE, Party.ALICE, frames)
    link.send(sent, step=1)
    received = link.receive(Party.BOB).payload
    cipher = np.array([measure_frame(f, Basis.Z, rng) for f in received], dtype=np.uint8)
    decoded = cipher ^ pad

    if store is not None:
        store.consume(label)
        store.record_qubits(n)
    tr.log(2, "bob", "decrypt", length=n)
    tr.outcome = Outcome.DELIVERED
    tr.decoded = decoded
    tr.correct = bool(np.array_equal(decoded, message))
    tr.bits_consumed = n
    tr.message_bits = n
    tr.qubits_sent = n
    tr.eve_bits_learned = exposed_message_bits(link.adversary, frames, padded=True)
    return tr
