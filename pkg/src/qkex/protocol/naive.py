"""Unencrypted direct communication with decoy test qubits.

The message goes out as plain Z eigenstates with m test qubits (half X,
half Z) at random positions. Once the sequence has arrived, Alice announces
the test positions, bases and values in public and Bob checks them. Bob
therefore has to hold the qubits until the announcement.
"""

from __future__ import annotations

import numpy as np

from ..adversary import Adversary
from ..coding import as_bits
from ..messages import MessageKind, Party, ProtocolMessage
from ..pauli_frame import NOISELESS, Origin, PauliChannelParams, QubitFrame, measure_frame
from ..statevec import Basis, PauliOp
from .config import SessionConfig
from .link import Link
from .p3 import exposed_message_bits
from .transcript import Outcome, SessionTranscript


def run_naive_baseline(
    config: SessionConfig,
    adversary: Adversary | None = None,
    rng: np.random.Generator | None = None,
    message=None,
    channel: PauliChannelParams = NOISELESS,
    session_id: int = 0,
) -> SessionTranscript:
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    n, m = config.N, config.num_tests
    message = as_bits(message) if message is not None else rng.integers(0, 2, n, dtype=np.uint8)
    if message.size != n:
        raise ValueError(f"message has {message.size} bits, config says N={n}")
    total = n + m
    positions = np.sort(rng.choice(total, size=m, replace=False))
    bases = [Basis.X] * (m // 2) + [Basis.Z] * (m - m // 2)
    bases = [bases[i] for i in rng.permutation(m)]
    values = rng.integers(0, 2, m, dtype=np.uint8)

    frames: list[QubitFrame | None] = [None] * total
    for pos, basis, value in zip(positions.tolist(), bases, values.tolist()):
        frames[pos] = QubitFrame(basis, value, PauliOp.I, Origin.TEST, pos)
    msg_positions = [j for j in range(total) if frames[j] is None]
    for pos, bit in zip(msg_positions, message.tolist()):
        frames[pos] = QubitFrame(Basis.Z, bit, PauliOp.I, Origin.MESSAGE, pos)

    tr = SessionTranscript(session_id=session_id, protocol="naive_baseline")
    link = Link(tr, rng, adversary, channel)
    link.send(ProtocolMessage(MessageKind.QUANTUM_SEQUENCE, Party.ALICE, frames), step=1)
    announcement = {
        "positions": positions.tolist(),
        "bases": [b.value for b in bases],
        "values": values.tolist(),
    }
    link.send(ProtocolMessage(MessageKind.ANNOUNCEMENT, Party.ALICE, announcement), step=2)
    received = link.receive(Party.BOB).payload
    link.receive(Party.BOB)

    z_err = x_err = 0
    for pos, basis, value in zip(positions.tolist(), bases, values.tolist()):
        wrong = measure_frame(received[pos], basis, rng) != value
        if basis is Basis.Z:
            z_err += wrong
        else:
            x_err += wrong
    decoded = np.array([measure_frame(received[p], Basis.Z, rng) for p in msg_positions], dtype=np.uint8)

    n_z, n_x = m - m // 2, m // 2
    tr.t_x0 = z_err / n_z if n_z else 0.0
    tr.t_z0 = x_err / n_x if n_x else 0.0
    tr.test_error_found = bool(z_err or x_err)
    tr.log(3, "bob", "test_check", z_errors=z_err, x_errors=x_err)
    tr.outcome = Outcome.ABORTED_BY_BOB if tr.test_error_found else Outcome.DELIVERED
    if tr.delivered:
        tr.decoded = decoded
        tr.correct = bool(np.array_equal(decoded, message))
    tr.message_bits = n
    tr.qubits_sent = total
    tr.eve_bits_learned = exposed_message_bits(link.adversary, frames, padded=False)
    return tr
