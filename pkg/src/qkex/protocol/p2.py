"""EPR-pair encryption by CNOT, run bit by bit on the exact state-vector kernel."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..coding import as_bits
from ..pauli_frame import NOISELESS, PauliChannelParams, sample_errors
from ..statevec import (
    ALICE_PAIR,
    BOB_PAIR,
    MESSAGE,
    Basis,
    PauliOp,
    StateVector,
    apply_cnot,
    apply_pauli,
    make_bell,
    measure,
)
from .config import SessionConfig
from .transcript import Outcome, SessionTranscript

MAX_BITS = 6
BELL_KINDS = ("phi_plus", "phi_minus", "psi_plus", "psi_minus")

# residual pair state predicted for each transit error
EXPECTED_RESIDUAL = {
    PauliOp.I: "phi_plus",
    PauliOp.X: "phi_plus",
    PauliOp.Z: "phi_minus",
    PauliOp.Y: "phi_minus",
}


class ScaleExceeded(ValueError):
    """Message too long for the state-vector kernel."""


def residual_pair(state: StateVector, bit: int) -> str | None:
    """Name of the Bell state left on qubits 0 and 1 after the message qubit reads ``bit``."""
    marker = StateVector.basis_state([bit])
    for kind in BELL_KINDS:
        if state.equals_up_to_phase(make_bell(kind).tensor(marker)):
            return kind
    return None


def run_protocol2(
    config: SessionConfig,
    rng: np.random.Generator | None = None,
    message=None,
    channel: PauliChannelParams = NOISELESS,
    forced_errors: Sequence[PauliOp | str] | None = None,
    session_id: int = 0,
) -> SessionTranscript:
    """One session; ``forced_errors`` overrides the sampled transit error per bit."""
    if config.N > MAX_BITS:
        raise ScaleExceeded(f"Protocol 2 runs on at most {MAX_BITS} bits, got N={config.N}")
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    message = as_bits(message) if message is not None else rng.integers(0, 2, config.N, dtype=np.uint8)
    if message.size != config.N:
        raise ValueError(f"message has {message.size} bits, config says N={config.N}")
    if forced_errors is not None:
        errors = [PauliOp.parse(e) for e in forced_errors]
        if len(errors) != config.N:
            raise ValueError("need one forced error per message bit")
    else:
        errors = sample_errors(config.N, channel, rng)

    tr = SessionTranscript(session_id=session_id, protocol="p2")
    decoded, residuals = [], []
    for i, (bit, err) in enumerate(zip(message.tolist(), errors)):
        state = make_bell("phi_plus").tensor(StateVector.basis_state([bit]))
        state = apply_cnot(state, ALICE_PAIR, MESSAGE)
        state = apply_pauli(state, err, MESSAGE)
        state = apply_cnot(state, BOB_PAIR, MESSAGE)
        out, state = measure(state, MESSAGE, Basis.Z, rng)
        pair = residual_pair(state, out)
        decoded.append(out)
        residuals.append(pair)
        tr.log(3, "bob", "decode_bit", index=i, error=err.name, bit=out, residual=pair)

    tr.decoded = np.array(decoded, dtype=np.uint8)
    tr.correct = bool(np.array_equal(tr.decoded, message))
    tr.outcome = Outcome.DELIVERED
    tr.message_bits = config.N
    tr.qubits_sent = config.N
    tr.extra["errors"] = [e.name for e in errors]
    tr.extra["residuals"] = residuals
    tr.extra["residuals_match"] = all(EXPECTED_RESIDUAL[e] == r for e, r in zip(errors, residuals))
    return tr
