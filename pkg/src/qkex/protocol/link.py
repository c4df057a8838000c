"""In-process duplex link with a mandatory eavesdropper in the middle."""

from __future__ import annotations

from collections import deque

import numpy as np

from ..adversary import Adversary, Identity
from ..messages import MessageKind, Party, ProtocolMessage
from ..pauli_frame import NOISELESS, PauliChannelParams, transmit
from .transcript import SessionTranscript

_ARROW = {Party.ALICE: "alice->bob", Party.BOB: "bob->alice"}


def other(party: Party) -> Party:
    return Party.BOB if party is Party.ALICE else Party.ALICE


class Link:
    """Quantum messages cross the Pauli channel, then the adversary; classical
    messages go straight to the adversary. Delivered messages queue at the
    recipient.
    """

    def __init__(
        self,
        transcript: SessionTranscript,
        rng: np.random.Generator,
        adversary: Adversary | None = None,
        channel: PauliChannelParams = NOISELESS,
    ):
        self.transcript = transcript
        self.rng = rng
        self.adversary = adversary if adversary is not None else Identity()
        self.channel = channel
        self.inbox: dict[Party, deque[ProtocolMessage]] = {Party.ALICE: deque(), Party.BOB: deque()}

    def send(self, message: ProtocolMessage, step: int) -> None:
        sent_digest = message.digest()
        if message.kind is MessageKind.QUANTUM_SEQUENCE:
            frames = transmit(message.payload, self.channel, self.rng)
            frames = self.adversary.on_quantum(frames, self.rng)
            delivered = ProtocolMessage(message.kind, message.sender, frames)
        else:
            delivered = self.adversary.on_classical(message, self.rng)
        got_digest = delivered.digest()
        fields = {}
        if not isinstance(message.payload, dict):
            fields["length"] = len(message.payload)
        if got_digest != sent_digest:
            fields["delivered_digest"] = got_digest
        self.transcript.log(step, _ARROW[message.sender], message.kind.value, sent_digest, **fields)
        self.inbox[other(message.sender)].append(delivered)

    def receive(self, party: Party) -> ProtocolMessage:
        return self.inbox[party].popleft()
