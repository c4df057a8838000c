"""Eavesdropping strategies sitting on the quantum and classical channels.

A strategy sees exactly what crosses the link: transmitted frames and
classical messages. It has no reference to either party's key store. Every
strategy keeps an append-only ``view`` and exposes a finite
``view_symbol()`` summarising it for leakage estimation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .messages import MessageKind, ProtocolMessage
from .pauli_frame import QubitFrame, measure_frame
from .statevec import Basis, PauliOp


@dataclass(frozen=True)
class Interception:
    position: int
    basis: Basis
    bit: int


@dataclass
class Adversary:
    """Base strategy: passes everything through unchanged."""

    name = "identity"
    view: list = field(default_factory=list)
    intercepted: list[Interception] = field(default_factory=list)

    def on_quantum(self, frames: list[QubitFrame], rng: np.random.Generator) -> list[QubitFrame]:
        return list(frames)

    def on_classical(self, message: ProtocolMessage, rng: np.random.Generator) -> ProtocolMessage:
        return message

    def view_symbol(self) -> tuple:
        return tuple(self.view)

    def _intercept(self, frame: QubitFrame, basis: Basis, rng: np.random.Generator) -> QubitFrame:
        bit = measure_frame(frame, basis, rng)
        self.intercepted.append(Interception(frame.position, basis, bit))
        # resend a fresh eigenstate of the measured basis; the original basis is lost
        return QubitFrame(basis, bit, PauliOp.I, frame.origin, frame.position)


class Identity(Adversary):
    name = "identity"


class InterceptOneZ(Adversary):
    """Measure one uniformly chosen qubit in Z and resend what was seen."""

    name = "intercept_one_z"

    def on_quantum(self, frames, rng):
        frames = list(frames)
        if not frames:
            return frames
        j = int(rng.integers(0, len(frames)))
        frames[j] = self._intercept(frames[j], Basis.Z, rng)
        self.view.append((frames[j].position, frames[j].prep_bit))
        return frames

    def view_symbol(self) -> tuple:
        return tuple(self.view)


@dataclass
class InterceptFraction(Adversary):
    """Intercept each qubit independently with probability ``fraction``."""

    name = "intercept_fraction"
    fraction: float = 0.1
    basis: Basis = Basis.Z

    def __post_init__(self):
        if not 0.0 <= self.fraction <= 1.0:
            raise ValueError("fraction must lie in [0, 1]")
        self.basis = Basis.parse(self.basis)

    def on_quantum(self, frames, rng):
        frames = list(frames)
        hit = rng.random(len(frames)) < self.fraction
        for j in np.flatnonzero(hit):
            frames[j] = self._intercept(frames[j], self.basis, rng)
            self.view.append((frames[j].position, frames[j].prep_bit))
        return frames


class MeasureAllZ(Adversary):
    """Measure every transmitted qubit in Z.

    If test positions are later announced in public, the view symbol keeps
    only the bits at the remaining (message) positions.
    """

    name = "measure_all_z"

    def __init__(self):
        super().__init__()
        self.bits: tuple[int, ...] = ()
        self.public_tests: tuple[int, ...] | None = None

    def on_quantum(self, frames, rng):
        out = [self._intercept(f, Basis.Z, rng) for f in frames]
        self.bits = tuple(f.prep_bit for f in out)
        self.view.append(("bits", self.bits))
        return out

    def on_classical(self, message, rng):
        if message.kind is MessageKind.ANNOUNCEMENT:
            self.public_tests = tuple(message.payload["positions"])
        self.view.append((message.kind.value, message.digest()))
        return message

    def view_symbol(self) -> tuple:
        if self.public_tests is None:
            return self.bits
        tests = set(self.public_tests)
        return tuple(b for j, b in enumerate(self.bits) if j not in tests)


FORGE_MODES = ("random", "replay", "bitflip")


@dataclass
class ForgeClassical(Adversary):
    """Replace authentication replies.

    ``random`` substitutes fresh random bits, ``replay`` resends a reply
    seen in an earlier session (from ``archive``), ``bitflip`` XORs the
    reply with ``mask`` (default: flip the first bit).
    """

    name = "forge_classical"
    mode: str = "random"
    archive: list = field(default_factory=list)
    mask: np.ndarray | None = None

    def __post_init__(self):
        if self.mode not in FORGE_MODES:
            raise ValueError(f"unknown forge mode {self.mode!r}; expected one of {FORGE_MODES}")

    def on_classical(self, message, rng):
        if message.kind not in (MessageKind.CLASSICAL_ACK, MessageKind.ABORT_NOTICE):
            return message
        original = np.asarray(message.payload, dtype=np.uint8)
        self.view.append(original.copy())
        if self.mode == "replay" and self.archive:
            forged = np.asarray(self.archive[int(rng.integers(0, len(self.archive)))], dtype=np.uint8)
        elif self.mode == "bitflip":
            mask = self.mask
            if mask is None:
                mask = np.zeros(original.size, dtype=np.uint8)
                mask[0] = 1
            forged = original ^ mask
        else:
            forged = rng.integers(0, 2, size=original.size, dtype=np.uint8)
        return ProtocolMessage(MessageKind.CLASSICAL_ACK, message.sender, forged)


STRATEGIES = {
    "identity": Identity,
    "intercept_one_z": InterceptOneZ,
    "intercept_fraction": InterceptFraction,
    "measure_all_z": MeasureAllZ,
    "forge_classical": ForgeClassical,
}


def parse_adversary(spec: str):
    """Build a strategy factory from ``name`` or ``name:key=value,...``.

    >>> make = parse_adversary("intercept_fraction:fraction=0.25,basis=X")
    >>> make().fraction
    0.25
    """
    name, _, params = spec.partition(":")
    name = name.strip()
    if name not in STRATEGIES:
        raise ValueError(f"unknown adversary {name!r}; expected one of {sorted(STRATEGIES)}")
    kwargs = {}
    for item in filter(None, (p.strip() for p in params.split(","))):
        key, _, value = item.partition("=")
        key = key.strip()
        if key == "f":
            key = "fraction"
        kwargs[key] = float(value) if key == "fraction" else value.strip()
    cls = STRATEGIES[name]
    if kwargs and cls in (Identity, InterceptOneZ, MeasureAllZ):
        raise ValueError(f"{name} takes no parameters")
    cls(**kwargs)  # validate eagerly

    def factory(**extra):
        return cls(**kwargs, **extra)

    factory.spec = spec
    return factory
