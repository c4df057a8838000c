"""Transport model: each qubit is a (basis, bit, accumulated Pauli) record.

Exact for circuits built from Z/X eigenstate preparations, Pauli errors,
CNOTs whose control is a Z eigenstate, and Z/X measurements: such circuits
never leave the product-of-eigenstates class, so a classical record per
qubit carries the whole state up to phase.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import statevec as sv
from .statevec import Basis, PauliOp

_PAULI_BY_INDEX = (PauliOp.I, PauliOp.X, PauliOp.Y, PauliOp.Z)


class Origin(enum.Enum):
    MESSAGE = "message"
    TEST = "test"


@dataclass(frozen=True, slots=True)
class QubitFrame:
    prep_basis: Basis
    prep_bit: int
    error: PauliOp = PauliOp.I
    origin: Origin = Origin.MESSAGE
    position: int = 0

    def with_error(self, op: PauliOp) -> "QubitFrame":
        return QubitFrame(self.prep_basis, self.prep_bit, self.error * op, self.origin, self.position)


@dataclass(frozen=True)
class PauliChannelParams:
    p_x: float = 0.0
    p_y: float = 0.0
    p_z: float = 0.0

    def __post_init__(self):
        probs = (self.p_x, self.p_y, self.p_z)
        if any(p < 0 for p in probs) or sum(probs) > 1.0 + 1e-12:
            raise ValueError(f"invalid Pauli channel probabilities {probs}")

    @property
    def bit_flip_rate(self) -> float:
        return self.p_x + self.p_y

    @property
    def phase_flip_rate(self) -> float:
        return self.p_z + self.p_y

    @property
    def is_identity(self) -> bool:
        return self.p_x == self.p_y == self.p_z == 0.0


NOISELESS = PauliChannelParams()


def sample_errors(n: int, channel: PauliChannelParams, rng: np.random.Generator) -> list[PauliOp]:
    if channel.is_identity:
        return [PauliOp.I] * n
    u = rng.random(n)
    c1 = 1.0 - channel.p_x - channel.p_y - channel.p_z
    edges = np.array([c1, c1 + channel.p_x, c1 + channel.p_x + channel.p_y])
    return [_PAULI_BY_INDEX[i] for i in np.searchsorted(edges, u, side="right")]


def transmit(frames, channel: PauliChannelParams, rng: np.random.Generator) -> list[QubitFrame]:
    """Send frames through an i.i.d. Pauli channel."""
    frames = list(frames)
    if channel.is_identity:
        return frames
    errors = sample_errors(len(frames), channel, rng)
    return [f if e is PauliOp.I else f.with_error(e) for f, e in zip(frames, errors)]


def flips(error: PauliOp, basis: Basis) -> int:
    """1 iff the error anticommutes with the measurement observable."""
    return error.x if basis is Basis.Z else error.z


def measure_frame(frame: QubitFrame, basis: Basis, rng: np.random.Generator) -> int:
    if basis is frame.prep_basis:
        return frame.prep_bit ^ flips(frame.error, basis)
    return int(rng.integers(0, 2))


# --- circuits on both models --------------------------------------------------


class UnsupportedGate(ValueError):
    """The circuit leaves the class the frame model represents exactly."""


@dataclass
class Circuit:
    """Tiny circuit description shared by the frame model and the state-vector kernel.

    ``ops`` entries are tuples:
    ``("prep", q, basis, bit)``, ``("pauli", q, op)``, ``("cnot", c, t)``,
    ``("measure", q, basis)``. All preparations must come first.
    """

    num_qubits: int
    ops: list[tuple] = field(default_factory=list)

    def preps(self) -> dict[int, tuple[Basis, int]]:
        out: dict[int, tuple[Basis, int]] = {}
        seen_other = False
        for op in self.ops:
            if op[0] == "prep":
                if seen_other:
                    raise UnsupportedGate("preparations must precede all other operations")
                out[op[1]] = (Basis.parse(op[2]), int(op[3]))
            elif op[0] in ("pauli", "cnot", "measure"):
                seen_other = True
            else:
                raise UnsupportedGate(f"unsupported operation {op[0]!r}")
        if sorted(out) != list(range(self.num_qubits)):
            raise UnsupportedGate("every qubit needs exactly one preparation")
        if self.num_qubits > sv.MAX_QUBITS:
            raise UnsupportedGate(f"at most {sv.MAX_QUBITS} qubits")
        return out


def run_frames(circuit: Circuit, rng: np.random.Generator) -> tuple[int, ...]:
    """One sampled run of the circuit on the frame model."""
    frames = {q: QubitFrame(b, bit) for q, (b, bit) in circuit.preps().items()}
    outcomes = []
    for op in circuit.ops:
        kind = op[0]
        if kind == "pauli":
            frames[op[1]] = frames[op[1]].with_error(PauliOp.parse(op[2]))
        elif kind == "cnot":
            c, t = op[1], op[2]
            ctrl, tgt = frames[c], frames[t]
            if ctrl.prep_basis is not Basis.Z:
                raise UnsupportedGate("CNOT control must be a Z eigenstate")
            # X on control copies to target; Z on target copies to control
            new_t_err = tgt.error * (PauliOp.X if ctrl.error.x else PauliOp.I)
            new_c_err = ctrl.error * (PauliOp.Z if tgt.error.z else PauliOp.I)
            t_bit = tgt.prep_bit ^ ctrl.prep_bit if tgt.prep_basis is Basis.Z else tgt.prep_bit
            frames[t] = QubitFrame(tgt.prep_basis, t_bit, new_t_err, tgt.origin, tgt.position)
            frames[c] = QubitFrame(ctrl.prep_basis, ctrl.prep_bit, new_c_err, ctrl.origin, ctrl.position)
        elif kind == "measure":
            q, basis = op[1], Basis.parse(op[2])
            bit = measure_frame(frames[q], basis, rng)
            outcomes.append(bit)
            frames[q] = QubitFrame(basis, bit, PauliOp.I, frames[q].origin, frames[q].position)
    return tuple(outcomes)


def exact_distribution(circuit: Circuit) -> dict[tuple[int, ...], float]:
    """Outcome distribution from the state-vector kernel, by exhaustive branching."""
    preps = circuit.preps()
    state = sv.prepared(*preps[0])
    for q in range(1, circuit.num_qubits):
        state = state.tensor(sv.prepared(*preps[q]))
    body = [op for op in circuit.ops if op[0] != "prep"]
    dist: dict[tuple[int, ...], float] = {}

    def walk(state, i, prob, outcome):
        if prob < 1e-15:
            return
        if i == len(body):
            dist[outcome] = dist.get(outcome, 0.0) + prob
            return
        op = body[i]
        if op[0] == "pauli":
            walk(sv.apply_pauli(state, PauliOp.parse(op[2]), op[1]), i + 1, prob, outcome)
        elif op[0] == "cnot":
            walk(sv.apply_cnot(state, op[1], op[2]), i + 1, prob, outcome)
        else:
            basis = Basis.parse(op[2])
            for bit, p in enumerate(sv.outcome_probabilities(state, op[1], basis)):
                if p > 1e-15:
                    walk(sv.project(state, op[1], basis, bit), i + 1, prob * p, outcome + (bit,))

    walk(state, 0, 1.0, ())
    return dist


def total_variation(p: dict, q: dict) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


def equivalence_check(circuit: Circuit, rng: np.random.Generator, samples: int = 10_000, tol: float = 0.02) -> bool:
    """Does the sampled frame model match the exact state-vector distribution?"""
    counts = Counter(run_frames(circuit, rng) for _ in range(samples))
    empirical = {k: v / samples for k, v in counts.items()}
    return total_variation(empirical, exact_distribution(circuit)) < tol
