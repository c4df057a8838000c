"""Exact state-vector kernel for a handful of qubits.

Little-endian: qubit 0 is the least significant bit of the amplitude index,
so ``|q0 q1 q2>`` lives at index ``q0 + 2*q1 + 4*q2``.

Only what the encryption identities need is provided: Bell states, CNOT,
single-qubit Paulis, and Z/X measurement.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

MAX_QUBITS = 8
NORM_TOL = 1e-12

SQRT1_2 = 1.0 / np.sqrt(2.0)


class PauliOp(enum.Enum):
    """Single-qubit Pauli, identified modulo phase by its (x, z) bits."""

    I = (0, 0)
    X = (1, 0)
    Z = (0, 1)
    Y = (1, 1)

    @property
    def x(self) -> int:
        return self.value[0]

    @property
    def z(self) -> int:
        return self.value[1]

    @property
    def flips_bit(self) -> bool:
        return bool(self.x)

    @property
    def flips_phase(self) -> bool:
        return bool(self.z)

    def __mul__(self, other: "PauliOp") -> "PauliOp":
        # group product with the phase discarded
        return PauliOp((self.x ^ other.x, self.z ^ other.z))

    def matrix(self) -> np.ndarray:
        return PAULI_MATRICES[self].copy()

    @classmethod
    def parse(cls, value) -> "PauliOp":
        if isinstance(value, PauliOp):
            return value
        return cls[str(value).upper()]


PAULI_MATRICES = {
    PauliOp.I: np.array([[1, 0], [0, 1]], dtype=complex),
    PauliOp.X: np.array([[0, 1], [1, 0]], dtype=complex),
    PauliOp.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    PauliOp.Z: np.array([[1, 0], [0, -1]], dtype=complex),
}


class Basis(enum.Enum):
    Z = "Z"
    X = "X"

    @classmethod
    def parse(cls, value) -> "Basis":
        if isinstance(value, Basis):
            return value
        return cls(str(value).upper())


@dataclass(frozen=True)
class StateVector:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise ValueError(f"num_qubits must be in 1..{MAX_QUBITS}, got {self.num_qubits}")
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (1 << self.num_qubits,):
            raise ValueError(f"expected {1 << self.num_qubits} amplitudes, got {amps.shape}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL * 10:
            raise ValueError(f"state is not normalised (|psi|^2 = {norm})")
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    @classmethod
    def basis_state(cls, bits) -> "StateVector":
        bits = list(bits)
        amps = np.zeros(1 << len(bits), dtype=complex)
        amps[sum(b << i for i, b in enumerate(bits))] = 1.0
        return cls(len(bits), amps)

    def tensor(self, other: "StateVector") -> "StateVector":
        """``self`` on the low qubits, ``other`` on the qubits above them."""
        return StateVector(self.num_qubits + other.num_qubits, np.kron(other.amplitudes, self.amplitudes))

    def equals_up_to_phase(self, other: "StateVector", tol: float = 1e-10) -> bool:
        if self.num_qubits != other.num_qubits:
            return False
        return bool(np.max(np.abs(canonical_phase(self.amplitudes) - canonical_phase(other.amplitudes))) <= tol)


def canonical_phase(amps: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Rotate the global phase so the first non-negligible amplitude is real positive."""
    amps = np.asarray(amps, dtype=complex)
    nz = np.flatnonzero(np.abs(amps) > tol)
    if nz.size == 0:
        return amps.copy()
    lead = amps[nz[0]]
    return amps * (abs(lead) / lead)


def single_qubit(alpha: complex, beta: complex) -> StateVector:
    return StateVector(1, np.array([alpha, beta], dtype=complex))


def prepared(basis: Basis, bit: int) -> StateVector:
    """Eigenstate of Z (``|0>``, ``|1>``) or X (``|+>`` for 0, ``|->`` for 1)."""
    if Basis.parse(basis) is Basis.Z:
        return StateVector.basis_state([bit])
    sign = -1.0 if bit else 1.0
    return single_qubit(SQRT1_2, sign * SQRT1_2)


def random_qubit(rng: np.random.Generator) -> StateVector:
    """``cos(theta)|0> + e^{i phi} sin(theta)|1>`` with theta, phi uniform."""
    theta = rng.uniform(0.0, np.pi)
    phi = rng.uniform(0.0, 2 * np.pi)
    return single_qubit(np.cos(theta), np.exp(1j * phi) * np.sin(theta))


BELL_KINDS = ("phi_plus", "phi_minus", "psi_plus", "psi_minus")


def make_bell(kind: str) -> StateVector:
    amps = np.zeros(4, dtype=complex)
    if kind == "phi_plus":
        amps[[0, 3]] = SQRT1_2, SQRT1_2
    elif kind == "phi_minus":
        amps[[0, 3]] = SQRT1_2, -SQRT1_2
    elif kind == "psi_plus":
        amps[[1, 2]] = SQRT1_2, SQRT1_2
    elif kind == "psi_minus":
        # index order (00, 01, 10, 11); a global sign away from the q0q1 label reading
        amps[[1, 2]] = SQRT1_2, -SQRT1_2
    else:
        raise ValueError(f"unknown Bell state {kind!r}")
    return StateVector(2, amps)


def _check_index(state: StateVector, qubit: int) -> None:
    if not 0 <= qubit < state.num_qubits:
        raise IndexError(f"qubit {qubit} out of range for {state.num_qubits}-qubit state")


def apply_cnot(state: StateVector, control: int, target: int) -> StateVector:
    _check_index(state, control)
    _check_index(state, target)
    if control == target:
        raise ValueError("control and target must differ")
    idx = np.arange(1 << state.num_qubits)
    src = idx ^ (((idx >> control) & 1) << target)
    return StateVector(state.num_qubits, state.amplitudes[src])


def apply_pauli(state: StateVector, op: PauliOp, qubit: int) -> StateVector:
    _check_index(state, qubit)
    op = PauliOp.parse(op)
    amps = state.amplitudes
    idx = np.arange(1 << state.num_qubits)
    bit = (idx >> qubit) & 1
    if op.x:
        amps = amps[idx ^ (1 << qubit)]
    if op is PauliOp.Z:
        amps = amps * np.where(bit == 1, -1.0, 1.0)
    elif op is PauliOp.Y:
        # Y|0> = i|1>, Y|1> = -i|0>: new amplitude at bit b picks up +i (b=1) or -i (b=0)
        amps = amps * np.where(bit == 1, 1j, -1j)
    return StateVector(state.num_qubits, amps)


def outcome_probabilities(state: StateVector, qubit: int, basis: Basis) -> tuple[float, float]:
    _check_index(state, qubit)
    pair = _split(state, qubit, Basis.parse(basis))
    p0 = float(np.vdot(pair[0], pair[0]).real)
    p1 = float(np.vdot(pair[1], pair[1]).real)
    return p0, p1


def _split(state: StateVector, qubit: int, basis: Basis) -> tuple[np.ndarray, np.ndarray]:
    """Unnormalised post-measurement vectors for outcomes 0 and 1."""
    amps = state.amplitudes
    idx = np.arange(1 << state.num_qubits)
    bit = (idx >> qubit) & 1
    if basis is Basis.Z:
        return np.where(bit == 0, amps, 0), np.where(bit == 1, amps, 0)
    partner = amps[idx ^ (1 << qubit)]
    # |+><+| and |-><-| on the chosen qubit, identity elsewhere
    return 0.5 * (amps + partner), 0.5 * (amps - partner)


def project(state: StateVector, qubit: int, basis: Basis, outcome: int) -> StateVector:
    """Renormalised post-measurement state for a given outcome."""
    _check_index(state, qubit)
    vec = _split(state, qubit, Basis.parse(basis))[outcome]
    norm = np.sqrt(float(np.vdot(vec, vec).real))
    if norm < 1e-15:
        raise ValueError(f"outcome {outcome} has zero probability")
    return StateVector(state.num_qubits, vec / norm)


def measure(state: StateVector, qubit: int, basis: Basis, rng: np.random.Generator) -> tuple[int, StateVector]:
    p0, _ = outcome_probabilities(state, qubit, basis)
    bit = 0 if rng.random() < p0 else 1
    return bit, project(state, qubit, basis, bit)


# --- error propagation through the CNOT encryption ---------------------------

ALICE_PAIR, BOB_PAIR, MESSAGE = 0, 1, 2


@dataclass(frozen=True)
class PropagationResult:
    pair_error: PauliOp
    message_error: PauliOp


def encryption_round(chi: StateVector, error: PauliOp, cnot=apply_cnot) -> list[StateVector]:
    """States after each stage: initial, Alice CNOT, channel error, Bob CNOT.

    Qubits: 0 = Alice's half of the pair, 1 = Bob's half, 2 = message.
    """
    h0 = make_bell("phi_plus").tensor(chi)
    h1 = cnot(h0, ALICE_PAIR, MESSAGE)
    h2 = apply_pauli(h1, error, MESSAGE)
    h3 = cnot(h2, BOB_PAIR, MESSAGE)
    return [h0, h1, h2, h3]


def identify_product(state: StateVector, chi: StateVector, tol: float = 1e-10) -> PropagationResult | None:
    """Find (P, Q) with ``state == (P on Alice's half)|phi+> (x) Q|chi>`` up to phase."""
    bell = make_bell("phi_plus")
    for p in PauliOp:
        pair = apply_pauli(bell, p, ALICE_PAIR)
        for q in PauliOp:
            if state.equals_up_to_phase(pair.tensor(apply_pauli(chi, q, 0)), tol):
                return PropagationResult(p, q)
    return None


def verify_propagation(error: PauliOp, rng: np.random.Generator, cnot=apply_cnot) -> PropagationResult:
    """Which Paulis land on the pair and the message after a channel error.

    Raises ``ValueError`` for the identity and ``ArithmeticError`` when the
    final state is not a Bell (x) single-qubit product.
    """
    error = PauliOp.parse(error)
    if error is PauliOp.I:
        raise ValueError("identity error has nothing to propagate")
    chi = random_qubit(rng)
    final = encryption_round(chi, error, cnot)[-1]
    result = identify_product(final, chi)
    if result is None:
        raise ArithmeticError(f"{error.name} error left a state that is not a product")
    return result


# --- dense-matrix oracle ------------------------------------------------------


def dense_operator(num_qubits: int, ops: dict[int, np.ndarray]) -> np.ndarray:
    """Kronecker product with ``ops[q]`` on qubit q and identity elsewhere."""
    out = np.array([[1.0 + 0j]])
    for q in range(num_qubits):
        out = np.kron(ops.get(q, np.eye(2, dtype=complex)), out)
    return out


def dense_cnot(num_qubits: int, control: int, target: int) -> np.ndarray:
    p0 = np.array([[1, 0], [0, 0]], dtype=complex)
    p1 = np.array([[0, 0], [0, 1]], dtype=complex)
    return dense_operator(num_qubits, {control: p0}) + dense_operator(
        num_qubits, {control: p1, target: PAULI_MATRICES[PauliOp.X]}
    )
