"""One-shot identity and oracle suite.

Each check is deterministic given the seed, and the printed table carries
no timings so two runs produce identical bytes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb, isclose

import numpy as np

from .. import statevec as sv
from ..coding import (
    BCHCode,
    CombinadicIndex,
    IdentityCode,
    LinearCode,
    RepetitionCode,
    binary_entropy,
    build_code_for,
    combinadic_rank,
    combinadic_unrank,
    design_message_code,
    expanded_length,
    required_errors,
)
from ..pauli_frame import Circuit, equivalence_check
from ..statevec import PauliOp

PROPAGATION_TRIALS = 100
STATE_TOL = 1e-10

EXPECTED_PROPAGATION = {
    PauliOp.X: (PauliOp.I, PauliOp.X),
    PauliOp.Z: (PauliOp.Z, PauliOp.Z),
    PauliOp.Y: (PauliOp.Z, PauliOp.Y),
}


@dataclass(frozen=True)
class Check:
    name: str
    identity: str
    passed: bool
    detail: str = ""


def corrupted_cnot(state: sv.StateVector, control: int, target: int) -> sv.StateVector:
    """Negative-control fixture: a CNOT that also kicks a Z onto its target."""
    return sv.apply_pauli(sv.apply_cnot(state, control, target), PauliOp.Z, target)


# --- state-vector identities ----------------------------------------------------


def _bell_check() -> Check:
    s = 1 / np.sqrt(2)
    expected = {
        "phi_plus": (s, 0, 0, s),
        "phi_minus": (s, 0, 0, -s),
        "psi_plus": (0, s, s, 0),
        "psi_minus": (0, s, -s, 0),
    }
    ok = all(np.allclose(sv.make_bell(k).amplitudes, v, atol=1e-15) for k, v in expected.items())
    return Check("bell states", "|phi+-> and |psi+-> amplitudes", ok)


def _dense_cnot_check(rng) -> Check:
    worst = 0.0
    for _ in range(20):
        amps = rng.normal(size=8) + 1j * rng.normal(size=8)
        state = sv.StateVector(3, amps / np.linalg.norm(amps))
        for c, t in itertools.permutations(range(3), 2):
            got = sv.apply_cnot(state, c, t).amplitudes
            want = sv.dense_cnot(3, c, t) @ state.amplitudes
            worst = max(worst, float(np.abs(got - want).max()))
    return Check("cnot vs dense matrix", "CNOT on 3 qubits, all control/target pairs", worst < 1e-12, f"max dev {worst:.1e}")


def _product(first: sv.StateVector, chi: sv.StateVector, op: PauliOp) -> np.ndarray:
    return first.tensor(sv.apply_pauli(chi, op, 0)).amplitudes


def _intermediate_checks(rng, cnot) -> list[Check]:
    ok_after_alice = ok_after_error = True
    for _ in range(PROPAGATION_TRIALS):
        chi = sv.random_qubit(rng)
        h0, h1, h2, _ = sv.encryption_round(chi, PauliOp.Z, cnot)
        zero, one = sv.StateVector.basis_state([0, 0]), sv.StateVector.basis_state([1, 1])
        # (|00>|chi> + |11> X|chi>) / sqrt 2
        want1 = (_product(zero, chi, PauliOp.I) + _product(one, chi, PauliOp.X)) / np.sqrt(2)
        # the Z error then acts on both branches of the message qubit
        xz = sv.apply_pauli(sv.apply_pauli(chi, PauliOp.X, 0), PauliOp.Z, 0)
        want2 = (_product(zero, chi, PauliOp.Z) + one.tensor(xz).amplitudes) / np.sqrt(2)
        ok_after_alice &= h1.equals_up_to_phase(sv.StateVector(3, want1), STATE_TOL)
        ok_after_error &= h2.equals_up_to_phase(sv.StateVector(3, want2), STATE_TOL)
    return [
        Check("after Alice's CNOT", "pair-controlled CNOT entangles the message", ok_after_alice),
        Check("after transit Z error", "Z acts on both branches of the message", ok_after_error),
    ]


def _dense_round(chi: sv.StateVector, error: PauliOp) -> sv.StateVector:
    state = sv.make_bell("phi_plus").tensor(chi).amplitudes
    state = sv.dense_cnot(3, sv.ALICE_PAIR, sv.MESSAGE) @ state
    state = sv.dense_operator(3, {sv.MESSAGE: error.matrix()}) @ state
    state = sv.dense_cnot(3, sv.BOB_PAIR, sv.MESSAGE) @ state
    return sv.StateVector(3, state)


def propagation_checks(rng, cnot=sv.apply_cnot) -> list[Check]:
    out = []
    for error, (pair, message) in EXPECTED_PROPAGATION.items():
        agree = oracle = 0
        for _ in range(PROPAGATION_TRIALS):
            chi = sv.random_qubit(rng)
            final = sv.encryption_round(chi, error, cnot)[-1]
            result = sv.identify_product(final, chi, STATE_TOL)
            agree += result == sv.PropagationResult(pair, message)
            oracle += final.equals_up_to_phase(_dense_round(chi, error), STATE_TOL)
        out.append(
            Check(
                f"{error.name} error propagation",
                f"{error.name} in transit -> pair {pair.name}, message {message.name}",
                agree == oracle == PROPAGATION_TRIALS,
                f"{agree}/{PROPAGATION_TRIALS} match, {oracle}/{PROPAGATION_TRIALS} vs dense",
            )
        )
    return out


# --- frame model ----------------------------------------------------------------

FRAME_CIRCUITS = {
    "bit flip through CNOT": Circuit(
        2, [("prep", 0, "Z", 1), ("prep", 1, "Z", 0), ("pauli", 0, "X"), ("cnot", 0, 1), ("measure", 0, "Z"), ("measure", 1, "Z")]
    ),
    "phase kick-back": Circuit(
        2, [("prep", 0, "Z", 0), ("prep", 1, "X", 1), ("cnot", 0, 1), ("pauli", 1, "Z"), ("measure", 1, "X"), ("measure", 0, "Z")]
    ),
    "wrong-basis collapse": Circuit(
        2, [("prep", 0, "X", 0), ("prep", 1, "Z", 1), ("pauli", 0, "Y"), ("measure", 0, "Z"), ("measure", 0, "X"), ("measure", 1, "X")]
    ),
}


def frame_checks(rng) -> list[Check]:
    return [
        Check(f"frames: {name}", "frame sampling matches exact distribution (TV < 0.02)", equivalence_check(c, rng))
        for name, c in FRAME_CIRCUITS.items()
    ]


# --- coding -------------------------------------------------------------------


def small_codes(max_length: int = 20) -> list[LinearCode]:
    """Every code the planners produce at length <= ``max_length``, plus the textbook ones."""
    found: dict[tuple, LinearCode] = {}

    def add(code):
        if code.n <= max_length:
            found.setdefault((code.name, code.n, code.k, code.t_correct), code)

    for N in range(1, max_length + 1):
        add(design_message_code(N, 0.07))
    for n in range(3, max_length + 1):
        add(build_code_for(n, required_errors(0.07, n)))
    for m, t in ((3, 1), (4, 1), (4, 2), (4, 3)):
        add(BCHCode(m, t))
    add(BCHCode(5, 2, n=20))
    add(BCHCode(5, 3, n=20))
    for n in (3, 5, 7):
        add(RepetitionCode(n))
    add(IdentityCode(8))
    return list(found.values())


def _error_patterns(n: int, t: int):
    for w in range(t + 1):
        for support in itertools.combinations(range(n), w):
            e = np.zeros(n, dtype=np.uint8)
            e[list(support)] = 1
            yield e


def decoding_check(code: LinearCode, rng) -> Check:
    failures = 0
    patterns = 0
    for e in _error_patterns(code.n, code.t_correct):
        message = rng.integers(0, 2, code.k, dtype=np.uint8)
        try:
            got, flips = code.decode(code.encode(message) ^ e)
            failures += not (np.array_equal(got, message) and flips == int(e.sum()))
        except Exception:
            failures += 1
        patterns += 1
    return Check(
        f"decode {code.name} t={code.t_correct}",
        "every error of weight <= t corrected",
        failures == 0,
        f"{patterns} patterns, {failures} failures",
    )


def coset_check(code: LinearCode) -> Check:
    n, k = code.n, code.k
    words = np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.uint8)
    labels = (words @ code.parity_check.T) % 2
    keys = labels @ (1 << np.arange(labels.shape[1], dtype=np.int64)) if labels.shape[1] else np.zeros(len(words), np.int64)
    sizes = np.bincount(keys, minlength=2 ** (n - k))
    members = set(map(tuple, (np.array(list(itertools.product((0, 1), repeat=k)), dtype=np.uint8) @ code.generator) % 2))
    zero_coset = {tuple(w) for w, key in zip(words, keys) if key == 0}
    ok = sizes.size == 2 ** (n - k) and bool((sizes == 2**k).all()) and zero_coset == members
    return Check(f"cosets of {code.name}", "2^(n-k) cosets of 2^k words, zero label = code", ok)


def combinadic_check(max_n: int = 12) -> Check:
    ok = True
    for n in range(max_n + 1):
        for k in range(n + 1):
            seen = set()
            for rank in range(comb(n, k)):
                subset = combinadic_unrank(CombinadicIndex(n, k, rank))
                ok &= combinadic_rank(n, subset) == rank and len(subset) == k
                seen.add(subset)
            ok &= len(seen) == comb(n, k)
    return Check("combinadic bijection", f"rank/unrank inverse for all n <= {max_n}", ok)


def sizing_check() -> Check:
    h = binary_entropy(0.11)
    m = expanded_length(100, 0.11)
    ok = isclose(h, 0.49993, abs_tol=1e-4) and m == 200
    return Check("sizing", "N / (1 - H(t + delta)) at N=100, 0.11", ok, f"H={h:.5f} M={m}")


# --- suite --------------------------------------------------------------------


def verify_suite(seed: int = 0, cnot=sv.apply_cnot) -> list[Check]:
    rng = np.random.default_rng(seed)
    checks = [_bell_check(), _dense_cnot_check(rng)]
    checks += _intermediate_checks(rng, cnot)
    checks += propagation_checks(rng, cnot)
    checks += frame_checks(rng)
    checks.append(sizing_check())
    codes = small_codes()
    checks += [decoding_check(code, rng) for code in codes]
    checks += [coset_check(code) for code in codes if code.n <= 12]
    checks += [coset_check(code.dual()) for code in codes if code.n <= 12 and code.k < code.n]
    checks.append(combinadic_check())
    return checks


def format_checks(checks: list[Check]) -> str:
    width = max(len(c.name) for c in checks)
    lines = [f"{'check':<{width}}  result  identity"]
    for c in checks:
        detail = f"  [{c.detail}]" if c.detail else ""
        lines.append(f"{c.name:<{width}}  {'PASS' if c.passed else 'FAIL'}    {c.identity}{detail}")
    passed = sum(c.passed for c in checks)
    lines.append(f"{passed}/{len(checks)} checks passed")
    return "\n".join(lines) + "\n"
