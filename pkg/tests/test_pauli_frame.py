import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qkex.pauli_frame import (
    NOISELESS,
    Circuit,
    PauliChannelParams,
    QubitFrame,
    UnsupportedGate,
    equivalence_check,
    exact_distribution,
    measure_frame,
    run_frames,
    transmit,
)
from qkex.statevec import Basis, PauliOp

PRODUCTS = {
    ("I", "I"): "I", ("I", "X"): "X", ("I", "Y"): "Y", ("I", "Z"): "Z",
    ("X", "I"): "X", ("X", "X"): "I", ("X", "Y"): "Z", ("X", "Z"): "Y",
    ("Y", "I"): "Y", ("Y", "X"): "Z", ("Y", "Y"): "I", ("Y", "Z"): "X",
    ("Z", "I"): "Z", ("Z", "X"): "Y", ("Z", "Y"): "X", ("Z", "Z"): "I",
}  # fmt: skip


@pytest.mark.parametrize("a, b", list(itertools.product("IXYZ", repeat=2)))
def test_composition_table(a, b):
    assert (PauliOp[a] * PauliOp[b]).name == PRODUCTS[(a, b)]


@pytest.mark.parametrize(
    "probs", [(-0.1, 0, 0), (0.5, 0.5, 0.1), (0, 0, 1.5)],
)
def test_invalid_channel(probs):
    with pytest.raises(ValueError):
        PauliChannelParams(*probs)


def _frames(n):
    return [QubitFrame(Basis.Z, j % 2, position=j) for j in range(n)]


def test_noiseless_transmit_is_identity():
    frames = _frames(10)
    assert transmit(frames, NOISELESS, np.random.default_rng(0)) == frames


def test_certain_bit_flip():
    out = transmit(_frames(10), PauliChannelParams(p_x=1.0), np.random.default_rng(0))
    assert all(f.error is PauliOp.X for f in out)


def test_flip_then_flip_cancels():
    f = QubitFrame(Basis.Z, 0, PauliOp.X)
    out = transmit([f], PauliChannelParams(p_x=1.0), np.random.default_rng(0))
    assert out[0].error is PauliOp.I


def test_x_error_frequency():
    out = transmit(_frames(100_000), PauliChannelParams(p_x=0.05), np.random.default_rng(1))
    frac = sum(f.error is PauliOp.X for f in out) / len(out)
    assert abs(frac - 0.05) < 0.005


@pytest.mark.parametrize(
    "basis, bit, error, meas, expected",
    [
        (Basis.Z, 0, PauliOp.X, Basis.Z, 1),
        (Basis.X, 0, PauliOp.Z, Basis.X, 1),
        (Basis.Z, 1, PauliOp.Z, Basis.Z, 1),
        (Basis.X, 1, PauliOp.X, Basis.X, 1),
        (Basis.Z, 0, PauliOp.Y, Basis.Z, 1),
        (Basis.X, 0, PauliOp.Y, Basis.X, 1),
    ],
)
def test_measure_frame_flip_rule(basis, bit, error, meas, expected):
    assert measure_frame(QubitFrame(basis, bit, error), meas, np.random.default_rng(0)) == expected


def test_wrong_basis_is_uniform():
    rng = np.random.default_rng(2)
    f = QubitFrame(Basis.Z, 0)
    ones = sum(measure_frame(f, Basis.X, rng) for _ in range(10_000))
    assert abs(ones / 10_000 - 0.5) < 0.02


def test_equivalence_examples():
    rng = np.random.default_rng(3)
    p1_round = Circuit(1, [("prep", 0, "Z", 1), ("measure", 0, "Z")])
    y_then_x = Circuit(1, [("prep", 0, "Z", 0), ("pauli", 0, "Y"), ("measure", 0, "X")])
    # EPR half classicalised as a Z-basis control bit
    p2_round = Circuit(
        2,
        [("prep", 0, "Z", 1), ("prep", 1, "Z", 0), ("cnot", 0, 1), ("pauli", 1, "Z"), ("cnot", 0, 1), ("measure", 1, "Z"), ("measure", 0, "Z")],
    )
    for c in (p1_round, y_then_x, p2_round):
        assert equivalence_check(c, rng)


def test_frame_y_flips_both_bases():
    rng = np.random.default_rng(4)
    assert run_frames(Circuit(1, [("prep", 0, "Z", 0), ("pauli", 0, "Y"), ("measure", 0, "Z")]), rng) == (1,)
    assert run_frames(Circuit(1, [("prep", 0, "X", 0), ("pauli", 0, "Y"), ("measure", 0, "X")]), rng) == (1,)


def test_unsupported_circuits():
    rng = np.random.default_rng(5)
    with pytest.raises(UnsupportedGate):
        run_frames(Circuit(1, [("prep", 0, "Z", 0), ("hadamard", 0)]), rng)
    with pytest.raises(UnsupportedGate):
        run_frames(Circuit(2, [("prep", 0, "X", 0), ("prep", 1, "Z", 0), ("cnot", 0, 1)]), rng)
    with pytest.raises(UnsupportedGate):
        run_frames(Circuit(1, [("pauli", 0, "X"), ("prep", 0, "Z", 0)]), rng)


def test_exact_distribution_sums_to_one():
    c = Circuit(2, [("prep", 0, "Z", 0), ("prep", 1, "X", 0), ("measure", 1, "Z"), ("measure", 0, "X")])
    dist = exact_distribution(c)
    assert abs(sum(dist.values()) - 1) < 1e-12
    assert len(dist) == 4


@st.composite
def circuits(draw):
    n = draw(st.integers(1, 2))
    ops = [("prep", q, draw(st.sampled_from("ZX")), draw(st.integers(0, 1))) for q in range(n)]
    z_prepped = [q for q in range(n) if ops[q][2] == "Z"]
    for _ in range(draw(st.integers(0, 4))):
        if n == 2 and z_prepped and draw(st.booleans()):
            c = draw(st.sampled_from(z_prepped))
            ops.append(("cnot", c, 1 - c))
        else:
            ops.append(("pauli", draw(st.integers(0, n - 1)), draw(st.sampled_from("IXYZ"))))
    for q in range(n):
        ops.append(("measure", q, draw(st.sampled_from("ZX"))))
    if draw(st.booleans()):
        ops.append(("measure", 0, draw(st.sampled_from("ZX"))))
    return Circuit(n, ops)


@settings(max_examples=30, deadline=None)
@given(circuits(), st.integers(0, 2**32 - 1))
def test_frames_match_statevec_on_random_circuits(circuit, seed):
    assert equivalence_check(circuit, np.random.default_rng(seed))
