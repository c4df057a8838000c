import ast
import inspect

import numpy as np
import pytest

import qkex.adversary as adv_mod
from qkex.adversary import (
    ForgeClassical,
    Identity,
    InterceptFraction,
    InterceptOneZ,
    MeasureAllZ,
    parse_adversary,
)
from qkex.messages import MessageKind, Party, ProtocolMessage
from qkex.pauli_frame import QubitFrame, measure_frame
from qkex.statevec import Basis


def _zframes(bits):
    return [QubitFrame(Basis.Z, b, position=j) for j, b in enumerate(bits)]


def test_identity_passes_through():
    frames = _zframes([1, 0, 1])
    eve = Identity()
    assert eve.on_quantum(frames, np.random.default_rng(0)) == frames
    msg = ProtocolMessage(MessageKind.CLASSICAL_ACK, Party.BOB, np.ones(4, dtype=np.uint8))
    assert eve.on_classical(msg, np.random.default_rng(0)) is msg
    assert eve.view == [] and eve.view_symbol() == ()


def test_intercept_one_z_on_z_frame_is_invisible():
    rng = np.random.default_rng(1)
    frames = _zframes([1])
    eve = InterceptOneZ()
    out = eve.on_quantum(frames, rng)
    assert measure_frame(out[0], Basis.Z, rng) == 1
    assert eve.view == [(0, 1)]


def test_intercept_one_z_on_x_frame_randomises_x_outcome():
    rng = np.random.default_rng(2)
    ones = 0
    for _ in range(10_000):
        out = InterceptOneZ().on_quantum([QubitFrame(Basis.X, 0)], rng)
        ones += measure_frame(out[0], Basis.X, rng)
    assert abs(ones / 10_000 - 0.5) < 0.02


def test_intercept_fraction_rate():
    rng = np.random.default_rng(3)
    eve = InterceptFraction(fraction=0.25)
    eve.on_quantum(_zframes([0] * 40_000), rng)
    assert abs(len(eve.intercepted) / 40_000 - 0.25) < 0.01


def test_intercept_fraction_bounds():
    with pytest.raises(ValueError):
        InterceptFraction(fraction=1.5)


def test_measure_all_z_view_after_announcement():
    rng = np.random.default_rng(4)
    eve = MeasureAllZ()
    eve.on_quantum(_zframes([1, 0, 1, 1]), rng)
    assert eve.view_symbol() == (1, 0, 1, 1)
    eve.on_classical(ProtocolMessage(MessageKind.ANNOUNCEMENT, Party.ALICE, {"positions": [1, 3]}), rng)
    assert eve.view_symbol() == (1, 1)


@pytest.mark.parametrize("mode", ["random", "replay", "bitflip"])
def test_forge_changes_reply(mode):
    rng = np.random.default_rng(5)
    c = rng.integers(0, 2, 200, dtype=np.uint8)
    eve = ForgeClassical(mode=mode, archive=[rng.integers(0, 2, 200, dtype=np.uint8)])
    out = eve.on_classical(ProtocolMessage(MessageKind.CLASSICAL_ACK, Party.BOB, c), rng)
    assert out.kind is MessageKind.CLASSICAL_ACK
    assert not np.array_equal(out.payload, c)


def test_forge_ignores_quantum_and_announcements():
    rng = np.random.default_rng(6)
    eve = ForgeClassical()
    msg = ProtocolMessage(MessageKind.ANNOUNCEMENT, Party.ALICE, {"positions": []})
    assert eve.on_classical(msg, rng) is msg


def test_parse_adversary():
    make = parse_adversary("intercept_fraction:f=0.3,basis=X")
    eve = make()
    assert eve.fraction == 0.3 and eve.basis is Basis.X
    assert make.spec == "intercept_fraction:f=0.3,basis=X"
    assert isinstance(parse_adversary("forge_classical:mode=replay")(), ForgeClassical)
    for bad in ("nobody", "measure_all_z:f=0.1", "intercept_fraction:fraction=2", "forge_classical:mode=loud"):
        with pytest.raises((ValueError, TypeError)):
            parse_adversary(bad)


def test_strategies_have_no_route_to_key_stores():
    tree = ast.parse(inspect.getsource(adv_mod))
    imported = {
        node.module or "" for node in ast.walk(tree) if isinstance(node, ast.ImportFrom)
    } | {alias.name for node in ast.walk(tree) if isinstance(node, ast.Import) for alias in node.names}
    assert not any("keystore" in name or "protocol" in name for name in imported)
    for cls in adv_mod.STRATEGIES.values():
        params = inspect.signature(cls.on_quantum).parameters
        assert list(params) == ["self", "frames", "rng"]
