"""Session parameters and the sizes derived from them."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

from ..coding import (
    LinearCode,
    build_code_for,
    design_message_code,
    expanded_length,
    rank_bits,
    required_errors,
)
from ..keystore import AUTH_BITS

# Extra bits drawn for each combinadic rank so that reducing modulo C(n, k)
# is within 2^-64 of uniform.
RANK_MARGIN_BITS = 64

MAX_RATE = 0.11


class ProtocolKind(enum.Enum):
    P1 = "p1"
    P2 = "p2"
    P3 = "p3"
    NAIVE = "naive_baseline"

    @classmethod
    def parse(cls, value) -> "ProtocolKind":
        if isinstance(value, ProtocolKind):
            return value
        value = str(value).lower()
        if value in ("naive", "naive_baseline"):
            return cls.NAIVE
        return cls(value)


@dataclass(frozen=True)
class SessionConfig:
    N: int
    t_x: float = 0.05
    t_z: float = 0.05
    delta: float = 0.02
    r: float = 1.0
    protocol: ProtocolKind = ProtocolKind.P3
    seed: int = 0
    threshold: float | None = None
    tests: int | None = None
    auth_bits: int = AUTH_BITS

    def __post_init__(self):
        object.__setattr__(self, "protocol", ProtocolKind.parse(self.protocol))
        if self.N < 1:
            raise ValueError("N must be at least 1")
        if self.r <= 0:
            raise ValueError("test ratio r must be positive")
        if min(self.t_x, self.t_z, self.delta) < 0:
            raise ValueError("rates must be non-negative")
        if self.t_x + self.delta >= MAX_RATE or self.t_z + self.delta >= MAX_RATE:
            raise ValueError(f"t + delta must stay below {MAX_RATE}")
        if self.tests is not None and (self.tests < 2 or self.tests % 2):
            raise ValueError("tests must be a positive even number")
        if self.auth_bits < 1:
            raise ValueError("auth_bits must be positive")

    @property
    def test_threshold(self) -> float:
        """Abort when either observed test error rate exceeds this."""
        if self.threshold is not None:
            return self.threshold
        return min(self.t_x, self.t_z) + self.delta / 2

    @property
    def num_tests(self) -> int:
        """2k: ``ceil(r N)`` rounded up to even, unless ``tests`` overrides it."""
        if self.tests is not None:
            return self.tests
        n = max(2, math.ceil(self.r * self.N - 1e-9))
        return n + (n % 2)

    @property
    def k(self) -> int:
        return self.num_tests // 2


@dataclass(frozen=True)
class SessionPlan:
    """Codes and string lengths for one Protocol 3 session."""

    nominal_length: int
    message_code: LinearCode
    phase_code: LinearCode
    pad_coset_code: LinearCode
    num_tests: int
    position_bits: int
    basis_bits: int

    @property
    def block_length(self) -> int:
        return self.message_code.n

    @property
    def sequence_length(self) -> int:
        return self.block_length + self.num_tests

    @property
    def value_bits(self) -> int:
        return self.num_tests

    @property
    def b_prime_length(self) -> int:
        return self.position_bits + self.basis_bits + self.value_bits

    @property
    def recycled_length(self) -> int:
        return self.pad_coset_code.redundancy


@lru_cache(maxsize=256)
def _plan(N: int, t_x: float, t_z: float, delta: float, num_tests: int) -> SessionPlan:
    code_x = design_message_code(N, t_x + delta)
    n = code_x.n
    phase = build_code_for(n, required_errors(t_z + delta, n))
    return SessionPlan(
        nominal_length=expanded_length(N, t_x, delta),
        message_code=code_x,
        phase_code=phase,
        # recycled key = coset of b modulo the dual of the phase-correcting code
        pad_coset_code=phase.dual(),
        num_tests=num_tests,
        position_bits=rank_bits(n + num_tests, num_tests) + RANK_MARGIN_BITS,
        basis_bits=rank_bits(num_tests, num_tests // 2) + RANK_MARGIN_BITS,
    )


def plan_session(config: SessionConfig) -> SessionPlan:
    return _plan(config.N, config.t_x, config.t_z, config.delta, config.num_tests)
