"""Binary entropy and the code-length sizing rule."""

from __future__ import annotations

import math


def binary_entropy(x: float) -> float:
    """Shannon entropy of a Bernoulli(x) variable, in bits.

    H(0) = H(1) = 0 by continuity.
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"probability out of range: {x}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def expanded_length(n_bits: int, t: float, delta: float = 0.0) -> int:
    """Nominal block length ``ceil(N / (1 - H(t + delta)))`` for an N-bit message.

    This is the information-theoretic size; a concrete bounded-distance code
    is usually longer (see :func:`qkex.coding.bch.design_message_code`).
    """
    if n_bits < 0:
        raise ValueError("message length must be non-negative")
    rate = t + delta
    if rate < 0:
        raise ValueError("error rate must be non-negative")
    if rate >= 0.5:
        raise ValueError(f"t + delta = {rate} leaves no room for information")
    denom = 1.0 - binary_entropy(rate)
    if denom <= 0.0:
        raise ValueError(f"t + delta = {rate} leaves no room for information")
    # guard against 100/0.5 landing on 200.00000000000003
    return math.ceil(n_bits / denom - 1e-9)
