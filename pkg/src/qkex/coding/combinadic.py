"""Colexicographic ranking of k-subsets (the combinatorial number system).

A sorted subset ``c_0 < c_1 < ... < c_{k-1}`` has rank
``sum_i C(c_i, i + 1)``. Ranks run over ``[0, C(n, k))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb


@dataclass(frozen=True)
class CombinadicIndex:
    n: int
    k: int
    rank: int

    def __post_init__(self):
        if self.n < 0 or not 0 <= self.k <= self.n:
            raise ValueError(f"need 0 <= k <= n, got n={self.n}, k={self.k}")
        if not 0 <= self.rank < comb(self.n, self.k):
            raise ValueError(f"rank {self.rank} outside [0, C({self.n},{self.k}))")


def combinadic_unrank(idx: CombinadicIndex) -> tuple[int, ...]:
    """The ``idx.rank``-th k-subset of ``range(idx.n)`` in colex order."""
    n, k, rank = idx.n, idx.k, idx.rank
    out = []
    c = n - 1
    # binom tracks C(c, i) while c walks down and i steps down
    i = k
    binom = comb(c, i) if i else 0
    while i > 0:
        while binom > rank:
            # C(c-1, i) = C(c, i) * (c - i) / c
            binom = binom * (c - i) // c
            c -= 1
        out.append(c)
        rank -= binom
        # C(c-1, i-1) = C(c, i) * i / c
        binom = binom * i // c if c else 0
        c -= 1
        i -= 1
    return tuple(reversed(out))


def combinadic_rank(n: int, positions) -> int:
    pos = sorted(positions)
    if len(set(pos)) != len(pos):
        raise ValueError("positions must be distinct")
    if pos and (pos[0] < 0 or pos[-1] >= n):
        raise ValueError(f"positions must lie in [0, {n})")
    return sum(comb(c, i + 1) for i, c in enumerate(pos))


def rank_bits(n: int, k: int) -> int:
    """Bits needed to write any rank in ``[0, C(n, k))``."""
    return max(0, (comb(n, k) - 1).bit_length())
