"""Binary linear block codes over GF(2).

Bit strings are 1-D ``numpy.uint8`` arrays holding 0/1 values. Codes here are
kept in systematic form ``G = [I_k | P]`` with ``H = [P^T | I_{n-k}]`` so the
message is always a prefix of its codeword.
"""

from __future__ import annotations

import itertools
from math import comb

import numpy as np


class DecodeFailure(Exception):
    """Raised when no codeword lies within the correction radius."""


# Syndrome tables above this many patterns are refused.
MAX_TABLE_PATTERNS = 2_000_000


def as_bits(bits) -> np.ndarray:
    arr = np.asarray(bits, dtype=np.uint8)
    if arr.ndim != 1:
        raise ValueError("bit strings must be one-dimensional")
    if arr.size and arr.max() > 1:
        raise ValueError("bit strings may only contain 0 and 1")
    return arr


def gf2_rank(matrix: np.ndarray) -> int:
    m = np.array(matrix, dtype=np.uint8) & 1
    rows, cols = m.shape
    rank = 0
    for col in range(cols):
        pivot = None
        for r in range(rank, rows):
            if m[r, col]:
                pivot = r
                break
        if pivot is None:
            continue
        m[[rank, pivot]] = m[[pivot, rank]]
        for r in range(rows):
            if r != rank and m[r, col]:
                m[r] ^= m[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def _bits_to_int(bits: np.ndarray) -> int:
    value = 0
    for i, b in enumerate(bits):
        if b:
            value |= 1 << i
    return value


class LinearCode:
    """A systematic binary ``[n, k]`` code with a bounded-distance decoder.

    The base class decodes with a syndrome table of coset leaders of weight
    at most ``t_correct``. Subclasses with algebraic structure override
    :meth:`decode`.
    """

    family = "linear"

    def __init__(self, parity: np.ndarray, t_correct: int, name: str | None = None):
        parity = np.asarray(parity, dtype=np.uint8) & 1
        if parity.ndim != 2:
            raise ValueError("parity block must be a k x (n-k) matrix")
        k, r = parity.shape
        self.k = k
        self.n = k + r
        self.t_correct = int(t_correct)
        self.parity = parity
        self.generator = np.concatenate([np.eye(k, dtype=np.uint8), parity], axis=1)
        self.parity_check = np.concatenate([parity.T.copy(), np.eye(r, dtype=np.uint8)], axis=1)
        self.name = name or f"[{self.n},{self.k}]"
        self._table: dict[int, np.ndarray] | None = None

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name}, t={self.t_correct})"

    @property
    def redundancy(self) -> int:
        return self.n - self.k

    def encode(self, message) -> np.ndarray:
        message = as_bits(message)
        if message.size != self.k:
            raise ValueError(f"message has {message.size} bits, code expects {self.k}")
        if self.k == 0:
            return np.zeros(self.n, dtype=np.uint8)
        parity = (message @ self.parity) & 1 if self.redundancy else np.zeros(0, dtype=np.uint8)
        return np.concatenate([message, parity.astype(np.uint8)])

    def syndrome(self, word) -> np.ndarray:
        word = as_bits(word)
        if word.size != self.n:
            raise ValueError(f"word has {word.size} bits, code length is {self.n}")
        if self.redundancy == 0:
            return np.zeros(0, dtype=np.uint8)
        return ((self.parity_check @ word) & 1).astype(np.uint8)

    def _syndrome_table(self) -> dict[int, np.ndarray]:
        if self._table is None:
            total = sum(comb(self.n, w) for w in range(self.t_correct + 1))
            if total > MAX_TABLE_PATTERNS:
                raise ValueError(f"syndrome table for {self!r} would need {total} entries")
            table: dict[int, np.ndarray] = {}
            for weight in range(self.t_correct + 1):
                for support in itertools.combinations(range(self.n), weight):
                    err = np.zeros(self.n, dtype=np.uint8)
                    err[list(support)] = 1
                    key = _bits_to_int(self.syndrome(err))
                    if key in table:
                        raise ValueError(f"{self!r} cannot correct {self.t_correct} errors")
                    table[key] = err
            self._table = table
        return self._table

    def decode(self, received) -> tuple[np.ndarray, int]:
        """Return ``(message, number_of_corrected_bits)`` or raise DecodeFailure."""
        received = as_bits(received)
        key = _bits_to_int(self.syndrome(received))
        err = self._syndrome_table().get(key)
        if err is None:
            raise DecodeFailure(f"syndrome of weight-{int(received.sum())} word matches no leader")
        corrected = received ^ err
        return corrected[: self.k].copy(), int(err.sum())

    def coset_index(self, word) -> np.ndarray:
        """Label of the coset ``word + C``: the syndrome ``H . word``."""
        return self.syndrome(word)

    def dual(self) -> "LinearCode":
        """The dual code, generated by this code's parity-check matrix."""
        return DualCode(self)

    def to_text(self) -> str:
        lines = [f"{self.n} {self.k} {self.t_correct}"]
        lines += ["".join(str(int(b)) for b in row) for row in self.generator]
        return "\n".join(lines) + "\n"


class DualCode(LinearCode):
    """Dual of a systematic code, kept in the parent's coordinate order.

    Its parity-check matrix is the parent's generator, so ``coset_index``
    returns ``G_parent . word``. No correction radius is claimed.
    """

    family = "dual"

    def __init__(self, parent: LinearCode):
        self.parent = parent
        self.n = parent.n
        self.k = parent.redundancy
        self.t_correct = 0
        self.generator = parent.parity_check.copy()
        self.parity_check = parent.generator.copy()
        self.parity = None
        self.name = f"dual({parent.name})"
        self._table = None

    def encode(self, message) -> np.ndarray:
        message = as_bits(message)
        if message.size != self.k:
            raise ValueError(f"message has {message.size} bits, code expects {self.k}")
        return ((message @ self.generator) & 1).astype(np.uint8)

    def decode(self, received) -> tuple[np.ndarray, int]:
        received = as_bits(received)
        if self.syndrome(received).any():
            raise DecodeFailure("word is not a codeword of the dual code")
        # generator = [P^T | I], so the message sits in the trailing coordinates
        return received[self.parent.k:].copy(), 0

    def dual(self) -> LinearCode:
        return self.parent


class IdentityCode(LinearCode):
    """The trivial ``[n, n]`` code: no redundancy, corrects nothing."""

    family = "identity"

    def __init__(self, n: int):
        super().__init__(np.zeros((n, 0), dtype=np.uint8), 0, name=f"[{n},{n}]")

    def decode(self, received) -> tuple[np.ndarray, int]:
        received = as_bits(received)
        if received.size != self.n:
            raise ValueError(f"word has {received.size} bits, code length is {self.n}")
        return received.copy(), 0


class RepetitionCode(LinearCode):
    """``[n, 1]`` repetition code, majority decoded."""

    family = "repetition"

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("repetition code needs n >= 1")
        super().__init__(np.ones((1, n - 1), dtype=np.uint8), (n - 1) // 2, name=f"rep[{n},1]")

    def decode(self, received) -> tuple[np.ndarray, int]:
        received = as_bits(received)
        if received.size != self.n:
            raise ValueError(f"word has {received.size} bits, code length is {self.n}")
        ones = int(received.sum())
        if 2 * ones == self.n:
            raise DecodeFailure("tie in majority vote")
        bit = 1 if 2 * ones > self.n else 0
        flips = ones if bit == 0 else self.n - ones
        return np.array([bit], dtype=np.uint8), flips


def code_from_text(text: str) -> LinearCode:
    """Parse the textual matrix format written by :meth:`LinearCode.to_text`.

    The first line is ``n k t``; the next ``k`` lines are generator rows of
    0/1 characters. The generator must be systematic.
    """
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    n, k, t = (int(v) for v in lines[0].split())
    rows = lines[1 : 1 + k]
    if len(rows) != k:
        raise ValueError(f"expected {k} generator rows, found {len(rows)}")
    gen = np.array([[int(ch) for ch in row] for row in rows], dtype=np.uint8).reshape(k, -1)
    if gen.shape[1] != n:
        raise ValueError(f"generator rows have {gen.shape[1]} columns, header says {n}")
    if not np.array_equal(gen[:, :k], np.eye(k, dtype=np.uint8)):
        raise ValueError("generator must be in systematic form [I | P]")
    return LinearCode(gen[:, k:], t)


def encode(code: LinearCode, message) -> np.ndarray:
    return code.encode(message)


def decode(code: LinearCode, received) -> tuple[np.ndarray, int]:
    return code.decode(received)


def coset_index(code: LinearCode, word) -> np.ndarray:
    return code.coset_index(word)
