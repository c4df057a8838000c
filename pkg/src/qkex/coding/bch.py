"""Narrow-sense binary BCH codes, shortened to arbitrary length.

Polynomials over GF(2) are ints (bit i = coefficient of x^i). Field elements
of GF(2^m) are ints in the polynomial basis of the primitive polynomial.

Codeword layout: a systematic vector ``[message (k) | parity (r)]``. Vector
position ``j < k`` carries the coefficient of ``x^(r + j)`` and position
``k + i`` the coefficient of ``x^i``, so shortening drops the highest powers.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .linear import DecodeFailure, IdentityCode, LinearCode, RepetitionCode, as_bits

PRIMITIVE_POLYS = {
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0b100011101,
    9: 0b1000010001,
    10: 0b10000001001,
    11: 0b100000000101,
    12: 0b1000001010011,
}

MAX_FIELD_DEGREE = max(PRIMITIVE_POLYS)


class InfeasibleCode(ValueError):
    """No code in the available families meets the requested parameters."""


class GF2m:
    """Log/antilog tables for GF(2^m)."""

    def __init__(self, m: int):
        if m not in PRIMITIVE_POLYS:
            raise ValueError(f"no primitive polynomial tabulated for m={m}")
        self.m = m
        self.order = (1 << m) - 1
        poly = PRIMITIVE_POLYS[m]
        self.exp = [0] * (2 * self.order)
        self.log = [0] * (self.order + 1)
        x = 1
        for i in range(self.order):
            self.exp[i] = x
            self.log[x] = i
            x <<= 1
            if x >> m:
                x ^= poly
        if x != 1:
            raise ValueError(f"polynomial for m={m} is not primitive")
        for i in range(self.order, 2 * self.order):
            self.exp[i] = self.exp[i - self.order]

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.exp[self.log[a] + self.log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return self.exp[(self.order - self.log[a]) % self.order]

    def alpha_pow(self, e: int) -> int:
        return self.exp[e % self.order]


@lru_cache(maxsize=None)
def field(m: int) -> GF2m:
    return GF2m(m)


def poly_mul(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def poly_mod(a: int, mod: int) -> int:
    deg = mod.bit_length() - 1
    while a.bit_length() - 1 >= deg:
        a ^= mod << (a.bit_length() - 1 - deg)
    return a


def minimal_polynomial(gf: GF2m, e: int) -> int:
    """Minimal polynomial over GF(2) of alpha^e, as a GF(2) int polynomial."""
    coset = []
    j = e % gf.order
    while j not in coset:
        coset.append(j)
        j = (2 * j) % gf.order
    # multiply out prod (x - alpha^j) with coefficients in GF(2^m)
    coeffs = [1]
    for j in coset:
        root = gf.alpha_pow(j)
        nxt = [0] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            nxt[i + 1] ^= c
            nxt[i] ^= gf.mul(c, root)
        coeffs = nxt
    out = 0
    for i, c in enumerate(coeffs):
        if c not in (0, 1):
            raise ArithmeticError("minimal polynomial left GF(2)")
        out |= c << i
    return out


@lru_cache(maxsize=None)
def bch_generator(m: int, t: int) -> int:
    """Generator polynomial of the narrow-sense BCH code of designed distance 2t+1."""
    gf = field(m)
    g = 1
    seen: set[int] = set()
    for e in range(1, 2 * t + 1):
        rep = min((e << s) % gf.order for s in range(m))
        if rep in seen:
            continue
        seen.add(rep)
        g = poly_mul(g, minimal_polynomial(gf, e))
    return g


@lru_cache(maxsize=None)
def _coset_sizes(m: int) -> tuple[int, ...]:
    """Entry e-1 is the redundancy added by exponent e (0 if already covered)."""
    order = (1 << m) - 1
    seen: set[int] = set()
    sizes = []
    for e in range(1, order):
        rep = min((e << s) % order for s in range(m))
        if rep in seen:
            sizes.append(0)
            continue
        seen.add(rep)
        size, j = 1, (2 * e) % order
        while j != e % order:
            size += 1
            j = (2 * j) % order
        sizes.append(size)
    return tuple(sizes)


def bch_redundancy(m: int, t: int) -> int:
    """Degree of the BCH generator, from cyclotomic coset sizes alone."""
    return sum(_coset_sizes(m)[: 2 * t])


def max_designed_t(m: int, t: int) -> int:
    """Largest designed t sharing the generator of designed t."""
    sizes = _coset_sizes(m)
    order = (1 << m) - 1
    # even exponents never add a coset, so only 2t+1 matters
    while 2 * (t + 1) + 1 <= order and sizes[2 * t] == 0:
        t += 1
    return t


class BCHCode(LinearCode):
    """Shortened narrow-sense BCH code decoded by Berlekamp-Massey and Chien search."""

    family = "bch"

    def __init__(self, m: int, t: int, n: int | None = None):
        gf = field(m)
        full = gf.order
        n = full if n is None else n
        g = bch_generator(m, t)
        r = g.bit_length() - 1
        k = n - r
        if n > full or k <= 0:
            raise InfeasibleCode(f"BCH(m={m}, t={t}) cannot be shortened to length {n}")
        parity = np.zeros((k, r), dtype=np.uint8)
        for j in range(k):
            rem = poly_mod(1 << (r + j), g)
            for i in range(r):
                parity[j, i] = (rem >> i) & 1
        super().__init__(parity, t, name=f"BCH[{n},{k}]")
        self.m = m
        self.gf = gf
        self.generator_poly = g
        # exponent of each vector position
        self._exponent = [r + j for j in range(k)] + list(range(r))
        self._position = {e: p for p, e in enumerate(self._exponent)}

    def _syndromes(self, received: np.ndarray) -> list[int]:
        gf = self.gf
        exps = [self._exponent[p] for p in np.flatnonzero(received)]
        out = []
        for i in range(1, 2 * self.t_correct + 1):
            s = 0
            for e in exps:
                s ^= gf.exp[(i * e) % gf.order]
            out.append(s)
        return out

    def _berlekamp_massey(self, synd: list[int]) -> list[int]:
        gf = self.gf
        lam = [1]
        prev = [1]
        length = 0
        shift = 1
        b = 1
        for step, s in enumerate(synd):
            d = s
            for i in range(1, length + 1):
                if i < len(lam) and lam[i]:
                    d ^= gf.mul(lam[i], synd[step - i])
            if d == 0:
                shift += 1
                continue
            coef = gf.mul(d, gf.inv(b))
            nxt = lam + [0] * max(0, len(prev) + shift - len(lam))
            for i, p in enumerate(prev):
                nxt[i + shift] ^= gf.mul(coef, p)
            if 2 * length <= step:
                prev, lam = lam, nxt
                length = step + 1 - length
                b = d
                shift = 1
            else:
                lam = nxt
                shift += 1
        while len(lam) > 1 and lam[-1] == 0:
            lam.pop()
        return lam

    def decode(self, received) -> tuple[np.ndarray, int]:
        received = as_bits(received)
        if received.size != self.n:
            raise ValueError(f"word has {received.size} bits, code length is {self.n}")
        synd = self._syndromes(received)
        if not any(synd):
            return received[: self.k].copy(), 0
        lam = self._berlekamp_massey(synd)
        degree = len(lam) - 1
        if degree > self.t_correct:
            raise DecodeFailure(f"error locator of degree {degree} exceeds t={self.t_correct}")
        gf = self.gf
        flips = []
        for e in range(self.n):
            # error at exponent e <=> Lambda(alpha^-e) == 0
            x = gf.alpha_pow(-e)
            acc = 0
            xp = 1
            for c in lam:
                if c:
                    acc ^= gf.mul(c, xp)
                xp = gf.mul(xp, x)
            if acc == 0:
                flips.append(self._position[e])
        if len(flips) != degree:
            raise DecodeFailure("error locator roots fall outside the shortened code")
        corrected = received.copy()
        corrected[flips] ^= 1
        if self.syndrome(corrected).any():
            raise DecodeFailure("correction did not reach a codeword")
        return corrected[: self.k].copy(), len(flips)


def _bch_candidates(n: int, t_errors: int):
    for m in range(2, MAX_FIELD_DEGREE + 1):
        if (1 << m) - 1 < n:
            continue
        if 2 * t_errors + 1 > (1 << m) - 1:
            continue
        r = bch_redundancy(m, t_errors)
        if n - r > 0:
            yield n - r, m


def build_code_for(block_length: int, t_errors: int) -> LinearCode:
    """Highest-dimension code of length ``block_length`` correcting ``t_errors``.

    Families tried: identity (t=0), shortened BCH, repetition. Raises
    :class:`InfeasibleCode` when none has positive dimension.
    """
    if block_length < 1:
        raise ValueError("block length must be positive")
    if t_errors < 0:
        raise ValueError("t_errors must be non-negative")
    if t_errors == 0:
        return IdentityCode(block_length)
    best: tuple[int, int] | None = None
    for k, m in _bch_candidates(block_length, t_errors):
        if best is None or k > best[0]:
            best = (k, m)
    if best is not None and best[0] > 1:
        return BCHCode(best[1], max_designed_t(best[1], t_errors), block_length)
    if 2 * t_errors + 1 <= block_length:
        return RepetitionCode(block_length)
    if best is not None:
        return BCHCode(best[1], max_designed_t(best[1], t_errors), block_length)
    raise InfeasibleCode(f"no code of length {block_length} corrects {t_errors} errors")


def required_errors(fraction: float, n: int) -> int:
    """Number of errors ``ceil(fraction * n)`` a length-n code must correct."""
    return max(0, math.ceil(fraction * n - 1e-9))


def design_message_code(message_bits: int, error_fraction: float) -> LinearCode:
    """Shortest code carrying exactly ``message_bits`` that corrects
    ``ceil(error_fraction * n)`` errors at its own length ``n``.
    """
    if message_bits < 1:
        raise ValueError("message must have at least one bit")
    if not 0.0 <= error_fraction < 0.5:
        raise ValueError("error fraction must lie in [0, 0.5)")
    if required_errors(error_fraction, message_bits) == 0:
        return IdentityCode(message_bits)
    best: tuple[int, int, int] | None = None  # (n, -t, m)
    for m in range(2, MAX_FIELD_DEGREE + 1):
        full = (1 << m) - 1
        if full < message_bits + m:
            continue
        if best is not None and message_bits + m > best[0]:
            break
        t = 1
        while 2 * t + 1 <= full:
            r = bch_redundancy(m, t)
            n = message_bits + r
            if n > full or (best is not None and n > best[0]):
                break
            if t >= required_errors(error_fraction, n):
                cand = (n, -t, m)
                if best is None or cand < best:
                    best = cand
            t += 1
    if message_bits == 1:
        t = 1
        while t < required_errors(error_fraction, 2 * t + 1):
            t += 1
        n = 2 * t + 1
        if best is None or n < best[0]:
            return RepetitionCode(n)
    if best is None:
        raise InfeasibleCode(
            f"no tabulated BCH code carries {message_bits} bits at error fraction {error_fraction}"
        )
    n, neg_t, m = best
    return BCHCode(m, -neg_t, n)
