import itertools
from math import comb, log2

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qkex.coding import (
    BCHCode,
    CombinadicIndex,
    DecodeFailure,
    IdentityCode,
    InfeasibleCode,
    LinearCode,
    RepetitionCode,
    binary_entropy,
    build_code_for,
    code_from_text,
    combinadic_rank,
    combinadic_unrank,
    coset_index,
    decode,
    design_message_code,
    encode,
    expanded_length,
    gf2_rank,
    rank_bits,
)
from qkex.coding.bch import field

HAMMING = BCHCode(3, 1)


def _all_words(n):
    return np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.uint8)


def _codewords(code):
    return (_all_words(code.k) @ code.generator) % 2


def _entropy_oracle(x):
    return -x * log2(x) - (1 - x) * log2(1 - x)


# --- entropy and sizing -------------------------------------------------------


def test_entropy_examples():
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert abs(binary_entropy(0.11) - 0.49993) < 1e-4


@pytest.mark.parametrize("x", [-0.01, 1.01])
def test_entropy_domain(x):
    with pytest.raises(ValueError):
        binary_entropy(x)


@settings(max_examples=1000)
@given(st.floats(0, 1))
def test_entropy_symmetric(x):
    assert abs(binary_entropy(x) - binary_entropy(1 - x)) < 1e-12


@given(st.floats(1e-9, 1 - 1e-9))
def test_entropy_matches_formula(x):
    assert abs(binary_entropy(x) - _entropy_oracle(x)) < 1e-12


def test_expanded_length_examples():
    assert expanded_length(100, 0.0) == 100
    assert expanded_length(100, 0.11) == 200
    assert expanded_length(100, 0.09, 0.02) == 200
    with pytest.raises(ValueError):
        expanded_length(7, 0.5)


# --- linear codes -------------------------------------------------------------


def test_hamming_shape():
    assert (HAMMING.n, HAMMING.k, HAMMING.t_correct) == (7, 4, 1)
    assert not ((HAMMING.generator @ HAMMING.parity_check.T) % 2).any()
    assert gf2_rank(HAMMING.generator) == 4


def test_encode_examples():
    assert not encode(HAMMING, [0, 0, 0, 0]).any()
    np.testing.assert_array_equal(encode(HAMMING, [1, 0, 0, 0]), HAMMING.generator[0])
    word = encode(HAMMING, [1, 0, 1, 1])
    matches = [c for c in _codewords(HAMMING) if list(c[:4]) == [1, 0, 1, 1]]
    assert len(matches) == 1
    np.testing.assert_array_equal(word, matches[0])


def test_encode_length_mismatch():
    with pytest.raises(ValueError):
        encode(HAMMING, [1, 0, 1])


def _nearest(code, received):
    words = _codewords(code)
    dist = (words != received).sum(axis=1)
    return words[np.argmin(dist)], int(dist.min())


def test_hamming_single_flip_against_brute_force():
    for msg in _all_words(4):
        word = encode(HAMMING, msg)
        for j in range(7):
            received = word.copy()
            received[j] ^= 1
            got, flips = decode(HAMMING, received)
            nearest, _ = _nearest(HAMMING, received)
            np.testing.assert_array_equal(got, msg)
            np.testing.assert_array_equal(nearest[:4], msg)
            assert flips == 1


def test_hamming_two_flips_never_clean_success():
    for msg in _all_words(4):
        word = encode(HAMMING, msg)
        for i, j in itertools.combinations(range(7), 2):
            received = word.copy()
            received[[i, j]] ^= 1
            try:
                got, flips = decode(HAMMING, received)
            except DecodeFailure:
                continue
            assert flips != 0


def test_clean_codewords_round_trip():
    rng = np.random.default_rng(0)
    code = BCHCode(7, 5, n=100)
    for _ in range(1000):
        msg = rng.integers(0, 2, code.k, dtype=np.uint8)
        got, flips = code.decode(code.encode(msg))
        assert flips == 0 and np.array_equal(got, msg)


def test_coset_examples():
    for c in _codewords(HAMMING):
        assert not coset_index(HAMMING, c).any()
    w = np.array([1, 0, 0, 0, 0, 0, 0], dtype=np.uint8)
    np.testing.assert_array_equal(coset_index(HAMMING, w), HAMMING.parity_check[:, 0])
    labels = {}
    for word in _all_words(7):
        labels.setdefault(tuple(coset_index(HAMMING, word)), []).append(word)
    assert len(labels) == 8 and all(len(v) == 16 for v in labels.values())
    for members in labels.values():
        for a in members:
            assert any(np.array_equal(a ^ members[0], c) for c in _codewords(HAMMING))


def test_coset_length_mismatch():
    with pytest.raises(ValueError):
        coset_index(HAMMING, [0, 1])


@settings(max_examples=200)
@given(st.lists(st.integers(0, 1), min_size=7, max_size=7), st.integers(0, 15))
def test_coset_constant_on_translates(word, cw):
    w = np.array(word, dtype=np.uint8)
    c = _codewords(HAMMING)[cw]
    np.testing.assert_array_equal(coset_index(HAMMING, w), coset_index(HAMMING, w ^ c))


def test_dual_code_swaps_matrices():
    dual = HAMMING.dual()
    assert (dual.n, dual.k) == (7, 3)
    np.testing.assert_array_equal(dual.generator, HAMMING.parity_check)
    assert not ((dual.generator @ dual.parity_check.T) % 2).any()
    assert dual.dual() is HAMMING
    for c in _codewords(dual):
        assert not dual.coset_index(c).any()


def test_identity_and_repetition():
    ident = IdentityCode(7)
    assert (ident.n, ident.k, ident.t_correct) == (7, 7, 0)
    word = np.array([1, 0, 1, 1, 0, 0, 1], dtype=np.uint8)
    np.testing.assert_array_equal(ident.decode(word)[0], word)
    rep = RepetitionCode(5)
    assert rep.t_correct == 2
    assert rep.decode([1, 1, 0, 1, 0])[0].tolist() == [1]
    with pytest.raises(DecodeFailure):
        RepetitionCode(4).decode([1, 1, 0, 0])


def test_text_round_trip():
    text = HAMMING.to_text()
    back = code_from_text(text)
    np.testing.assert_array_equal(back.generator, HAMMING.generator)
    assert back.t_correct == HAMMING.t_correct


# --- BCH ----------------------------------------------------------------------


def test_field_tables():
    gf = field(4)
    for a in range(1, 16):
        assert gf.mul(a, gf.inv(a)) == 1
    assert len({gf.alpha_pow(i) for i in range(15)}) == 15


@pytest.mark.parametrize(
    "n, t, name, k",
    [(7, 1, "BCH[7,4]", 4), (15, 3, "BCH[15,5]", 5), (15, 2, "BCH[15,7]", 7), (7, 0, "[7,7]", 7)],
)
def test_build_code_for_examples(n, t, name, k):
    code = build_code_for(n, t)
    assert (code.name, code.n, code.k) == (name, n, k)
    assert code.t_correct >= t


def test_build_code_for_repetition_fallback():
    code = build_code_for(20, 9)
    assert code.n == 20 and code.t_correct >= 9


def test_build_code_for_infeasible():
    with pytest.raises(InfeasibleCode):
        build_code_for(10, 5)


def _syndromes_distinct(code):
    seen = set()
    for w in range(code.t_correct + 1):
        for support in itertools.combinations(range(code.n), w):
            e = np.zeros(code.n, dtype=np.uint8)
            e[list(support)] = 1
            key = tuple(code.syndrome(e))
            if key in seen:
                return False
            seen.add(key)
    return True


@pytest.mark.parametrize("n, t", [(7, 1), (15, 3), (15, 2), (12, 1), (20, 2), (20, 3)])
def test_built_code_syndromes_distinct(n, t):
    assert _syndromes_distinct(build_code_for(n, t))


@pytest.mark.parametrize("m, t, n", [(6, 4, 63), (7, 7, 120), (8, 18, 224)])
def test_bch_corrects_random_patterns_up_to_t(m, t, n):
    rng = np.random.default_rng(m)
    code = BCHCode(m, t, n=n)
    for _ in range(50):
        msg = rng.integers(0, 2, code.k, dtype=np.uint8)
        e = np.zeros(n, dtype=np.uint8)
        e[rng.choice(n, size=int(rng.integers(0, t + 1)), replace=False)] = 1
        got, flips = code.decode(code.encode(msg) ^ e)
        assert np.array_equal(got, msg) and flips == e.sum()


def test_bch_beyond_t_never_silent_clean():
    rng = np.random.default_rng(9)
    code = BCHCode(5, 2, n=31)
    for _ in range(200):
        msg = rng.integers(0, 2, code.k, dtype=np.uint8)
        e = np.zeros(31, dtype=np.uint8)
        e[rng.choice(31, size=5, replace=False)] = 1
        try:
            _, flips = code.decode(code.encode(msg) ^ e)
        except DecodeFailure:
            continue
        assert flips > 0


@pytest.mark.parametrize("N, n, k, t", [(8, 12, 8, 1), (64, 120, 64, 9), (100, 224, 100, 18)])
def test_design_message_code(N, n, k, t):
    code = design_message_code(N, 0.07)
    assert (code.n, code.k, code.t_correct) == (n, k, t)
    assert code.t_correct >= 0.07 * code.n


def test_design_message_code_noiseless_is_identity():
    code = design_message_code(10, 0.0)
    assert (code.n, code.k) == (10, 10)


# --- combinadics --------------------------------------------------------------


def test_unrank_examples():
    assert combinadic_unrank(CombinadicIndex(4, 2, 0)) == (0, 1)
    assert combinadic_unrank(CombinadicIndex(4, 2, 5)) == (2, 3)
    assert combinadic_unrank(CombinadicIndex(5, 0, 0)) == ()


def test_colex_order_n4_k2():
    subsets = [combinadic_unrank(CombinadicIndex(4, 2, r)) for r in range(6)]
    want = sorted(itertools.combinations(range(4), 2), key=lambda s: tuple(reversed(s)))
    assert subsets == want


def test_rank_examples():
    assert combinadic_rank(4, [0, 1]) == 0
    assert combinadic_rank(4, [2, 3]) == 5
    assert combinadic_rank(5, []) == 0


@pytest.mark.parametrize("args", [(4, 2, 6), (4, 2, -1), (3, 4, 0)])
def test_index_out_of_range(args):
    with pytest.raises(ValueError):
        CombinadicIndex(*args)


@pytest.mark.parametrize("positions", [[0, 0], [4], [-1]])
def test_rank_invalid_positions(positions):
    with pytest.raises(ValueError):
        combinadic_rank(4, positions)


def test_bijection_exhaustive_small():
    for n in range(13):
        for k in range(n + 1):
            subsets = {combinadic_unrank(CombinadicIndex(n, k, r)) for r in range(comb(n, k))}
            assert len(subsets) == comb(n, k)
            assert all(combinadic_rank(n, s) == combinadic_rank(n, list(s)) for s in subsets)


@settings(max_examples=1000)
@given(st.data())
def test_round_trip_large(data):
    n = data.draw(st.integers(1, 400))
    k = data.draw(st.integers(0, n))
    rank = data.draw(st.integers(0, comb(n, k) - 1))
    subset = combinadic_unrank(CombinadicIndex(n, k, rank))
    assert len(subset) == k and combinadic_rank(n, subset) == rank


@given(st.sets(st.integers(0, 29), min_size=6, max_size=6))
def test_round_trip_n30(positions):
    rank = combinadic_rank(30, positions)
    assert combinadic_unrank(CombinadicIndex(30, 6, rank)) == tuple(sorted(positions))


def test_rank_bits():
    assert rank_bits(324, 100) == (comb(324, 100) - 1).bit_length()
    assert rank_bits(4, 4) == 0
    assert rank_bits(4, 2) == 3


def test_linear_code_checks_inputs():
    with pytest.raises(ValueError):
        LinearCode(np.zeros((2, 2, 2), dtype=np.uint8), 0)
