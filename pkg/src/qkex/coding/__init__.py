"""Coding toolkit: entropy sizing, linear codes, BCH, coset labels, combinadics."""

from .bch import BCHCode, InfeasibleCode, build_code_for, design_message_code, required_errors
from .combinadic import CombinadicIndex, combinadic_rank, combinadic_unrank, rank_bits
from .entropy import binary_entropy, expanded_length
from .linear import (
    DecodeFailure,
    DualCode,
    IdentityCode,
    LinearCode,
    RepetitionCode,
    as_bits,
    code_from_text,
    coset_index,
    decode,
    encode,
    gf2_rank,
)

__all__ = [
    "BCHCode",
    "CombinadicIndex",
    "DecodeFailure",
    "DualCode",
    "IdentityCode",
    "InfeasibleCode",
    "LinearCode",
    "RepetitionCode",
    "as_bits",
    "binary_entropy",
    "build_code_for",
    "code_from_text",
    "combinadic_rank",
    "combinadic_unrank",
    "coset_index",
    "decode",
    "design_message_code",
    "encode",
    "expanded_length",
    "gf2_rank",
    "rank_bits",
    "required_errors",
]
