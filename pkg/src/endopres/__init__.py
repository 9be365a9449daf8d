"""Endomorphic presentations, self-similar tree actions, and verification oracles."""

from endopres.words import (
    Alphabet,
    Endomorphism,
    Word,
    check_small_cancellation,
    commutator,
    exponent_word,
    identity_endomorphism,
)
from endopres.lpres import FinitePresentation, LPresentation, enumerate_relators
from endopres.treeauto import SelfSimilarSpec, act, level_permutation, wreath_decompose

__all__ = [
    "Alphabet",
    "Endomorphism",
    "FinitePresentation",
    "LPresentation",
    "SelfSimilarSpec",
    "Word",
    "act",
    "check_small_cancellation",
    "commutator",
    "enumerate_relators",
    "exponent_word",
    "identity_endomorphism",
    "level_permutation",
    "wreath_decompose",
]
