"""Finite-degree toolkit for submodules of full Fock spaces and their tensor products."""

from fockmod.words import Word, MultiIndex, enumerate_words, flip, symmetrize, multinomial_count
from fockmod.fock import (
    TruncatedFock,
    FockNModule,
    OperatorMatrix,
    left_creation,
    right_creation,
    flip_unitary,
    vacuum_defect,
    bold_creation,
    bold_right_creation,
    word_apply,
)
from fockmod.subspace import (
    Subspace,
    orthonormalize,
    complement_within,
    image,
    span_sum,
    intersect,
    distance,
    projection,
)

__version__ = "0.1.0"

__all__ = [
    "Word",
    "MultiIndex",
    "enumerate_words",
    "flip",
    "symmetrize",
    "multinomial_count",
    "TruncatedFock",
    "FockNModule",
    "OperatorMatrix",
    "left_creation",
    "right_creation",
    "flip_unitary",
    "vacuum_defect",
    "bold_creation",
    "bold_right_creation",
    "word_apply",
    "Subspace",
    "orthonormalize",
    "complement_within",
    "image",
    "span_sum",
    "intersect",
    "distance",
    "projection",
]
