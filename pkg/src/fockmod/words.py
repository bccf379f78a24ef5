"""Words in the unital free semigroup and the combinatorics built on them.

Letters are 1-based generator indices, so ``Word((1, 2), 2)`` is g1g2 over
two generators and ``Word((), n)`` is the identity e.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

INT64_MAX = 2**63 - 1


@dataclass(frozen=True, order=True)
class Word:
    letters: tuple[int, ...]
    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"alphabet size must be positive, got {self.n}")
        letters = tuple(int(a) for a in self.letters)
        for a in letters:
            if not 1 <= a <= self.n:
                raise ValueError(f"letter {a} outside 1..{self.n}")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def empty(cls, n: int) -> Word:
        return cls((), n)

    @classmethod
    def from_json(cls, data: Sequence[int], n: int) -> Word:
        return cls(tuple(data), n)

    def to_json(self) -> list[int]:
        return list(self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __mul__(self, other: Word) -> Word:
        if other.n != self.n:
            raise ValueError("cannot concatenate words over different alphabets")
        return Word(self.letters + other.letters, self.n)

    def flip(self) -> Word:
        return Word(self.letters[::-1], self.n)

    def __str__(self) -> str:
        if not self.letters:
            return "e"
        return "".join(f"g{a}" for a in self.letters)


@dataclass(frozen=True)
class MultiIndex:
    exponents: tuple[int, ...]

    def __post_init__(self) -> None:
        exps = tuple(int(m) for m in self.exponents)
        if any(m < 0 for m in exps):
            raise ValueError(f"negative exponent in {exps}")
        object.__setattr__(self, "exponents", exps)

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    def __len__(self) -> int:
        return len(self.exponents)


def enumerate_words(n: int, d: int) -> list[Word]:
    """All words of length <= d, degree-major and lexicographic within a degree.

    The position of a word in the returned list is its basis index.
    """
    if n < 1 or d < 0:
        raise ValueError(f"need n >= 1 and d >= 0, got n={n}, d={d}")
    out = []
    for m in range(d + 1):
        out.extend(Word(t, n) for t in itertools.product(range(1, n + 1), repeat=m))
    return out


def word_count(n: int, d: int) -> int:
    return sum(n**m for m in range(d + 1))


def word_index(w: Word) -> int:
    """Basis index of ``w`` in the graded-lexicographic order."""
    n, m = w.n, len(w)
    offset = word_count(n, m - 1) if m > 0 else 0
    rank = 0
    for a in w.letters:
        rank = rank * n + (a - 1)
    return offset + rank


def flip(w: Word) -> Word:
    return w.flip()


def symmetrize(w: Word) -> MultiIndex:
    counts = [0] * w.n
    for a in w.letters:
        counts[a - 1] += 1
    return MultiIndex(tuple(counts))


def multinomial_count(m: MultiIndex | Iterable[int]) -> int:
    """Number of words whose letter counts are ``m``: |m|! / (m_1! ... m_n!)."""
    exps = m.exponents if isinstance(m, MultiIndex) else MultiIndex(tuple(m)).exponents
    count = math.factorial(sum(exps))
    for e in exps:
        count //= math.factorial(e)
    if count > INT64_MAX:
        raise OverflowError(f"multinomial count for {exps} exceeds int64")
    return count


def multi_indices(n: int, degree: int) -> list[MultiIndex]:
    """All n-tuples of nonnegative integers summing to ``degree``."""
    out = []
    for combo in itertools.combinations_with_replacement(range(n), degree):
        counts = [0] * n
        for c in combo:
            counts[c] += 1
        out.append(MultiIndex(tuple(counts)))
    return sorted(out, key=lambda mi: mi.exponents, reverse=True)


def representative(m: MultiIndex) -> Word:
    """The lexicographically smallest word with letter counts ``m``."""
    letters = []
    for i, e in enumerate(m.exponents, start=1):
        letters.extend([i] * e)
    return Word(tuple(letters), len(m.exponents))
