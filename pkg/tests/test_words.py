import math

import pytest
from hypothesis import given, strategies as st

from fockmod.words import (
    MultiIndex,
    Word,
    enumerate_words,
    multi_indices,
    multinomial_count,
    representative,
    symmetrize,
    word_count,
    word_index,
)


def test_enumeration_order():
    words = enumerate_words(2, 2)
    assert [w.letters for w in words] == [(), (1,), (2,), (1, 1), (1, 2), (2, 1), (2, 2)]
    assert len(enumerate_words(3, 3)) == word_count(3, 3) == 40


def test_word_index_matches_enumeration():
    for n, d in [(1, 4), (2, 3), (3, 2)]:
        for i, w in enumerate(enumerate_words(n, d)):
            assert word_index(w) == i


def test_bad_letters_rejected():
    with pytest.raises(ValueError):
        Word((3,), 2)
    with pytest.raises(ValueError):
        Word((0,), 2)
    with pytest.raises(ValueError):
        Word((), 0)
    with pytest.raises(ValueError):
        enumerate_words(2, -1)


def test_concatenation_and_flip():
    a, b = Word((1, 2), 3), Word((3,), 3)
    assert (a * b).letters == (1, 2, 3)
    assert (a * b).flip().letters == (3, 2, 1)
    assert str(Word.empty(2)) == "e"
    assert str(a) == "g1g2"
    with pytest.raises(ValueError):
        a * Word((1,), 2)


def test_multinomial_counts():
    assert multinomial_count(MultiIndex((2, 1))) == 3
    assert multinomial_count((1, 1, 1)) == 6
    with pytest.raises(ValueError):
        MultiIndex((-1, 2))
    with pytest.raises(OverflowError):
        multinomial_count((40, 40))


def test_multi_indices_cover_symmetrizations():
    n, d = 3, 3
    for m in range(d + 1):
        mis = multi_indices(n, m)
        assert len(mis) == math.comb(n + m - 1, m)
        counts = {mi.exponents: 0 for mi in mis}
        for w in enumerate_words(n, m):
            if len(w) == m:
                counts[symmetrize(w).exponents] += 1
        assert all(counts[e] == multinomial_count(e) for e in counts)


@given(st.lists(st.integers(1, 3), max_size=6))
def test_flip_is_involution(letters):
    w = Word(tuple(letters), 3)
    assert w.flip().flip() == w
    assert symmetrize(w.flip()) == symmetrize(w)
    assert symmetrize(representative(symmetrize(w))) == symmetrize(w)


@given(st.lists(st.integers(1, 2), max_size=8))
def test_index_roundtrip(letters):
    w = Word(tuple(letters), 2)
    assert enumerate_words(2, len(w))[word_index(w)] == w
