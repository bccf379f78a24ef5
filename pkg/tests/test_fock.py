import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fockmod.fock import (
    FockNModule,
    TruncatedFock,
    bold_creation,
    bold_right_creation,
    flip_unitary,
    left_creation,
    right_creation,
    vacuum_defect,
    word_apply,
    word_matrix,
)
from fockmod.words import Word


def test_left_creation_prepends():
    space = TruncatedFock(2, 3)
    s1 = left_creation(space, 1).matrix
    r2 = right_creation(space, 2).matrix
    v = space.basis_vector((2, 1))
    assert np.array_equal(s1 @ v, space.basis_vector((1, 2, 1)))
    assert np.array_equal(r2 @ v, space.basis_vector((2, 1, 2)))
    # top degree is annihilated
    assert not np.any(s1 @ space.basis_vector((1, 1, 1)))


def test_creation_ranges_orthogonal():
    space = TruncatedFock(3, 2)
    ss = [left_creation(space, i).matrix for i in (1, 2, 3)]
    for i in range(3):
        for j in range(3):
            if i != j:
                assert not np.any(ss[i].conj().T @ ss[j])


def test_left_and_right_commute():
    space = TruncatedFock(2, 3)
    s = left_creation(space, 1).matrix
    r = right_creation(space, 2).matrix
    assert np.array_equal(s @ r, r @ s)


def test_flip_unitary_is_involution():
    space = TruncatedFock(2, 3)
    u = flip_unitary(space).matrix
    assert np.array_equal(u @ u, np.eye(space.dim))


def test_vacuum_defect_with_coefficients():
    space = TruncatedFock(2, 2)
    p = vacuum_defect(space, 3).matrix
    assert np.array_equal(p @ p, p)
    assert int(round(np.trace(p).real)) == 3


def test_invalid_generator():
    with pytest.raises(IndexError):
        left_creation(TruncatedFock(2, 2), 3)


def test_operator_windows_compose():
    space = TruncatedFock(2, 4)
    s = left_creation(space, 1)
    assert s.valid_degree == 3
    assert (s @ s).valid_degree == 2
    assert s.H.valid_degree == 4


def test_word_apply_matches_word_matrix():
    space = TruncatedFock(2, 3)
    ss = [left_creation(space, i) for i in (1, 2)]
    w = Word((2, 1), 2)
    v = space.vacuum()
    assert np.array_equal(word_apply(ss, w, v), word_matrix(ss, w) @ v)
    assert np.array_equal(word_apply(ss, w, v), space.basis_vector((2, 1)))


def test_bold_operators_commute_across_factors():
    module = FockNModule.from_sizes((2, 1), (2, 2))
    a = bold_creation(module, 1, 2).matrix
    b = bold_creation(module, 2, 1).matrix
    assert np.array_equal(a @ b, b @ a)
    c = bold_right_creation(module, 1, 1).matrix
    assert np.array_equal(c @ b, b @ c)
    assert module.dim == 7 * 3


def test_bold_operator_acts_on_one_factor():
    module = FockNModule.from_sizes((2, 1), (2, 2))
    v = module.basis_vector([(1,), ()])
    out = bold_creation(module, 2, 1).matrix @ v
    assert np.array_equal(out, module.basis_vector([(1,), (1,)]))


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.data())
def test_row_isometry_identity(n, d, data):
    space = TruncatedFock(n, d)
    i = data.draw(st.integers(1, n))
    s = left_creation(space, i).matrix
    low = space.degrees <= d - 1
    assert np.allclose((s.conj().T @ s)[np.ix_(low, low)], np.eye(low.sum()))
