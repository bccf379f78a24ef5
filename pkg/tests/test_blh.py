import numpy as np
import pytest

from fockmod.blh import (
    NotModuleMapError,
    UniquenessError,
    analyze,
    blh_factorize,
    commutant_represent,
    fourier_coefficients,
    intertwining_residual,
    synthesize,
    uniqueness_unitary,
)
from fockmod.examples import random_submodule, random_unitary
from fockmod.fock import TruncatedFock, left_creation, right_creation, word_matrix
from fockmod.modana import NotInvariantError, generate_submodule, shift_system
from fockmod.subspace import Subspace
from fockmod.words import Word


def test_synthesize_then_analyze_roundtrip():
    space = TruncatedFock(2, 3)
    rng = np.random.default_rng(0)
    coeffs = {
        Word(w, 2): rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
        for w in [(), (1,), (2, 1)]
    }
    theta = synthesize(coeffs, space, 3, 2)
    assert intertwining_residual(theta.matrix, space, 3, 2) < 1e-12
    back = analyze(theta.matrix.matrix, space, 3, 2)
    for w, c in coeffs.items():
        assert np.abs(back.coefficient(w) - c).max() < 1e-14
    assert not back.coefficient((2, 2)).any()
    assert theta.max_degree == 2


def test_synthesize_rejects_bad_shape():
    with pytest.raises(ValueError):
        synthesize({Word((), 2): np.zeros((2, 2))}, TruncatedFock(2, 2), 3, 2)


def test_left_creation_is_not_a_module_map_for_right_coefficients():
    space = TruncatedFock(2, 2)
    # R_1 commutes with every S_i, S_1 does not commute with S_2
    assert intertwining_residual(right_creation(space, 1).matrix, space, 1, 1) < 1e-14
    with pytest.raises(NotModuleMapError):
        fourier_coefficients(left_creation(space, 1).matrix, space, 1, 1)


def test_principal_submodule_gives_monomial_inner_function():
    space = TruncatedFock(2, 3)
    M = generate_submodule(shift_system(space), [space.basis_vector((1, 2))])
    f = blh_factorize(M, 1, space)
    assert f.dim_E == 1
    assert f.inner_residual < 1e-14 and f.range_distance < 1e-14
    c = f.Theta.coefficient((2, 1))
    assert abs(abs(c[0, 0]) - 1) < 1e-14
    table = f.Theta.coefficient_table(tol=1e-12)
    assert [row["word"] for row in table] == [[2, 1]]


def test_whole_space_factorization_is_constant_unitary():
    space = TruncatedFock(2, 3)
    k = 2
    M = Subspace.full(space.dim * k)
    f = blh_factorize(M, k, space)
    assert f.dim_E == k
    assert f.Theta.max_degree == 0
    c = f.Theta.coefficient(())
    assert np.allclose(c.conj().T @ c, np.eye(k))


def test_uniqueness_between_two_bases():
    space = TruncatedFock(2, 3)
    rng = np.random.default_rng(7)
    M, _ = random_submodule(space, 2, rng, count=3)
    f1 = blh_factorize(M, 2, space)
    f2 = blh_factorize(M, 2, space, method="kernel")
    u = uniqueness_unitary(f1, f2)
    assert u.residual < 1e-12 and u.unitarity_residual < 1e-12 and u.coanalytic_residual < 1e-12


def test_uniqueness_rejects_different_ranges():
    space = TruncatedFock(2, 3)
    sys_ = shift_system(space)
    f1 = blh_factorize(generate_submodule(sys_, [space.basis_vector((1,))]), 1, space)
    f2 = blh_factorize(generate_submodule(sys_, [space.basis_vector((2,))]), 1, space)
    with pytest.raises(UniquenessError):
        uniqueness_unitary(f1, f2)


def test_commutant_recovers_polynomial_on_whole_space():
    space = TruncatedFock(2, 3)
    k = 2
    sys_ = shift_system(space, k)
    M = Subspace.full(space.dim * k)
    f = blh_factorize(M, k, space)
    u = random_unitary(k, np.random.default_rng(1))
    rs = [right_creation(space, i).matrix for i in (1, 2)]
    poly = {Word((), 2): 0.5, Word((1,), 2): 2.0, Word((2, 1), 2): -1j}
    pr = sum(c * word_matrix(rs, w) for w, c in poly.items())
    C = np.kron(pr, u)
    phi = commutant_represent(C, M, sys_, E=f.E)
    assert max(phi.diagnostics.values()) < 1e-12
    for w, c in poly.items():
        expected = f.E.frame[:k].conj().T @ (c * u) @ f.E.frame[:k]
        assert np.abs(phi.coefficient(w) - expected).max() < 1e-12


def test_commutant_rejects_non_commuting_operator():
    space = TruncatedFock(2, 3)
    sys_ = shift_system(space)
    M = generate_submodule(sys_, [space.basis_vector((1,))])
    # V_1 = S_1|_M does not commute with V_2
    with pytest.raises(NotInvariantError):
        commutant_represent(left_creation(space, 1).matrix, M, sys_)
