import numpy as np
import pytest

from fockmod.examples import random_submodule
from fockmod.fock import DTYPE, FockNModule, TruncatedFock
from fockmod.modana import (
    NotInvariantError,
    bold_system,
    canonical_unitary,
    fiber_window,
    generate_submodule,
    grading_blocks,
    is_reducing_constant,
    is_submodule,
    purity_profile,
    restricted_matrices,
    shift_system,
    support_degree,
    wandering_subspace,
)
from fockmod.subspace import Subspace, distance, orthonormalize


def test_generated_submodule_is_invariant():
    space = TruncatedFock(2, 3)
    sys_ = shift_system(space)
    M = generate_submodule(sys_, [space.basis_vector((1,))])
    assert M.dim == 1 + 2 + 4
    ok, resid = is_submodule(M, sys_)
    assert ok and resid < 1e-14
    assert generate_submodule(sys_, []).dim == 0
    with pytest.raises(ValueError):
        generate_submodule(sys_, [np.ones(3)])


def test_non_invariant_subspace_rejected():
    space = TruncatedFock(2, 2)
    sys_ = shift_system(space)
    M = orthonormalize([space.basis_vector((1,))])
    ok, resid = is_submodule(M, sys_)
    assert not ok and resid == pytest.approx(1.0)
    with pytest.raises(NotInvariantError):
        wandering_subspace(M, sys_)


def test_wandering_subspace_of_principal_submodule():
    space = TruncatedFock(2, 3)
    sys_ = shift_system(space)
    g = space.basis_vector((1,)) + 2 * space.basis_vector((2,))
    M = generate_submodule(sys_, [g])
    a = wandering_subspace(M, sys_)
    b = wandering_subspace(M, sys_, method="kernel")
    assert a.E.dim == b.E.dim == 1
    assert distance(a.E, b.E) < 1e-12
    assert abs(abs(a.E.frame[:, 0].conj() @ g) - np.linalg.norm(g)) < 1e-12
    assert support_degree(a.E, sys_) == 1
    with pytest.raises(ValueError):
        wandering_subspace(M, sys_, method="bogus")


def test_canonical_unitary_isometric_on_window():
    space = TruncatedFock(2, 4)
    sys_ = shift_system(space, 2)
    rng = np.random.default_rng(5)
    M, _ = random_submodule(space, 2, rng)
    E = wandering_subspace(M, sys_).E
    L = canonical_unitary(M, sys_, target_degree=space.d, E=E).matrix
    win = fiber_window(E, sys_, space.d)
    assert win.shape[1] > 0
    assert np.linalg.norm(L @ L.conj().T @ win - win, 2) < 1e-12
    # L* maps the window into M
    assert np.linalg.norm((np.eye(M.ambient_dim) - M.projector()) @ L.conj().T @ win, 2) < 1e-12


def test_restricted_purity_vanishes_past_top():
    space = TruncatedFock(2, 3)
    sys_ = shift_system(space)
    M = generate_submodule(sys_, [space.basis_vector((2,))])
    prof = purity_profile(restricted_matrices(M, sys_), 5)
    assert prof[0] == pytest.approx(1.0)
    assert max(prof[3:]) < 1e-12
    with pytest.raises(ValueError):
        purity_profile(sys_, -1)


def test_reducing_constant_detection():
    space = TruncatedFock(2, 2)
    k = 3
    K = orthonormalize([[1, 1, 0]])
    M = Subspace(np.kron(np.eye(space.dim, dtype=DTYPE), K.frame))
    found = is_reducing_constant(M, space, k)
    assert found is not None and distance(found, K) < 1e-12
    sys_ = shift_system(space, k)
    N = generate_submodule(sys_, [np.kron(space.basis_vector((1,)), [1, 0, 0])])
    assert is_reducing_constant(N, space, k) is None


def test_grading_blocks_are_orthogonal():
    space = TruncatedFock(2, 3)
    sys_ = shift_system(space)
    E = wandering_subspace(generate_submodule(sys_, [space.vacuum()]), sys_).E
    blocks = grading_blocks(E, sys_, 2)
    frames = [b.frame for b in blocks.values()]
    big = np.hstack(frames)
    assert np.allclose(big.conj().T @ big, np.eye(big.shape[1]))


def test_bold_system_factor_grading():
    module = FockNModule.from_sizes((2, 1), (2, 3))
    s2 = bold_system(module, 2)
    assert s2.n == 1 and s2.top == 3
    M = generate_submodule(s2, [module.vacuum()])
    assert M.dim == 4
