import numpy as np
import pytest

from fockmod.blh import fourier_coefficients
from fockmod.examples import (
    dim_gap_example,
    dim_gap_fiber,
    dim_gap_matrices,
    fixture_suite,
    random_polynomial,
    random_submodule,
    random_unitary,
)
from fockmod.fock import TruncatedFock
from fockmod.modana import is_submodule, shift_system
from fockmod.subspace import distance


@pytest.mark.parametrize("m,n", [(1, 2), (2, 2), (2, 3), (3, 2)])
def test_dim_gap_is_exact_integer_isometry(m, n):
    theta = dim_gap_matrices(m, n)
    assert all(t.dtype == np.int64 for t in theta)
    inst = dim_gap_example(m, n, 3)
    assert inst.gram_residual() == 0.0
    assert inst.inner_residual() < 1e-14
    assert (inst.dim_E, inst.dim_Estar) == (m * n, m)


def test_dim_gap_range_fiber():
    inst = dim_gap_example(2, 2, 3)
    assert dim_gap_fiber(inst) == 4
    # the range is generated by the degree-one words times C^m
    coeffs = fourier_coefficients(inst.Theta.matrix, inst.Theta.space, 4, 2)
    assert not np.any(coeffs[next(iter(coeffs))])


def test_dim_gap_rejects_bad_sizes():
    with pytest.raises(ValueError):
        dim_gap_matrices(1, 1)
    with pytest.raises(ValueError):
        dim_gap_example(1, 2, 0)


def test_random_submodule_is_deterministic_and_invariant():
    space = TruncatedFock(2, 3)
    a, _ = random_submodule(space, 2, np.random.default_rng(5))
    b, _ = random_submodule(space, 2, np.random.default_rng(5))
    assert distance(a, b) == 0.0
    assert is_submodule(a, shift_system(space, 2))[0]


def test_random_unitary_and_polynomial():
    rng = np.random.default_rng(0)
    for k in (1, 3):
        u = random_unitary(k, rng)
        assert np.allclose(u.conj().T @ u, np.eye(k))
    p = random_polynomial(2, 2, rng)
    assert len(p) == 7


def test_fixture_names_unique_and_buildable():
    suite = fixture_suite()
    names = [f.name for f in suite]
    assert len(names) == len(set(names))
    for fx in suite:
        assert isinstance(fx.build(), dict)
