import numpy as np
import pytest

from fockmod.fock import FockNModule, bold_creation
from fockmod.modana import NotInvariantError, TupleSystem, generate_submodule
from fockmod.polyball import (
    all_bold_ops,
    joint_equivalence_check,
    joint_invariance_residual,
    permute,
    phi_purity,
    polyball_classify,
    polyball_uniqueness,
    polydisc_cross_check,
    polydisc_direct,
    random_joint_submodule,
)
from fockmod.subspace import orthonormalize


def _joint(module, gens):
    ops = tuple(bold_creation(module, i, j) for (i, j), _ in all_bold_ops(module))
    return generate_submodule(TupleSystem(ops), gens)


@pytest.mark.parametrize("ns,ds", [((2, 2), (2, 2)), ((2, 1, 2), (2, 2, 1)), ((1, 2), (3, 2))])
def test_classification_residuals_vanish(ns, ds):
    module = FockNModule.from_sizes(ns, ds)
    rng = np.random.default_rng(sum(ns) * 10 + sum(ds))
    M = random_joint_submodule(module, rng, count=2)
    c = polyball_classify(M, module)
    assert max(c.residuals.values()) < 1e-10, c.residuals
    assert joint_equivalence_check(M, c) < 1e-10
    assert set(c.Phi) == {(i, j) for i in range(2, module.k + 1) for j in range(1, ns[i - 1] + 1)}


def test_whole_module_fiber_is_rest_factor():
    module = FockNModule.from_sizes((2, 1), (2, 2))
    c = polyball_classify(_joint(module, [module.vacuum()]), module)
    assert c.E.dim == module.rest_dim == 3
    assert c.Theta.max_degree == 0


def test_non_invariant_subspace_rejected():
    module = FockNModule.from_sizes((1, 1), (2, 2))
    M = orthonormalize([module.basis_vector([(1,), ()])])
    assert joint_invariance_residual(M, module) > 0.5
    with pytest.raises(NotInvariantError):
        polyball_classify(M, module)


def test_uniqueness_across_bases():
    module = FockNModule.from_sizes((2, 1), (2, 2))
    M = random_joint_submodule(module, np.random.default_rng(4), count=2)
    c1 = polyball_classify(M, module)
    c2 = polyball_classify(M, module, method="kernel")
    u = polyball_uniqueness(c1, c2)
    assert u.theta.residual < 1e-10 and u.phi_residual < 1e-10


def test_permutation_swaps_roles():
    module = FockNModule.from_sizes((2, 1), (2, 2))
    M = random_joint_submodule(module, np.random.default_rng(9), count=2)
    Mp, mp = permute(M, module, [2, 1])
    assert mp.shape == (module.shape[1], module.shape[0])
    assert joint_invariance_residual(Mp, mp) < 1e-12
    c = polyball_classify(M, module, permutation=[2, 1])
    assert c.module.factors[0].n == 1
    assert max(c.residuals.values()) < 1e-10
    with pytest.raises(ValueError):
        permute(M, module, [1, 1])


def test_polydisc_direct_agrees():
    module = FockNModule.from_sizes((1, 1), (3, 3))
    M = random_joint_submodule(module, np.random.default_rng(2), count=2)
    c = polyball_classify(M, module)
    direct = polydisc_direct(M, (3, 3))
    assert polydisc_cross_check(c, direct) < 1e-10


def test_phi_purity_decays():
    module = FockNModule.from_sizes((1, 2), (2, 2))
    c = polyball_classify(_joint(module, [module.vacuum()]), module)
    prof = phi_purity(c, 2, 4)
    assert prof[0] == pytest.approx(1.0)
    assert max(prof[3:]) < 1e-12
