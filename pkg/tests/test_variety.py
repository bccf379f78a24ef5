import numpy as np
import pytest

from fockmod.fock import TruncatedFock, left_creation
from fockmod.modana import NotInvariantError
from fockmod.subspace import orthonormalize
from fockmod.variety import (
    ConstrainedNModule,
    DegenerateIdealError,
    NCPolynomial,
    build_constrained,
    commutator,
    commutator_ideal,
    constrained_classify,
    da_multiplier_eval,
    da_series_eval,
    da_tail_bound,
    symmetric_check,
    symmetric_dimension,
    taylor_by_contour,
)
from fockmod.words import Word


def test_polynomial_json_roundtrip_and_evaluation():
    p = NCPolynomial({(1, 2): 2.0, (2,): 1j, (1, 2, 1): 0}, 2)
    assert p.degree == 2 and not p.is_homogeneous
    assert NCPolynomial.from_json(p.to_json(), 2) == p
    space = TruncatedFock(2, 3)
    s = [left_creation(space, i).matrix for i in (1, 2)]
    expected = 2 * s[0] @ s[1] + 1j * s[1]
    assert np.array_equal(p.evaluate(s), expected)
    with pytest.raises(ValueError):
        p.evaluate(s[:1])
    assert commutator(1, 2, 2).is_homogeneous


@pytest.mark.parametrize("n,d", [(2, 2), (2, 3), (3, 2)])
def test_commutator_quotient_is_symmetric_fock_space(n, d):
    cm = build_constrained(TruncatedFock(n, d), commutator_ideal(n))
    assert cm.drury_arveson
    assert cm.NJ.dim == symmetric_dimension(n, d)
    assert max(cm.residuals.values()) < 1e-12
    check = symmetric_check(cm)
    assert check["applicable"]
    assert check["symmetrizer_distance"] < 1e-10
    assert check["commutator_residual"] < 1e-10
    assert check["left_right_residual"] < 1e-10


def test_other_ideals_are_not_drury_arveson():
    cm = build_constrained(TruncatedFock(2, 3), [NCPolynomial({(1, 1): 1.0}, 2)])
    assert not cm.drury_arveson
    assert symmetric_check(cm) == {"applicable": False}
    # sandwiches of z1^2 in degree ≤ 3: z1^2, z1^2 z_a, z_a z1^2 with overlap z1^3
    assert cm.MJ.dim == 1 + 3


def test_degenerate_ideal_rejected():
    space = TruncatedFock(2, 2)
    unit = [NCPolynomial({(): 1.0}, 2)]
    with pytest.raises(DegenerateIdealError):
        build_constrained(space, unit)
    assert build_constrained(space, unit, allow_degenerate=True).NJ.dim == 0
    with pytest.raises(ValueError):
        build_constrained(space, [NCPolynomial({(1, 1, 1): 1.0}, 2)])


def _da_z1():
    cm = build_constrained(TruncatedFock(2, 3), commutator_ideal(2))
    cn = ConstrainedNModule((cm,))
    g = cn.N.projector() @ cn.module.basis_vector([(1,)])
    return cm, cn.generate([g])


def test_split_fiber_breaks_partial_isometry_for_z1():
    # [z1] in the symmetric Fock space: the wandering subspace of M_J is not inside Ẽ
    cm, M = _da_z1()
    c = constrained_classify(M, (cm,))
    assert c.residuals["containment"] < 1e-12
    assert c.E.dim == 1
    assert c.residuals["partial_isometry"] > 0.5


def test_augmented_fiber_is_partial_isometry_for_z1():
    cm, M = _da_z1()
    c = constrained_classify(M, (cm,), fiber="augmented")
    assert c.residuals["partial_isometry"] < 1e-12
    assert c.residuals["containment"] > 0.5
    with pytest.raises(ValueError):
        da_multiplier_eval(c, (1, 1), [0.1, 0.1])


def _unconstrained_first():
    parts = (
        build_constrained(TruncatedFock(1, 3), []),
        build_constrained(TruncatedFock(2, 2), commutator_ideal(2)),
    )
    cn = ConstrainedNModule(parts)
    M = cn.random_submodule(np.random.default_rng(1), count=2)
    return parts, cn, M


def test_classification_exact_with_one_letter_first_factor():
    parts, _, M = _unconstrained_first()
    c = constrained_classify(M, parts)
    assert max(c.residuals.values()) < 1e-10, c.residuals


def test_phi_matches_least_squares_solution():
    parts, cn, M = _unconstrained_first()
    c = constrained_classify(M, parts)
    for ij in c.Phi:
        b_theta = cn.bold(*ij) @ c.Theta
        x, *_ = np.linalg.lstsq(c.Theta, b_theta, rcond=None)
        assert np.linalg.norm(b_theta - c.Theta @ x, 2) < 1e-10
        assert np.linalg.norm(c.Theta @ (x - c.Phi[ij]), 2) < 1e-10


def test_contour_coefficients_match_table():
    parts, _, M = _unconstrained_first()
    c = constrained_classify(M, parts)
    for ij in c.coeffs:
        taylor = taylor_by_contour(lambda z: da_multiplier_eval(c, ij, [z]), 0.5, 8)
        zero = np.zeros((c.E.dim, c.E.dim))
        for m in range(8):
            assert np.abs(taylor[m] - c.coeffs[ij].get(Word((1,) * m, 1), zero)).max() < 1e-12


def test_series_within_tail_bound():
    parts = (
        build_constrained(TruncatedFock(2, 3), commutator_ideal(2)),
        build_constrained(TruncatedFock(1, 2), []),
    )
    cn = ConstrainedNModule(parts)
    rng = np.random.default_rng(11)
    c = constrained_classify(cn.random_submodule(rng, count=2), parts)
    z = np.array([0.3, -0.2j])
    diff = np.linalg.norm(da_multiplier_eval(c, (2, 1), z) - da_series_eval(c, (2, 1), z), 2)
    assert diff <= da_tail_bound(z, c.d_eff) + 1e-9
    with pytest.raises(ValueError):
        da_multiplier_eval(c, (2, 1), [0.9, 0.9])


def test_non_submodule_rejected():
    cm = build_constrained(TruncatedFock(2, 2), commutator_ideal(2))
    cn = ConstrainedNModule((cm,))
    M = orthonormalize([cn.N.projector() @ cn.module.basis_vector([(1,)])])
    with pytest.raises(NotInvariantError):
        constrained_classify(M, (cm,))
    with pytest.raises(ValueError):
        constrained_classify(M, (cm,), fiber="other")
