"""Joint invariant subspaces of Fock n-modules.

The ambient space F_{n_1} ⊗ ... ⊗ F_{n_k} is read as F_{n_1} ⊗ E_n with
E_n the product of the remaining factors; Θ is the factorization over the
first factor and Φ_ij the multi-analytic maps on F_{n_1} ⊗ E that carry the
other factors' shifts through Θ.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from fockmod.blh import (
    BLHFactorization,
    MultiAnalytic,
    UniquenessResult,
    blh_from_wandering,
    synthesize,
    uniqueness_unitary,
)
from fockmod.fock import DTYPE, FockNModule, bold_creation, left_creation, word_matrix
from fockmod.modana import (
    NotInvariantError,
    TupleSystem,
    bold_system,
    canonical_unitary,
    fiber_window,
    generate_submodule,
    is_submodule,
    purity_profile,
    wandering_subspace,
)
from fockmod.subspace import EQUAL_TOL, Subspace
from fockmod.words import Word, enumerate_words


def all_bold_ops(module: FockNModule) -> list[tuple[tuple[int, int], np.ndarray]]:
    return [
        ((i, j), bold_creation(module, i, j).matrix)
        for i in range(1, module.k + 1)
        for j in range(1, module.factors[i - 1].n + 1)
    ]


def joint_invariance_residual(M: Subspace, module: FockNModule) -> float:
    ops = tuple(bold_creation(module, i, j) for (i, j), _ in all_bold_ops(module))
    return is_submodule(M, TupleSystem(ops))[1]


def permutation_indices(module: FockNModule, perm: Sequence[int]) -> np.ndarray:
    """Index map for reordering factors: new_vector = old_vector[idx]."""
    perm = [p - 1 for p in perm]
    if sorted(perm) != list(range(module.k)):
        raise ValueError(f"{[p + 1 for p in perm]} is not a permutation of 1..{module.k}")
    return np.arange(module.dim).reshape(module.shape).transpose(perm).ravel()


def permute(M: Subspace, module: FockNModule, perm: Sequence[int]) -> tuple[Subspace, FockNModule]:
    """Move factor perm[0] to the front (and so on), returning the reordered M and module."""
    idx = permutation_indices(module, perm)
    new_module = FockNModule(tuple(module.factors[p - 1] for p in perm))
    return Subspace(M.frame[idx, :], M.tol), new_module


@dataclass(frozen=True)
class PolyballClassification:
    module: FockNModule
    blh: BLHFactorization
    Phi: dict[tuple[int, int], MultiAnalytic]
    residuals: dict[str, float]
    sys1: TupleSystem = field(repr=False)

    @property
    def Theta(self) -> MultiAnalytic:
        return self.blh.Theta

    @property
    def E(self) -> Subspace:
        return self.blh.E

    @property
    def M(self) -> Subspace:
        return self.blh.M

    def to_json(self, coeff_tol: float = 1e-12) -> dict:
        return {
            "module": self.module.describe(),
            "dim_M": self.M.dim,
            "dim_E": self.E.dim,
            "residuals": dict(self.residuals),
            "theta": self.Theta.coefficient_table(coeff_tol),
            "phi": {
                f"{i},{j}": phi.coefficient_table(coeff_tol) for (i, j), phi in sorted(self.Phi.items())
            },
        }


def _phi_coefficients(
    E: Subspace, left_words: dict[Word, np.ndarray], sij: np.ndarray
) -> dict[Word, np.ndarray]:
    """φ_{ij,α^t} = P_E (word of first-factor shifts at α)* S_ij |_E."""
    ef = E.frame
    pushed = sij @ ef
    return {w.flip(): ef.conj().T @ mat.conj().T @ pushed for w, mat in left_words.items()}


def phi_coefficients_tensor(classification: PolyballClassification, i: int, j: int) -> dict[Word, np.ndarray]:
    """Coefficients from (S^α* ⊗ I_{E_n}) S_ij, built from the single-factor shifts."""
    module = classification.module
    first = module.factors[0]
    singles = [left_creation(first, a).matrix for a in range(1, first.n + 1)]
    eye = np.eye(module.rest_dim, dtype=DTYPE)
    words = {w: np.kron(word_matrix(singles, w), eye) for w in enumerate_words(first.n, first.d)}
    return _phi_coefficients(classification.E, words, bold_creation(module, i, j).matrix)


def phi_coefficients_bold(classification: PolyballClassification, i: int, j: int) -> dict[Word, np.ndarray]:
    """Coefficients from the bold word S_{n_1}^α* S_ij on the whole module."""
    module = classification.module
    first = module.factors[0]
    bold = [bold_creation(module, 1, a).matrix for a in range(1, first.n + 1)]
    words = {w: word_matrix(bold, w) for w in enumerate_words(first.n, first.d)}
    return _phi_coefficients(classification.E, words, bold_creation(module, i, j).matrix)


def polyball_classify(
    M: Subspace,
    module: FockNModule,
    tol: float = EQUAL_TOL,
    method: str = "complement",
    permutation: Sequence[int] | None = None,
) -> PolyballClassification:
    if permutation is not None:
        M, module = permute(M, module, permutation)
    if M.ambient_dim != module.dim:
        raise ValueError(f"subspace of ambient {M.ambient_dim}, module has dimension {module.dim}")
    joint = joint_invariance_residual(M, module)
    if joint > tol:
        raise NotInvariantError(joint, "subspace is not jointly invariant")
    sys1 = bold_system(module, 1)
    first = module.factors[0]
    fact = blh_from_wandering(wandering_subspace(M, sys1, tol, method), sys1, first)
    E = fact.E
    bold1 = [op.matrix for op in sys1.ops]
    words = {w: word_matrix(bold1, w) for w in enumerate_words(first.n, first.d)}
    theta = fact.Theta.matrix.matrix
    win = fact.window
    phis = {}
    inter = 0.0
    for i in range(2, module.k + 1):
        for j in range(1, module.factors[i - 1].n + 1):
            sij = bold_creation(module, i, j).matrix
            phi = synthesize(_phi_coefficients(E, words, sij), first, E.dim, E.dim)
            phis[(i, j)] = phi
            if win.shape[1]:
                diff = (sij @ theta - theta @ phi.matrix.matrix) @ win
                inter = max(inter, float(np.linalg.norm(diff, 2)))
    residuals = {
        "joint_invariance": joint,
        "theta_inner": fact.inner_residual,
        "theta_range": fact.range_distance,
        "theta_intertwining": fact.intertwining_residual,
        "phi_intertwining": inter,
    }
    out = PolyballClassification(module, fact, phis, residuals, sys1)
    out.residuals["phi_row_isometry"] = max(phi_row_isometry_check(out).values(), default=0.0)
    return out


def _factor_mask(c: PolyballClassification, i: int, hi: int) -> np.ndarray:
    return c.module.factor_degrees[i - 1] <= hi


def phi_row_isometry_check(c: PolyballClassification) -> dict[int, float]:
    """For each factor i ≥ 2, max_{p,q} ‖(Φ_ip* Φ_iq - δ_pq I) W_i‖.

    W_i is the Θ-window further cut to factor-i degree ≤ d_i - 1, where the
    factor-i shifts are isometric.
    """
    out = {}
    first = c.module.factors[0]
    for i in range(2, c.module.k + 1):
        ni = c.module.factors[i - 1].n
        mask = _factor_mask(c, i, c.module.factors[i - 1].d - 1)
        win = fiber_window(c.E, c.sys1, first.d, mask=mask)
        worst = 0.0
        if win.shape[1]:
            for p in range(1, ni + 1):
                for q in range(1, ni + 1):
                    a = c.Phi[(i, p)].matrix.matrix
                    b = c.Phi[(i, q)].matrix.matrix
                    target = win if p == q else 0 * win
                    worst = max(worst, float(np.linalg.norm(a.conj().T @ b @ win - target, 2)))
        out[i] = worst
    return out


def joint_equivalence_check(M: Subspace, c: PolyballClassification) -> float:
    """max residual of L X L* against its model (S ⊗ I_E or Φ_ij) on the window.

    The window is total degree |α| + (first-factor degree of the fiber) ≤ d_1 - 1.
    """
    if M.ambient_dim != c.module.dim:
        raise ValueError("subspace does not match the classified module")
    first = c.module.factors[0]
    L = canonical_unitary(M, c.sys1, first.d, E=c.E).matrix
    win = fiber_window(c.E, c.sys1, first.d, slack=1)
    if not win.shape[1]:
        return 0.0
    k = c.E.dim
    eye = np.eye(k, dtype=DTYPE)
    pairs = []
    for j in range(1, first.n + 1):
        model = np.kron(left_creation(first, j).matrix, eye)
        pairs.append((bold_creation(c.module, 1, j).matrix, model))
    for (i, j), phi in c.Phi.items():
        pairs.append((bold_creation(c.module, i, j).matrix, phi.matrix.matrix))
    worst = 0.0
    for op, model in pairs:
        diff = (L @ op @ L.conj().T - model) @ win
        worst = max(worst, float(np.linalg.norm(diff, 2)))
    return worst


def phi_purity(c: PolyballClassification, i: int, m_max: int) -> list[float]:
    ni = c.module.factors[i - 1].n
    return purity_profile([c.Phi[(i, j)].matrix.matrix for j in range(1, ni + 1)], m_max)


@dataclass(frozen=True)
class PolyballUniqueness:
    theta: UniquenessResult
    phi_residual: float

    @property
    def tau(self) -> np.ndarray:
        return self.theta.tau

    def to_json(self) -> dict:
        return {**self.theta.to_json(), "phi_residual": self.phi_residual}


def polyball_uniqueness(
    c1: PolyballClassification, c2: PolyballClassification, tol: float = EQUAL_TOL
) -> PolyballUniqueness:
    """τ with Θ2 = Θ1 (I ⊗ τ); then Φ1_ij (I ⊗ τ) = (I ⊗ τ) Φ2_ij coefficientwise."""
    res = uniqueness_unitary(c1.blh, c2.blh, tol)
    tau = res.tau
    worst = 0.0
    for key, phi1 in c1.Phi.items():
        phi2 = c2.Phi[key]
        for w, a in phi1.coeffs.items():
            worst = max(worst, float(np.linalg.norm(a @ tau - tau @ phi2.coefficient(w), 2)))
    return PolyballUniqueness(res, worst)


@dataclass(frozen=True)
class PolydiscClassification:
    E: Subspace
    theta: list[np.ndarray]
    phi: dict[int, list[np.ndarray]]


def polydisc_direct(M: Subspace, ds: Sequence[int], tol: float = EQUAL_TOL) -> PolydiscClassification:
    """Classification over z_1 on the truncated polydisc, using monomial shifts only.

    Works with coefficient arrays c[a_1, ..., a_k] of polynomials in k commuting
    variables with a_i ≤ d_i.  E is ⋂ ker (z_1|_M)*, θ_m η is the z_1^m slice of η
    and φ_{i,m} = P_E (z_1*)^m z_i |_E.
    """
    shape = tuple(d + 1 for d in ds)
    size = int(np.prod(shape))
    if M.ambient_dim != size:
        raise ValueError("subspace does not match the polydisc truncation")

    def mult(i: int, v: np.ndarray) -> np.ndarray:
        arr = v.reshape(shape)
        out = np.zeros_like(arr)
        src = [slice(None)] * len(shape)
        dst = [slice(None)] * len(shape)
        src[i] = slice(0, shape[i] - 1)
        dst[i] = slice(1, shape[i])
        out[tuple(dst)] = arr[tuple(src)]
        return out.ravel()

    def mult_adj(i: int, v: np.ndarray) -> np.ndarray:
        arr = v.reshape(shape)
        out = np.zeros_like(arr)
        src = [slice(None)] * len(shape)
        dst = [slice(None)] * len(shape)
        src[i] = slice(1, shape[i])
        dst[i] = slice(0, shape[i] - 1)
        out[tuple(dst)] = arr[tuple(src)]
        return out.ravel()

    f = M.frame
    z1_on_m = np.column_stack([mult(0, f[:, c]) for c in range(M.dim)]) if M.dim else f
    restricted_adj = (f.conj().T @ z1_on_m).conj().T
    _, s, vh = np.linalg.svd(restricted_adj, full_matrices=True)
    s_full = np.zeros(M.dim)
    s_full[: s.size] = s
    null = vh.conj().T[:, s_full <= M.tol * max(restricted_adj.shape, default=1)]
    E = Subspace(f @ null, M.tol)
    ef = E.frame
    theta = []
    for m in range(shape[0]):
        sl = np.array([ef[:, c].reshape(shape)[m].ravel() for c in range(E.dim)]).T
        theta.append(sl.reshape(-1, E.dim))
    phi = {}
    for i in range(1, len(shape)):
        coeffs = []
        for m in range(shape[0]):
            cols = []
            for c in range(E.dim):
                v = mult(i, ef[:, c])
                for _ in range(m):
                    v = mult_adj(0, v)
                cols.append(ef.conj().T @ v)
            coeffs.append(np.column_stack(cols) if cols else np.zeros((0, 0), dtype=DTYPE))
        phi[i + 1] = coeffs
    return PolydiscClassification(E, theta, phi)


def polydisc_cross_check(c: PolyballClassification, direct: PolydiscClassification) -> float:
    """Compare a classification over all-ones alphabets with the direct polydisc one."""
    if any(f.n != 1 for f in c.module.factors):
        raise ValueError("the polydisc cross-check needs every alphabet of size one")
    if direct.E.dim != c.E.dim:
        return float("inf")
    tau = c.E.frame.conj().T @ direct.E.frame
    worst = float(np.linalg.norm(tau.conj().T @ tau - np.eye(c.E.dim), 2)) if c.E.dim else 0.0
    for m, th in enumerate(direct.theta):
        ours = c.Theta.coefficient(Word((1,) * m, 1))
        worst = max(worst, float(np.linalg.norm(th - ours @ tau, 2)))
    for i, coeffs in direct.phi.items():
        for m, ph in enumerate(coeffs):
            ours = c.Phi[(i, 1)].coefficient(Word((1,) * m, 1))
            worst = max(worst, float(np.linalg.norm(ph - tau.conj().T @ ours @ tau, 2)))
    return worst


def random_joint_submodule(
    module: FockNModule, rng: np.random.Generator, count: int = 2, max_degree: int = 1
) -> Subspace:
    """Submodule generated by random vectors, each homogeneous in every factor."""
    gens = []
    for _ in range(count):
        target = [int(rng.integers(0, max_degree + 1)) for _ in module.factors]
        mask = np.ones(module.dim, dtype=bool)
        for deg, fd in zip(target, module.factor_degrees):
            mask &= fd == deg
        v = np.zeros(module.dim, dtype=DTYPE)
        v[mask] = rng.normal(size=mask.sum()) + 1j * rng.normal(size=mask.sum())
        gens.append(v)
    ops = tuple(bold_creation(module, i, j) for (i, j), _ in all_bold_ops(module))
    return generate_submodule(TupleSystem(ops), gens)
