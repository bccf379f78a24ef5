"""Multi-analytic operators and the Beurling-Lax-Halmos factorization.

Coefficient convention: Θ = Σ_β R^β ⊗ θ_β, and θ_β is read from the vacuum
column block of Θ at the row block e_{β^t}, because R^β 1 = e_{β^t}.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from fockmod.fock import DTYPE, OperatorMatrix, TruncatedFock, left_creation, right_creation, word_matrix
from fockmod.modana import (
    NotInvariantError,
    SubmoduleAnalysis,
    TupleSystem,
    canonical_unitary,
    fiber_window,
    shift_system,
    support_degree,
    wandering_subspace,
)
from fockmod.subspace import EQUAL_TOL, Subspace, distance, orthonormalize, restrict_to_coordinates
from fockmod.words import Word, enumerate_words


class NotModuleMapError(ValueError):
    def __init__(self, residual: float) -> None:
        super().__init__(f"matrix does not intertwine the shifts (residual {residual:.3e})")
        self.residual = residual


class UniquenessError(ValueError):
    pass


def _right_words(space: TruncatedFock) -> list[np.ndarray]:
    return [right_creation(space, i).matrix for i in range(1, space.n + 1)]


@dataclass(frozen=True)
class MultiAnalytic:
    coeffs: dict[Word, np.ndarray]
    source_dim: int
    target_dim: int
    space: TruncatedFock
    matrix: OperatorMatrix
    diagnostics: dict = field(default_factory=dict, compare=False)

    @property
    def max_degree(self) -> int:
        nonzero = [len(w) for w, c in self.coeffs.items() if np.any(c != 0)]
        return max(nonzero, default=0)

    def coefficient(self, w: Word | tuple[int, ...]) -> np.ndarray:
        if not isinstance(w, Word):
            w = Word(tuple(w), self.space.n)
        zero = np.zeros((self.target_dim, self.source_dim), dtype=DTYPE)
        return self.coeffs.get(w, zero)

    def coefficient_table(self, tol: float = 0.0) -> list[dict]:
        rows = []
        for w in sorted(self.coeffs, key=lambda x: (len(x), x.letters)):
            c = self.coeffs[w]
            if np.max(np.abs(c), initial=0.0) <= tol:
                continue
            rows.append({"word": w.to_json(), "re": c.real.tolist(), "im": c.imag.tolist()})
        return rows


def synthesize(
    coeffs: dict[Word, np.ndarray], space: TruncatedFock, source_dim: int, target_dim: int
) -> MultiAnalytic:
    """Σ_β R^β ⊗ θ_β on F_{n,d} ⊗ C^source -> F_{n,d} ⊗ C^target."""
    rs = _right_words(space)
    mat = np.zeros((space.dim * target_dim, space.dim * source_dim), dtype=DTYPE)
    clean = {}
    top = 0
    for w, c in coeffs.items():
        c = np.asarray(c, dtype=DTYPE)
        if c.shape != (target_dim, source_dim):
            raise ValueError(f"coefficient {w} has shape {c.shape}, expected {(target_dim, source_dim)}")
        if len(w) > space.d:
            raise ValueError(f"coefficient {w} exceeds truncation degree {space.d}")
        clean[w] = c
        if np.any(c != 0):
            top = max(top, len(w))
        mat += np.kron(word_matrix(rs, w), c)
    desc = space.describe()
    op = OperatorMatrix(
        mat, (space.d - top,), (top,), (space.d,),
        {**desc, "coeff_dim": source_dim}, {**desc, "coeff_dim": target_dim},
    )
    return MultiAnalytic(clean, source_dim, target_dim, space, op)


def intertwining_residual(matrix: np.ndarray, space: TruncatedFock, source_dim: int, target_dim: int) -> float:
    """max_i ‖Θ (S_i ⊗ I) - (S_i ⊗ I) Θ‖."""
    mat = matrix.matrix if isinstance(matrix, OperatorMatrix) else np.asarray(matrix)
    resid = 0.0
    for i in range(1, space.n + 1):
        s = left_creation(space, i).matrix
        lhs = mat @ np.kron(s, np.eye(source_dim))
        rhs = np.kron(s, np.eye(target_dim)) @ mat
        resid = max(resid, float(np.linalg.norm(lhs - rhs, 2)))
    return resid


def fourier_coefficients(
    theta: OperatorMatrix | np.ndarray,
    space: TruncatedFock,
    source_dim: int,
    target_dim: int,
    max_deg: int | None = None,
    tol: float = EQUAL_TOL,
) -> dict[Word, np.ndarray]:
    """θ_β for |β| ≤ max_deg, with ⟨θ_β η, ζ⟩ = ⟨Θ(1 ⊗ η), e_{β^t} ⊗ ζ⟩."""
    mat = theta.matrix if isinstance(theta, OperatorMatrix) else np.asarray(theta, dtype=DTYPE)
    expected = (space.dim * target_dim, space.dim * source_dim)
    if mat.shape != expected:
        raise ValueError(f"matrix of shape {mat.shape}, expected {expected}")
    resid = intertwining_residual(mat, space, source_dim, target_dim)
    if resid > tol:
        raise NotModuleMapError(resid)
    if max_deg is None:
        max_deg = space.d
    vac_cols = mat[:, :source_dim]  # the vacuum has index 0
    out = {}
    for w in enumerate_words(space.n, max_deg):
        row = space.index(w.flip()) * target_dim
        out[w] = vac_cols[row : row + target_dim, :].copy()
    return out


def analyze(
    theta: OperatorMatrix | np.ndarray, space: TruncatedFock, source_dim: int, target_dim: int,
    tol: float = EQUAL_TOL,
) -> MultiAnalytic:
    """Fourier coefficients of a module map, packaged with the map itself."""
    coeffs = fourier_coefficients(theta, space, source_dim, target_dim, tol=tol)
    mat = theta if isinstance(theta, OperatorMatrix) else OperatorMatrix(
        np.asarray(theta, dtype=DTYPE), (space.d,), (0,), (space.d,)
    )
    return MultiAnalytic(coeffs, source_dim, target_dim, space, mat)


@dataclass(frozen=True)
class BLHFactorization:
    Theta: MultiAnalytic
    M: Subspace
    E: Subspace
    window: np.ndarray
    inner_residual: float
    range_distance: float
    intertwining_residual: float
    d_eff: int

    @property
    def dim_E(self) -> int:
        return self.E.dim

    def to_json(self, coeff_tol: float = 1e-12) -> dict:
        return {
            "dim_M": self.M.dim,
            "dim_E": self.E.dim,
            "d_eff": self.d_eff,
            "inner_residual": self.inner_residual,
            "range_distance": self.range_distance,
            "intertwining_residual": self.intertwining_residual,
            "coefficients": self.Theta.coefficient_table(coeff_tol),
        }


def blh_from_wandering(analysis: SubmoduleAnalysis, sys: TupleSystem, space: TruncatedFock) -> BLHFactorization:
    M, E = analysis.M, analysis.E
    coeff_dim = sys.dim // space.dim
    L = canonical_unitary(M, sys, target_degree=space.d, E=E)
    theta = L.matrix.conj().T
    desc = space.describe()
    d_eff = space.d - max(support_degree(E, sys), 0)
    op = OperatorMatrix(
        theta, (d_eff,), (0,), (space.d,), {**desc, "coeff_dim": E.dim}, {**desc, "coeff_dim": coeff_dim}
    )
    coeffs = fourier_coefficients(op, space, E.dim, coeff_dim)
    Theta = MultiAnalytic(coeffs, E.dim, coeff_dim, space, op)
    win = fiber_window(E, sys, space.d)
    if win.shape[1]:
        gram = theta.conj().T @ theta
        inner = float(np.linalg.norm(gram @ win - win, 2))
    else:
        inner = 0.0
    rng = orthonormalize(theta @ win, M.tol, ambient_dim=sys.dim)
    return BLHFactorization(
        Theta, M, E, win, inner, distance(rng, M),
        intertwining_residual(theta, space, E.dim, coeff_dim), d_eff,
    )


def blh_factorize(
    M: Subspace,
    coeff_dim: int,
    space: TruncatedFock,
    tol: float = EQUAL_TOL,
    method: str = "complement",
) -> BLHFactorization:
    """Inner Θ: F ⊗ E -> F ⊗ C^k with range M, E the wandering subspace of M.

    ``method`` selects how the basis of E is produced (see
    :func:`wandering_subspace`); different bases give factorizations that
    differ by a constant unitary.
    """
    sys = shift_system(space, coeff_dim)
    if M.ambient_dim != sys.dim:
        raise ValueError(f"subspace of ambient {M.ambient_dim}, expected {sys.dim}")
    analysis = wandering_subspace(M, sys, tol, method)
    return blh_from_wandering(analysis, sys, space)


def commutant_represent(
    C: OperatorMatrix | np.ndarray,
    M: Subspace,
    sys: TupleSystem,
    target_degree: int | None = None,
    E: Subspace | None = None,
    tol: float = EQUAL_TOL,
) -> MultiAnalytic:
    """Φ with φ_{α^t} = P_E V^α* C|_E, for C commuting with the tuple V = X|_M.

    The commutation defect is measured on M ∩ (degree ≤ top - 1), where the
    truncated tuple agrees with the untruncated one.  ``diagnostics`` holds
    that defect and ‖(L C L* - Φ) W‖ on the fiber window W.
    """
    cm = C.matrix if isinstance(C, OperatorMatrix) else np.asarray(C, dtype=DTYPE)
    if E is None:
        E = wandering_subspace(M, sys, tol).E
    if target_degree is None:
        target_degree = sys.top - max(support_degree(E, sys), 0)
    low = restrict_to_coordinates(M, sys.degree_window(0, sys.top - 1))
    comm = 0.0
    inv = 0.0
    pm = M.projector()
    for x in sys.matrices:
        if low.dim:
            comm = max(comm, float(np.linalg.norm((cm @ x - x @ cm) @ low.frame, 2)))
    if M.dim:
        inv = float(np.linalg.norm(cm @ M.frame - pm @ cm @ M.frame, 2))
    if max(comm, inv) > tol:
        raise NotInvariantError(max(comm, inv), "operator does not commute with the tuple on M")
    space = TruncatedFock(sys.n, target_degree)
    k = E.dim
    coeffs = {}
    ce = cm @ E.frame
    for w in enumerate_words(sys.n, target_degree):
        coeffs[w.flip()] = E.frame.conj().T @ word_matrix(sys.matrices, w).conj().T @ ce
    phi = synthesize(coeffs, space, k, k)
    L = canonical_unitary(M, sys, target_degree, E=E)
    lcl = L.matrix @ cm @ L.matrix.conj().T
    win = fiber_window(E, sys, target_degree)
    # only rows whose word length leaves room for the degree C raises are exact
    rep = float(np.linalg.norm((lcl - phi.matrix.matrix) @ win, 2)) if win.shape[1] else 0.0
    diag = {"commutation_residual": comm, "invariance_residual": inv, "representation_residual": rep}
    return MultiAnalytic(phi.coeffs, k, k, space, phi.matrix, diag)


@dataclass(frozen=True)
class UniquenessResult:
    tau: np.ndarray
    residual: float
    unitarity_residual: float
    coanalytic_residual: float

    def to_json(self) -> dict:
        return {
            "tau_shape": list(self.tau.shape),
            "residual": self.residual,
            "unitarity_residual": self.unitarity_residual,
            "coanalytic_residual": self.coanalytic_residual,
        }


def uniqueness_unitary(f1: BLHFactorization, f2: BLHFactorization, tol: float = EQUAL_TOL) -> UniquenessResult:
    """τ with Θ2 = Θ1 (I ⊗ τ), read from the vacuum block of Θ1* Θ2."""
    if f1.M.ambient_dim != f2.M.ambient_dim:
        raise UniquenessError("factorizations live in different spaces")
    gap = distance(f1.M, f2.M)
    if gap > tol:
        raise UniquenessError(f"ranges differ (distance {gap:.3e})")
    if f1.E.dim != f2.E.dim:
        raise UniquenessError(f"wandering dimensions differ: {f1.E.dim} vs {f2.E.dim}")
    t1 = f1.Theta.matrix.matrix
    t2 = f2.Theta.matrix.matrix
    k1, k2 = f1.E.dim, f2.E.dim
    K = t1.conj().T @ t2
    tau = K[:k1, :k2].copy()
    eye = np.eye(k1, dtype=DTYPE)
    unit = max(
        float(np.linalg.norm(tau.conj().T @ tau - eye, 2)) if k1 else 0.0,
        float(np.linalg.norm(tau @ tau.conj().T - eye, 2)) if k1 else 0.0,
    )
    dim = f1.Theta.space.dim
    resid = float(np.linalg.norm(t2 - t1 @ np.kron(np.eye(dim), tau), 2)) if k1 else 0.0
    coan = float(np.linalg.norm(K[k1:, :k2], 2)) if k1 and K.shape[0] > k1 else 0.0
    if unit > tol:
        raise UniquenessError(f"vacuum block is not unitary (residual {unit:.3e})")
    return UniquenessResult(tau, resid, unit, coan)
