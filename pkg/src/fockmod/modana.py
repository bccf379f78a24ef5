"""Submodules of tuples of operators: generation, wandering subspaces, purity.

A :class:`TupleSystem` carries, besides the operators, the degree of every
ambient basis index with respect to the grading the tuple raises.  All window
computations (where truncated identities hold exactly) are driven by it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from fockmod.fock import (
    DTYPE,
    FockNModule,
    OperatorMatrix,
    TruncatedFock,
    bold_creation,
    left_creation,
    word_matrix,
)
from fockmod.subspace import (
    DEFAULT_TOL,
    EQUAL_TOL,
    Subspace,
    complement_within,
    distance,
    orthonormalize,
    restrict_to_coordinates,
)
from fockmod.words import Word, enumerate_words


class NotInvariantError(ValueError):
    def __init__(self, residual: float, message: str = "subspace is not invariant") -> None:
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class NotIsometricError(ValueError):
    def __init__(self, residual: float) -> None:
        super().__init__(f"restricted tuple is not isometric on its window (residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class TupleSystem:
    ops: tuple[OperatorMatrix, ...]
    space: dict = field(default_factory=dict)
    degrees: np.ndarray | None = None
    top: int | None = None

    def __post_init__(self) -> None:
        ops = tuple(self.ops)
        if not ops:
            raise ValueError("a tuple system needs at least one operator")
        size = ops[0].matrix.shape[0]
        for op in ops:
            if op.matrix.shape != (size, size):
                raise ValueError("operators must be square and share one space")
        object.__setattr__(self, "ops", ops)
        if self.degrees is not None:
            deg = np.asarray(self.degrees, dtype=int)
            if deg.shape != (size,):
                raise ValueError("degree array does not match the ambient dimension")
            object.__setattr__(self, "degrees", deg)
            if self.top is None:
                object.__setattr__(self, "top", int(deg.max()))

    @property
    def n(self) -> int:
        return len(self.ops)

    @property
    def dim(self) -> int:
        return self.ops[0].matrix.shape[0]

    @property
    def matrices(self) -> list[np.ndarray]:
        return [op.matrix for op in self.ops]

    def degree_window(self, lo: int, hi: int) -> np.ndarray:
        if self.degrees is None:
            raise ValueError("tuple system carries no grading")
        return (self.degrees >= lo) & (self.degrees <= hi)


def shift_system(space: TruncatedFock, coeff_dim: int = 1) -> TupleSystem:
    """S ⊗ I_k on F_{n,d} ⊗ C^k."""
    ops = tuple(left_creation(space, i).tensor_identity(coeff_dim) for i in range(1, space.n + 1))
    desc = {**space.describe(), "coeff_dim": coeff_dim}
    return TupleSystem(ops, desc, np.repeat(space.degrees, coeff_dim), space.d)


def bold_system(module: FockNModule, i: int) -> TupleSystem:
    """The tuple (S_i1, ..., S_in_i) acting on factor i of a Fock n-module."""
    factor = module.factors[i - 1]
    ops = tuple(bold_creation(module, i, j) for j in range(1, factor.n + 1))
    return TupleSystem(ops, {**module.describe(), "factor": i}, module.factor_degrees[i - 1], factor.d)


def restricted_matrices(M: Subspace, sys: TupleSystem) -> list[np.ndarray]:
    """Matrices of P_M X_i|_M in the coordinates of M's frame."""
    f = M.frame
    return [f.conj().T @ x @ f for x in sys.matrices]


def restricted_system(M: Subspace, sys: TupleSystem) -> TupleSystem:
    mats = restricted_matrices(M, sys)
    ops = tuple(OperatorMatrix(m, (0,), (1,), (0,)) for m in mats)
    return TupleSystem(ops, {"restricted_to": M.dim})


def generate_submodule(sys: TupleSystem, generators, tol: float = DEFAULT_TOL) -> Subspace:
    """Closed span of X^alpha g_j, grown one letter at a time until it stabilizes."""
    gens = list(generators) if not isinstance(generators, np.ndarray) else list(generators.T)
    if not gens:
        return Subspace.zero(sys.dim, tol)
    for g in gens:
        if len(g) != sys.dim:
            raise ValueError(f"generator of length {len(g)} in a space of dimension {sys.dim}")
    current = orthonormalize(gens, tol, ambient_dim=sys.dim)
    frontier = current.frame
    while frontier.shape[1]:
        grown = np.hstack([current.frame] + [x @ frontier for x in sys.matrices])
        nxt = orthonormalize(grown, tol)
        if nxt.dim == current.dim:
            break
        frontier = complement_within(nxt, current).frame
        current = nxt
    return current


def is_submodule(M: Subspace, sys: TupleSystem, tol: float = EQUAL_TOL) -> tuple[bool, float]:
    """(X_i M ⊆ M for all i, max_i ‖(I - P_M) X_i P_M‖)."""
    if M.ambient_dim != sys.dim:
        raise ValueError("subspace and tuple live in different spaces")
    if M.dim == 0:
        return True, 0.0
    f = M.frame
    resid = 0.0
    for x in sys.matrices:
        y = x @ f
        y = y - f @ (f.conj().T @ y)
        resid = max(resid, float(np.linalg.norm(y, 2)) if y.size else 0.0)
    return resid < tol, resid


@dataclass(frozen=True)
class SubmoduleAnalysis:
    M: Subspace
    E: Subspace
    residual: float

    def to_json(self) -> dict:
        return {"dim_M": self.M.dim, "dim_E": self.E.dim, "invariance_residual": self.residual}


def wandering_subspace(
    M: Subspace, sys: TupleSystem, tol: float = EQUAL_TOL, method: str = "complement"
) -> SubmoduleAnalysis:
    """E = M ⊖ Σ X_i M.

    ``method="kernel"`` computes the same space as ⋂ ker (X_i|_M)* in the
    coordinates of M, which gives a different orthonormal basis of E.
    """
    ok, resid = is_submodule(M, sys, tol)
    if not ok:
        raise NotInvariantError(resid)
    if M.dim == 0:
        return SubmoduleAnalysis(M, M, resid)
    if method == "complement":
        pushed = orthonormalize(np.hstack([x @ M.frame for x in sys.matrices]), M.tol)
        E = complement_within(M, pushed)
    elif method == "kernel":
        stacked = np.vstack([v.conj().T for v in restricted_matrices(M, sys)])
        _, s, vh = np.linalg.svd(stacked, full_matrices=True)
        s_full = np.zeros(M.dim)
        s_full[: min(s.size, M.dim)] = s[: M.dim]
        keep = s_full <= M.tol * max(stacked.shape)
        null = vh.conj().T[:, keep]
        # reverse the column order so the basis differs from the complement route
        E = Subspace(M.frame @ null[:, ::-1], M.tol)
    else:
        raise ValueError(f"unknown method {method!r}")
    return SubmoduleAnalysis(M, E, resid)


def purity_profile(sys: TupleSystem | Sequence[np.ndarray], m_max: int) -> list[float]:
    """Entry m is ‖Σ_{|α|=m} X^α X^α*‖, computed by iterating Q(A) = Σ X_i A X_i*."""
    if m_max < 0:
        raise ValueError("m_max must be nonnegative")
    mats = sys.matrices if isinstance(sys, TupleSystem) else [np.asarray(x) for x in sys]
    size = mats[0].shape[0]
    acc = np.eye(size, dtype=DTYPE)
    out = []
    for m in range(m_max + 1):
        out.append(float(np.linalg.norm(acc, 2)) if size else 0.0)
        if m < m_max:
            acc = sum(x @ acc @ x.conj().T for x in mats)
    return out


def support_degree(E: Subspace, sys: TupleSystem, tol: float = 1e-12) -> int:
    """Largest grading degree on which some vector of E has weight."""
    if E.dim == 0:
        return -1
    weight = np.linalg.norm(E.frame, axis=1)
    return int(sys.degrees[weight > tol].max())


def fiber_window(
    E: Subspace,
    sys: TupleSystem,
    target_degree: int,
    slack: int = 0,
    mask: np.ndarray | None = None,
) -> np.ndarray:
    """Frame, in F_{n,target} ⊗ E coordinates, of ⊕_α e_α ⊗ (E ∩ degree ≤ top - slack - |α|).

    ``mask`` further restricts the fiber vectors to a set of ambient coordinates.
    """
    words = enumerate_words(sys.n, target_degree)
    k = E.dim
    blocks = {}
    cols = []
    for a_idx, w in enumerate(words):
        room = sys.top - slack - len(w)
        if room not in blocks:
            allowed = sys.degree_window(0, room)
            if mask is not None:
                allowed = allowed & mask
            part = restrict_to_coordinates(E, allowed)
            blocks[room] = E.frame.conj().T @ part.frame
        sub = blocks[room]
        for c in range(sub.shape[1]):
            col = np.zeros(len(words) * k, dtype=DTYPE)
            col[a_idx * k : (a_idx + 1) * k] = sub[:, c]
            cols.append(col)
    if not cols:
        return np.zeros((len(words) * k, 0), dtype=DTYPE)
    return np.column_stack(cols)


def canonical_unitary(
    M: Subspace,
    sys: TupleSystem,
    target_degree: int | None = None,
    E: Subspace | None = None,
    check_tol: float = EQUAL_TOL,
) -> OperatorMatrix:
    """L f = Σ_{|α| ≤ t} e_α ⊗ P_E X^α* f, as a map from the ambient space to F_{n,t} ⊗ E.

    Columns indexed by the ambient space; restrict to M by composing with
    M's frame.  Raises :class:`NotIsometricError` when L is not isometric on
    the window spanned by X^α E.
    """
    if E is None:
        E = wandering_subspace(M, sys, check_tol).E
    if sys.degrees is None:
        raise ValueError("canonical_unitary needs a graded tuple system")
    if target_degree is None:
        target_degree = sys.top - max(support_degree(E, sys), 0)
    if not 0 <= target_degree <= sys.top:
        raise ValueError(f"target degree {target_degree} outside 0..{sys.top}")
    words = enumerate_words(sys.n, target_degree)
    k = E.dim
    rows = np.zeros((len(words) * k, sys.dim), dtype=DTYPE)
    ef = E.frame.conj().T
    for a_idx, w in enumerate(words):
        rows[a_idx * k : (a_idx + 1) * k, :] = ef @ word_matrix(sys.matrices, w).conj().T
    win = fiber_window(E, sys, target_degree)
    if win.shape[1]:
        gram = rows @ rows.conj().T
        resid = float(np.linalg.norm(gram @ win - win, 2))
        if resid > check_tol:
            raise NotIsometricError(resid)
    space = TruncatedFock(sys.n, target_degree)
    codomain = {**space.describe(), "coeff_dim": k}
    d_eff = target_degree - max(support_degree(E, sys), 0)
    return OperatorMatrix(
        rows, (max(d_eff, 0),), (0,), (target_degree,), dict(sys.space), codomain
    )


def is_reducing_constant(
    M: Subspace, space: TruncatedFock, coeff_dim: int, tol: float = EQUAL_TOL
) -> Subspace | None:
    """K ⊆ C^k with M = F ⊗ K when M reduces S ⊗ I, otherwise None."""
    sys = shift_system(space, coeff_dim)
    if M.ambient_dim != sys.dim:
        raise ValueError("subspace does not live in F_{n,d} ⊗ C^k")
    if M.dim == 0:
        return Subspace.zero(coeff_dim, M.tol)
    ok, _ = is_submodule(M, sys, tol)
    adj = TupleSystem(tuple(op.adjoint() for op in sys.ops))
    ok_adj, _ = is_submodule(M, adj, tol)
    if not (ok and ok_adj):
        return None
    # vacuum ⊗ c sits in the first k coordinates
    vac = restrict_to_coordinates(M, np.arange(sys.dim) < coeff_dim)
    K = orthonormalize(vac.frame[:coeff_dim, :], M.tol, ambient_dim=coeff_dim)
    full = Subspace(np.kron(np.eye(space.dim, dtype=DTYPE), K.frame), M.tol)
    if distance(full, M) >= tol:
        return None
    return K


def grading_blocks(E: Subspace, sys: TupleSystem, max_len: int) -> dict[Word, Subspace]:
    """image(X^α, E) for |α| ≤ max_len."""
    out = {}
    for w in enumerate_words(sys.n, max_len):
        out[w] = orthonormalize(word_matrix(sys.matrices, w) @ E.frame, E.tol, ambient_dim=sys.dim)
    return out
