"""Orthonormal-frame arithmetic for finite-dimensional subspaces.

Rank is decided by an SVD threshold ``tol * sigma_max * max(rows, cols)``.
When frames are compared against each other (complements, intersections),
the singular values are cosines or sines of principal angles and live on a
unit scale, so ``sigma_max`` is replaced by 1 there.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np

from fockmod.fock import DTYPE, OperatorMatrix

DEFAULT_TOL = 1e-10
EQUAL_TOL = 1e-8


@dataclass(frozen=True)
class Subspace:
    frame: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self) -> None:
        frame = np.asarray(self.frame, dtype=DTYPE)
        if frame.ndim != 2:
            raise ValueError(f"frame must be 2-d, got shape {frame.shape}")
        object.__setattr__(self, "frame", frame)

    @classmethod
    def zero(cls, ambient_dim: int, tol: float = DEFAULT_TOL) -> Subspace:
        return cls(np.zeros((ambient_dim, 0), dtype=DTYPE), tol)

    @classmethod
    def full(cls, ambient_dim: int, tol: float = DEFAULT_TOL) -> Subspace:
        return cls(np.eye(ambient_dim, dtype=DTYPE), tol)

    @property
    def dim(self) -> int:
        return self.frame.shape[1]

    @property
    def ambient_dim(self) -> int:
        return self.frame.shape[0]

    def projector(self) -> np.ndarray:
        return self.frame @ self.frame.conj().T

    def coords(self, v: np.ndarray) -> np.ndarray:
        return self.frame.conj().T @ v

    def contains(self, v: np.ndarray, tol: float = EQUAL_TOL) -> bool:
        v = np.asarray(v, dtype=DTYPE)
        scale = max(np.linalg.norm(v), 1.0)
        return np.linalg.norm(v - self.frame @ self.coords(v)) <= tol * scale

    def orthonormality_defect(self) -> float:
        if self.dim == 0:
            return 0.0
        g = self.frame.conj().T @ self.frame
        return float(np.linalg.norm(g - np.eye(self.dim), 2))


def _as_columns(vectors, ambient_dim: int | None) -> np.ndarray:
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        return vectors.astype(DTYPE, copy=False)
    vecs = list(vectors)
    if not vecs:
        if ambient_dim is None:
            raise ValueError("ambient_dim is required for an empty vector list")
        return np.zeros((ambient_dim, 0), dtype=DTYPE)
    size = len(vecs[0])
    for v in vecs:
        if len(v) != size:
            raise ValueError("vectors do not share an ambient dimension")
    return np.column_stack([np.asarray(v, dtype=DTYPE) for v in vecs])


def _rank(s: np.ndarray, shape: tuple[int, int], tol: float, scale: float | None = None) -> int:
    if s.size == 0:
        return 0
    ref = s[0] if scale is None else scale
    if ref == 0:
        return 0
    return int(np.sum(s > tol * ref * max(shape)))


def orthonormalize(vectors, tol: float = DEFAULT_TOL, ambient_dim: int | None = None) -> Subspace:
    """Orthonormal frame for the span of ``vectors`` (list of vectors or columns)."""
    mat = _as_columns(vectors, ambient_dim)
    if mat.shape[1] == 0:
        return Subspace.zero(mat.shape[0], tol)
    u, s, _ = np.linalg.svd(mat, full_matrices=False)
    r = _rank(s, mat.shape, tol)
    return Subspace(u[:, :r], tol)


def _check_same_ambient(a: Subspace, b: Subspace) -> None:
    if a.ambient_dim != b.ambient_dim:
        raise ValueError(f"ambient mismatch: {a.ambient_dim} vs {b.ambient_dim}")


def complement_within(a: Subspace, b: Subspace) -> Subspace:
    """A ⊖ P_A B, the part of A orthogonal to B."""
    _check_same_ambient(a, b)
    if a.dim == 0 or b.dim == 0:
        return a
    c = a.frame.conj().T @ b.frame
    u, s, _ = np.linalg.svd(c, full_matrices=True)
    r = _rank(s, (a.ambient_dim, a.dim + b.dim), a.tol, scale=1.0)
    return Subspace(a.frame @ u[:, r:], a.tol)


def image(op: OperatorMatrix | np.ndarray, a: Subspace) -> Subspace:
    mat = op.matrix if isinstance(op, OperatorMatrix) else np.asarray(op)
    if mat.shape[1] != a.ambient_dim:
        raise ValueError(f"operator of shape {mat.shape} applied to ambient {a.ambient_dim}")
    return orthonormalize(mat @ a.frame, a.tol, ambient_dim=mat.shape[0])


def span_sum(*spaces: Subspace) -> Subspace:
    if not spaces:
        raise ValueError("span_sum needs at least one subspace")
    for s in spaces[1:]:
        _check_same_ambient(spaces[0], s)
    return orthonormalize(np.hstack([s.frame for s in spaces]), spaces[0].tol)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    """A ∩ B from the principal vectors of A whose angle to B vanishes."""
    _check_same_ambient(a, b)
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(a.ambient_dim, a.tol)
    resid = a.frame - b.frame @ (b.frame.conj().T @ a.frame)
    _, s, vh = np.linalg.svd(resid, full_matrices=True)
    cut = a.tol * max(a.ambient_dim, a.dim + b.dim)
    s_full = np.zeros(a.dim)
    s_full[: s.size] = s
    keep = s_full <= cut
    return Subspace(a.frame @ vh.conj().T[:, keep], a.tol)


def restrict_to_coordinates(a: Subspace, mask: np.ndarray) -> Subspace:
    """A ∩ span{e_k : mask[k]}, the vectors of A supported on the mask."""
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (a.ambient_dim,):
        raise ValueError("mask does not match the ambient dimension")
    if a.dim == 0 or mask.all():
        return a
    outside = a.frame[~mask, :]
    _, s, vh = np.linalg.svd(outside, full_matrices=True)
    cut = a.tol * max(a.ambient_dim, a.dim)
    s_full = np.zeros(a.dim)
    s_full[: s.size] = s
    keep = s_full <= cut
    return Subspace(a.frame @ vh.conj().T[:, keep], a.tol)


def distance(a: Subspace, b: Subspace) -> float:
    """Operator norm of P_A - P_B."""
    _check_same_ambient(a, b)
    diff = a.projector() - b.projector()
    if diff.size == 0:
        return 0.0
    return float(np.linalg.norm(diff, 2))


def projection(a: Subspace) -> OperatorMatrix:
    # no degree bookkeeping for a generic subspace: window and shift are nominal
    return OperatorMatrix(a.projector(), (0,), (0,), (0,))


def coordinate_subspace(mask: np.ndarray, tol: float = DEFAULT_TOL) -> Subspace:
    mask = np.asarray(mask, dtype=bool)
    eye = np.eye(mask.size, dtype=DTYPE)
    return Subspace(eye[:, mask], tol)


def equal(a: Subspace, b: Subspace, tol: float = EQUAL_TOL) -> bool:
    return a.dim == b.dim and distance(a, b) < tol

