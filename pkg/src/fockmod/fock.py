"""Truncated Fock spaces, creation operators and Fock n-modules.

Truncation convention: creation operators annihilate the top degree, so
their adjoints are exact and only degree-raising identities need a window.
Tensor products use numpy's Kronecker order (first factor most significant),
so ``F_n ⊗ C^k`` has index ``word_index * k + c``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from fockmod.words import Word, enumerate_words, word_count, word_index

DTYPE = np.complex128


@dataclass(frozen=True)
class TruncatedFock:
    n: int
    d: int

    def __post_init__(self) -> None:
        if self.n < 1 or self.d < 0:
            raise ValueError(f"need n >= 1 and d >= 0, got n={self.n}, d={self.d}")

    @cached_property
    def basis(self) -> tuple[Word, ...]:
        return tuple(enumerate_words(self.n, self.d))

    @property
    def dim(self) -> int:
        return word_count(self.n, self.d)

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.array([len(w) for w in self.basis], dtype=int)

    def index(self, w: Word | Sequence[int]) -> int:
        if not isinstance(w, Word):
            w = Word(tuple(w), self.n)
        if w.n != self.n:
            raise ValueError(f"word over {w.n} letters used in F^2_{self.n}")
        if len(w) > self.d:
            raise ValueError(f"word {w} exceeds truncation degree {self.d}")
        return word_index(w)

    def basis_vector(self, w: Word | Sequence[int]) -> np.ndarray:
        v = np.zeros(self.dim, dtype=DTYPE)
        v[self.index(w)] = 1.0
        return v

    def vacuum(self) -> np.ndarray:
        return self.basis_vector(())

    def degree_mask(self, lo: int, hi: int) -> np.ndarray:
        return (self.degrees >= lo) & (self.degrees <= hi)

    def describe(self) -> dict:
        return {"kind": "fock", "n": self.n, "d": self.d, "dim": self.dim}


@dataclass(frozen=True)
class FockNModule:
    factors: tuple[TruncatedFock, ...]

    def __post_init__(self) -> None:
        if len(self.factors) < 1:
            raise ValueError("a Fock n-module needs at least one factor")
        object.__setattr__(self, "factors", tuple(self.factors))

    @classmethod
    def from_sizes(cls, ns: Sequence[int], ds: Sequence[int]) -> FockNModule:
        if len(ns) != len(ds):
            raise ValueError("alphabet sizes and degrees differ in length")
        return cls(tuple(TruncatedFock(n, d) for n, d in zip(ns, ds)))

    @property
    def k(self) -> int:
        return len(self.factors)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(f.dim for f in self.factors)

    @property
    def dim(self) -> int:
        return int(np.prod(self.shape))

    @cached_property
    def factor_degrees(self) -> tuple[np.ndarray, ...]:
        """Per-factor degree of every ambient basis index."""
        grids = np.meshgrid(*[f.degrees for f in self.factors], indexing="ij")
        return tuple(g.ravel() for g in grids)

    def index(self, words: Sequence[Word | Sequence[int]]) -> int:
        if len(words) != self.k:
            raise ValueError(f"expected {self.k} words, got {len(words)}")
        idx = [f.index(w) for f, w in zip(self.factors, words)]
        return int(np.ravel_multi_index(idx, self.shape))

    def basis_vector(self, words: Sequence[Word | Sequence[int]]) -> np.ndarray:
        v = np.zeros(self.dim, dtype=DTYPE)
        v[self.index(words)] = 1.0
        return v

    def vacuum(self) -> np.ndarray:
        return self.basis_vector([()] * self.k)

    @property
    def rest_dim(self) -> int:
        """Dimension of the tensor product of factors 2..k."""
        return int(np.prod(self.shape[1:])) if self.k > 1 else 1

    def describe(self) -> dict:
        return {
            "kind": "fock_n_module",
            "n": [f.n for f in self.factors],
            "d": [f.d for f in self.factors],
            "dim": self.dim,
        }


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense matrix of a truncated operator together with its validity window.

    ``windows[f]`` is the largest factor-f degree on which the matrix agrees
    with the untruncated operator, ``shifts[f]`` the degree it raises in that
    factor and ``tops[f]`` the truncation degree.
    """

    matrix: np.ndarray
    windows: tuple[int, ...]
    shifts: tuple[int, ...]
    tops: tuple[int, ...]
    domain: dict = field(default_factory=dict, compare=False)
    codomain: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if not (len(self.windows) == len(self.shifts) == len(self.tops)):
            raise ValueError("window, shift and top tuples differ in length")
        for w, t in zip(self.windows, self.tops):
            if w > t:
                raise ValueError(f"valid degree {w} exceeds truncation degree {t}")

    @property
    def valid_degree(self) -> int | tuple[int, ...]:
        return self.windows[0] if len(self.windows) == 1 else self.windows

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def __matmul__(self, other: OperatorMatrix) -> OperatorMatrix:
        if self.matrix.shape[1] != other.matrix.shape[0]:
            raise ValueError(f"cannot compose {self.matrix.shape} with {other.matrix.shape}")
        windows = tuple(
            max(-1, min(wb, wa - sb))
            for wa, wb, sb in zip(self.windows, other.windows, other.shifts)
        )
        shifts = tuple(sa + sb for sa, sb in zip(self.shifts, other.shifts))
        return OperatorMatrix(
            self.matrix @ other.matrix, windows, shifts, self.tops, other.domain, self.codomain
        )

    def adjoint(self) -> OperatorMatrix:
        shifts = tuple(-s for s in self.shifts)
        windows = tuple(t - max(s, 0) for t, s in zip(self.tops, shifts))
        return OperatorMatrix(
            self.matrix.conj().T, windows, shifts, self.tops, self.codomain, self.domain
        )

    @property
    def H(self) -> OperatorMatrix:
        return self.adjoint()

    def tensor_identity(self, k: int) -> OperatorMatrix:
        """The operator ``A ⊗ I_k`` on a coefficient-valued space."""
        eye = np.eye(k, dtype=DTYPE)
        return OperatorMatrix(
            np.kron(self.matrix, eye),
            self.windows,
            self.shifts,
            self.tops,
            {**self.domain, "coeff_dim": k},
            {**self.codomain, "coeff_dim": k},
        )

    def to_json(self) -> dict:
        return {
            "shape": list(self.matrix.shape),
            "entries": [[float(z.real), float(z.imag)] for z in self.matrix.ravel()],
            "valid_degree": list(self.windows),
            "domain": self.domain,
            "codomain": self.codomain,
        }


def _check_generator(space: TruncatedFock, i: int) -> None:
    if not 1 <= i <= space.n:
        raise IndexError(f"generator index {i} outside 1..{space.n}")


def _shift_matrix(space: TruncatedFock, i: int, left: bool) -> np.ndarray:
    mat = np.zeros((space.dim, space.dim), dtype=DTYPE)
    for col, w in enumerate(space.basis):
        if len(w) == space.d:
            continue
        letters = (i,) + w.letters if left else w.letters + (i,)
        mat[space.index(letters), col] = 1.0
    return mat


def left_creation(space: TruncatedFock, i: int) -> OperatorMatrix:
    """S_i e_alpha = e_{g_i alpha}, zero on the top degree."""
    _check_generator(space, i)
    desc = space.describe()
    return OperatorMatrix(_shift_matrix(space, i, True), (space.d - 1,), (1,), (space.d,), desc, desc)


def right_creation(space: TruncatedFock, i: int) -> OperatorMatrix:
    """R_i e_alpha = e_{alpha g_i}, zero on the top degree."""
    _check_generator(space, i)
    desc = space.describe()
    return OperatorMatrix(_shift_matrix(space, i, False), (space.d - 1,), (1,), (space.d,), desc, desc)


def identity(space: TruncatedFock) -> OperatorMatrix:
    desc = space.describe()
    return OperatorMatrix(np.eye(space.dim, dtype=DTYPE), (space.d,), (0,), (space.d,), desc, desc)


def flip_unitary(space: TruncatedFock) -> OperatorMatrix:
    """Permutation matrix e_alpha -> e_{alpha^t}; exact at every degree."""
    mat = np.zeros((space.dim, space.dim), dtype=DTYPE)
    for col, w in enumerate(space.basis):
        mat[space.index(w.flip()), col] = 1.0
    desc = space.describe()
    return OperatorMatrix(mat, (space.d,), (0,), (space.d,), desc, desc)


def vacuum_defect(space: TruncatedFock, coeff_dim: int = 1) -> OperatorMatrix:
    """I - sum_i S_i S_i^* (tensored with I_coeff_dim)."""
    acc = np.eye(space.dim, dtype=DTYPE)
    for i in range(1, space.n + 1):
        s = left_creation(space, i).matrix
        acc -= s @ s.conj().T
    desc = space.describe()
    op = OperatorMatrix(acc, (space.d,), (0,), (space.d,), desc, desc)
    return op.tensor_identity(coeff_dim) if coeff_dim != 1 else op


def _bold(module: FockNModule, i: int, j: int, left: bool) -> OperatorMatrix:
    if not 1 <= i <= module.k:
        raise IndexError(f"factor index {i} outside 1..{module.k}")
    factor = module.factors[i - 1]
    _check_generator(factor, j)
    single = left_creation(factor, j) if left else right_creation(factor, j)
    mat = np.ones((1, 1), dtype=DTYPE)
    for f, other in enumerate(module.factors, start=1):
        block = single.matrix if f == i else np.eye(other.dim, dtype=DTYPE)
        mat = np.kron(mat, block)
    tops = tuple(f.d for f in module.factors)
    windows = tuple(f.d - 1 if idx == i else f.d for idx, f in enumerate(module.factors, start=1))
    shifts = tuple(1 if idx == i else 0 for idx in range(1, module.k + 1))
    desc = module.describe()
    return OperatorMatrix(mat, windows, shifts, tops, desc, desc)


def bold_creation(module: FockNModule, i: int, j: int) -> OperatorMatrix:
    """I ⊗ ... ⊗ S_j ⊗ ... ⊗ I with S_j acting on factor i (both 1-based)."""
    return _bold(module, i, j, True)


def bold_right_creation(module: FockNModule, i: int, j: int) -> OperatorMatrix:
    return _bold(module, i, j, False)


def word_apply(ops: Sequence[OperatorMatrix | np.ndarray], w: Word, v: np.ndarray) -> np.ndarray:
    """X^alpha v with X^alpha = X_{i_1} ... X_{i_m} (rightmost letter acts first)."""
    mats = [op.matrix if isinstance(op, OperatorMatrix) else np.asarray(op) for op in ops]
    if not mats:
        raise ValueError("empty operator tuple")
    size = mats[0].shape[0]
    for m in mats:
        if m.shape != (size, size):
            raise ValueError("operators in a tuple must share one square space")
    v = np.asarray(v)
    if v.shape[0] != size:
        raise ValueError(f"vector of length {v.shape[0]} for operators of size {size}")
    out = v.astype(DTYPE, copy=True)
    for letter in reversed(w.letters):
        out = mats[letter - 1] @ out
    return out


def word_matrix(ops: Sequence[OperatorMatrix | np.ndarray], w: Word) -> np.ndarray:
    mats = [op.matrix if isinstance(op, OperatorMatrix) else np.asarray(op) for op in ops]
    out = np.eye(mats[0].shape[0], dtype=DTYPE)
    for letter in w.letters:
        out = out @ mats[letter - 1]
    return out
