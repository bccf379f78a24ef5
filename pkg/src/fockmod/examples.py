"""Worked instances: the dimension-gap inner operator and the fixture catalogue."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.stats import unitary_group

from fockmod.blh import MultiAnalytic, blh_factorize, intertwining_residual, synthesize
from fockmod.fock import DTYPE, FockNModule, TruncatedFock, bold_creation
from fockmod.modana import TupleSystem, generate_submodule, shift_system
from fockmod.polyball import all_bold_ops
from fockmod.variety import ConstrainedNModule, build_constrained, commutator_ideal
from fockmod.subspace import Subspace, orthonormalize
from fockmod.words import Word, enumerate_words


@dataclass(frozen=True)
class DimGapInstance:
    m: int
    n: int
    d: int
    theta: tuple[np.ndarray, ...]
    Theta: MultiAnalytic

    @property
    def dim_E(self) -> int:
        return self.m * self.n

    @property
    def dim_Estar(self) -> int:
        return self.m

    def gram_residual(self) -> float:
        """max |Σ θ_i* θ_i - I| in exact integer arithmetic."""
        acc = sum(t.T @ t for t in self.theta)
        return float(np.max(np.abs(acc - np.eye(self.dim_E, dtype=np.int64))))

    def window(self) -> np.ndarray:
        """Columns e_α ⊗ η with |α| ≤ d - 1, where the R_i are isometric."""
        space = self.Theta.space
        mask = np.repeat(space.degrees <= space.d - 1, self.dim_E)
        return np.eye(space.dim * self.dim_E, dtype=DTYPE)[:, mask]

    def inner_residual(self) -> float:
        t = self.Theta.matrix.matrix
        win = self.window()
        return float(np.linalg.norm(t.conj().T @ t @ win - win, 2))

    def range_subspace(self) -> Subspace:
        return orthonormalize(self.Theta.matrix.matrix, ambient_dim=self.Theta.matrix.shape[0])

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "d": self.d,
            "dims": {"E": self.dim_E, "Estar": self.dim_Estar},
            "gram_residual": self.gram_residual(),
            "inner_residual": self.inner_residual(),
            "intertwining_residual": intertwining_residual(
                self.Theta.matrix, self.Theta.space, self.dim_E, self.dim_Estar
            ),
        }


def dim_gap_matrices(m: int, n: int) -> tuple[np.ndarray, ...]:
    """θ_i: C^{mn} -> C^m with θ_i(e_pq) = f_q when p = i, else 0.

    e_pq sits at index (p-1) m + (q-1).
    """
    if m < 1 or n < 2:
        raise ValueError(f"need m >= 1 and n >= 2, got m={m}, n={n}")
    out = []
    for i in range(1, n + 1):
        t = np.zeros((m, m * n), dtype=np.int64)
        for q in range(1, m + 1):
            t[q - 1, (i - 1) * m + (q - 1)] = 1
        out.append(t)
    return tuple(out)


def dim_gap_example(m: int, n: int, d: int = 3) -> DimGapInstance:
    if d < 1:
        raise ValueError("the truncation degree must be at least 1")
    theta = dim_gap_matrices(m, n)
    coeffs = {Word((i,), n): t.astype(DTYPE) for i, t in enumerate(theta, start=1)}
    Theta = synthesize(coeffs, TruncatedFock(n, d), m * n, m)
    return DimGapInstance(m, n, d, theta, Theta)


def random_homogeneous_vector(
    degrees: np.ndarray, degree: int, rng: np.random.Generator
) -> np.ndarray:
    mask = degrees == degree
    v = np.zeros(degrees.size, dtype=DTYPE)
    v[mask] = rng.normal(size=mask.sum()) + 1j * rng.normal(size=mask.sum())
    return v


def random_generators(
    space: TruncatedFock, coeff_dim: int, rng: np.random.Generator, count: int, max_degree: int = 1
) -> list[np.ndarray]:
    """Random generators, each homogeneous of a random degree ≤ max_degree."""
    degrees = np.repeat(space.degrees, coeff_dim)
    return [
        random_homogeneous_vector(degrees, int(rng.integers(0, max_degree + 1)), rng) for _ in range(count)
    ]


def random_submodule(
    space: TruncatedFock, coeff_dim: int, rng: np.random.Generator, count: int | None = None
) -> tuple[Subspace, list[np.ndarray]]:
    if count is None:
        count = int(rng.integers(1, 4))
    gens = random_generators(space, coeff_dim, rng, count)
    return generate_submodule(shift_system(space, coeff_dim), gens), gens


def random_unitary(k: int, rng: np.random.Generator) -> np.ndarray:
    if k == 1:
        return np.exp(2j * np.pi * rng.random()) * np.ones((1, 1), dtype=DTYPE)
    return unitary_group.rvs(k, random_state=rng).astype(DTYPE)


def random_polynomial(n: int, degree: int, rng: np.random.Generator) -> dict[Word, complex]:
    return {w: complex(rng.normal(), rng.normal()) for w in enumerate_words(n, degree)}


@dataclass(frozen=True)
class Fixture:
    name: str
    kind: str
    params: dict
    build: Callable[[], dict] = field(repr=False, compare=False)


def _shift_fixture(n: int, d: int, k: int, gens: Callable[[TruncatedFock], list[np.ndarray]]):
    def build() -> dict:
        space = TruncatedFock(n, d)
        M = generate_submodule(shift_system(space, k), gens(space))
        return {"space": space, "coeff_dim": k, "M": M}

    return build


def _basis(space: TruncatedFock, *words: tuple[int, ...]) -> list[np.ndarray]:
    return [space.basis_vector(w) for w in words]


def _polyball_fixture(ns, ds, words):
    def build() -> dict:
        module = FockNModule.from_sizes(ns, ds)
        ops = tuple(bold_creation(module, i, j) for (i, j), _ in all_bold_ops(module))
        gens = [module.basis_vector(w) for w in words] if words is not None else [module.vacuum()]
        return {"module": module, "M": generate_submodule(TupleSystem(ops), gens)}

    return build


def _da_fixture(ns, ds, words):
    def build() -> dict:
        parts = tuple(
            build_constrained(TruncatedFock(n, d), commutator_ideal(n)) for n, d in zip(ns, ds)
        )
        cn = ConstrainedNModule(parts)
        module = cn.module
        proj = cn.N.projector()
        gens = [proj @ module.basis_vector(w) for w in words]
        return {"parts": parts, "cn": cn, "M": cn.generate(gens)}

    return build


def fixture_suite() -> list[Fixture]:
    """Deterministic catalogue of small instances used by the verification suite."""
    return [
        Fixture("whole-space", "shift", {"n": 2, "d": 3, "k": 1},
                _shift_fixture(2, 3, 1, lambda s: [s.vacuum()])),
        Fixture("whole-space-k2", "shift", {"n": 2, "d": 3, "k": 2},
                _shift_fixture(2, 3, 2, lambda s: [np.kron(s.vacuum(), e) for e in np.eye(2)])),
        Fixture("single-generator", "shift", {"n": 2, "d": 3, "k": 1, "generators": [[1]]},
                _shift_fixture(2, 3, 1, lambda s: _basis(s, (1,)))),
        Fixture("two-generator", "shift", {"n": 2, "d": 3, "k": 1, "generators": [[1], [2]]},
                _shift_fixture(2, 3, 1, lambda s: _basis(s, (1,), (2,)))),
        Fixture("bidisc-surrogate", "polyball", {"n": [1, 1], "d": [3, 3]},
                _polyball_fixture((1, 1), (3, 3), [[(1,), ()], [(), (1,)]])),
        Fixture("polyball-whole", "polyball", {"n": [2, 1], "d": [2, 2]},
                _polyball_fixture((2, 1), (2, 2), None)),
        Fixture("da-single", "constrained", {"n": [2, 1], "d": [3, 3]},
                _da_fixture((2, 1), (3, 3), [[(1,), ()]])),
        Fixture("da-vacuum", "constrained", {"n": [2, 1], "d": [3, 3]},
                _da_fixture((2, 1), (3, 3), [[(), (1,)]])),
        Fixture("dim-gap-1-2", "dim-gap", {"m": 1, "n": 2, "d": 3},
                lambda: {"instance": dim_gap_example(1, 2, 3)}),
        Fixture("dim-gap-2-3", "dim-gap", {"m": 2, "n": 3, "d": 2},
                lambda: {"instance": dim_gap_example(2, 3, 2)}),
    ]


def dim_gap_fiber(instance: DimGapInstance) -> int:
    """Dimension of the wandering subspace of range(Θ) inside F ⊗ C^m."""
    fact = blh_factorize(instance.range_subspace(), instance.m, instance.Theta.space)
    return fact.E.dim
