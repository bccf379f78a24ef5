"""Constrained Fock modules N_J = F_n ⊖ [J F_n] and their submodules.

All operators are kept as matrices on the unconstrained truncation; the
compressions B_i = P_N S_i P_N and W_i = P_N R_i P_N act as zero on M_J.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from fockmod.blh import blh_from_wandering, synthesize
from fockmod.fock import DTYPE, FockNModule, OperatorMatrix, TruncatedFock, bold_creation, left_creation, right_creation, word_matrix
from fockmod.modana import (
    NotInvariantError,
    TupleSystem,
    bold_system,
    generate_submodule,
    is_submodule,
    support_degree,
    wandering_subspace,
)
from fockmod.subspace import (
    EQUAL_TOL,
    Subspace,
    complement_within,
    distance,
    intersect,
    orthonormalize,
    span_sum,
)
from fockmod.words import Word, enumerate_words, multi_indices, multinomial_count, representative, symmetrize


class DegenerateIdealError(ValueError):
    pass


@dataclass(frozen=True)
class NCPolynomial:
    terms: dict[Word, complex]
    n: int

    def __post_init__(self) -> None:
        clean = {}
        for w, c in self.terms.items():
            if not isinstance(w, Word):
                w = Word(tuple(w), self.n)
            if w.n != self.n:
                raise ValueError(f"word {w} is over {w.n} letters, polynomial over {self.n}")
            c = complex(c)
            if c != 0:
                clean[w] = clean.get(w, 0) + c
        object.__setattr__(self, "terms", clean)

    @property
    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=-1)

    @property
    def is_homogeneous(self) -> bool:
        return len({len(w) for w in self.terms}) <= 1

    def evaluate(self, ops: Sequence[np.ndarray | OperatorMatrix]) -> np.ndarray:
        mats = [op.matrix if isinstance(op, OperatorMatrix) else np.asarray(op) for op in ops]
        if len(mats) != self.n:
            raise ValueError(f"polynomial in {self.n} variables evaluated on {len(mats)} operators")
        out = np.zeros_like(mats[0], dtype=DTYPE)
        for w, c in self.terms.items():
            out += c * word_matrix(mats, w)
        return out

    def to_json(self) -> list[dict]:
        return [
            {"word": w.to_json(), "re": c.real, "im": c.imag}
            for w, c in sorted(self.terms.items(), key=lambda t: (len(t[0]), t[0].letters))
        ]

    @classmethod
    def from_json(cls, data: Sequence[dict], n: int) -> NCPolynomial:
        terms: dict[Word, complex] = {}
        for t in data:
            w = Word(tuple(t["word"]), n)
            terms[w] = terms.get(w, 0) + complex(t.get("re", 0.0), t.get("im", 0.0))
        return cls(terms, n)


def commutator(p: int, q: int, n: int) -> NCPolynomial:
    """Z_p Z_q - Z_q Z_p."""
    return NCPolynomial({Word((p, q), n): 1.0, Word((q, p), n): -1.0}, n)


def commutator_ideal(n: int) -> list[NCPolynomial]:
    return [commutator(p, q, n) for p, q in itertools.combinations(range(1, n + 1), 2)]


def _is_commutator_set(gens: Sequence[NCPolynomial], n: int) -> bool:
    if n == 1:
        return not gens
    want = {frozenset(commutator(p, q, n).terms.items()) for p, q in itertools.combinations(range(1, n + 1), 2)}
    return {frozenset(g.terms.items()) for g in gens} == want


@dataclass(frozen=True)
class ConstrainedModule:
    space: TruncatedFock
    ideal_gens: tuple[NCPolynomial, ...]
    MJ: Subspace
    NJ: Subspace
    B: TupleSystem
    W: TupleSystem
    drury_arveson: bool
    residuals: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            **self.space.describe(),
            "dim_MJ": self.MJ.dim,
            "dim_NJ": self.NJ.dim,
            "drury_arveson": self.drury_arveson,
            "residuals": dict(self.residuals),
        }


def _sandwich_vectors(space: TruncatedFock, p: NCPolynomial) -> list[np.ndarray]:
    """e_γ p e_β for all words with |γ| + deg p + |β| ≤ d."""
    out = []
    room = space.d - p.degree
    if room < 0:
        return out
    words = enumerate_words(space.n, room)
    for g in words:
        for b in words:
            if len(g) + len(b) > room:
                continue
            v = np.zeros(space.dim, dtype=DTYPE)
            for w, c in p.terms.items():
                v[space.index(g * w * b)] += c
            out.append(v)
    return out


def _compressions(ops: Sequence[np.ndarray], proj: np.ndarray, space: TruncatedFock) -> TupleSystem:
    desc = space.describe()
    wrapped = tuple(
        OperatorMatrix(proj @ x @ proj, (space.d - 1,), (1,), (space.d,), desc, desc) for x in ops
    )
    return TupleSystem(wrapped, desc, space.degrees, space.d)


def build_constrained(
    space: TruncatedFock, ideal_gens: Sequence[NCPolynomial], allow_degenerate: bool = False
) -> ConstrainedModule:
    gens = tuple(ideal_gens)
    for g in gens:
        if g.n != space.n:
            raise ValueError(f"generator over {g.n} letters for an alphabet of {space.n}")
        if not g.terms:
            raise ValueError("ideal generators must be nonzero")
        if g.degree > space.d:
            raise ValueError(f"generator of degree {g.degree} exceeds truncation {space.d}")
    vecs = [v for g in gens for v in _sandwich_vectors(space, g)]
    MJ = orthonormalize(vecs, ambient_dim=space.dim)
    NJ = complement_within(Subspace.full(space.dim), MJ)
    if NJ.dim == 0 and not allow_degenerate:
        raise DegenerateIdealError("the ideal fills the truncated space, N_J = {0}")
    proj = NJ.projector()
    lefts = [left_creation(space, i).matrix for i in range(1, space.n + 1)]
    rights = [right_creation(space, i).matrix for i in range(1, space.n + 1)]
    B = _compressions(lefts, proj, space)
    W = _compressions(rights, proj, space)
    plain = [TupleSystem(tuple(left_creation(space, i) for i in range(1, space.n + 1))),
             TupleSystem(tuple(right_creation(space, i) for i in range(1, space.n + 1)))]
    adj = TupleSystem(tuple(left_creation(space, i).adjoint() for i in range(1, space.n + 1)))
    residuals = {
        "MJ_left_invariance": is_submodule(MJ, plain[0])[1],
        "MJ_right_invariance": is_submodule(MJ, plain[1])[1],
        "NJ_coinvariance": is_submodule(NJ, adj)[1],
    }
    return ConstrainedModule(
        space, gens, MJ, NJ, B, W, _is_commutator_set(gens, space.n), residuals
    )


def symmetrizer(space: TruncatedFock) -> np.ndarray:
    """Degree-wise average over letter permutations, the projection onto symmetric tensors."""
    proj = np.zeros((space.dim, space.dim), dtype=DTYPE)
    classes: dict[tuple[int, ...], list[int]] = {}
    for idx, w in enumerate(space.basis):
        classes.setdefault(symmetrize(w).exponents + (len(w),), []).append(idx)
    for members in classes.values():
        proj[np.ix_(members, members)] = 1.0 / len(members)
    return proj


def symmetric_check(cm: ConstrainedModule) -> dict:
    """Residuals of the Drury-Arveson identities, or ``applicable: False``."""
    if not cm.drury_arveson:
        return {"applicable": False}
    sym = orthonormalize(symmetrizer(cm.space))
    b = cm.B.matrices
    w = cm.W.matrices
    left_right = max(float(np.linalg.norm(x - y, 2)) for x, y in zip(b, w))
    comm = 0.0
    for x, y in itertools.combinations(b, 2):
        comm = max(comm, float(np.linalg.norm(x @ y - y @ x, 2)))
    return {
        "applicable": True,
        "left_right_residual": left_right,
        "symmetrizer_distance": distance(sym, cm.NJ),
        "commutator_residual": comm,
    }


@dataclass(frozen=True)
class ConstrainedNModule:
    """The tensor product of constrained quotients, carried inside the plain Fock n-module."""

    parts: tuple[ConstrainedModule, ...]

    @property
    def module(self) -> FockNModule:
        return FockNModule(tuple(p.space for p in self.parts))

    @property
    def N(self) -> Subspace:
        frame = np.ones((1, 1), dtype=DTYPE)
        for p in self.parts:
            frame = np.kron(frame, p.NJ.frame)
        return Subspace(frame)

    @property
    def Estar(self) -> Subspace:
        frame = np.ones((1, 1), dtype=DTYPE)
        for p in self.parts[1:]:
            frame = np.kron(frame, p.NJ.frame)
        return Subspace(frame)

    def bold(self, i: int, j: int) -> np.ndarray:
        """P_N S_ij P_N on the full truncation."""
        proj = self.N.projector()
        return proj @ bold_creation(self.module, i, j).matrix @ proj

    def bold_ops(self) -> dict[tuple[int, int], np.ndarray]:
        return {
            (i, j): self.bold(i, j)
            for i in range(1, len(self.parts) + 1)
            for j in range(1, self.parts[i - 1].space.n + 1)
        }

    @property
    def drury_arveson(self) -> bool:
        return all(p.drury_arveson for p in self.parts)

    def generate(self, generators) -> Subspace:
        ops = tuple(OperatorMatrix(m, (0,), (1,), (0,)) for m in self.bold_ops().values())
        return generate_submodule(TupleSystem(ops), generators)

    def random_submodule(self, rng: np.random.Generator, count: int = 1, max_degree: int = 1) -> Subspace:
        """Submodule generated by random vectors of N, each homogeneous in every factor."""
        module = self.module
        proj = self.N.projector()
        gens = []
        for _ in range(count):
            mask = np.ones(module.dim, dtype=bool)
            for fd in module.factor_degrees:
                mask &= fd == int(rng.integers(0, max_degree + 1))
            v = np.zeros(module.dim, dtype=DTYPE)
            v[mask] = rng.normal(size=mask.sum()) + 1j * rng.normal(size=mask.sum())
            v = proj @ v
            if np.linalg.norm(v) > 1e-8:
                gens.append(v)
        return self.generate(gens)


@dataclass(frozen=True)
class ConstrainedClassification:
    cn: ConstrainedNModule
    M: Subspace
    E_tilde: Subspace
    W_split: Subspace
    E: Subspace
    Theta: np.ndarray
    Phi: dict[tuple[int, int], np.ndarray]
    coeffs: dict[tuple[int, int], dict[Word, np.ndarray]]
    residuals: dict[str, float]
    d_eff: int
    fiber: str = "split"

    def to_json(self, coeff_tol: float = 1e-12) -> dict:
        table = {}
        for (i, j), cs in sorted(self.coeffs.items()):
            rows = []
            for w in sorted(cs, key=lambda x: (len(x), x.letters)):
                c = cs[w]
                if np.max(np.abs(c), initial=0.0) > coeff_tol:
                    rows.append({"word": w.to_json(), "re": c.real.tolist(), "im": c.imag.tolist()})
            table[f"{i},{j}"] = rows
        return {
            "fiber": self.fiber,
            "dim_M": self.M.dim,
            "dim_E_tilde": self.E_tilde.dim,
            "dim_W": self.W_split.dim,
            "dim_E": self.E.dim,
            "d_eff": self.d_eff,
            "residuals": dict(self.residuals),
            "phi": table,
        }


def constrained_fourier(
    E: Subspace, cn: ConstrainedNModule, ij: tuple[int, int], max_deg: int | None = None
) -> dict[Word, np.ndarray]:
    """φ_{ij,α^t} = P_E B_{n_1}^α* B_ij |_E over words of the first alphabet."""
    first = cn.parts[0].space
    if max_deg is None:
        max_deg = first.d
    b1 = [cn.bold(1, a) for a in range(1, first.n + 1)]
    pushed = cn.bold(*ij) @ E.frame
    ef = E.frame.conj().T
    return {w.flip(): ef @ word_matrix(b1, w).conj().T @ pushed for w in enumerate_words(first.n, max_deg)}


def lifted_fourier(
    E: Subspace, cn: ConstrainedNModule, ij: tuple[int, int], max_deg: int | None = None
) -> dict[Word, np.ndarray]:
    """P_E (S^α* ⊗ I) S_ij |_E with the unconstrained shifts, the constant lift of B_ij."""
    first = cn.parts[0].space
    if max_deg is None:
        max_deg = first.d
    module = cn.module
    s1 = [bold_creation(module, 1, a).matrix for a in range(1, first.n + 1)]
    pushed = bold_creation(module, *ij).matrix @ E.frame
    ef = E.frame.conj().T
    return {w.flip(): ef @ word_matrix(s1, w).conj().T @ pushed for w in enumerate_words(first.n, max_deg)}


def constrained_classify(
    M: Subspace, parts: Sequence[ConstrainedModule], tol: float = EQUAL_TOL, fiber: str = "split"
) -> ConstrainedClassification:
    """Θ: N_{J_1} ⊗ E -> N_{J_1} ⊗ E* with range M, through the augmented submodule.

    M_aug = (M_{J_1} ⊗ E*) ⊕ M is a submodule of the plain shift over the first
    factor; its factorization Θ~ is compressed back to the constrained space.

    ``fiber="split"`` takes E = Ẽ ⊖ W with W the wandering subspace of
    M_{J_1} ⊗ E*, and Φ_ij from P_E B^α* B_ij |_E.  This keeps E inside
    N_{J_1} ⊗ E*, but W need not lie in Ẽ, and then ΘΘ* = P_M fails; the
    residuals report it.  ``fiber="augmented"`` drops only Ẽ ∩ (M_{J_1} ⊗ E*),
    which always gives ΘΘ* = P_M, and compresses Φ~_ij = Θ~* S_ij Θ~ instead;
    that E may leave N_{J_1} ⊗ E* (see the ``containment`` residual).
    """
    if fiber not in ("split", "augmented"):
        raise ValueError(f"unknown fiber {fiber!r}")
    cn = ConstrainedNModule(tuple(parts))
    module = cn.module
    if M.ambient_dim != module.dim:
        raise ValueError(f"subspace of ambient {M.ambient_dim}, module has dimension {module.dim}")
    N = cn.N
    outside = float(np.linalg.norm(M.frame - N.frame @ (N.frame.conj().T @ M.frame), 2)) if M.dim else 0.0
    ops = tuple(OperatorMatrix(m, (0,), (1,), (0,)) for m in cn.bold_ops().values())
    _, inv = is_submodule(M, TupleSystem(ops))
    if max(outside, inv) > tol:
        raise NotInvariantError(max(outside, inv), "M is not a submodule of the constrained module")
    first = module.factors[0]
    estar = cn.Estar
    mj_star = Subspace(np.kron(cn.parts[0].MJ.frame, estar.frame))
    n1_star = N
    m_aug = span_sum(mj_star, M)
    sys1 = bold_system(module, 1)
    fact = blh_from_wandering(wandering_subspace(m_aug, sys1, tol), sys1, first)
    e_tilde = fact.E
    w_split = wandering_subspace(mj_star, sys1, tol).E if mj_star.dim else Subspace.zero(module.dim)
    if fiber == "split":
        E = complement_within(e_tilde, w_split)
    else:
        E = complement_within(e_tilde, intersect(e_tilde, mj_star))
    e_alt = intersect(e_tilde, n1_star)
    containment = float(np.linalg.norm(mj_star.frame.conj().T @ E.frame, 2)) if E.dim and mj_star.dim else 0.0

    n1 = cn.parts[0].NJ.frame
    e_coords = e_tilde.frame.conj().T @ E.frame
    domain = np.kron(n1, e_coords)
    theta = N.projector() @ fact.Theta.matrix.matrix @ domain
    pm = M.projector()
    partial = float(np.linalg.norm(theta @ theta.conj().T - pm, 2)) if theta.size else 0.0

    phis = {}
    coeffs = {}
    inter = 0.0
    lift = np.kron(n1, np.eye(E.dim, dtype=DTYPE))
    for (i, j), bij in cn.bold_ops().items():
        if i == 1:
            continue
        if fiber == "split":
            cs = constrained_fourier(E, cn, (i, j))
        else:
            cs = lifted_fourier(E, cn, (i, j))
        coeffs[(i, j)] = cs
        full = synthesize(cs, first, E.dim, E.dim).matrix.matrix
        phi = lift.conj().T @ full @ lift
        phis[(i, j)] = phi
        if theta.size:
            inter = max(inter, float(np.linalg.norm(bij @ theta - theta @ phi, 2)))
    split = abs(e_tilde.dim - w_split.dim - E.dim)
    residuals = {
        "invariance": inv,
        "outside_N": outside,
        "containment": containment,
        "split_dimension_gap": float(split),
        "split_vs_intersection": distance(E, e_alt) if E.dim == e_alt.dim else 1.0,
        "partial_isometry": partial,
        "phi_intertwining": inter,
        "augmented_inner": fact.inner_residual,
    }
    d_eff = first.d - max(support_degree(E, sys1), 0) if E.dim else first.d
    return ConstrainedClassification(cn, M, e_tilde, w_split, E, theta, phis, coeffs, residuals, d_eff, fiber)


def _check_point(c: ConstrainedClassification, z) -> np.ndarray:
    if c.fiber != "split":
        raise ValueError("the resolvent formula needs the split fiber E ⊆ N_J ⊗ E*")
    if not c.cn.drury_arveson:
        raise ValueError("multiplier evaluation needs commutator ideals in every factor")
    z = np.asarray(z, dtype=DTYPE)
    n1 = c.cn.parts[0].space.n
    if z.shape != (n1,):
        raise ValueError(f"point of shape {z.shape}, expected ({n1},)")
    if np.linalg.norm(z) >= 1:
        raise ValueError(f"point outside the open unit ball (norm {np.linalg.norm(z):.3f})")
    return z


def da_multiplier_eval(c: ConstrainedClassification, ij: tuple[int, int], z) -> np.ndarray:
    """P_E (I - Σ z_m B_1m*)^{-1} B_ij |_E by a linear solve."""
    z = _check_point(c, z)
    cn = c.cn
    size = cn.module.dim
    a = np.eye(size, dtype=DTYPE)
    for m, zm in enumerate(z, start=1):
        a -= zm * cn.bold(1, m).conj().T
    x = np.linalg.solve(a, cn.bold(*ij) @ c.E.frame)
    return c.E.frame.conj().T @ x


def da_series_eval(
    c: ConstrainedClassification, ij: tuple[int, int], z, max_degree: int | None = None
) -> np.ndarray:
    """Σ_{|m| ≤ max_degree} (|m|!/m!) z^m φ_{ij, m} from the coefficient table."""
    z = _check_point(c, z)
    n1 = z.size
    if max_degree is None:
        max_degree = c.d_eff
    cs = c.coeffs[ij]
    out = np.zeros((c.E.dim, c.E.dim), dtype=DTYPE)
    for deg in range(max_degree + 1):
        for mi in multi_indices(n1, deg):
            w = representative(mi)
            if w not in cs:
                continue
            mono = np.prod([zm**e for zm, e in zip(z, mi.exponents)])
            out += multinomial_count(mi) * mono * cs[w]
    return out


def da_tail_bound(z, d_eff: int) -> float:
    r = float(np.linalg.norm(z))
    return r ** (d_eff + 1) / (1 - r)


def taylor_by_contour(f, radius: float, count: int) -> np.ndarray:
    """Taylor coefficients of a one-variable matrix function from samples on a circle."""
    pts = radius * np.exp(2j * np.pi * np.arange(count) / count)
    vals = np.stack([f(p) for p in pts])
    coeffs = np.fft.fft(vals, axis=0) / count
    scale = radius ** np.arange(count)
    return coeffs / scale.reshape((-1,) + (1,) * (vals.ndim - 1))


def symmetric_dimension(n: int, d: int) -> int:
    return sum(math.comb(m + n - 1, n - 1) for m in range(d + 1))
