"""Command-line front end.

Every subcommand writes one JSON report (stdout or ``--out``) and a short
summary to stderr.  Exit status: 0 when every gated residual is within
tolerance, 1 when one is not, 2 for a malformed problem spec.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from fockmod import __version__
from fockmod.blh import blh_factorize, commutant_represent, uniqueness_unitary
from fockmod.examples import (
    dim_gap_example,
    dim_gap_fiber,
    fixture_suite,
    random_polynomial,
    random_submodule,
)
from fockmod.fock import (
    DTYPE,
    FockNModule,
    TruncatedFock,
    bold_creation,
    flip_unitary,
    left_creation,
    right_creation,
    vacuum_defect,
    word_matrix,
)
from fockmod.modana import (
    TupleSystem,
    canonical_unitary,
    generate_submodule,
    is_submodule,
    purity_profile,
    restricted_matrices,
    shift_system,
    wandering_subspace,
)
from fockmod.polyball import (
    all_bold_ops,
    joint_equivalence_check,
    phi_coefficients_bold,
    phi_coefficients_tensor,
    polyball_classify,
    random_joint_submodule,
)
from fockmod.subspace import EQUAL_TOL, distance
from fockmod.variety import (
    ConstrainedNModule,
    NCPolynomial,
    build_constrained,
    commutator_ideal,
    constrained_classify,
    da_multiplier_eval,
    da_series_eval,
    da_tail_bound,
    symmetric_check,
)
from fockmod.words import Word, enumerate_words

log = logging.getLogger("fockmod")

SCHEMA_VERSION = 1


class SpecError(ValueError):
    """Malformed problem spec; maps to exit status 2."""


def fmt(x: float) -> float:
    """Round to four significant digits so reports are stable across reruns."""
    x = float(x)
    if not np.isfinite(x) or x == 0:
        return x
    return float(f"{x:.4g}")


@dataclass
class Report:
    command: str
    provenance: dict
    result: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def check(self, name: str, residual: float, tol: float, gated: bool = True) -> None:
        self.checks.append(
            {"name": name, "residual": fmt(residual), "tol": tol, "ok": bool(residual <= tol), "gated": gated}
        )

    @property
    def ok(self) -> bool:
        return all(c["ok"] for c in self.checks if c["gated"])

    def to_json(self) -> dict:
        out = {
            "command": self.command,
            "provenance": self.provenance,
            "result": self.result,
            "checks": self.checks,
            "ok": self.ok,
        }
        if self.notes:
            out["notes"] = self.notes
        return out


def _round_tree(obj: Any) -> Any:
    if isinstance(obj, float):
        return fmt(obj)
    if isinstance(obj, dict):
        return {k: _round_tree(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_tree(v) for v in obj]
    if isinstance(obj, np.generic):
        return _round_tree(obj.item())
    return obj


def provenance(payload: Any, seed: int) -> dict:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return {"spec_sha256": hashlib.sha256(blob).hexdigest(), "seed": seed, "version": __version__}


# spec ingestion


def load_spec(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            spec = json.load(fh)
    except OSError as exc:
        raise SpecError(f"cannot read spec {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecError(f"spec {path} is not valid JSON: {exc}") from exc
    if not isinstance(spec, dict):
        raise SpecError("spec must be a JSON object")
    version = spec.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise SpecError(f"unsupported schema_version {version}")
    return spec


def _as_list(value, name: str) -> list[int]:
    if isinstance(value, int):
        return [value]
    if isinstance(value, list) and value and all(isinstance(v, int) for v in value):
        return value
    raise SpecError(f"'{name}' must be an integer or a non-empty list of integers")


def _require(spec: dict, key: str):
    if key not in spec:
        raise SpecError(f"spec is missing '{key}'")
    return spec[key]


def spec_sizes(spec: dict, degree: int | None = None) -> tuple[list[int], list[int]]:
    ns = _as_list(_require(spec, "n"), "n")
    ds = _as_list(_require(spec, "d"), "d")
    if degree is not None:
        ds = [degree] * len(ds)
    if len(ns) != len(ds):
        raise SpecError("'n' and 'd' have different lengths")
    if any(n < 1 for n in ns) or any(d < 0 for d in ds):
        raise SpecError("alphabet sizes must be positive and degrees nonnegative")
    return ns, ds


def _parse_word(raw, n: int) -> Word:
    if not isinstance(raw, list) or not all(isinstance(a, int) for a in raw):
        raise SpecError(f"word {raw!r} must be a list of letters")
    try:
        return Word(tuple(raw), n)
    except ValueError as exc:
        raise SpecError(str(exc)) from exc


def parse_vector(terms, module: FockNModule, coeff_dim: int = 1) -> np.ndarray:
    """Vector in F ⊗ C^coeff_dim from terms {word, component, re, im}.

    For one factor ``word`` is a letter list; for several it is a list of
    letter lists, one per factor.
    """
    if not isinstance(terms, list):
        raise SpecError("a generator must be a list of terms")
    v = np.zeros(module.dim * coeff_dim, dtype=DTYPE)
    for t in terms:
        if not isinstance(t, dict) or "word" not in t:
            raise SpecError(f"malformed term {t!r}")
        raw = t["word"]
        if module.k == 1:
            words = [_parse_word(raw, module.factors[0].n)]
        else:
            if not isinstance(raw, list) or len(raw) != module.k:
                raise SpecError(f"tensor word {raw!r} needs {module.k} components")
            words = [_parse_word(r, f.n) for r, f in zip(raw, module.factors)]
        for w, f in zip(words, module.factors):
            if len(w) > f.d:
                raise SpecError(f"generator word {w} exceeds truncation degree {f.d}")
        comp = t.get("component", 0)
        if not isinstance(comp, int) or not 0 <= comp < coeff_dim:
            raise SpecError(f"component {comp!r} outside 0..{coeff_dim - 1}")
        try:
            coeff = complex(float(t.get("re", 0.0)), float(t.get("im", 0.0)))
        except (TypeError, ValueError) as exc:
            raise SpecError(f"bad coefficient in {t!r}") from exc
        v[module.index(words) * coeff_dim + comp] += coeff
    return v


def spec_generators(spec: dict, module: FockNModule, coeff_dim: int = 1) -> list[np.ndarray]:
    gens = spec.get("generators", [])
    if not isinstance(gens, list):
        raise SpecError("'generators' must be a list")
    return [parse_vector(g, module, coeff_dim) for g in gens]


def inhomogeneous(gens: Sequence[np.ndarray], gradings: Sequence[np.ndarray], tol: float = 1e-14) -> list[int]:
    """Indices of generators whose support mixes degrees in some grading."""
    bad = []
    for idx, g in enumerate(gens):
        support = np.abs(g) > tol
        if any(np.unique(gr[support]).size > 1 for gr in gradings):
            bad.append(idx)
    return bad


def _grading_note(rep: Report, bad: list[int]) -> None:
    if bad:
        rep.notes.append(
            f"generators {bad} are not homogeneous; truncation cuts their components at "
            "different heights, so the submodule is not graded and window identities can fail"
        )


def spec_ideals(spec: dict, ns: list[int]) -> list[list[NCPolynomial]]:
    raw = spec.get("ideals", "commutator")
    if raw == "commutator":
        return [commutator_ideal(n) for n in ns]
    if not isinstance(raw, list) or len(raw) != len(ns):
        raise SpecError("'ideals' must be \"commutator\" or one generator list per factor")
    out = []
    for gens, n in zip(raw, ns):
        if gens == "commutator":
            out.append(commutator_ideal(n))
            continue
        if not isinstance(gens, list):
            raise SpecError("each ideal must be a list of polynomials")
        polys = []
        for p in gens:
            try:
                polys.append(NCPolynomial.from_json(p, n))
            except (KeyError, TypeError, ValueError) as exc:
                raise SpecError(f"bad ideal generator {p!r}: {exc}") from exc
        out.append(polys)
    return out


def spec_points(spec: dict, n1: int, rng: np.random.Generator, samples: int, radius: float) -> list[np.ndarray]:
    raw = spec.get("points")
    if raw is None:
        pts = []
        for _ in range(samples):
            z = rng.normal(size=n1) + 1j * rng.normal(size=n1)
            pts.append(z / np.linalg.norm(z) * radius * rng.random())
        return pts
    pts = []
    for p in raw:
        if not isinstance(p, list) or len(p) != n1:
            raise SpecError(f"point {p!r} must have {n1} coordinates [re, im]")
        try:
            pts.append(np.array([complex(c[0], c[1]) for c in p]))
        except (TypeError, IndexError) as exc:
            raise SpecError(f"bad point {p!r}") from exc
    return pts


# commands


def cmd_fock_info(args) -> Report:
    if args.n < 1 or args.d < 0:
        raise SpecError("need n >= 1 and d >= 0")
    space = TruncatedFock(args.n, args.d)
    rep = Report("fock-info", provenance({"n": args.n, "d": args.d}, args.seed))
    rep.result = {**space.describe(), "dims_by_degree": [args.n**m for m in range(args.d + 1)]}
    return rep


def cmd_submodule(args) -> Report:
    spec = load_spec(args.spec)
    ns, ds = spec_sizes(spec, args.degree)
    if len(ns) != 1:
        raise SpecError("submodule expects a single alphabet")
    k = int(spec.get("coeff_dim", 1))
    space = TruncatedFock(ns[0], ds[0])
    sys_ = shift_system(space, k)
    gens = spec_generators(spec, FockNModule((space,)), k)
    M = generate_submodule(sys_, gens)
    rep = Report("submodule", provenance(spec, args.seed))
    _grading_note(rep, inhomogeneous(gens, [sys_.degrees]))
    ok, resid = is_submodule(M, sys_)
    rep.check("invariance", resid, args.tol)
    an = wandering_subspace(M, sys_, args.tol)
    alt = wandering_subspace(M, sys_, args.tol, method="kernel")
    rep.check("wandering_routes", distance(an.E, alt.E), args.tol)
    if M.dim:
        canonical_unitary(M, sys_, E=an.E)
        profile = purity_profile(restricted_matrices(M, sys_), space.d + 1)
    else:
        profile = [0.0] * (space.d + 2)
    rep.result = {**an.to_json(), "purity_profile": profile}
    return rep


def cmd_blh(args) -> Report:
    spec = load_spec(args.spec)
    ns, ds = spec_sizes(spec, args.degree)
    if len(ns) != 1:
        raise SpecError("blh expects a single alphabet")
    k = int(spec.get("coeff_dim", 1))
    space = TruncatedFock(ns[0], ds[0])
    sys_ = shift_system(space, k)
    gens = spec_generators(spec, FockNModule((space,)), k)
    M = generate_submodule(sys_, gens)
    fact = blh_factorize(M, k, space, args.tol)
    rep = Report("blh", provenance(spec, args.seed))
    _grading_note(rep, inhomogeneous(gens, [sys_.degrees]))
    rep.result = fact.to_json()
    rep.check("inner", fact.inner_residual, args.tol)
    rep.check("range", fact.range_distance, args.tol)
    rep.check("intertwining", fact.intertwining_residual, args.tol)
    return rep


def _module_and_submodule(spec: dict, degree: int | None) -> tuple[FockNModule, Any, list[int]]:
    ns, ds = spec_sizes(spec, degree)
    module = FockNModule.from_sizes(ns, ds)
    gens = spec_generators(spec, module)
    ops = tuple(bold_creation(module, i, j) for (i, j), _ in all_bold_ops(module))
    return module, generate_submodule(TupleSystem(ops), gens), inhomogeneous(gens, module.factor_degrees)


def cmd_polyball(args) -> Report:
    spec = load_spec(args.spec)
    module, M, bad = _module_and_submodule(spec, args.degree)
    perm = args.permutation or spec.get("permutation")
    if perm is not None and sorted(perm) != list(range(1, module.k + 1)):
        raise SpecError(f"{perm} is not a permutation of the factors")
    c = polyball_classify(M, module, args.tol, permutation=perm)
    rep = Report("polyball", provenance(spec, args.seed))
    _grading_note(rep, bad)
    rep.result = c.to_json()
    for name, value in c.residuals.items():
        rep.check(name, value, args.tol)
    rep.check("joint_equivalence", joint_equivalence_check(c.M, c), args.tol)
    return rep


def _constrained(spec: dict, degree: int | None):
    ns, ds = spec_sizes(spec, degree)
    ideals = spec_ideals(spec, ns)
    try:
        parts = tuple(build_constrained(TruncatedFock(n, d), gens) for n, d, gens in zip(ns, ds, ideals))
    except ValueError as exc:
        raise SpecError(str(exc)) from exc
    cn = ConstrainedNModule(parts)
    proj = cn.N.projector()
    gens = [proj @ g for g in spec_generators(spec, cn.module)]
    return parts, cn, cn.generate(gens), inhomogeneous(gens, cn.module.factor_degrees)


SPLIT_NOTE = (
    "fiber 'split' (E = Ẽ ⊖ W) keeps E inside N_J ⊗ E*, but W need not lie in Ẽ; "
    "partial_isometry is then reported, not gated. Use --fiber augmented for a fiber with ΘΘ* = P_M."
)


def _classification_checks(rep: Report, c, tol: float) -> None:
    r = c.residuals
    rep.check("invariance", r["invariance"], tol)
    rep.check("outside_N", r["outside_N"], tol)
    rep.check("phi_intertwining", r["phi_intertwining"], tol)
    rep.check("augmented_inner", r["augmented_inner"], tol)
    if c.fiber == "split":
        rep.check("containment", r["containment"], tol)
        rep.check("split_vs_intersection", r["split_vs_intersection"], tol)
        rep.check("partial_isometry", r["partial_isometry"], tol, gated=False)
        rep.notes.append(SPLIT_NOTE)
    else:
        rep.check("partial_isometry", r["partial_isometry"], tol)
        rep.check("containment", r["containment"], tol, gated=False)


def cmd_variety(args) -> Report:
    spec = load_spec(args.spec)
    parts, cn, M, bad = _constrained(spec, args.degree)
    fiber = args.fiber or spec.get("fiber", "split")
    if fiber not in ("split", "augmented"):
        raise SpecError(f"unknown fiber {fiber!r}")
    c = constrained_classify(M, parts, args.tol, fiber=fiber)
    rep = Report("variety", provenance(spec, args.seed))
    _grading_note(rep, bad)
    rep.result = {
        "factors": [p.to_json() for p in parts],
        "symmetric": [symmetric_check(p) for p in parts],
        "classification": c.to_json(),
    }
    _classification_checks(rep, c, args.tol)
    for idx, sym in enumerate(rep.result["symmetric"], start=1):
        if sym.get("applicable"):
            for key in ("left_right_residual", "symmetrizer_distance", "commutator_residual"):
                rep.check(f"factor{idx}_{key}", sym[key], args.tol)
    return rep


def cmd_da_multiplier(args) -> Report:
    spec = load_spec(args.spec)
    parts, cn, M, bad = _constrained(spec, args.degree)
    if not cn.drury_arveson:
        raise SpecError("da-multiplier needs commutator ideals in every factor")
    if cn.module.k < 2:
        raise SpecError("da-multiplier needs at least two factors")
    c = constrained_classify(M, parts, args.tol, fiber="split")
    rng = np.random.default_rng(args.seed)
    ij = tuple(spec.get("ij", [2, 1]))
    if ij not in c.coeffs:
        raise SpecError(f"no multiplier for index {list(ij)}")
    rows = []
    rep = Report("da-multiplier", provenance(spec, args.seed))
    _grading_note(rep, bad)
    worst = 0.0
    for z in spec_points(spec, parts[0].space.n, rng, args.samples, args.radius):
        try:
            res = da_multiplier_eval(c, ij, z)
        except ValueError as exc:
            raise SpecError(str(exc)) from exc
        ser = da_series_eval(c, ij, z)
        diff = float(np.linalg.norm(res - ser, 2))
        bound = da_tail_bound(z, c.d_eff) + 1e-9
        worst = max(worst, diff / bound)
        rows.append({
            "z": [[float(x.real), float(x.imag)] for x in z],
            "resolvent_vs_series": diff,
            "tail_bound": bound,
            "value_norm": float(np.linalg.norm(res, 2)),
        })
    rep.result = {"ij": list(ij), "dim_E": c.E.dim, "d_eff": c.d_eff, "points": rows}
    rep.check("series_within_tail_bound", worst, 1.0)
    return rep


def cmd_example(args) -> Report:
    if args.name == "dim-gap":
        if args.m < 1 or args.n < 2:
            raise SpecError("dim-gap needs m >= 1 and n >= 2")
        inst = dim_gap_example(args.m, args.n, args.d)
        rep = Report("example", provenance({"name": "dim-gap", "m": args.m, "n": args.n, "d": args.d}, args.seed))
        rep.result = inst.to_json()
        fib = dim_gap_fiber(inst)
        rep.result["range_fiber_dim"] = fib
        rep.check("gram", inst.gram_residual(), 0.0)
        rep.check("inner", inst.inner_residual(), args.tol)
        rep.check("fiber_exceeds_coeff_dim", 0.0 if fib > inst.m else 1.0, 0.0)
        return rep
    names = {f.name: f for f in fixture_suite()}
    if args.name not in names:
        raise SpecError(f"unknown example {args.name!r}; choose dim-gap or one of {sorted(names)}")
    rep = Report("example", provenance({"name": args.name}, args.seed))
    run_fixture(names[args.name], rep, args.tol)
    return rep


# verification suite


def run_fixture(fx, rep: Report, tol: float) -> None:
    data = fx.build()
    prefix = fx.name
    if fx.kind == "shift":
        space, k, M = data["space"], data["coeff_dim"], data["M"]
        fact = blh_factorize(M, k, space, tol)
        rep.check(f"{prefix}:inner", fact.inner_residual, tol)
        rep.check(f"{prefix}:range", fact.range_distance, tol)
        other = blh_factorize(M, k, space, tol, method="kernel")
        u = uniqueness_unitary(fact, other, tol)
        rep.check(f"{prefix}:uniqueness", u.residual, tol)
        rep.result[prefix] = {"dim_M": M.dim, "dim_E": fact.E.dim}
    elif fx.kind == "polyball":
        c = polyball_classify(data["M"], data["module"], tol)
        for name, value in c.residuals.items():
            rep.check(f"{prefix}:{name}", value, tol)
        rep.check(f"{prefix}:joint_equivalence", joint_equivalence_check(c.M, c), tol)
        rep.result[prefix] = {"dim_M": c.M.dim, "dim_E": c.E.dim}
    elif fx.kind == "constrained":
        for fiber in ("split", "augmented"):
            c = constrained_classify(data["M"], data["parts"], tol, fiber=fiber)
            sub = Report("", {})
            _classification_checks(sub, c, tol)
            for chk in sub.checks:
                chk["name"] = f"{prefix}:{fiber}:{chk['name']}"
                rep.checks.append(chk)
            rep.result[f"{prefix}:{fiber}"] = {"dim_M": c.M.dim, "dim_E": c.E.dim}
        if SPLIT_NOTE not in rep.notes:
            rep.notes.append(SPLIT_NOTE)
    elif fx.kind == "dim-gap":
        inst = data["instance"]
        rep.check(f"{prefix}:gram", inst.gram_residual(), 0.0)
        rep.check(f"{prefix}:inner", inst.inner_residual(), tol)
        rep.result[prefix] = {"E": inst.dim_E, "Estar": inst.dim_Estar, "range_fiber_dim": dim_gap_fiber(inst)}
    else:
        raise ValueError(f"unknown fixture kind {fx.kind}")


def _algebra_checks(rep: Report, tol: float) -> None:
    worst_iso = worst_defect = worst_flip = 0.0
    for n in (1, 2, 3):
        for d in (2, 3, 4):
            space = TruncatedFock(n, d)
            ss = [left_creation(space, i).matrix for i in range(1, n + 1)]
            rs = [right_creation(space, i).matrix for i in range(1, n + 1)]
            low = space.degrees <= d - 1
            for i in range(n):
                for j in range(n):
                    g = (ss[i].conj().T @ ss[j])[:, low]
                    target = np.eye(space.dim)[:, low] if i == j else 0
                    worst_iso = max(worst_iso, float(np.abs(g - target).max()))
            vac = np.zeros((space.dim, space.dim))
            vac[0, 0] = 1
            worst_defect = max(worst_defect, float(np.abs(vacuum_defect(space).matrix - vac).max()))
            u = flip_unitary(space).matrix
            for w in enumerate_words(n, 2):
                diff = word_matrix(rs, w) - u @ word_matrix(ss, w) @ u
                worst_flip = max(worst_flip, float(np.abs(diff).max()))
    rep.check("algebra:isometry", worst_iso, 1e-12)
    rep.check("algebra:vacuum_defect", worst_defect, 0.0)
    rep.check("algebra:flip", worst_flip, 1e-12)


def _random_checks(rep: Report, rng: np.random.Generator, tol: float, scale: int) -> None:
    space = TruncatedFock(2, 4 if scale > 1 else 3)
    worst = {"inner": 0.0, "range": 0.0, "uniqueness": 0.0}
    for _ in range(5 * scale):
        M, gens = random_submodule(space, 2, rng)
        f1 = blh_factorize(M, 2, space, tol)
        perm = rng.permutation(len(gens))
        M2 = generate_submodule(shift_system(space, 2), [gens[p] for p in perm])
        f2 = blh_factorize(M2, 2, space, tol, method="kernel")
        worst["inner"] = max(worst["inner"], f1.inner_residual, f2.inner_residual)
        worst["range"] = max(worst["range"], f1.range_distance, f2.range_distance)
        worst["uniqueness"] = max(worst["uniqueness"], uniqueness_unitary(f1, f2, tol).residual)
    for key, value in worst.items():
        rep.check(f"random_blh:{key}", value, tol)

    sp = TruncatedFock(2, 4)
    sys_ = shift_system(sp, 1)
    M, _ = random_submodule(sp, 1, rng, count=2)
    fact = blh_factorize(M, 1, sp, tol)
    theta = fact.Theta.matrix.matrix
    rs = [right_creation(sp, i).matrix for i in (1, 2)]
    coeff_err = 0.0
    for _ in range(3 * scale):
        p = random_polynomial(2, 2, rng)
        pr = sum(c * word_matrix(rs, w) for w, c in p.items())
        C = theta @ np.kron(pr, np.eye(fact.E.dim)) @ theta.conj().T
        phi = commutant_represent(C, M, sys_, E=fact.E)
        for w, c in phi.coeffs.items():
            coeff_err = max(coeff_err, float(np.abs(c - p.get(w, 0) * np.eye(fact.E.dim)).max()))
    rep.check("commutant:coefficients", coeff_err, 1e-10)

    module = FockNModule.from_sizes((2, 1), (3, 3))
    poly = {"intertwining": 0.0, "row_isometry": 0.0, "equivalence": 0.0, "two_path": 0.0}
    for _ in range(2 * scale):
        M = random_joint_submodule(module, rng, count=int(rng.integers(1, 3)))
        c = polyball_classify(M, module, tol)
        poly["intertwining"] = max(poly["intertwining"], c.residuals["phi_intertwining"])
        poly["row_isometry"] = max(poly["row_isometry"], c.residuals["phi_row_isometry"])
        poly["equivalence"] = max(poly["equivalence"], joint_equivalence_check(M, c))
        a, b = phi_coefficients_tensor(c, 2, 1), phi_coefficients_bold(c, 2, 1)
        poly["two_path"] = max([poly["two_path"]] + [float(np.abs(a[w] - b[w]).max()) for w in a])
    for key, value in poly.items():
        rep.check(f"polyball:{key}", value, 1e-12 if key == "two_path" else tol)

    prof = purity_profile(shift_system(TruncatedFock(2, 3)), 5)
    rep.check("purity:shift_profile", max(abs(p - t) for p, t in zip(prof, [1, 1, 1, 1, 0, 0])), 1e-12)

    parts = (build_constrained(TruncatedFock(2, 3), commutator_ideal(2)), build_constrained(TruncatedFock(1, 3), []))
    cn = ConstrainedNModule(parts)
    M = cn.random_submodule(rng, count=1)
    c = constrained_classify(M, parts, tol)
    worst_ratio = 0.0
    for _ in range(5 * scale):
        z = rng.normal(size=2) + 1j * rng.normal(size=2)
        z *= 0.6 * rng.random() / np.linalg.norm(z)
        diff = float(np.linalg.norm(da_multiplier_eval(c, (2, 1), z) - da_series_eval(c, (2, 1), z), 2))
        worst_ratio = max(worst_ratio, diff / (da_tail_bound(z, c.d_eff) + 1e-9))
    rep.check("da:series_within_tail_bound", worst_ratio, 1.0)


def cmd_verify(args) -> Report:
    scale = {"core": 1, "full": 4}[args.suite]
    rep = Report("verify", provenance({"suite": args.suite, "tol": args.tol}, args.seed))
    rng = np.random.default_rng(args.seed)
    _algebra_checks(rep, args.tol)
    for fx in fixture_suite():
        run_fixture(fx, rep, args.tol)
    _random_checks(rep, rng, args.tol, scale)
    rep.result["suite"] = args.suite
    rep.result["check_count"] = len(rep.checks)
    return rep


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fockmod", description="Submodules of truncated Fock modules.")
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=EQUAL_TOL, help="assertion tolerance (default 1e-8)")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--degree", type=int, default=None, help="override every truncation degree")
    common.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fock-info", parents=[common], help="dimensions of a truncated Fock space")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(func=cmd_fock_info)

    for name, func, extra, text in [
        ("submodule", cmd_submodule, None, "generate a submodule and its wandering subspace"),
        ("blh", cmd_blh, None, "inner factorization of a shift-invariant submodule"),
        ("polyball", cmd_polyball, "permutation", "classify a joint submodule of a Fock n-module"),
        ("variety", cmd_variety, "fiber", "classify a submodule of a constrained quotient"),
        ("da-multiplier", cmd_da_multiplier, "points", "evaluate multipliers on the unit ball"),
    ]:
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("spec", help="JSON problem spec")
        if extra == "permutation":
            p.add_argument("--permutation", type=int, nargs="+", default=None)
        elif extra == "fiber":
            p.add_argument("--fiber", choices=["split", "augmented"], default=None)
        elif extra == "points":
            p.add_argument("--samples", type=int, default=20)
            p.add_argument("--radius", type=float, default=0.6)
        p.set_defaults(func=func)

    p = sub.add_parser("example", parents=[common], help="dim-gap or a named fixture")
    p.add_argument("name")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--d", type=int, default=3)
    p.set_defaults(func=cmd_example)

    p = sub.add_parser("verify", parents=[common], help="run the verification suite")
    p.add_argument("--suite", choices=["core", "full"], default="core")
    p.set_defaults(func=cmd_verify)
    return parser


def _emit(rep: Report, out: str | None) -> None:
    text = json.dumps(_round_tree(rep.to_json()), indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _summary(rep: Report) -> None:
    failed = [c for c in rep.checks if c["gated"] and not c["ok"]]
    print(f"{rep.command}: {len(rep.checks)} checks, {len(failed)} failed", file=sys.stderr)
    for c in failed:
        print(f"  FAIL {c['name']}: residual {c['residual']:.3e} > tol {c['tol']:.1e}", file=sys.stderr)


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    if args.tol <= 0:
        print("error: --tol must be positive", file=sys.stderr)
        return 2
    try:
        rep = args.func(args)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit(rep, args.out)
    _summary(rep)
    return 0 if rep.ok else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
