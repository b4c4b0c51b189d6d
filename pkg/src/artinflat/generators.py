"""Seeded random instances: algebras, morphisms, modules and lemma inputs.

Every generator draws from ``np.random.default_rng`` seeded by a
``SeedSequence`` built from the caller's integers, so identical arguments
give identical instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct
from pathlib import Path
from typing import Sequence

import numpy as np

from .algebra import AlgebraMorphism, Element, FiniteLocalAlgebra, quotient
from .errors import ArtinflatError, GenerationBudgetExhausted, ValidationError
from .invariants import is_gorenstein
from .lemma import LemmaInstance, delta_preimage_space, instance_from_morphism
from .linalg import FieldConfig, LinearSolver, kernel, matmul
from .modules import FiniteModule
from .presentation import PolyExpr, Presentation, compile_presentation, format_poly, truncated_poly_algebra

KINDS = ("monomial_ci", "monomial_general", "group_algebra", "binomial", "user_file")
_KIND_SALT = {k: i for i, k in enumerate(KINDS)}


def make_rng(*ints: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(i) for i in ints]))


@dataclass(frozen=True)
class InstanceSpec:
    seed: int
    kind: str
    p: int = 2
    dim_cap: int = 32
    n_cap: int = 3
    alphas: tuple[int, ...] | None = None  # group_algebra exponents; random powers of p if None
    path: str | None = None  # user_file

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        FieldConfig(self.p)
        if self.dim_cap < 1 or self.n_cap < 1:
            raise ValueError("caps must be positive")

    def rng(self, *salt: int) -> np.random.Generator:
        return make_rng(self.seed, _KIND_SALT[self.kind], self.p, *salt)


# -- presentations --------------------------------------------------------

def _vars(prefix: str, r: int) -> tuple[str, ...]:
    return tuple(f"{prefix}{i + 1}" for i in range(r))


def _exponents(rng, r: int, cap: int, lo: int = 2, hi: int = 5) -> list[int]:
    a = [int(rng.integers(lo, hi + 1)) for _ in range(r)]
    while int(np.prod(a)) > cap and max(a) > lo:
        a[int(np.argmax(a))] -= 1
    return a


def _monomial(rng, a: Sequence[int], min_deg: int = 2) -> tuple[int, ...]:
    """Random exponent vector below a (componentwise) of total degree >= min_deg."""
    for _ in range(100):
        e = tuple(int(rng.integers(0, ai)) for ai in a)
        if sum(e) >= min_deg:
            return e
    raise GenerationBudgetExhausted("no monomial of the requested degree below the exponent box")


def random_presentation(spec: InstanceSpec, prefix: str = "x", salt: int = 0) -> Presentation:
    """A presentation of the requested kind whose relations lie in (vars)^2."""
    rng = spec.rng(1, salt)
    p, cap = spec.p, spec.dim_cap
    fc = FieldConfig(p)
    if spec.kind == "user_file":
        if spec.path is None:
            raise ValueError("user_file instances need a path")
        from .presentation import parse

        return parse(Path(spec.path).read_text().strip())
    if spec.kind == "group_algebra":
        if spec.alphas is not None:
            alphas = list(spec.alphas)
        else:
            r = int(rng.integers(1, spec.n_cap + 1))
            alphas: list[int] = []
            for _ in range(r):
                room = cap // int(np.prod(alphas or [1]))
                if room < p:
                    break
                k = int(rng.integers(1, 4))
                while p**k > room:
                    k -= 1
                alphas.append(p**k)
            alphas = alphas or [p]
        names = _vars("S", len(alphas))
        one = PolyExpr.constant(names, p, 1)
        rels = tuple((one + PolyExpr.variable(names, p, v)) ** a - one for v, a in zip(names, alphas))
        return Presentation(fc, names, rels)
    r = int(rng.integers(1, spec.n_cap + 1))
    names = _vars(prefix, r)
    a = _exponents(rng, r, cap)
    rels = [PolyExpr(names, p, {tuple(ai if j == i else 0 for j in range(r)): 1}) for i, ai in enumerate(a)]
    if spec.kind == "monomial_general" and r > 1:
        for _ in range(int(rng.integers(1, 3))):
            rels.append(PolyExpr(names, p, {_monomial(rng, a): 1}))
    elif spec.kind == "binomial" and int(np.prod(a)) > r + 2:
        for _ in range(int(rng.integers(1, 3))):
            m1, m2 = _monomial(rng, a), _monomial(rng, a)
            if m1 != m2:
                rels.append(PolyExpr(names, p, {m1: 1, m2: -int(rng.integers(1, p)) if p > 2 else 1}))
    return Presentation(fc, names, tuple(rels))


def generate_algebra(spec: InstanceSpec, salt: int = 0) -> FiniteLocalAlgebra:
    return compile_presentation(random_presentation(spec, salt=salt), dim_cap=max(spec.dim_cap, 1))


# -- Gorenstein and other algebras -----------------------------------------

def inverse_system_algebra(p: int, r: int, t: int, rng, dense: float = 0.6) -> FiniteLocalAlgebra:
    """k[y]/(y)^{t+1} modulo the annihilator of a random form F of degree t.

    The pairing (g, h) -> F(g h) with F a linear functional nonzero in top
    degree has an ideal as radical; the quotient has one-dimensional socle.
    """
    T = truncated_poly_algebra(p, r, t)
    top = [k for k, m in enumerate(T.monomials) if sum(m) == t]
    F = np.zeros(T.dim, dtype=np.int64)
    for k in range(T.dim):
        if rng.random() < dense:
            F[k] = rng.integers(1, p)
    F[0] = 0
    if not F[top].any():
        F[top[int(rng.integers(len(top)))]] = 1
    G = matmul(T.struct, F, p)  # G[i, j] = F(e_i e_j)
    ann = kernel(G, p)
    Q, _ = quotient(T, ann)
    return Q


def gorenstein_algebras(p: int, count: int, seed: int, dim_cap: int = 16) -> list[FiniteLocalAlgebra]:
    """A mix of complete intersections and inverse-system Gorenstein algebras."""
    out: list[FiniteLocalAlgebra] = []
    i = 0
    while len(out) < count:
        if i > 50 * count + 100:
            raise GenerationBudgetExhausted(f"found only {len(out)} Gorenstein algebras")
        rng = make_rng(seed, 7001, p, i)
        choice = i % 3
        i += 1
        try:
            if choice == 2:
                # socle degree 2 with r >= 3 is usually not a complete intersection
                r, t = [(3, 2), (4, 2), (2, 3), (3, 3), (3, 2)][int(rng.integers(5))]
                A = inverse_system_algebra(p, r, t, rng)
            else:
                kind = ("monomial_ci", "binomial")[choice]
                A = generate_algebra(InstanceSpec(int(rng.integers(2**31)), kind, p, dim_cap=dim_cap, n_cap=3))
        except ArtinflatError:
            continue
        if A.dim <= dim_cap and is_gorenstein(A):
            out.append(A)
    return out


def non_gorenstein_algebras(p: int, count: int, seed: int, dim_cap: int = 16) -> list[FiniteLocalAlgebra]:
    out: list[FiniteLocalAlgebra] = []
    i = 0
    while len(out) < count:
        if i > 50 * count + 100:
            raise GenerationBudgetExhausted(f"found only {len(out)} non-Gorenstein algebras")
        rng = make_rng(seed, 7002, p, i)
        i += 1
        try:
            if i % 4 == 0:
                A = truncated_poly_algebra(p, int(rng.integers(2, 4)), int(rng.integers(1, 3)))
            else:
                A = generate_algebra(InstanceSpec(int(rng.integers(2**31)), "monomial_general", p, dim_cap=dim_cap, n_cap=3))
        except ArtinflatError:
            continue
        if A.dim <= dim_cap and not is_gorenstein(A):
            out.append(A)
    return out


# -- elements ---------------------------------------------------------------

def random_element(B: FiniteLocalAlgebra, rng, *, in_max_ideal: bool = False, power: int = 1, density: float = 0.5) -> Element:
    """Random element of m^power (or of B if not in_max_ideal)."""
    p = B.p
    if not in_max_ideal:
        c = rng.integers(0, p, size=B.dim) * (rng.random(B.dim) < density)
        return Element(B, c)
    space = B.max_ideal_power(power)
    if space.dim == 0:
        return B.zero()
    w = rng.integers(0, p, size=space.dim) * (rng.random(space.dim) < density)
    return Element(B, matmul(w, space.basis, p))


def random_unit(B: FiniteLocalAlgebra, rng) -> Element:
    e = random_element(B, rng, in_max_ideal=True)
    c = e.coords.copy()
    c[0] = rng.integers(1, B.p)
    return Element(B, c)


# -- morphisms --------------------------------------------------------------

def substitute(poly: PolyExpr, images: Sequence[PolyExpr]) -> PolyExpr:
    """poly(images), all images in one polynomial ring."""
    ring_vars, p = images[0].variables, images[0].p
    out = PolyExpr(ring_vars, p, {})
    for exps, c in poly.terms.items():
        term = PolyExpr.constant(ring_vars, p, c)
        for img, e in zip(images, exps):
            if e:
                term = term * img**e
        out = out + term
    return out


def _homogeneous_form(rng, names, p, lead: int, degree: int, density: float) -> PolyExpr:
    """x_lead^degree plus random other monomials of the same degree."""
    r = len(names)
    terms = {tuple(degree if j == lead else 0 for j in range(r)): 1}
    for e in iproduct(range(degree + 1), repeat=r):
        if sum(e) == degree and e not in terms and rng.random() < density:
            terms[e] = int(rng.integers(1, p))
    return PolyExpr(tuple(names), p, terms)


@dataclass
class MorphismInstance:
    A: FiniteLocalAlgebra
    B: FiniteLocalAlgebra
    phi: AlgebraMorphism
    description: str
    construction: str  # "substitution" or "rejection"


def flat_morphism(spec: InstanceSpec, salt: int = 0, budget: int = 50) -> MorphismInstance:
    """A -> B = k[x]/I_A(f) with f a homogeneous system of parameters, s_i -> f_i.

    k[x] is free over k[f], so B = A (x)_{k[s]} k[x] is flat over A, local,
    with edim B = edim A (I_A lies in (s)^2) and fiber k[x]/(f) a complete
    intersection.
    """
    rng = spec.rng(2, salt)
    p = spec.p
    for attempt in range(budget):
        sub = InstanceSpec(int(rng.integers(2**31)), spec.kind, p, dim_cap=max(2, spec.dim_cap // 2), n_cap=spec.n_cap, alphas=spec.alphas, path=spec.path)
        presA = random_presentation(sub, prefix="s")
        try:
            A = compile_presentation(presA, dim_cap=spec.dim_cap)
        except ArtinflatError:
            continue
        r = len(presA.variables)
        names = _vars("x", r)
        budget_deg = max(1, spec.dim_cap // A.dim)
        degrees = [1] * r
        for i in rng.permutation(r):
            d = int(rng.integers(1, 4))
            while d > 1 and int(np.prod(degrees)) // degrees[i] * d > budget_deg:
                d -= 1
            degrees[i] = d
        perm = rng.permutation(r)
        fs = [_homogeneous_form(rng, names, p, int(perm[i]), degrees[i], 0.3) for i in range(r)]
        if rng.random() < 0.3:
            i = int(rng.integers(r))
            fs[i] = fs[i] + _homogeneous_form(rng, names, p, int(rng.integers(r)), degrees[i] + 1, 0.2)
        relsB = tuple(substitute(f, fs) for f in presA.relations)
        try:
            B = compile_presentation(Presentation(FieldConfig(p), names, relsB), dim_cap=spec.dim_cap)
            phi = AlgebraMorphism.from_images(A, B, [B.evaluate(f) for f in fs])
        except ArtinflatError:
            continue
        desc = f"{presA} -> F_{p}[{','.join(names)}]: " + ", ".join(
            f"{s} -> {format_poly(f.terms, names)}" for s, f in zip(presA.variables, fs)
        )
        return MorphismInstance(A, B, phi, desc, "substitution")
    raise GenerationBudgetExhausted(f"no flat morphism within {budget} attempts")


def rejection_morphism(spec: InstanceSpec, salt: int = 0, budget: int = 200, *, same_edim: bool = True) -> MorphismInstance:
    """Random images of the generators of A in m_B, kept when the relations map to zero."""
    rng = spec.rng(3, salt)
    p = spec.p
    for attempt in range(budget):
        subA = InstanceSpec(int(rng.integers(2**31)), spec.kind, p, dim_cap=max(2, spec.dim_cap // 2), n_cap=spec.n_cap, alphas=spec.alphas, path=spec.path)
        kindB = spec.kind if spec.kind != "user_file" else "monomial_general"
        subB = InstanceSpec(int(rng.integers(2**31)), kindB, p, dim_cap=spec.dim_cap, n_cap=spec.n_cap)
        try:
            presA = random_presentation(subA, prefix="s")
            A = compile_presentation(presA, dim_cap=spec.dim_cap)
            B = compile_presentation(random_presentation(subB, prefix="x"), dim_cap=spec.dim_cap)
        except ArtinflatError:
            continue
        if same_edim and len(A.minimal_generators()) != len(B.minimal_generators()):
            continue
        for _ in range(10):
            depth = int(rng.integers(1, 3))
            images = [random_element(B, rng, in_max_ideal=True, power=depth, density=0.6) for _ in presA.variables]
            try:
                phi = AlgebraMorphism.from_images(A, B, images)
            except ValidationError:
                continue
            desc = f"{presA} -> B(dim {B.dim}): " + ", ".join(
                f"{s} -> {B.format(img)}" for s, img in zip(presA.variables, images)
            )
            return MorphismInstance(A, B, phi, desc, "rejection")
    raise GenerationBudgetExhausted(f"no valid morphism within {budget} attempts")


def random_morphism(spec: InstanceSpec, salt: int = 0) -> MorphismInstance:
    """Substitution morphisms half of the time, rejection-sampled ones otherwise."""
    if spec.rng(4, salt).random() < 0.5:
        return flat_morphism(spec, salt)
    return rejection_morphism(spec, salt)


# -- modules ----------------------------------------------------------------

MODULE_SHAPES = ("free", "twisted_free", "coker_free", "principal_quotient", "plus_residue",
                 "random_coker", "invariant_quotient", "residue_field")


def _twist(M: FiniteModule, rng) -> FiniteModule:
    """Conjugate the action by a random invertible F_p-matrix."""
    p, s = M.parent.p, M.dim
    while True:
        P = rng.integers(0, p, size=(s, s))
        solver = LinearSolver(P, p)
        if solver.rank == s:
            break
    Pinv = solver.solve_many(np.eye(s, dtype=np.int64))
    acts = np.array([matmul(matmul(P, a, p), Pinv, p) for a in M.actions])
    return FiniteModule(M.parent, acts, check=False)


def random_module(B: FiniteLocalAlgebra, rng, shape: str | None = None, dim_cap: int = 64) -> tuple[str, FiniteModule]:
    """A module of a named shape; free-like shapes are flat, the rest usually are not."""
    shape = shape or MODULE_SHAPES[int(rng.integers(len(MODULE_SHAPES)))]
    max_rank = max(1, dim_cap // B.dim)
    if shape == "free":
        M = FiniteModule.free(B, int(rng.integers(1, min(2, max_rank) + 1)))
    elif shape == "twisted_free":
        M = _twist(FiniteModule.free(B, int(rng.integers(1, min(2, max_rank) + 1))), rng)
    elif shape == "coker_free":
        # coker of B -> B^2, 1 -> (u, g) with u a unit, isomorphic to B
        M = FiniteModule.cokernel(B, [[random_unit(B, rng)], [random_element(B, rng)]]) if max_rank >= 2 else FiniteModule.regular(B)
    elif shape == "principal_quotient":
        M = FiniteModule.cokernel(B, [[random_element(B, rng, in_max_ideal=True)]])
    elif shape == "plus_residue":
        M = FiniteModule.regular(B).direct_sum(FiniteModule.residue_field(B))
    elif shape == "random_coker":
        b = int(rng.integers(1, min(2, max_rank) + 1))
        a = int(rng.integers(1, 3))
        mat = [[random_element(B, rng, in_max_ideal=rng.random() < 0.7) for _ in range(a)] for _ in range(b)]
        M = FiniteModule.cokernel(B, mat)
    elif shape == "invariant_quotient":
        F = FiniteModule.free(B, int(rng.integers(1, min(2, max_rank) + 1)))
        vecs = rng.integers(0, B.p, size=(int(rng.integers(1, 3)), F.dim))
        vecs = vecs * (rng.random(vecs.shape) < 0.3)
        M = F.quotient(F.submodule_generated(vecs))
    elif shape == "residue_field":
        M = FiniteModule.residue_field(B)
    else:
        raise ValueError(f"unknown module shape {shape!r}")
    return shape, M


def module_family(B: FiniteLocalAlgebra, count: int, seed: int, salt: int = 0, dim_cap: int = 64) -> list[tuple[str, FiniteModule]]:
    """``count`` modules cycling through every shape, so flat and non-flat shapes both occur."""
    out = []
    for j in range(count):
        rng = make_rng(seed, 9001, salt, j)
        out.append(random_module(B, rng, MODULE_SHAPES[j % len(MODULE_SHAPES)], dim_cap))
    return out


def a_flat_module(B: FiniteLocalAlgebra, rng, dim_cap: int = 64) -> tuple[str, FiniteModule]:
    """A nonzero B-module that is flat over A whenever B is (a free-like shape)."""
    shape = ("free", "twisted_free", "coker_free")[int(rng.integers(3))]
    return random_module(B, rng, shape, dim_cap)


# -- complete instances -----------------------------------------------------

@dataclass
class Theorem1Instance:
    seed: int
    morphism: MorphismInstance
    module_shape: str
    M: FiniteModule

    @property
    def A(self):
        return self.morphism.A

    @property
    def B(self):
        return self.morphism.B

    @property
    def phi(self):
        return self.morphism.phi


def theorem1_instance(seed: int, p: int, kind: str = "monomial_ci", dim_cap: int = 32, n_cap: int = 3) -> Theorem1Instance:
    spec = InstanceSpec(seed, kind, p, dim_cap=dim_cap, n_cap=n_cap)
    mor = flat_morphism(spec)
    shape, M = a_flat_module(mor.B, spec.rng(5), dim_cap=2 * dim_cap)
    return Theorem1Instance(seed, mor, shape, M)


@dataclass
class LemmaSample:
    instance: LemmaInstance
    m: np.ndarray
    description: str


def lemma_sample(seed: int, p: int, dim_cap: int = 32, n_cap: int = 4, module_cap: int = 64) -> LemmaSample:
    """x from a flat substitution morphism, W perturbed by syzygies of u, m with Delta m in J_x M."""
    kinds = ("monomial_ci", "monomial_general", "binomial", "group_algebra")
    rng = make_rng(seed, 8001, p)
    kind = kinds[int(rng.integers(len(kinds)))]
    spec = InstanceSpec(int(rng.integers(2**31)), kind, p, dim_cap=dim_cap, n_cap=n_cap)
    mor = flat_morphism(spec)
    _, M = a_flat_module(mor.B, rng, dim_cap=module_cap)
    base = instance_from_morphism(mor.phi, M)
    B, n = mor.B, base.n
    W = [row[:] for row in base.W]
    if n and rng.random() < 0.7:
        # add rows of syzygies of u: keeps x = W u, changes Delta
        L = np.hstack([B.mult_matrix(a) for a in base.u])
        syz = kernel(L, p)
        if syz.dim:
            for k in range(n):
                if rng.random() < 0.5:
                    w = matmul(rng.integers(0, p, size=syz.dim), syz.basis, p)
                    W[k] = [W[k][i] + Element(B, w[i * B.dim:(i + 1) * B.dim]) for i in range(n)]
    inst = LemmaInstance(B, base.x, base.u, W, M)
    pre = delta_preimage_space(inst)
    if pre.dim and rng.random() < 0.95:
        m = matmul(rng.integers(0, p, size=pre.dim), pre.basis, p)
    else:
        m = np.zeros(M.dim, dtype=np.int64)
    return LemmaSample(inst, m, mor.description)
