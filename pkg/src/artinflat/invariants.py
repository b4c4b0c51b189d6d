"""Ring invariants of finite local algebras: embedding dimension, socle,
Gorenstein and complete-intersection tests, Wiebe matrices."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .algebra import Element, FiniteLocalAlgebra, determinant
from .linalg import LinearSolver, Subspace, kernel, matmul
from .presentation import truncated_poly_algebra


def edim(A: FiniteLocalAlgebra) -> int:
    """dim m/m^2."""
    return A.max_ideal.dim - A.max_ideal_power(2).dim


def nilpotency_index(A: FiniteLocalAlgebra) -> int:
    return A.nilpotency_index


def minimal_generators(A: FiniteLocalAlgebra) -> list[Element]:
    return A.minimal_generators()


def socle(A: FiniteLocalAlgebra) -> Subspace:
    """Ann(m); the whole ring when m = 0."""
    gens = A.minimal_generators()
    if not gens:
        return Subspace.full(A.dim, A.p)
    return kernel(np.vstack([A.mult_matrix(g) for g in gens]), A.p)


def is_gorenstein(A: FiniteLocalAlgebra) -> bool:
    return socle(A).dim == 1


def _koszul(B: FiniteLocalAlgebra, u: Sequence[Element]):
    """Cycles Z_1 and boundaries B_1 of the Koszul complex K(u; B) in degree 1.

    K_1 = B^r is laid out as r consecutive blocks of B-coordinates.
    """
    r, d, p = len(u), B.dim, B.p
    L = [B.mult_matrix(x) for x in u]
    cycles = kernel(np.hstack(L), p) if r else Subspace.zero(0, p)
    cols = []
    for i, j in combinations(range(r), 2):
        block = np.zeros((r * d, d), dtype=np.int64)
        block[j * d:(j + 1) * d] = L[i]
        block[i * d:(i + 1) * d] = (-L[j]) % p
        cols.append(block)
    if cols:
        boundaries = Subspace(r * d, np.hstack(cols).T, p)
    else:
        boundaries = Subspace.zero(r * d, p)
    return cycles, boundaries


def koszul_h1_dim(B: FiniteLocalAlgebra, u: Sequence[Element] | None = None) -> int:
    """dim H_1(u; B).  For u a minimal generating set of m this is the minimal
    number of relations mu(I) of any minimal presentation B = R/I."""
    u = B.minimal_generators() if u is None else list(u)
    cycles, boundaries = _koszul(B, u)
    return cycles.dim - boundaries.dim


def is_complete_intersection(B: FiniteLocalAlgebra) -> tuple[bool, int]:
    """(B is a zero-dimensional complete intersection, mu) with mu the minimal relation count."""
    mu = koszul_h1_dim(B)
    return mu == edim(B), mu


@dataclass
class MinimalPresentation:
    """B = R'/I'' with R' = k[y_1..y_r]/(y)^{t+1} and y_i -> u_i."""

    ambient: FiniteLocalAlgebra
    to_target: np.ndarray  # dim B x dim R'
    relations: Subspace  # I'' in R' coordinates
    mI: Subspace  # m_{R'} I''
    lifted: list[np.ndarray]  # minimal generators of I'' (R' coordinates)

    @property
    def mu(self) -> int:
        return self.relations.dim - self.mI.dim


def minimal_presentation(B: FiniteLocalAlgebra, u: Sequence[Element] | None = None, dim_cap: int = 4096) -> MinimalPresentation:
    """Kernel of the surjection from a truncated polynomial ring onto B.

    With t the nilpotency index of m_B we have m^t in I and m^{t+1} in m I,
    so truncating above degree t does not change I/mI.
    """
    u = B.minimal_generators() if u is None else list(u)
    r, t = len(u), max(B.nilpotency_index, 1)
    R = truncated_poly_algebra(B.field, r, t, dim_cap=dim_cap)
    psi = np.array([_monomial_in(B, u, mono).coords for mono in R.monomials], dtype=np.int64).T
    rel = kernel(psi, B.p)
    if r and rel.dim:
        prods = np.vstack([matmul(R.mult_matrix(g), rel.basis.T, R.p).T for g in R.generator_coords])
        mI = Subspace(R.dim, prods, R.p)
    else:
        mI = Subspace.zero(R.dim, R.p)
    lifted = []
    span = mI
    for v in rel.basis:
        if not span.contains(v):
            lifted.append(v)
            span = Subspace(R.dim, np.vstack([span.basis, v]), R.p)
    return MinimalPresentation(R, psi, rel, mI, lifted)


def _monomial_in(B, u, mono) -> Element:
    out = B.one()
    for x, e in zip(u, mono):
        for _ in range(e):
            out = out * x
    return out


def minimal_relation_count(B: FiniteLocalAlgebra) -> int:
    """mu(I) computed from the truncated presentation (independent of the Koszul route)."""
    return minimal_presentation(B).mu


@dataclass
class WiebeMatrix:
    """Square W over B with W u = 0 and det W != 0."""

    algebra: FiniteLocalAlgebra
    u: list[Element]
    entries: list[list[Element]]
    det: Element

    def verify(self) -> bool:
        B = self.algebra
        n = len(self.u)
        if len(self.entries) != n or any(len(row) != n for row in self.entries):
            return False
        for row in self.entries:
            s = B.zero()
            for w, x in zip(row, self.u):
                s = s + w * x
            if not s.is_zero():
                return False
        if determinant(self.entries, B) != self.det or self.det.is_zero():
            return False
        soc = socle(B)
        if not soc.contains(self.det.coords):
            return False
        if soc.dim == 1 and soc != Subspace(B.dim, self.det.coords, B.p):
            return False
        return True


def wiebe_matrix(B: FiniteLocalAlgebra, u: Sequence[Element] | None = None, method: str = "koszul") -> WiebeMatrix | None:
    """A Wiebe matrix for the minimal generators u of m_B, or None when B is not a complete intersection.

    ``method="koszul"`` takes rows from Koszul 1-cycles representing a basis of
    H_1(u; B); ``method="presentation"`` writes lifted minimal relations
    f_j = sum_i w_ji y_i in the truncated ambient ring and maps w to B.
    """
    u = B.minimal_generators() if u is None else list(u)
    r, d = len(u), B.dim
    if method == "koszul":
        cycles, boundaries = _koszul(B, u)
        if cycles.dim - boundaries.dim != r:
            return None
        rows = []
        span = boundaries
        for z in cycles.basis:
            if len(rows) == r:
                break
            if not span.contains(z):
                rows.append(z)
                span = Subspace(r * d, np.vstack([span.basis, z]), B.p)
        entries = [[Element(B, z[i * d:(i + 1) * d]) for i in range(r)] for z in rows]
    elif method == "presentation":
        pres = minimal_presentation(B, u)
        if pres.mu != r:
            return None
        R = pres.ambient
        solver = LinearSolver(np.hstack([R.mult_matrix(g) for g in R.generator_coords]), R.p) if r else None
        entries = []
        for f in pres.lifted:
            w = solver.solve(f)
            assert w is not None, "minimal relation not in the maximal ideal of the ambient ring"
            entries.append([Element(B, matmul(pres.to_target, w[i * R.dim:(i + 1) * R.dim], B.p)) for i in range(r)])
    else:
        raise ValueError(f"unknown method {method!r}")
    W = WiebeMatrix(B, u, entries, determinant(entries, B))
    assert W.verify(), "Wiebe matrix failed re-verification on a complete intersection"
    return W


@dataclass(frozen=True)
class InvariantReport:
    dim: int
    edim: int
    socle_dim: int
    nilpotency_index: int
    is_gorenstein: bool
    is_ci: bool
    mu: int

    def __post_init__(self):
        assert self.is_gorenstein == (self.socle_dim == 1)
        assert not self.is_ci or self.is_gorenstein, "complete intersection that is not Gorenstein"


def invariant_report(B: FiniteLocalAlgebra) -> InvariantReport:
    soc = socle(B)
    ci, mu = is_complete_intersection(B)
    return InvariantReport(
        dim=B.dim,
        edim=edim(B),
        socle_dim=soc.dim,
        nilpotency_index=B.nilpotency_index,
        is_gorenstein=soc.dim == 1,
        is_ci=ci,
        mu=mu,
    )
