"""Finite-dimensional commutative local algebras over F_p.

An algebra of dimension d has basis e_0, ..., e_{d-1} with e_0 = 1 and
structure constants ``struct[i, j, k]`` giving e_i e_j = sum_k struct[i,j,k] e_k.
The basis is normalized so that the maximal ideal is span(e_1, ..., e_{d-1});
in particular the residue field is F_p and an element is a unit exactly when
its e_0 coordinate is nonzero.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import CapExceeded, NotLocal, ValidationError
from .linalg import FieldConfig, LinearSolver, Subspace, matmul

DEFAULT_DET_CAP = 8


class FiniteLocalAlgebra:
    """A local F_p-algebra given by structure constants.

    ``labels`` name the basis vectors for printing.  Algebras built from a
    presentation additionally carry ``variables``, ``generator_coords`` (the
    coordinates of each variable) and ``monomials`` (the exponent vector of
    each basis element), which enable parsing of polynomial expressions and
    morphisms given by generator images.
    """

    def __init__(
        self,
        field: FieldConfig | int,
        struct,
        *,
        labels: Sequence[str] | None = None,
        variables: Sequence[str] | None = None,
        generator_coords=None,
        monomials: Sequence[tuple[int, ...]] | None = None,
        check_associativity: bool = True,
    ):
        self.field = field if isinstance(field, FieldConfig) else FieldConfig(field)
        p = self.p = self.field.p
        T = np.asarray(struct, dtype=np.int64) % p
        if T.ndim != 3 or not (T.shape[0] == T.shape[1] == T.shape[2]) or T.shape[0] < 1:
            raise ValidationError(f"structure constants must have shape (d, d, d) with d >= 1, got {T.shape}")
        d = self.dim = T.shape[0]
        T.flags.writeable = False
        self.struct = T
        # mult[i] is the matrix of multiplication by e_i: column j holds e_i e_j
        self.mult = np.ascontiguousarray(np.transpose(T, (0, 2, 1)))
        self.mult.flags.writeable = False
        self._flat = T.reshape(d, d * d)
        self.labels = list(labels) if labels is not None else ["1"] + [f"e{i}" for i in range(1, d)]
        if len(self.labels) != d:
            raise ValidationError("wrong number of basis labels")
        self.variables = tuple(variables) if variables is not None else None
        self.generator_coords = None
        if generator_coords is not None:
            self.generator_coords = np.asarray(generator_coords, dtype=np.int64).reshape(-1, d) % p
        self.monomials = [tuple(m) for m in monomials] if monomials is not None else None
        self.max_ideal = Subspace(d, np.eye(d, dtype=np.int64)[1:], p)
        self._validate(check_associativity)
        self._powers = self._power_chain()
        self._min_gen_idx: list[int] | None = None

    # -- validation -------------------------------------------------------

    def _validate(self, check_associativity: bool):
        T, d, p = self.struct, self.dim, self.p
        if not np.array_equal(T[0], np.eye(d, dtype=np.int64)):
            j = int(np.flatnonzero(np.any(T[0] != np.eye(d, dtype=np.int64), axis=1))[0])
            raise ValidationError(f"unit law fails: e_0 * e_{j} != e_{j}")
        diff = np.argwhere(T != T.transpose(1, 0, 2))
        if diff.size:
            i, j, _ = diff[0]
            raise ValidationError(f"not commutative: e_{i} e_{j} != e_{j} e_{i}")
        if check_associativity:
            for i in range(d):
                # (e_i e_j) e_l  vs  (e_j e_l) e_i, using commutativity
                lhs = matmul(T[i], self._flat, p).reshape(d, d, d)
                rhs = matmul(T.reshape(d * d, d), T[:, i, :], p).reshape(d, d, d)
                bad = np.argwhere(lhs != rhs)
                if bad.size:
                    j, l, _ = bad[0]
                    raise ValidationError(f"not associative on basis triple (e_{i}, e_{j}, e_{l})")
        if d > 1:
            leak = np.argwhere(T[1:, 1:, 0] != 0)
            if leak.size:
                i, j = leak[0] + 1
                raise NotLocal(
                    f"span(e_1..e_{d - 1}) is not an ideal: e_{i} e_{j} has a nonzero unit coordinate, "
                    f"so it would be a unit outside the maximal ideal"
                )

    def _power_chain(self) -> list[Subspace]:
        """[m, m^2, ..., m^t] ending with the zero subspace."""
        d, p = self.dim, self.p
        chain = [self.max_ideal]
        gens = self.mult[1:]
        while chain[-1].dim:
            cur = chain[-1]
            prods = np.swapaxes(matmul(gens, cur.basis.T, p), 1, 2).reshape(-1, d)
            nxt = Subspace(d, prods, p)
            if nxt.dim == cur.dim:
                raise NotLocal(f"maximal ideal is not nilpotent: m^{len(chain)} = m^{len(chain) + 1} != 0")
            chain.append(nxt)
        return chain

    # -- elements ---------------------------------------------------------

    def element(self, value) -> Element:
        """Coerce coordinates, an int, an Element or a polynomial string into an element."""
        if isinstance(value, Element):
            if value.parent is not self:
                raise ValueError("element belongs to another algebra")
            return value
        if isinstance(value, str):
            return self.parse_element(value)
        if isinstance(value, (int, np.integer)):
            c = np.zeros(self.dim, dtype=np.int64)
            c[0] = value
            return Element(self, c)
        return Element(self, value)

    def parse_element(self, text: str) -> Element:
        from .presentation import parse_poly

        if self.variables is None:
            raise ValueError("algebra has no named generators; cannot parse polynomial text")
        return self.evaluate(parse_poly(text, self.variables, self.p))

    def evaluate(self, poly) -> Element:
        """Value of a polynomial in this algebra's generators."""
        if self.generator_coords is None:
            raise ValueError("algebra has no generators to evaluate a polynomial at")
        gens = [Element(self, g) for g in self.generator_coords]
        return evaluate_monomials(self, gens, poly.terms)

    def zero(self) -> Element:
        return Element(self, np.zeros(self.dim, dtype=np.int64))

    def one(self) -> Element:
        return self.basis_element(0)

    def basis_element(self, i: int) -> Element:
        c = np.zeros(self.dim, dtype=np.int64)
        c[i] = 1
        return Element(self, c)

    def basis(self) -> list[Element]:
        return [self.basis_element(i) for i in range(self.dim)]

    def mult_matrix(self, a) -> np.ndarray:
        """Matrix of x -> a x in the basis coordinates."""
        a = a.coords if isinstance(a, Element) else np.asarray(a, dtype=np.int64)
        return matmul(a, self._flat, self.p).reshape(self.dim, self.dim).T

    def multiply(self, a: Element, b: Element) -> Element:
        if a.parent is not self or b.parent is not self:
            raise ValueError("cannot multiply elements of different algebras")
        return Element(self, matmul(b.coords, matmul(a.coords, self._flat, self.p).reshape(self.dim, self.dim), self.p))

    def is_unit(self, a: Element) -> bool:
        return int(a.coords[0]) % self.p != 0

    def invert(self, a: Element) -> Element:
        """Inverse of a unit a = c(1 + n): c^{-1} * sum_k (-n)^k, the sum being finite as n is nilpotent."""
        if not self.is_unit(a):
            raise ZeroDivisionError(f"{self.format(a)} lies in the maximal ideal and is not a unit")
        c_inv = self.field.inv(int(a.coords[0]))
        n = a * c_inv - self.one()
        neg = -n
        total, term = self.one(), self.one()
        for _ in range(self.nilpotency_index):
            term = term * neg
            if term.is_zero():
                break
            total = total + term
        return total * c_inv

    # -- ideals -----------------------------------------------------------

    def ideal_generated(self, gens: Sequence[Element]) -> IdealSpan:
        vecs = []
        for g in gens:
            if g.parent is not self:
                raise ValueError("ideal generators belong to another algebra")
            vecs.append(self.mult_matrix(g).T)
        if not vecs:
            return IdealSpan(self, Subspace.zero(self.dim, self.p))
        # A*g is already closed under multiplication, so one step is the fixed point
        return IdealSpan(self, Subspace(self.dim, np.vstack(vecs), self.p))

    def max_ideal_span(self) -> IdealSpan:
        return IdealSpan(self, self.max_ideal)

    def max_ideal_power(self, k: int) -> Subspace:
        if k <= 0:
            return Subspace.full(self.dim, self.p)
        if k - 1 < len(self._powers):
            return self._powers[k - 1]
        return Subspace.zero(self.dim, self.p)

    @property
    def nilpotency_index(self) -> int:
        """Least t >= 1 with m^t = 0."""
        return len(self._powers)

    def minimal_generator_indices(self) -> list[int]:
        """Basis indices e_i (i >= 1) whose images form a basis of m/m^2, chosen greedily in index order."""
        if self._min_gen_idx is None:
            m2 = self.max_ideal_power(2)
            chosen: list[int] = []
            span = m2
            for i in range(1, self.dim):
                v = np.zeros(self.dim, dtype=np.int64)
                v[i] = 1
                if not span.contains(v):
                    chosen.append(i)
                    span = Subspace(self.dim, np.vstack([span.basis, v]), self.p)
            self._min_gen_idx = chosen
        return list(self._min_gen_idx)

    def minimal_generators(self) -> list[Element]:
        return [self.basis_element(i) for i in self.minimal_generator_indices()]

    # -- printing ---------------------------------------------------------

    def format(self, a) -> str:
        coords = a.coords if isinstance(a, Element) else np.asarray(a)
        parts = []
        for i, c in enumerate(coords):
            c = int(c)
            if c == 0:
                continue
            lab = self.labels[i]
            if lab == "1":
                parts.append(str(c))
            elif c == 1:
                parts.append(lab)
            else:
                parts.append(f"{c}*{lab}")
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"FiniteLocalAlgebra(p={self.p}, dim={self.dim})"


class Element:
    """An element of a FiniteLocalAlgebra, stored by its coordinates."""

    __slots__ = ("parent", "coords")

    def __init__(self, parent: FiniteLocalAlgebra, coords):
        coords = np.asarray(coords, dtype=np.int64) % parent.p
        if coords.shape != (parent.dim,):
            raise ValueError(f"element coordinates must have length {parent.dim}")
        coords.flags.writeable = False
        self.parent = parent
        self.coords = coords

    def _coerce(self, other) -> Element:
        if isinstance(other, Element):
            if other.parent is not self.parent:
                raise ValueError("elements belong to different algebras")
            return other
        if isinstance(other, (int, np.integer)):
            return self.parent.element(int(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Element(self.parent, self.coords + other.coords)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Element(self.parent, self.coords - other.coords)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Element(self.parent, -self.coords)

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return Element(self.parent, self.coords * (int(other) % self.parent.p))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.parent.multiply(self, other)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.parent.invert(self) ** (-e)
        result, base = self.parent.one(), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, np.integer)):
            other = self.parent.element(int(other))
        if not isinstance(other, Element):
            return NotImplemented
        return other.parent is self.parent and np.array_equal(self.coords, other.coords)

    def __hash__(self):
        return hash(self.coords.tobytes())

    def is_zero(self) -> bool:
        return not np.any(self.coords)

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        return f"Element({self.parent.format(self)})"

    def __str__(self):
        return self.parent.format(self)


def evaluate_monomials(target: FiniteLocalAlgebra, values: Sequence[Element], terms: dict) -> Element:
    """sum_c c * prod_i values[i]^a_i over ``terms`` = {exponent tuple: coefficient}."""
    total = target.zero()
    cache: dict[tuple[int, ...], Element] = {}
    for exps, coeff in sorted(terms.items()):
        total = total + _monomial_value(target, values, tuple(exps), cache) * int(coeff)
    return total


def _monomial_value(target, values, exps, cache):
    if exps in cache:
        return cache[exps]
    if not any(exps):
        out = target.one()
    else:
        i = max(k for k, e in enumerate(exps) if e)
        lower = list(exps)
        lower[i] -= 1
        out = _monomial_value(target, values, tuple(lower), cache) * values[i]
    cache[exps] = out
    return out


class IdealSpan:
    """An ideal of a FiniteLocalAlgebra, stored as a subspace of coordinates."""

    __slots__ = ("parent", "space")

    def __init__(self, parent: FiniteLocalAlgebra, space: Subspace):
        self.parent = parent
        self.space = space

    @property
    def dim(self) -> int:
        return self.space.dim

    def contains(self, a: Element) -> bool:
        return self.space.contains(a.coords)

    def elements(self) -> list[Element]:
        return [Element(self.parent, v) for v in self.space.basis]

    def __mul__(self, other: IdealSpan) -> IdealSpan:
        A = self.parent
        if other.parent is not A:
            raise ValueError("ideals of different algebras")
        vecs = [matmul(A.mult_matrix(g), other.space.basis.T, A.p).T for g in self.space.basis]
        if not vecs:
            return IdealSpan(A, Subspace.zero(A.dim, A.p))
        return IdealSpan(A, Subspace(A.dim, np.vstack(vecs), A.p))

    def __eq__(self, other):
        return isinstance(other, IdealSpan) and other.parent is self.parent and other.space == self.space

    def __repr__(self):
        return f"IdealSpan(dim={self.dim})"


def quotient(A: FiniteLocalAlgebra, ideal: IdealSpan | Subspace) -> tuple[FiniteLocalAlgebra, AlgebraMorphism]:
    """A/I on the complement basis of non-pivot coordinates, with the projection A -> A/I."""
    space = ideal.space if isinstance(ideal, IdealSpan) else ideal
    if space.dim == A.dim:
        raise ValidationError("quotient by the whole algebra is the zero ring")
    if not space.is_subspace_of(A.max_ideal):
        raise ValidationError("ideal is not contained in the maximal ideal")
    closed = np.swapaxes(matmul(A.mult, space.basis.T, A.p), 1, 2).reshape(-1, A.dim)
    if not space.contains_all(closed):
        raise ValidationError("subspace is not an ideal (not closed under multiplication)")
    keep = space.complement_coordinates()
    e = len(keep)
    # proj: reduce mod I, then read the kept coordinates
    proj = space.reduce(np.eye(A.dim, dtype=np.int64)).T[keep]
    T = A.struct[np.ix_(keep, keep)]
    Tq = matmul(T.reshape(e * e, A.dim), proj.T, A.p).reshape(e, e, e)
    gens = None
    if A.generator_coords is not None:
        gens = matmul(A.generator_coords, proj.T, A.p)
    Q = FiniteLocalAlgebra(
        A.field,
        Tq,
        labels=[A.labels[k] for k in keep],
        variables=A.variables,
        generator_coords=gens,
        monomials=[A.monomials[k] for k in keep] if A.monomials is not None else None,
        check_associativity=False,
    )
    return Q, AlgebraMorphism(A, Q, proj)


class AlgebraMorphism:
    """A local F_p-algebra homomorphism given by its matrix on coordinates (target_dim x source_dim)."""

    def __init__(self, source: FiniteLocalAlgebra, target: FiniteLocalAlgebra, matrix, *, check: bool = True):
        if source.p != target.p:
            raise ValidationError("morphism between algebras over different fields")
        self.source = source
        self.target = target
        M = np.asarray(matrix, dtype=np.int64) % source.p
        if M.shape != (target.dim, source.dim):
            raise ValidationError(f"morphism matrix must have shape {(target.dim, source.dim)}, got {M.shape}")
        M.flags.writeable = False
        self.matrix = M
        if check:
            self.validate()

    def validate(self):
        A, B, M = self.source, self.target, self.matrix
        if not np.array_equal(M[:, 0], B.one().coords):
            raise ValidationError("morphism does not map 1 to 1")
        for i in range(A.dim):
            img_i = M[:, i]
            lhs = matmul(M, A.struct[i].T, A.p)  # column j: phi(e_i e_j)
            rhs = matmul(B.mult_matrix(img_i), M, A.p)  # column j: phi(e_i) phi(e_j)
            bad = np.flatnonzero(np.any(lhs != rhs, axis=0))
            if bad.size:
                raise ValidationError(
                    f"not multiplicative: phi({A.labels[i]} * {A.labels[bad[0]]}) != phi({A.labels[i]}) * phi({A.labels[bad[0]]})"
                )
        if A.dim > 1 and np.any(M[0, 1:]):
            i = int(np.flatnonzero(M[0, 1:])[0]) + 1
            raise NotLocal(f"morphism is not local: image of {A.labels[i]} is a unit")

    @classmethod
    def from_images(cls, source: FiniteLocalAlgebra, target: FiniteLocalAlgebra, images: Sequence[Element]):
        """The morphism sending the i-th generator of ``source`` to ``images[i]``.

        Requires a monomial basis on the source; raises ValidationError if the
        assignment does not respect the source relations.
        """
        if source.monomials is None or source.generator_coords is None:
            raise ValueError("source algebra has no presentation; cannot define a map by generator images")
        if len(images) != len(source.variables):
            raise ValidationError(f"expected {len(source.variables)} generator images, got {len(images)}")
        images = [target.element(im) for im in images]
        cols = [evaluate_monomials(target, images, {mono: 1}).coords for mono in source.monomials]
        phi = cls(source, target, np.array(cols).T)
        for name, g, im in zip(source.variables, source.generator_coords, images):
            if not np.array_equal(phi(Element(source, g)).coords, im.coords):
                raise ValidationError(f"image of generator {name} is inconsistent with the source relations")
        return phi

    def __call__(self, a: Element) -> Element:
        if a.parent is not self.source:
            raise ValueError("element is not in the source algebra")
        return Element(self.target, matmul(self.matrix, a.coords, self.source.p))

    def compose(self, inner: AlgebraMorphism) -> AlgebraMorphism:
        """self o inner."""
        if inner.target is not self.source:
            raise ValueError("morphisms are not composable")
        return AlgebraMorphism(inner.source, self.target, matmul(self.matrix, inner.matrix, self.source.p), check=False)

    @classmethod
    def identity(cls, A: FiniteLocalAlgebra) -> AlgebraMorphism:
        return cls(A, A, np.eye(A.dim, dtype=np.int64), check=False)

    def __repr__(self):
        return f"AlgebraMorphism(dim {self.source.dim} -> dim {self.target.dim})"


def base_change_fiber(phi: AlgebraMorphism) -> tuple[FiniteLocalAlgebra, AlgebraMorphism]:
    """B / m_A B together with the projection from B."""
    A, B = phi.source, phi.target
    images = [phi(g) for g in A.minimal_generators()]
    return quotient(B, B.ideal_generated(images))


def determinant(entries: Sequence[Sequence[Element]], algebra: FiniteLocalAlgebra | None = None, cap: int = DEFAULT_DET_CAP) -> Element:
    """Division-free determinant by Laplace expansion along rows, memoized on column subsets."""
    n = len(entries)
    if n == 0:
        if algebra is None:
            raise ValueError("empty matrix needs an explicit algebra")
        return algebra.one()
    if n > cap:
        raise CapExceeded(f"determinant size {n} exceeds cap {cap}")
    A = entries[0][0].parent
    memo: dict[int, Element] = {}

    def det_from(row: int, cols: int) -> Element:
        # determinant of rows row..n-1 restricted to the column bitmask `cols`
        if row == n:
            return A.one()
        if cols in memo:
            return memo[cols]
        total = A.zero()
        sign = 1
        for c in range(n):
            if cols >> c & 1:
                a = entries[row][c]
                if not a.is_zero():
                    term = a * det_from(row + 1, cols & ~(1 << c))
                    total = total + term if sign > 0 else total - term
                sign = -sign
        memo[cols] = total
        return total

    return det_from(0, (1 << n) - 1)


def solve_in_ideal(B: FiniteLocalAlgebra, gens: Sequence[Element], target: Element) -> list[Element] | None:
    """Coefficients c_i in B with target = sum c_i gens_i, or None."""
    if not gens:
        return [] if target.is_zero() else None
    mat = np.hstack([B.mult_matrix(g) for g in gens])
    sol = LinearSolver(mat, B.p).solve(target.coords)
    if sol is None:
        return None
    d = B.dim
    return [Element(B, sol[i * d:(i + 1) * d]) for i in range(len(gens))]
