"""Exact dense linear algebra over a prime field F_p.

Matrices are numpy ``int64`` arrays whose entries are kept reduced modulo p.
Products go through :func:`matmul`, which picks an exact backend from the
size of the largest possible intermediate sum (float64 BLAS while every
partial sum stays below 2**53, int64 below 2**63, Python ints otherwise).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_FLOAT_EXACT = 2**53
_INT64_SAFE = 2**63 - 1


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class FieldConfig:
    """The prime field F_p."""

    p: int

    def __post_init__(self):
        p = self.p
        if isinstance(p, bool) or not isinstance(p, (int, np.integer)):
            raise ValueError(f"field modulus must be an integer, got {p!r}")
        if not 2 <= p < 2**31:
            raise ValueError(f"field modulus {p} outside [2, 2^31)")
        if not is_prime(int(p)):
            raise ValueError(f"field modulus {p} is not prime")
        object.__setattr__(self, "p", int(p))

    def inv(self, a: int) -> int:
        a = int(a) % self.p
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in F_p")
        return pow(a, -1, self.p)

    def reduce(self, arr) -> np.ndarray:
        return np.asarray(arr, dtype=np.int64) % self.p


def _as_p(p) -> int:
    return p.p if isinstance(p, FieldConfig) else int(p)


def matmul(a, b, p) -> np.ndarray:
    """Exact ``a @ b mod p`` (numpy broadcasting semantics)."""
    p = _as_p(p)
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    inner = a.shape[-1] if a.ndim else 1
    bound = max(inner, 1) * (p - 1) ** 2
    if bound < _FLOAT_EXACT:
        out = np.matmul(a.astype(np.float64), b.astype(np.float64))
        return out.astype(np.int64) % p
    if bound < _INT64_SAFE:
        return np.matmul(a, b) % p
    out = np.matmul(a.astype(object), b.astype(object)) % p
    return out.astype(np.int64)


def rref(m, p, ncols: int | None = None) -> tuple[np.ndarray, int, list[int]]:
    """Reduced row-echelon form of ``m`` over F_p.

    Pivots are searched only among the first ``ncols`` columns (all columns
    by default); row operations always act on the full width, which lets
    callers carry an augmented block along.

    Returns ``(R, rank, pivot_columns)``; ``R`` has the same shape as ``m``
    with zero rows at the bottom.
    """
    p = _as_p(p)
    R = np.array(m, dtype=np.int64) % p
    if R.ndim != 2:
        raise ValueError("rref expects a 2-D matrix")
    rows, cols = R.shape
    if ncols is None:
        ncols = cols
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == rows:
            break
        nz = np.flatnonzero(R[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            R[[r, k]] = R[[k, r]]
        lead = int(R[r, c])
        if lead != 1:
            R[r] = R[r] * pow(lead, -1, p) % p
        col = R[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            R[hit] = (R[hit] - np.outer(col[hit], R[r])) % p
        pivots.append(c)
        r += 1
    return R, r, pivots


def rank(m, p) -> int:
    m = np.asarray(m)
    if m.size == 0:
        return 0
    return rref(m, p)[1]


class LinearSolver:
    """Row reduction of a fixed matrix, reused for many right-hand sides.

    The returned solution sets every free variable to 0, so results are
    reproducible for a given matrix.
    """

    def __init__(self, m, p):
        self.p = _as_p(p)
        m = np.asarray(m, dtype=np.int64) % self.p
        if m.ndim != 2:
            raise ValueError("LinearSolver expects a 2-D matrix")
        self.shape = m.shape
        rows, cols = m.shape
        aug = np.hstack([m, np.eye(rows, dtype=np.int64)])
        R, self.rank, self.pivots = rref(aug, self.p, ncols=cols)
        self._transform = R[:, cols:]

    def solve(self, b) -> np.ndarray | None:
        """One solution ``v`` of ``m @ v = b``, or ``None`` when b is not in the column space."""
        b = np.asarray(b, dtype=np.int64)
        if b.shape != (self.shape[0],):
            raise ValueError(f"right-hand side has shape {b.shape}, expected ({self.shape[0]},)")
        sol = self.solve_many(b[:, None])
        return None if sol is None else sol[:, 0]

    def solve_many(self, bs) -> np.ndarray | None:
        """Column-wise solve for a matrix of right-hand sides; ``None`` if any column is infeasible."""
        bs = np.asarray(bs, dtype=np.int64) % self.p
        c = matmul(self._transform, bs, self.p)
        if np.any(c[self.rank:]):
            return None
        out = np.zeros((self.shape[1], bs.shape[1]), dtype=np.int64)
        out[self.pivots] = c[: self.rank]
        return out

    def feasible(self, bs) -> np.ndarray:
        """Boolean per column: whether that right-hand side lies in the column space."""
        bs = np.asarray(bs, dtype=np.int64) % self.p
        if bs.ndim == 1:
            bs = bs[:, None]
        c = matmul(self._transform, bs, self.p)
        return ~np.any(c[self.rank:], axis=0)


def solve(m, b, p) -> np.ndarray | None:
    """Some ``v`` with ``m @ v = b`` (free variables set to 0), else ``None``."""
    return LinearSolver(m, p).solve(b)


class Subspace:
    """A linear subspace of F_p^n stored as the nonzero rows of an RREF matrix."""

    __slots__ = ("ambient_dim", "p", "basis", "pivots")

    def __init__(self, ambient_dim: int, vectors, p):
        self.ambient_dim = int(ambient_dim)
        self.p = _as_p(p)
        vectors = np.asarray(vectors, dtype=np.int64)
        if vectors.size:
            vectors = vectors.reshape(-1, self.ambient_dim)
        if vectors.size == 0:
            self.basis = np.zeros((0, self.ambient_dim), dtype=np.int64)
            self.pivots: list[int] = []
        else:
            R, r, piv = rref(vectors, self.p)
            self.basis = R[:r].copy()
            self.pivots = piv
        self.basis.flags.writeable = False

    @classmethod
    def zero(cls, n: int, p) -> Subspace:
        return cls(n, np.zeros((0, n)), p)

    @classmethod
    def full(cls, n: int, p) -> Subspace:
        return cls(n, np.eye(n, dtype=np.int64), p)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def _check(self, other: Subspace):
        if self.ambient_dim != other.ambient_dim or self.p != other.p:
            raise ValueError(
                f"subspace mismatch: F_{self.p}^{self.ambient_dim} vs F_{other.p}^{other.ambient_dim}"
            )

    def reduce(self, v) -> np.ndarray:
        """Canonical representative of ``v`` modulo this subspace (rows of a matrix reduced independently)."""
        v = np.asarray(v, dtype=np.int64) % self.p
        if v.shape[-1] != self.ambient_dim:
            raise ValueError(f"vector length {v.shape[-1]} != ambient dimension {self.ambient_dim}")
        if self.dim == 0:
            return v
        return (v - matmul(v[..., self.pivots], self.basis, self.p)) % self.p

    def contains(self, v) -> bool:
        return not np.any(self.reduce(v))

    def contains_all(self, vs) -> bool:
        vs = np.asarray(vs, dtype=np.int64)
        if vs.size == 0:
            return True
        vs = vs.reshape(-1, self.ambient_dim)
        return not np.any(self.reduce(vs))

    def sum(self, other: Subspace) -> Subspace:
        self._check(other)
        return Subspace(self.ambient_dim, np.vstack([self.basis, other.basis]), self.p)

    __add__ = sum

    def intersect(self, other: Subspace) -> Subspace:
        self._check(other)
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.ambient_dim, self.p)
        # a @ S == b @ T  <=>  [S; -T]^T (a, b) = 0
        stacked = np.vstack([self.basis, (-other.basis) % self.p]).T
        ker = kernel(stacked, self.p)
        coeffs = ker.basis[:, : self.dim]
        return Subspace(self.ambient_dim, matmul(coeffs, self.basis, self.p), self.p)

    def is_subspace_of(self, other: Subspace) -> bool:
        self._check(other)
        return other.contains_all(self.basis)

    def complement_coordinates(self) -> list[int]:
        """Coordinates that are not pivots; their unit vectors span a complement."""
        piv = set(self.pivots)
        return [i for i in range(self.ambient_dim) if i not in piv]

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.ambient_dim == other.ambient_dim
            and self.p == other.p
            and self.dim == other.dim
            and np.array_equal(self.basis, other.basis)
        )

    def __hash__(self):
        return hash((self.ambient_dim, self.p, self.basis.tobytes()))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim}, p={self.p})"


def kernel(m, p) -> Subspace:
    """The null space {v : m @ v = 0}."""
    p = _as_p(p)
    m = np.asarray(m, dtype=np.int64)
    rows, cols = m.shape
    if rows == 0:
        return Subspace.full(cols, p)
    R, r, piv = rref(m, p)
    free = [c for c in range(cols) if c not in set(piv)]
    vecs = np.zeros((len(free), cols), dtype=np.int64)
    for k, f in enumerate(free):
        vecs[k, f] = 1
        vecs[k, piv] = (-R[:r, f]) % p
    return Subspace(cols, vecs, p)


def column_space(m, p) -> Subspace:
    m = np.asarray(m, dtype=np.int64)
    return Subspace(m.shape[0], m.T, p)
