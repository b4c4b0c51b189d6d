"""Constructive ideal membership via minors of a transition matrix.

Setting: x = W u for sequences x, u of length n in a ring B and a square
matrix W over B, and a B-module M in which every relation sum x_k m_k = 0
has all m_k in J_x M.  If Delta = det W satisfies Delta m in J_x M, the
induction below produces b_1..b_n with m = sum u_i b_i, i.e. m in J_u M.

Subsets of {1..n} are bitmasks (bit i-1 for index i) and are visited in
increasing integer order, which makes every trace deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .algebra import AlgebraMorphism, DEFAULT_DET_CAP, Element, FiniteLocalAlgebra, solve_in_ideal
from .errors import CapExceeded, HypothesisTwoViolated, ParseError, PreconditionFailed, ValidationError
from .linalg import LinearSolver, Subspace, kernel
from .modules import FiniteModule, submodule_product

CERT_FORMAT = "artinflat-membership-certificate"
CERT_VERSION = 1


# -- signs ----------------------------------------------------------------

def _mask(I) -> int:
    if isinstance(I, (int, np.integer)):
        return int(I)
    m = 0
    for i in I:
        m |= 1 << (i - 1)
    return m


def _members(mask: int) -> list[int]:
    return [k + 1 for k in range(mask.bit_length()) if mask >> k & 1]


def epsilon_bar(i: int, j: int) -> int:
    if i == j:
        raise ValueError("epsilon_bar needs i != j")
    return 1 if i < j else -1


def epsilon(i: int, I, n: int | None = None) -> int:
    """(-1)^p with p the 1-based position of i in E_n minus (I - {i})."""
    mask = _mask(I)
    if not mask >> (i - 1) & 1:
        raise ValueError(f"{i} is not in {set(_members(mask))}")
    if n is not None and mask >> n:
        raise ValueError(f"subset {set(_members(mask))} not contained in 1..{n}")
    below = bin(mask & ((1 << (i - 1)) - 1)).count("1")
    return -1 if (i - below) % 2 else 1


def subsets_of_size(n: int, k: int) -> list[int]:
    return sorted(sum(1 << (i - 1) for i in c) for c in combinations(range(1, n + 1), k))


class SignTable:
    """epsilon and epsilon_bar for a fixed n, precomputed."""

    def __init__(self, n: int):
        self.n = n
        self._eps = {
            (i, mask): epsilon(i, mask)
            for mask in range(1 << n)
            for i in _members(mask)
        }

    def eps(self, i: int, I) -> int:
        return self._eps[(i, _mask(I))]

    @staticmethod
    def eps_bar(i: int, j: int) -> int:
        return epsilon_bar(i, j)


# -- minors ----------------------------------------------------------------

class MinorTable:
    """Minors Delta^I_J of a square matrix over B (rows I and columns J deleted), memoized."""

    def __init__(self, W: Sequence[Sequence[Element]], algebra: FiniteLocalAlgebra, cap: int = DEFAULT_DET_CAP):
        self.n = len(W)
        if self.n > cap:
            raise CapExceeded(f"matrix size {self.n} exceeds cap {cap}")
        if any(len(row) != self.n for row in W):
            raise ValueError("W must be square")
        self.W = [[algebra.element(a) for a in row] for row in W]
        self.algebra = algebra
        self.full = (1 << self.n) - 1
        self._memo: dict[tuple[int, int], Element] = {}

    def minor(self, I, J) -> Element:
        ri, cj = _mask(I), _mask(J)
        if bin(ri).count("1") != bin(cj).count("1"):
            raise ValueError("minor needs |I| = |J|")
        return self._det(self.full & ~ri, self.full & ~cj)

    def _det(self, rows: int, cols: int) -> Element:
        if rows == 0:
            return self.algebra.one()
        key = (rows, cols)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        r0 = (rows & -rows).bit_length() - 1
        rest = rows & ~(1 << r0)
        total = self.algebra.zero()
        pos = 0
        for c in range(self.n):
            if cols >> c & 1:
                a = self.W[r0][c]
                if not a.is_zero():
                    term = a * self._det(rest, cols & ~(1 << c))
                    total = total + term if pos % 2 == 0 else total - term
                pos += 1
        self._memo[key] = total
        return total

    @property
    def det(self) -> Element:
        return self._det(self.full, self.full)

    def entry(self, k: int, i: int) -> Element:
        """c_{ki}, 1-based."""
        return self.W[k - 1][i - 1]


def check_expansion_identities(W, l: int, I, i: int, algebra: FiniteLocalAlgebra | None = None) -> bool:
    """Exact check of the column expansion of Delta^{E_l}_{I-i} (i in I) or of the vanishing sum (i not in I).

    ``W`` is a MinorTable or a square list of elements; ``I`` has l+1 elements.
    """
    T = W if isinstance(W, MinorTable) else MinorTable(W, algebra or W[0][0].parent)
    n, mask = T.n, _mask(I)
    if bin(mask).count("1") != l + 1 or mask >> n or not 0 <= l <= n - 1 or not 1 <= i <= n:
        raise ValueError("need 0 <= l <= n-1, I of size l+1 in 1..n and 1 <= i <= n")
    E_l = (1 << l) - 1
    B = T.algebra
    s = B.zero()
    for k in range(l + 1, n + 1):
        term = T.entry(k, i) * T.minor(E_l | 1 << (k - 1), mask)
        s = s + term if k % 2 == 0 else s - term
    if mask >> (i - 1) & 1:
        lhs = T.minor(E_l, mask & ~(1 << (i - 1)))
        rhs = s * ((-1) ** l * epsilon(i, mask))
        return lhs == rhs
    return s.is_zero()


# -- instances and certificates -------------------------------------------

@dataclass
class LemmaInstance:
    """x = W u over B together with a B-module M."""

    algebra: FiniteLocalAlgebra
    x: list[Element]
    u: list[Element]
    W: list[list[Element]]
    module: FiniteModule

    def __post_init__(self):
        B = self.algebra
        n = len(self.x)
        if len(self.u) != n or len(self.W) != n or any(len(r) != n for r in self.W):
            raise ValidationError("x, u and W must all have size n")
        if self.module.parent is not B:
            raise ValidationError("module is not over the instance's ring")
        self.x = [B.element(a) for a in self.x]
        self.u = [B.element(a) for a in self.u]
        self.W = [[B.element(a) for a in row] for row in self.W]
        for k in range(n):
            s = B.zero()
            for i in range(n):
                s = s + self.W[k][i] * self.u[i]
            if s != self.x[k]:
                raise ValidationError(f"x = W u fails in row {k + 1}")
        self.minors = MinorTable(self.W, B)
        self.signs = SignTable(n)
        M = self.module
        self.Jx_M = submodule_product(self.x, M)
        self.Ju_M = submodule_product(self.u, M)
        assert self.Jx_M.is_subspace_of(self.Ju_M), "J_x M not inside J_u M despite x = W u"
        self._xsolver = LinearSolver(np.hstack([M.action(a) for a in self.x]), B.p) if n and M.dim else None

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def delta(self) -> Element:
        return self.minors.det

    def decompose(self, g) -> list[np.ndarray] | None:
        """a_1..a_n with g = sum x_k a_k, or None if g is not in J_x M."""
        s = self.module.dim
        if s == 0:
            return [np.zeros(0, dtype=np.int64) for _ in range(self.n)]
        if self._xsolver is None:
            return [] if not np.any(g) else None
        sol = self._xsolver.solve(np.asarray(g, dtype=np.int64))
        if sol is None:
            return None
        return [sol[k * s:(k + 1) * s] for k in range(self.n)]

    def combine(self, elems: Sequence[Element], vecs: Sequence[np.ndarray]) -> np.ndarray:
        """sum_k elems_k . vecs_k in M."""
        p = self.algebra.p
        out = np.zeros(self.module.dim, dtype=np.int64)
        for a, v in zip(elems, vecs):
            out = (out + self.module.act(a, v)) % p
        return out


@dataclass
class TraceEntry:
    level: int
    subset: int  # bitmask
    g: np.ndarray
    decomposition: list[np.ndarray]  # g = sum_k x_k a_k


@dataclass
class MembershipCertificate:
    instance: LemmaInstance
    m: np.ndarray
    b: list[np.ndarray]
    trace: list[TraceEntry] = field(default_factory=list)

    def verify(self) -> bool:
        return verify_certificate(self)


def _g_value(inst: LemmaInstance, level: int, mask: int, m, family: dict[int, np.ndarray]) -> np.ndarray:
    """Delta^{E_l}_I m + sum_{i in I} eps(i, I) u_i a_{I-i}."""
    p = inst.algebra.p
    E_l = (1 << level) - 1
    g = inst.module.act(inst.minors.minor(E_l, mask), m)
    for i in _members(mask):
        sign = inst.signs.eps(i, mask)
        term = inst.module.act(inst.u[i - 1], family[mask & ~(1 << (i - 1))])
        g = (g + sign * term) % p
    return g


def membership_certificate(inst: LemmaInstance, m) -> MembershipCertificate:
    """Run the level-by-level induction and return b with m = sum u_i b_i.

    Raises PreconditionFailed if Delta m is not in J_x M and
    HypothesisTwoViolated if some relation coefficient escapes J_x M.
    """
    M, n, p = inst.module, inst.n, inst.algebra.p
    m = np.asarray(m, dtype=np.int64) % p
    if m.shape != (M.dim,):
        raise ValueError(f"module vector must have length {M.dim}")
    if not inst.Jx_M.contains(M.act(inst.delta, m)):
        raise PreconditionFailed("Delta m is not in J_x M")
    trace: list[TraceEntry] = []
    family: dict[int, np.ndarray] = {}  # a^l_J for J in P_{l-1}
    prev: dict[int, list[np.ndarray]] = {}
    for level in range(n + 1):
        decomps: dict[int, list[np.ndarray]] = {}
        for mask in subsets_of_size(n, level):
            g = _g_value(inst, level, mask, m, family)
            dec = inst.decompose(g)
            if dec is None:
                relation = _relation_coefficients(inst, level - 1, mask, m, prev)
                raise HypothesisTwoViolated(level, tuple(_members(mask)), relation, level)
            decomps[mask] = dec
            trace.append(TraceEntry(level, mask, g, dec))
        if level < n:
            family = {mask: dec[level] for mask, dec in decomps.items()}
            prev = decomps
    full = (1 << n) - 1
    top = decomps[full]
    b = []
    for i in range(1, n + 1):
        v = inst.combine([inst.minors.entry(k, i) for k in range(1, n + 1)], top)
        if n:
            v = (v - inst.signs.eps(i, full) * family[full & ~(1 << (i - 1))]) % p
        b.append(v)
    cert = MembershipCertificate(inst, m, b, trace)
    assert verify_certificate(cert), "membership certificate failed self-verification"
    return cert


def _relation_coefficients(inst, level, mask, m, prev):
    """Coefficients c_1..c_n of the relation sum x_k c_k = 0 built at ``level`` for the subset ``mask``."""
    p, n = inst.algebra.p, inst.n
    E_l = (1 << level) - 1
    coeffs = []
    for k in range(1, n + 1):
        c = np.zeros(inst.module.dim, dtype=np.int64)
        for i in _members(mask):
            c = (c + inst.signs.eps(i, mask) * inst.module.act(inst.u[i - 1], prev[mask & ~(1 << (i - 1))][k - 1])) % p
        if k > level:
            sign = (-1) ** level * (-1) ** k
            c = (c - sign * inst.module.act(inst.minors.minor(E_l | 1 << (k - 1), mask), m)) % p
        coeffs.append(c)
    assert not np.any(inst.combine(inst.x, coeffs)), "constructed relation does not vanish"
    return coeffs


def verify_certificate(cert: MembershipCertificate) -> bool:
    """Recompute every g_I, its decomposition over x, and m = sum u_i b_i from scratch."""
    inst, p = cert.instance, cert.instance.algebra.p
    M, n = inst.module, inst.n
    m = np.asarray(cert.m, dtype=np.int64) % p
    if len(cert.b) != n or any(np.asarray(v).shape != (M.dim,) for v in cert.b):
        return False
    if np.any((m - inst.combine(inst.u, cert.b)) % p):
        return False
    if not cert.trace:
        return not np.any(m) or n == 0
    by_level: dict[int, dict[int, TraceEntry]] = {}
    for e in cert.trace:
        by_level.setdefault(e.level, {})[e.subset] = e
    family: dict[int, np.ndarray] = {}
    for level in range(n + 1):
        entries = by_level.get(level, {})
        if sorted(entries) != subsets_of_size(n, level):
            return False
        for mask, e in entries.items():
            if len(e.decomposition) != n:
                return False
            g = _g_value(inst, level, mask, m, family)
            if np.any((g - e.g) % p):
                return False
            if np.any((g - inst.combine(inst.x, e.decomposition)) % p):
                return False
        if level < n:
            family = {mask: e.decomposition[level] for mask, e in entries.items()}
    return True


def direct_membership(inst: LemmaInstance, m) -> bool:
    """m in J_u M by a single linear solve, without the induction."""
    return inst.Ju_M.contains(np.asarray(m, dtype=np.int64))


def instance_from_morphism(phi: AlgebraMorphism, M: FiniteModule) -> LemmaInstance:
    """x = images of minimal generators of m_A, u = minimal generators of m_B, W solving x = W u.

    The shorter sequence is padded with zeros so that W is square.
    """
    A, B = phi.source, phi.target
    x = [phi(g) for g in A.minimal_generators()]
    u = B.minimal_generators()
    n = max(len(x), len(u))
    x += [B.zero()] * (n - len(x))
    u += [B.zero()] * (n - len(u))
    W = []
    for xk in x:
        row = solve_in_ideal(B, u, xk)
        if row is None:
            raise ValidationError("image of m_A is not inside m_B")
        W.append(row)
    return LemmaInstance(B, x, u, W, M)


def delta_preimage_space(inst: LemmaInstance) -> Subspace:
    """{m : Delta m in J_x M}."""
    M, p = inst.module, inst.algebra.p
    D = M.action(inst.delta)
    imgs = inst.Jx_M.reduce(D.T)  # row j: Delta e_j mod J_x M
    return kernel(imgs.T, p)


# -- serialization ---------------------------------------------------------

def _vec(v) -> str:
    return " ".join(str(int(c)) for c in v)


def certificate_to_text(cert: MembershipCertificate) -> str:
    inst = cert.instance
    B, M, n = inst.algebra, inst.module, inst.n
    lines = [
        f"format: {CERT_FORMAT}",
        f"version: {CERT_VERSION}",
        f"p: {B.p}",
        f"algebra.dim: {B.dim}",
        f"algebra.labels: {','.join(B.labels)}",
        "algebra.struct: " + "; ".join(
            f"{i} {j} {k} {int(B.struct[i, j, k])}" for i, j, k in np.argwhere(B.struct) if i <= j
        ),
        f"module.dim: {M.dim}",
        "module.actions: " + "; ".join(
            f"{i} {r} {c} {int(M.actions[i, r, c])}" for i, r, c in np.argwhere(M.actions)
        ),
        f"n: {n}",
    ]
    lines += [f"x.{k + 1}: {_vec(a.coords)}" for k, a in enumerate(inst.x)]
    lines += [f"u.{k + 1}: {_vec(a.coords)}" for k, a in enumerate(inst.u)]
    lines += [f"W.{k + 1}.{i + 1}: {_vec(a.coords)}" for k, row in enumerate(inst.W) for i, a in enumerate(row)]
    lines.append(f"delta: {_vec(inst.delta.coords)}")
    lines.append(f"m: {_vec(cert.m)}")
    lines += [f"b.{i + 1}: {_vec(v)}" for i, v in enumerate(cert.b)]
    lines.append(f"trace.entries: {len(cert.trace)}")
    for t, e in enumerate(cert.trace):
        lines.append(f"trace.{t}.level: {e.level}")
        lines.append(f"trace.{t}.subset: {','.join(map(str, _members(e.subset)))}")
        lines.append(f"trace.{t}.g: {_vec(e.g)}")
        lines += [f"trace.{t}.a.{k + 1}: {_vec(a)}" for k, a in enumerate(e.decomposition)]
    return "\n".join(lines) + "\n"


def _ints(s: str) -> np.ndarray:
    return np.array([int(t) for t in s.split()], dtype=np.int64)


def certificate_from_text(text: str) -> MembershipCertificate:
    kv: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        if not raw.strip():
            continue
        key, sep, val = raw.partition(":")
        if not sep:
            raise ParseError("expected 'key: value'", lineno, 1)
        kv[key.strip()] = val.strip()
    if kv.get("format") != CERT_FORMAT:
        raise ParseError(f"not a membership certificate (format {kv.get('format')!r})")
    if int(kv.get("version", -1)) != CERT_VERSION:
        raise ParseError(f"unsupported certificate version {kv.get('version')}")
    try:
        p, d, s, n = int(kv["p"]), int(kv["algebra.dim"]), int(kv["module.dim"]), int(kv["n"])
        T = np.zeros((d, d, d), dtype=np.int64)
        for item in filter(None, (t.strip() for t in kv["algebra.struct"].split(";"))):
            i, j, k, c = map(int, item.split())
            T[i, j, k] = T[j, i, k] = c
        B = FiniteLocalAlgebra(p, T, labels=kv["algebra.labels"].split(","))
        acts = np.zeros((d, s, s), dtype=np.int64)
        for item in filter(None, (t.strip() for t in kv["module.actions"].split(";"))):
            i, r, c, v = map(int, item.split())
            acts[i, r, c] = v
        M = FiniteModule(B, acts)
        el = lambda key: Element(B, _ints(kv[key]))
        x = [el(f"x.{k}") for k in range(1, n + 1)]
        u = [el(f"u.{k}") for k in range(1, n + 1)]
        W = [[el(f"W.{k}.{i}") for i in range(1, n + 1)] for k in range(1, n + 1)]
        inst = LemmaInstance(B, x, u, W, M)
        m = _ints(kv["m"]) if s else np.zeros(0, dtype=np.int64)
        b = [_ints(kv[f"b.{i}"]) if s else np.zeros(0, dtype=np.int64) for i in range(1, n + 1)]
        trace = []
        for t in range(int(kv["trace.entries"])):
            members = [int(c) for c in kv[f"trace.{t}.subset"].split(",") if c]
            trace.append(TraceEntry(
                int(kv[f"trace.{t}.level"]),
                _mask(members),
                _ints(kv[f"trace.{t}.g"]) if s else np.zeros(0, dtype=np.int64),
                [_ints(kv[f"trace.{t}.a.{k}"]) if s else np.zeros(0, dtype=np.int64) for k in range(1, n + 1)],
            ))
    except KeyError as exc:
        raise ParseError(f"certificate is missing field {exc.args[0]!r}") from None
    except ValueError as exc:
        raise ParseError(f"malformed certificate: {exc}") from None
    return MembershipCertificate(inst, m, b, trace)
