"""Polynomial presentations k[x_1..x_n]/(f_1..f_s) and their compilation.

Grammar for expressions (implicit multiplication is an error)::

    expr   := term (("+" | "-") term)*
    term   := unary ("*" unary)*
    unary  := "-" unary | power
    power  := atom ("^" INT)?
    atom   := INT | IDENT | "(" expr ")"

Relations are comma separated.  A whole ring may be written as
``F_2[x,y]/(x^2, y^2)`` or ``GF(2)[x,y]/(x^2, y^2)``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from math import comb
from typing import Sequence

import numpy as np

from .algebra import FiniteLocalAlgebra
from .errors import CapExceeded, DegreeBoundExceeded, NotLocal, NotZeroDimensional, ParseError
from .linalg import FieldConfig, matmul

DEFAULT_DIM_CAP = 256

Monomial = tuple[int, ...]


def grevlex_key(exps: Monomial):
    return (sum(exps), tuple(-e for e in reversed(exps)))


@dataclass(frozen=True)
class PolyExpr:
    """A polynomial over F_p: ``terms`` maps exponent vectors to nonzero coefficients."""

    variables: tuple[str, ...]
    p: int
    terms: dict = field(default_factory=dict, hash=False, compare=False)

    def __post_init__(self):
        clean = {tuple(k): int(v) % self.p for k, v in self.terms.items() if int(v) % self.p}
        object.__setattr__(self, "terms", clean)

    @classmethod
    def constant(cls, variables, p, c: int) -> PolyExpr:
        return cls(tuple(variables), p, {(0,) * len(variables): c})

    @classmethod
    def variable(cls, variables, p, name: str) -> PolyExpr:
        idx = list(variables).index(name)
        exps = tuple(1 if i == idx else 0 for i in range(len(variables)))
        return cls(tuple(variables), p, {exps: 1})

    def _same(self, other: PolyExpr):
        if self.variables != other.variables or self.p != other.p:
            raise ValueError("polynomials over different rings")

    def __add__(self, other: PolyExpr) -> PolyExpr:
        self._same(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return PolyExpr(self.variables, self.p, out)

    def __neg__(self) -> PolyExpr:
        return PolyExpr(self.variables, self.p, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: PolyExpr) -> PolyExpr:
        return self + (-other)

    def __mul__(self, other: PolyExpr) -> PolyExpr:
        self._same(other)
        out: dict = {}
        for (ka, va), (kb, vb) in itertools.product(self.terms.items(), other.terms.items()):
            k = tuple(a + b for a, b in zip(ka, kb))
            out[k] = (out.get(k, 0) + va * vb) % self.p
        return PolyExpr(self.variables, self.p, out)

    def __pow__(self, e: int) -> PolyExpr:
        result = PolyExpr.constant(self.variables, self.p, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, PolyExpr):
            return NotImplemented
        return self.variables == other.variables and self.p == other.p and self.terms == other.terms

    def __hash__(self):
        return hash((self.variables, self.p, frozenset(self.terms.items())))

    def __str__(self):
        return format_poly(self.terms, self.variables)

    def __repr__(self):
        return f"PolyExpr({self})"


def format_monomial(exps: Monomial, variables: Sequence[str]) -> str:
    parts = []
    for name, e in zip(variables, exps):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts) if parts else "1"


def format_poly(terms: dict, variables: Sequence[str]) -> str:
    if not terms:
        return "0"
    out = []
    for exps in sorted(terms, key=grevlex_key, reverse=True):
        c = terms[exps]
        mono = format_monomial(exps, variables)
        if mono == "1":
            out.append(str(c))
        elif c == 1:
            out.append(mono)
        else:
            out.append(f"{c}*{mono}")
    return " + ".join(out)


# -- parsing ----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<ident>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*^(),]))")


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "ident", "op", "end"
    text: str
    column: int


def tokenize(text: str, line: int = 0, column_offset: int = 0) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = len(text) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", line, column_offset + bad + 1)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append(Token(kind, m.group(kind), column_offset + start + 1))
        pos = m.end()
    tokens.append(Token("end", "", column_offset + len(text) + 1))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token], variables: Sequence[str], p: int, line: int):
        self.toks = tokens
        self.i = 0
        self.vars = tuple(variables)
        self.p = p
        self.line = line

    def peek(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise ParseError(msg, self.line, tok.column)

    def take(self, text: str | None = None) -> Token:
        tok = self.peek()
        if text is not None and tok.text != text:
            self.error(f"expected {text!r}, found {tok.text or 'end of input'!r}")
        self.i += 1
        return tok

    def expr(self) -> PolyExpr:
        out = self.term()
        while self.peek().text in ("+", "-"):
            op = self.take().text
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self) -> PolyExpr:
        out = self.unary()
        while True:
            tok = self.peek()
            if tok.text == "*":
                self.take()
                out = out * self.unary()
            elif tok.kind in ("int", "ident") or tok.text == "(":
                self.error("implicit multiplication is not allowed; use '*'")
            else:
                return out

    def unary(self) -> PolyExpr:
        if self.peek().text == "-":
            self.take()
            return -self.unary()
        return self.power()

    def power(self) -> PolyExpr:
        base = self.atom()
        if self.peek().text == "^":
            self.take()
            tok = self.peek()
            if tok.kind != "int":
                self.error("exponent must be a non-negative integer literal")
            self.take()
            return base ** int(tok.text)
        return base

    def atom(self) -> PolyExpr:
        tok = self.peek()
        if tok.kind == "int":
            self.take()
            return PolyExpr.constant(self.vars, self.p, int(tok.text))
        if tok.kind == "ident":
            if tok.text not in self.vars:
                self.error(f"unknown variable {tok.text!r}", tok)
            self.take()
            return PolyExpr.variable(self.vars, self.p, tok.text)
        if tok.text == "(":
            self.take()
            inner = self.expr()
            self.take(")")
            return inner
        self.error(f"unexpected {tok.text or 'end of input'!r}")


def parse_poly(text: str, variables: Sequence[str], p: int, *, line: int = 0, column: int = 0) -> PolyExpr:
    """Parse one polynomial expression in the given variables over F_p."""
    parser = _Parser(tokenize(text, line, column), variables, int(p), line)
    out = parser.expr()
    if parser.peek().kind != "end":
        parser.error(f"unexpected {parser.peek().text!r} after expression")
    return out


def parse_poly_list(text: str, variables: Sequence[str], p: int, *, line: int = 0, column: int = 0) -> list[PolyExpr]:
    """Comma separated polynomials; an empty string gives no relations."""
    if not text.strip():
        return []
    parser = _Parser(tokenize(text, line, column), variables, int(p), line)
    out = [parser.expr()]
    while parser.peek().text == ",":
        parser.take()
        out.append(parser.expr())
    if parser.peek().kind != "end":
        parser.error(f"unexpected {parser.peek().text!r}; relations are separated by ','")
    return out


@dataclass(frozen=True)
class Presentation:
    field: FieldConfig
    variables: tuple[str, ...]
    relations: tuple[PolyExpr, ...]
    degree_bound: int | None = None

    def __str__(self):
        rels = ", ".join(str(r) for r in self.relations)
        return f"F_{self.field.p}[{','.join(self.variables)}]/({rels})"


_RING = re.compile(
    r"^\s*(?:F_?(?P<p1>\d+)|GF\((?P<p2>\d+)\))\s*\[(?P<vars>[^\]]*)\]\s*(?:/\s*\((?P<rels>.*)\))?\s*$", re.S
)
_IDENT = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")


def parse_variables(text: str, line: int = 0) -> tuple[str, ...]:
    names = tuple(v.strip() for v in text.split(",") if v.strip())
    for v in names:
        if not _IDENT.match(v):
            raise ParseError(f"invalid variable name {v!r}", line)
    if len(set(names)) != len(names):
        raise ParseError("duplicate variable name", line)
    return names


def parse(text: str, degree_bound: int | None = None) -> Presentation:
    """Parse ``F_p[x,y,...]/(rel, ...)`` into a Presentation."""
    m = _RING.match(text)
    if not m:
        raise ParseError(f"expected a ring like 'F_2[x,y]/(x^2, y^2)', got {text!r}")
    p = int(m.group("p1") or m.group("p2"))
    try:
        fc = FieldConfig(p)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    variables = parse_variables(m.group("vars"))
    rel_text = m.group("rels") or ""
    return Presentation(fc, variables, tuple(parse_poly_list(rel_text, variables, p, column=m.start("rels") if m.group("rels") else 0)), degree_bound)


# -- Groebner bases -----------------------------------------------------------


def _lead(f: dict) -> Monomial:
    return max(f, key=grevlex_key)


def _divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def _monic(f: dict, p: int) -> dict:
    lc_inv = pow(f[_lead(f)], -1, p)
    return {k: v * lc_inv % p for k, v in f.items()}


def _sub_mult(f: dict, g: dict, coeff: int, shift: Monomial, p: int) -> dict:
    """f - coeff * x^shift * g."""
    out = dict(f)
    for k, v in g.items():
        kk = tuple(a + b for a, b in zip(k, shift))
        nv = (out.get(kk, 0) - coeff * v) % p
        if nv:
            out[kk] = nv
        else:
            out.pop(kk, None)
    return out


def normal_form(f: dict, basis: Sequence[dict], leads: Sequence[Monomial], p: int) -> dict:
    """Full reduction of f by a list of monic polynomials with the given leading monomials."""
    f = dict(f)
    rem: dict = {}
    while f:
        lm = _lead(f)
        for g, lg in zip(basis, leads):
            if _divides(lg, lm):
                shift = tuple(a - b for a, b in zip(lm, lg))
                f = _sub_mult(f, g, f[lm], shift, p)
                break
        else:
            rem[lm] = f.pop(lm)
    return rem


def groebner_basis(polys: Sequence[dict], nvars: int, p: int, degree_bound: int) -> list[dict]:
    """Reduced Groebner basis (grevlex) by Buchberger's algorithm with the product and chain criteria."""
    G: list[dict] = []
    leads: list[Monomial] = []
    pairs: set[tuple[int, int]] = set()

    def add(h: dict):
        h = _monic(h, p)
        G.append(h)
        leads.append(_lead(h))
        k = len(G) - 1
        for i in range(k):
            pairs.add((i, k))

    for f in polys:
        f = {k: v % p for k, v in f.items() if v % p}
        if not f:
            continue
        h = normal_form(f, G, leads, p)
        if h:
            add(h)
    while pairs:
        i, j = min(pairs, key=lambda ij: (sum(_lcm(leads[ij[0]], leads[ij[1]])), ij))
        pairs.discard((i, j))
        lij = _lcm(leads[i], leads[j])
        if all(a == 0 or b == 0 for a, b in zip(leads[i], leads[j])):
            continue  # coprime leading monomials
        if any(
            k not in (i, j)
            and _divides(leads[k], lij)
            and (min(i, k), max(i, k)) not in pairs
            and (min(j, k), max(j, k)) not in pairs
            for k in range(len(G))
        ):
            continue
        deg = sum(lij)
        if deg > degree_bound:
            raise DegreeBoundExceeded(degree_bound, deg)
        si = tuple(a - b for a, b in zip(lij, leads[i]))
        sj = tuple(a - b for a, b in zip(lij, leads[j]))
        s = _sub_mult({tuple(a + b for a, b in zip(k, si)): v for k, v in G[i].items()}, G[j], 1, sj, p)
        h = normal_form(s, G, leads, p)
        if h:
            add(h)
    # minimize then interreduce
    keep = [
        k for k in range(len(G))
        if not any(_divides(leads[j], leads[k]) and (leads[j] != leads[k] or j < k) for j in range(len(G)) if j != k)
    ]
    G = [G[k] for k in keep]
    leads = [leads[k] for k in keep]
    reduced = []
    for k, g in enumerate(G):
        others = [G[j] for j in range(len(G)) if j != k]
        olead = [leads[j] for j in range(len(G)) if j != k]
        tail = {m: c for m, c in g.items() if m != leads[k]}
        reduced.append({leads[k]: 1, **normal_form(tail, others, olead, p)})
    order = sorted(range(len(reduced)), key=lambda k: grevlex_key(leads[k]))
    return [reduced[k] for k in order]


def standard_monomials(leads: Sequence[Monomial], nvars: int, cap: int) -> list[Monomial]:
    """Monomials not divisible by any leading monomial, in ascending grevlex order."""
    for i in range(nvars):
        if not any(lm[i] > 0 and sum(lm) == lm[i] for lm in leads):
            raise NotZeroDimensional(f"no pure power of variable #{i + 1} among leading monomials; quotient is infinite")
    zero = (0,) * nvars
    if any(lm == zero for lm in leads):
        return []
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for m in frontier:
            for i in range(nvars):
                mm = tuple(e + (k == i) for k, e in enumerate(m))
                if mm in seen or any(_divides(lm, mm) for lm in leads):
                    continue
                seen.add(mm)
                nxt.append(mm)
                if len(seen) > cap:
                    raise CapExceeded(f"quotient dimension exceeds cap {cap}")
        frontier = nxt
    return sorted(seen, key=grevlex_key)


def compile_presentation(pres: Presentation, dim_cap: int = DEFAULT_DIM_CAP) -> FiniteLocalAlgebra:
    """Finite local algebra of a zero-dimensional presentation local at the origin.

    Raises NotZeroDimensional, NotLocal, DegreeBoundExceeded or CapExceeded.
    """
    p = pres.field.p
    n = len(pres.variables)
    bound = pres.degree_bound if pres.degree_bound is not None else 2 * dim_cap
    G = groebner_basis([r.terms for r in pres.relations], n, p, bound)
    leads = [_lead(g) for g in G]
    if any(not any(lm) for lm in leads):
        raise NotLocal("relations generate the unit ideal; the quotient is the zero ring")
    monos = standard_monomials(leads, n, dim_cap)
    index = {m: k for k, m in enumerate(monos)}
    d = len(monos)

    def coords(f: dict) -> np.ndarray:
        v = np.zeros(d, dtype=np.int64)
        for m, c in normal_form(f, G, leads, p).items():
            v[index[m]] = c
        return v

    T = np.zeros((d, d, d), dtype=np.int64)
    cache: dict[Monomial, np.ndarray] = {}
    for a in range(d):
        for b in range(a, d):
            prod = tuple(x + y for x, y in zip(monos[a], monos[b]))
            if prod not in cache:
                cache[prod] = coords({prod: 1})
            T[a, b] = T[b, a] = cache[prod]
    gens = np.array([coords({tuple(int(k == i) for k in range(n)): 1}) for i in range(n)], dtype=np.int64).reshape(n, d)
    for i, name in enumerate(pres.variables):
        L = matmul(gens[i], T.reshape(d, d * d), p).reshape(d, d).T
        if gens[i][0] % p:
            raise NotLocal(f"variable {name} is a unit in the quotient; the presentation is not local at the origin")
        if not _is_nilpotent(L, p):
            raise NotLocal(f"variable {name} is not nilpotent in the quotient; the presentation is not local at the origin")
    return FiniteLocalAlgebra(
        pres.field,
        T,
        labels=[format_monomial(m, pres.variables) for m in monos],
        variables=pres.variables,
        generator_coords=gens,
        monomials=monos,
        check_associativity=False,
    )


def _is_nilpotent(L: np.ndarray, p: int) -> bool:
    d = L.shape[0]
    P = L.copy()
    k = 1
    while k < d:
        P = matmul(P, P, p)
        k *= 2
    return not np.any(P)


def compile_text(text: str, dim_cap: int = DEFAULT_DIM_CAP) -> FiniteLocalAlgebra:
    """Shorthand: ``compile_text("F_2[x,y]/(x^2,y^2)")``."""
    return compile_presentation(parse(text), dim_cap)


def truncated_poly_algebra(field: FieldConfig | int, r: int, t: int, dim_cap: int = 4096,
                           variables: Sequence[str] | None = None) -> FiniteLocalAlgebra:
    """k[y_1..y_r] / (y)^{t+1}: all monomials of degree <= t."""
    fc = field if isinstance(field, FieldConfig) else FieldConfig(field)
    if r < 0 or t < 1:
        raise ValueError("need r >= 0 and t >= 1")
    dim = comb(r + t, r)
    if dim > dim_cap:
        raise CapExceeded(f"truncated polynomial algebra has dimension {dim} > cap {dim_cap}")
    monos = sorted(
        (m for m in itertools.product(range(t + 1), repeat=r) if sum(m) <= t), key=grevlex_key
    )
    index = {m: k for k, m in enumerate(monos)}
    d = len(monos)
    T = np.zeros((d, d, d), dtype=np.int64)
    for a, ma in enumerate(monos):
        for b, mb in enumerate(monos):
            prod = tuple(x + y for x, y in zip(ma, mb))
            k = index.get(prod)
            if k is not None:
                T[a, b, k] = 1
    names = tuple(variables) if variables is not None else tuple(f"y{i + 1}" for i in range(r))
    gens = np.zeros((r, d), dtype=np.int64)
    for i in range(r):
        gens[i, index[tuple(int(k == i) for k in range(r))]] = 1
    return FiniteLocalAlgebra(
        fc, T,
        labels=[format_monomial(m, names) for m in monos],
        variables=names,
        generator_coords=gens,
        monomials=monos,
        check_associativity=False,
    )
