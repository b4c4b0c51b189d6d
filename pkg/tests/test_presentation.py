from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from artinflat import compile_text, parse, truncated_poly_algebra
from artinflat.errors import CapExceeded, NotLocal, NotZeroDimensional, ParseError
from artinflat.invariants import edim
from artinflat.presentation import PolyExpr, parse_poly


def test_standard_basis_order():
    B = compile_text("F_2[x,y]/(x^2, y^2)")
    assert B.labels == ["1", "y", "x", "x*y"]
    assert compile_text("GF(3)[x]/(x^3)").labels == ["1", "x", "x^2"]


def test_group_algebra_presentations_in_characteristic_p():
    assert compile_text("F_2[S]/((1+S)^4 - 1)").labels == ["1", "S", "S^2", "S^3"]
    A = compile_text("F_3[S,T]/((1+S)^3 - 1, (1+T)^9 - 1)")
    assert A.dim == 27 and edim(A) == 2


def test_parse_errors_have_positions():
    with pytest.raises(ParseError, match="implicit multiplication"):
        parse_poly("2x", ("x",), 2)
    with pytest.raises(ParseError, match="unknown variable"):
        parse_poly("x + z", ("x",), 2)
    with pytest.raises(ParseError) as info:
        parse_poly("x + * y", ("x", "y"), 2, line=3)
    assert info.value.line == 3 and info.value.column > 0
    with pytest.raises(ParseError):
        parse("F_4[x]/(x^2)")


def test_compile_errors():
    with pytest.raises(NotLocal):
        compile_text("F_2[x]/(x^2 - 1)")
    with pytest.raises(NotLocal):
        compile_text("F_2[x]/(x^2 + x)")
    with pytest.raises(NotLocal):
        compile_text("F_2[x]/(1 + x)")
    with pytest.raises(NotZeroDimensional):
        compile_text("F_2[x,y]/(x*y)")
    with pytest.raises(CapExceeded):
        compile_text("F_2[x,y]/(x^20, y^20)")


def test_binomial_relations_reduce():
    B = compile_text("F_3[x,y]/(x^2 - y^2, x*y)")
    assert B.dim == 4 and B.element("x^2") == B.element("y^2")
    assert B.element("x^3").is_zero()


def test_truncated_algebra():
    T = truncated_poly_algebra(2, 2, 2)
    assert T.dim == 6 and T.nilpotency_index == 3 and edim(T) == 2


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(1, 4)), max_size=6))
def test_print_parse_roundtrip(terms):
    f = PolyExpr(("x", "y"), 5, {(a, b): c for a, b, c in terms})
    assert parse_poly(str(f), ("x", "y"), 5) == f


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.integers(2, 5), st.integers(0, 10**6))
def test_normal_form_is_a_ring_map(a, b, seed):
    """Evaluating products of polynomials in the quotient equals multiplying their images."""
    B = compile_text(f"F_3[x,y]/(x^{a}, y^{b}, x*y - y^2)")
    rng = np.random.default_rng(seed)
    def rnd():
        return PolyExpr(("x", "y"), 3, {(int(rng.integers(0, 4)), int(rng.integers(0, 4))): int(rng.integers(1, 3)) for _ in range(3)})
    f, g = rnd(), rnd()
    assert B.evaluate(f * g) == B.evaluate(f) * B.evaluate(g)
    assert B.evaluate(f + g) == B.evaluate(f) + B.evaluate(g)
