from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from artinflat import AlgebraMorphism, FiniteLocalAlgebra, base_change_fiber, compile_text, quotient
from artinflat.algebra import determinant, solve_in_ideal
from artinflat.errors import CapExceeded, NotLocal, ValidationError
from artinflat.generators import InstanceSpec, generate_algebra, random_element


def test_structure_constant_validation():
    # k x k is not local
    T = np.zeros((2, 2, 2), dtype=np.int64)
    T[0, 0, 0] = T[0, 1, 1] = T[1, 0, 1] = T[1, 1, 1] = 1
    with pytest.raises(NotLocal):
        FiniteLocalAlgebra(2, T)
    # non-commutative table
    T = np.zeros((2, 2, 2), dtype=np.int64)
    T[0, 0, 0] = T[0, 1, 1] = 1
    with pytest.raises(ValidationError):
        FiniteLocalAlgebra(2, T)


def test_elements_and_units(dual_numbers_sq):
    B = dual_numbers_sq
    x, y = B.element("x"), B.element("y")
    assert (x * y).coords.tolist() == [0, 0, 0, 1]
    assert (x * x).is_zero()
    u = B.one() + x + y
    assert B.is_unit(u) and not B.is_unit(x)
    assert u * u ** -1 == B.one()
    with pytest.raises(ZeroDivisionError):
        B.invert(x)
    assert B.nilpotency_index == 3
    assert B.format(x * y + 1) == "1 + x*y"


def test_quotient_and_ideals():
    A = compile_text("F_2[x]/(x^4)")
    Q, proj = quotient(A, A.ideal_generated([A.element("x^2")]))
    assert Q.dim == 2 and Q.labels == ["1", "x"]
    assert proj(A.element("x^3")).is_zero() and not proj(A.element("x")).is_zero()
    with pytest.raises(ValidationError):
        quotient(A, A.ideal_generated([A.one()]))


def test_morphism_validation(flat_pair):
    A, B, phi = flat_pair
    assert phi(A.element("s")) == B.element("x^2")
    with pytest.raises(ValidationError):
        AlgebraMorphism.from_images(A, B, [B.element("x")])  # s^2 -> x^2 != 0
    with pytest.raises(ValidationError):
        AlgebraMorphism.from_images(A, B, [B.one()])
    F, pr = base_change_fiber(phi)
    assert F.dim == 2
    ident = AlgebraMorphism.identity(A)
    assert np.array_equal(phi.compose(ident).matrix, phi.matrix)


def test_determinant(dual_numbers_sq):
    B = dual_numbers_sq
    x, y = B.element("x"), B.element("y")
    assert determinant([[x, B.one()], [B.zero(), y]], B) == x * y
    assert determinant([], B) == B.one()
    big = [[B.one() if i == j else B.zero() for j in range(9)] for i in range(9)]
    with pytest.raises(CapExceeded):
        determinant(big, B)
    assert determinant(big, B, cap=9) == B.one()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([2, 3, 5]), st.sampled_from(["monomial_ci", "monomial_general", "binomial"]))
def test_ring_axioms_on_generated_algebras(seed, p, kind):
    A = generate_algebra(InstanceSpec(seed, kind, p, dim_cap=24))
    rng = np.random.default_rng(seed)
    a, b, c = (random_element(A, rng) for _ in range(3))
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    # m is nilpotent of the reported index
    assert A.max_ideal_power(A.nilpotency_index).dim == 0
    u = a + (1 - int(a.coords[0]))  # force unit
    assert A.is_unit(u) and u * A.invert(u) == A.one()


def test_determinant_matches_permutation_expansion():
    from itertools import permutations

    B = compile_text("F_3[x,y]/(x^3, y^2)")
    rng = np.random.default_rng(1)
    for n in range(1, 5):
        W = [[random_element(B, rng) for _ in range(n)] for _ in range(n)]
        total = B.zero()
        for perm in permutations(range(n)):
            sign = 1
            for i in range(n):
                for j in range(i + 1, n):
                    if perm[i] > perm[j]:
                        sign = -sign
            term = B.one() * sign
            for i in range(n):
                term = term * W[i][perm[i]]
            total = total + term
        assert determinant(W, B) == total


def test_solve_in_ideal(dual_numbers_sq):
    B = dual_numbers_sq
    x, y = B.element("x"), B.element("y")
    coeffs = solve_in_ideal(B, [x, y], x * y + x)
    assert coeffs[0] * x + coeffs[1] * y == x * y + x
    assert solve_in_ideal(B, [x], y) is None
