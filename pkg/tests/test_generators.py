from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from artinflat.errors import GenerationBudgetExhausted
from artinflat.generators import (
    KINDS,
    InstanceSpec,
    flat_morphism,
    generate_algebra,
    gorenstein_algebras,
    lemma_sample,
    module_family,
    non_gorenstein_algebras,
    rejection_morphism,
    theorem1_instance,
)
from artinflat.invariants import edim, is_complete_intersection, is_gorenstein


def test_examples():
    A = generate_algebra(InstanceSpec(0, "group_algebra", 2, alphas=(2,)))
    assert A.dim == 2 and edim(A) == 1
    A = generate_algebra(InstanceSpec(0, "group_algebra", 2, alphas=(4,)))
    assert A.labels == ["1", "S1", "S1^2", "S1^3"]


def test_spec_validation(tmp_path):
    with pytest.raises(ValueError):
        InstanceSpec(0, "nonsense")
    with pytest.raises(ValueError):
        InstanceSpec(0, "monomial_ci", p=4)
    f = tmp_path / "ring.txt"
    f.write_text("F_3[x,y]/(x^2, y^2)\n")
    A = generate_algebra(InstanceSpec(0, "user_file", 3, path=str(f)))
    assert A.dim == 4 and is_complete_intersection(A) == (True, 2)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(KINDS[:4]), st.sampled_from([2, 3, 5]))
def test_generators_are_deterministic(seed, kind, p):
    spec = InstanceSpec(seed, kind, p)
    a, b = generate_algebra(spec), generate_algebra(spec)
    assert np.array_equal(a.struct, b.struct) and a.labels == b.labels
    assert a.dim <= spec.dim_cap
    if kind in ("monomial_ci", "group_algebra"):
        assert is_complete_intersection(a)[0]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(KINDS[:4]), st.sampled_from([2, 3, 5]))
def test_flat_morphisms_have_equal_edim_and_dimension_multiple(seed, kind, p):
    mor = flat_morphism(InstanceSpec(seed, kind, p))
    assert edim(mor.A) == edim(mor.B)
    assert mor.B.dim % mor.A.dim == 0
    again = flat_morphism(InstanceSpec(seed, kind, p))
    assert np.array_equal(mor.phi.matrix, again.phi.matrix) and mor.description == again.description


def test_rejection_morphisms_are_valid_and_deterministic():
    for seed in range(10):
        m1 = rejection_morphism(InstanceSpec(seed, "monomial_ci", 2))
        m2 = rejection_morphism(InstanceSpec(seed, "monomial_ci", 2))
        assert np.array_equal(m1.phi.matrix, m2.phi.matrix)
        m1.phi.validate()


def test_budget_exhaustion():
    with pytest.raises(GenerationBudgetExhausted):
        rejection_morphism(InstanceSpec(0, "monomial_ci", 2, n_cap=1), budget=0)


def test_algebra_families():
    gor = gorenstein_algebras(2, 12, seed=1)
    assert len(gor) == 12 and all(is_gorenstein(A) for A in gor)
    assert any(not is_complete_intersection(A)[0] for A in gorenstein_algebras(3, 30, seed=2))
    non = non_gorenstein_algebras(2, 8, seed=1)
    assert all(not is_gorenstein(A) for A in non)


def test_instances_and_modules_are_deterministic():
    a, b = theorem1_instance(5, 3), theorem1_instance(5, 3)
    assert np.array_equal(a.M.actions, b.M.actions)
    fa = module_family(a.B, 10, seed=4)
    fb = module_family(a.B, 10, seed=4)
    assert all(np.array_equal(x.actions, y.actions) for (_, x), (_, y) in zip(fa, fb))
    s1, s2 = lemma_sample(9, 2), lemma_sample(9, 2)
    assert np.array_equal(s1.m, s2.m)
