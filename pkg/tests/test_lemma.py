from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from artinflat import compile_text
from artinflat.errors import HypothesisTwoViolated, ParseError, PreconditionFailed, ValidationError
from artinflat.generators import InstanceSpec, generate_algebra, lemma_sample, make_rng, random_element
from artinflat.lemma import (
    LemmaInstance,
    MinorTable,
    SignTable,
    certificate_from_text,
    certificate_to_text,
    check_expansion_identities,
    delta_preimage_space,
    direct_membership,
    epsilon,
    epsilon_bar,
    membership_certificate,
    subsets_of_size,
    verify_certificate,
)
from artinflat.modules import FiniteModule


def test_sign_examples():
    assert epsilon(1, {1}, 3) == -1
    assert epsilon(3, {1, 3}, 3) == 1
    assert epsilon(1, {1, 3}) * epsilon(1, {1}) == 1 == epsilon_bar(1, 3)
    with pytest.raises(ValueError):
        epsilon(2, {1, 3})
    with pytest.raises(ValueError):
        epsilon_bar(2, 2)


def _position_sign(i, I, n):
    rest = [k for k in range(1, n + 1) if k not in I or k == i]
    return (-1) ** (rest.index(i) + 1)


@pytest.mark.parametrize("n", range(1, 7))
def test_sign_identities_exhaustive(n):
    T = SignTable(n)
    for r in range(1, n + 1):
        for I in itertools.combinations(range(1, n + 1), r):
            I = set(I)
            for i in I:
                assert T.eps(i, I) == _position_sign(i, I, n)
                alt = (-1) ** i
                for j in I - {i}:
                    alt *= epsilon_bar(i, j)
                assert T.eps(i, I) == alt
                for j in I - {i}:
                    assert epsilon(i, I) * epsilon(i, I - {j}) == epsilon_bar(i, j)


def test_minor_examples(dual_numbers_sq):
    B = dual_numbers_sq
    x, y = B.element("x"), B.element("y")
    T = MinorTable([[x, B.zero()], [B.zero(), y]], B)
    assert T.minor({1}, {1}) == y
    assert T.minor(set(), set()) == x * y == T.det
    assert T.minor({1, 2}, {1, 2}) == B.one()
    with pytest.raises(ValueError):
        T.minor({1}, set())


def test_expansion_identities_small_cases(dual_numbers_sq):
    B = dual_numbers_sq
    c = B.element("x + y")
    assert check_expansion_identities([[c]], 0, {1}, 1, B)
    I2 = [[B.one(), B.zero()], [B.zero(), B.one()]]
    for l in range(2):
        for I in subsets_of_size(2, l + 1):
            for i in (1, 2):
                assert check_expansion_identities(I2, l, I, i, B)
    rng = np.random.default_rng(0)
    W = [[random_element(B, rng) for _ in range(3)] for _ in range(3)]
    T = MinorTable(W, B)
    for l in range(3):
        for I in subsets_of_size(3, l + 1):
            for i in range(1, 4):
                assert check_expansion_identities(T, l, I, i)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 4), st.sampled_from([2, 3, 5]))
def test_expansion_identities_random(seed, n, p):
    B = generate_algebra(InstanceSpec(seed, "binomial", p, dim_cap=16))
    rng = make_rng(seed, n)
    T = MinorTable([[random_element(B, rng) for _ in range(n)] for _ in range(n)], B)
    for l in range(n):
        for I in subsets_of_size(n, l + 1):
            for i in range(1, n + 1):
                assert check_expansion_identities(T, l, I, i)


def test_single_variable_certificate():
    B = compile_text("F_2[x]/(x^4)")
    x = B.element("x")
    inst = LemmaInstance(B, [x * x], [x], [[x]], FiniteModule.regular(B))
    m = B.element("x^3").coords
    cert = membership_certificate(inst, m)
    assert cert.verify()
    assert np.array_equal(FiniteModule.regular(B).act(x, cert.b[0]), m)
    assert (x * B.element(cert.b[0])) == B.element("x^3")


def test_zero_and_identity_cases(dual_numbers_sq):
    B = dual_numbers_sq
    u = B.minimal_generators()
    I2 = [[B.one(), B.zero()], [B.zero(), B.one()]]
    inst = LemmaInstance(B, u, u, I2, FiniteModule.regular(B))
    c0 = membership_certificate(inst, np.zeros(4, dtype=np.int64))
    assert c0.verify() and all(not b.any() for b in c0.b)
    for v in B.max_ideal.basis:
        assert membership_certificate(inst, v).verify()
    with pytest.raises(PreconditionFailed):
        membership_certificate(inst, B.one().coords)


def test_hypothesis_two_violation_reports_relation(dual_numbers_sq):
    B = dual_numbers_sq
    x, y = B.element("x"), B.element("y")
    W = [[x, B.one()], [B.zero(), B.one() + y]]
    xs = [x * x + y, (B.one() + y) * y]
    inst = LemmaInstance(B, xs, [x, y], W, FiniteModule.regular(B))
    pre = delta_preimage_space(inst)
    raised = 0
    for v in pre.basis:
        try:
            assert membership_certificate(inst, v).verify()
        except HypothesisTwoViolated as exc:
            raised += 1
            total = sum((inst.module.act(xk, ck) for xk, ck in zip(inst.x, exc.relation)), np.zeros(4, dtype=np.int64)) % 2
            assert not total.any()
    assert raised


def test_x_equals_wu_is_checked(dual_numbers_sq):
    B = dual_numbers_sq
    x = B.element("x")
    with pytest.raises(ValidationError):
        LemmaInstance(B, [x], [x], [[x]], FiniteModule.regular(B))


def test_certificate_mutation_and_roundtrip():
    s = lemma_sample(3, 3)
    cert = membership_certificate(s.instance, s.m)
    text = certificate_to_text(cert)
    again = certificate_from_text(text)
    assert verify_certificate(again) and certificate_to_text(again) == text
    p = s.instance.algebra.p
    for k in range(len(cert.b)):
        if cert.b[k].size:
            bad = [b.copy() for b in cert.b]
            bad[k][0] = (bad[k][0] + 1) % p
            cert.b, orig = bad, cert.b
            # perturbing a coefficient breaks m = sum u_i b_i unless u_k kills the change
            changed = s.instance.module.act(s.instance.u[k], bad[k] - orig[k]) % p
            assert verify_certificate(cert) == (not changed.any())
            cert.b = orig
    if cert.trace and cert.trace[-1].g.size:
        cert.trace[-1].g = (cert.trace[-1].g + 1) % p
        assert not verify_certificate(cert)
    with pytest.raises(ParseError):
        certificate_from_text(text.replace("version: 1", "version: 9"))
    with pytest.raises(ParseError):
        certificate_from_text("format: something-else\n")


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([2, 3, 5]))
def test_lemma_soundness_against_direct_solve(seed, p):
    s = lemma_sample(seed, p)
    cert = membership_certificate(s.instance, s.m)
    assert cert.verify()
    assert direct_membership(s.instance, s.m)
