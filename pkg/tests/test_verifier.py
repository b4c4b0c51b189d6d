from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from artinflat import AlgebraMorphism, compile_text
from artinflat.errors import PreconditionFailed
from artinflat.generators import KINDS, theorem1_instance
from artinflat.modules import FiniteModule
from artinflat.report import parse_reports
from artinflat.verifier import (
    check_delta_socle,
    check_desmit,
    check_theorem1,
    check_wtf_equiv_flat,
    group_algebra_edim,
    sweep,
)


def test_theorem1_pass(flat_pair):
    A, B, phi = flat_pair
    rep = check_theorem1(phi, FiniteModule.regular(B))
    assert rep.verdict == "Pass"
    assert (rep.phi_rank, rep.edim_equal, rep.fiber_ci, rep.fiber_mu, rep.M_B_rank) == (2, True, True, 1, 1)
    assert rep.delta_generates_fiber_socle and rep.lemma_certificates > 0


def test_theorem1_hypothesis_failures(flat_pair):
    A, B, phi = flat_pair
    rep = check_theorem1(AlgebraMorphism.identity(B), FiniteModule.residue_field(B))
    assert rep.verdict == "HypothesisNotMet(M_A_flat)"
    assert check_theorem1(phi, FiniteModule.zero(B)).verdict.startswith("HypothesisNotMet(M_nonzero")


def test_edim_hypothesis_is_necessary():
    A = compile_text("F_2[s]/(s^2)")
    B = compile_text("F_2[x,y]/(x^2, x*y, y^2)")
    phi = AlgebraMorphism.from_images(A, B, [B.element("x")])
    M = FiniteModule.cokernel(B, [[B.element("y")]])
    rep = check_theorem1(phi, M)
    assert rep.verdict == "HypothesisNotMet(edim_le)"
    assert rep.hypothesis_status["M_A_flat"] and rep.M_A_rank == 1
    assert not rep.M_B_flat


def test_delta_socle(flat_pair):
    _, _, phi = flat_pair
    delta, ok = check_delta_socle(phi)
    assert ok and str(delta) == "x"


def test_desmit_examples(flat_pair):
    A, B, phi = flat_pair
    rep = check_desmit(phi, 200)
    assert not rep.violations and rep.a_flat_nonzero >= 1
    ident = check_desmit(AlgebraMorphism.identity(B), 40)
    assert not ident.violations
    B3 = compile_text("F_2[x]/(x^3)")
    phi3 = AlgebraMorphism.from_images(A, B3, [B3.element("x^2")])
    rep3 = check_desmit(phi3, 200)
    assert rep3.a_flat_nonzero == 0 and not rep3.phi_flat
    B2 = compile_text("F_2[x,y]/(x^2, y^2)")
    with pytest.raises(PreconditionFailed):
        check_desmit(AlgebraMorphism.from_images(A, B2, [B2.element("x")]))


def test_wtf_equivalence_examples(dual_numbers_sq):
    rep = check_wtf_equiv_flat(dual_numbers_sq, 24)
    assert not rep.disagreements and 0 < rep.flat < rep.tested
    R = compile_text("F_2[x,y]/(x^2, x*y, y^2)")
    with pytest.raises(PreconditionFailed):
        check_wtf_equiv_flat(R)
    assert not check_wtf_equiv_flat(R, 24, mode="forward").disagreements


def test_group_algebra_edim():
    assert group_algebra_edim(2, (2,)) == (1, 1, 2)
    assert group_algebra_edim(2, (4, 2)) == (2, 2, 8)
    assert group_algebra_edim(3, (3, 9)) == (2, 2, 27)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(KINDS[:4]), st.sampled_from([2, 3, 5]))
def test_theorem1_never_violated(seed, kind, p):
    inst = theorem1_instance(seed, p, kind)
    rep = check_theorem1(inst.phi, inst.M)
    assert rep.verdict == "Pass", rep.verdict
    assert rep.phi_rank * inst.A.dim == inst.B.dim


def test_sweep_is_deterministic_and_parseable():
    a = sweep("monomial_ci", 7, 12)
    b = sweep("monomial_ci", 7, 12)
    text_a = "\n".join(r.to_text() for r in a.reports + [a.summary()])
    text_b = "\n".join(r.to_text() for r in b.reports + [b.summary()])
    assert text_a == text_b
    parsed = parse_reports(text_a)
    assert parsed[-1].kind == "sweep" and parsed[-1]["theorem_violation"] == "0"
    assert [r.to_text() for r in parsed] == [r.to_text() for r in a.reports + [a.summary()]]
    with pytest.raises(ValueError):
        sweep("user_file", 0, 1)
