"""End-to-end checks of the relative complete intersection theorem and its corollaries.

Every check evaluates hypotheses and conclusions independently with the
exact oracles of the other modules; nothing here trusts the theorem.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .algebra import AlgebraMorphism, FiniteLocalAlgebra, base_change_fiber
from .errors import ArtinflatError, HypothesisTwoViolated, PreconditionFailed
from .generators import (
    KINDS,
    InstanceSpec,
    generate_algebra,
    module_family,
    theorem1_instance,
)
from .invariants import edim, is_complete_intersection, is_gorenstein, socle
from .lemma import delta_preimage_space, direct_membership, instance_from_morphism, membership_certificate
from .modules import FiniteModule, is_flat, is_weakly_torsion_free, restrict_scalars, verify_wtf_witness
from .report import Report

HYPOTHESES = ("morphism_local", "edim_le", "M_nonzero", "M_A_flat")


@dataclass
class Theorem1Report:
    hypothesis_status: dict[str, bool]
    phi_flat: bool
    phi_rank: int | None
    edim_A: int
    edim_B: int
    fiber_dim: int
    fiber_edim: int
    fiber_ci: bool
    fiber_mu: int
    M_A_rank: int | None
    M_B_flat: bool
    M_B_rank: int | None
    delta: str
    delta_generates_fiber_socle: bool
    lemma_certificates: int = 0
    lemma_failures: list[str] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)

    @property
    def hypotheses_hold(self) -> bool:
        return all(self.hypothesis_status.values())

    @property
    def edim_equal(self) -> bool:
        return self.edim_A == self.edim_B

    @property
    def verdict(self) -> str:
        if not self.hypotheses_hold:
            return "HypothesisNotMet(" + ",".join(k for k in HYPOTHESES if not self.hypothesis_status[k]) + ")"
        if self.failures:
            return "THEOREM_VIOLATION(" + "; ".join(self.failures) + ")"
        return "Pass"

    @property
    def is_violation(self) -> bool:
        return self.verdict.startswith("THEOREM_VIOLATION")

    def to_report(self, **header) -> Report:
        r = Report("theorem1").extend(header.items())
        for k in HYPOTHESES:
            r.add(f"hypothesis.{k}", self.hypothesis_status[k])
        r.extend([
            ("edim_A", self.edim_A),
            ("edim_B", self.edim_B),
            ("M_A_rank", self.M_A_rank),
            ("conclusion.phi_flat", self.phi_flat),
            ("conclusion.phi_rank", self.phi_rank),
            ("conclusion.edim_equal", self.edim_equal),
            ("conclusion.fiber_dim", self.fiber_dim),
            ("conclusion.fiber_edim", self.fiber_edim),
            ("conclusion.fiber_ci", self.fiber_ci),
            ("conclusion.fiber_mu", self.fiber_mu),
            ("conclusion.M_B_flat", self.M_B_flat),
            ("conclusion.M_B_rank", self.M_B_rank),
            ("conclusion.delta", self.delta),
            ("conclusion.delta_generates_fiber_socle", self.delta_generates_fiber_socle),
            ("lemma_certificates", self.lemma_certificates),
            ("verdict", self.verdict),
        ])
        return r


def check_delta_socle(phi: AlgebraMorphism):
    """(Delta, image of Delta spans the socle of B/m_A B) for W with x = W u."""
    inst = instance_from_morphism(phi, FiniteModule.zero(phi.target))
    F, proj = base_change_fiber(phi)
    d_bar = proj(inst.delta)
    soc = socle(F)
    ok = (not d_bar.is_zero()) and soc.dim == 1 and soc.contains(d_bar.coords)
    return inst.delta, ok


def check_theorem1(phi: AlgebraMorphism, M: FiniteModule, lemma_checks: int = 2) -> Theorem1Report:
    A, B = phi.source, phi.target
    if M.parent is not B:
        raise ValueError("module is not over the target of the morphism")
    # morphisms are validated local on construction; recheck m_A -> m_B
    local = all(phi(g).coords[0] == 0 for g in A.minimal_generators())
    eA, eB = edim(A), edim(B)
    MA = is_flat(restrict_scalars(M, phi))
    hyp = {
        "morphism_local": bool(local),
        "edim_le": eB <= eA,
        "M_nonzero": M.dim > 0,
        "M_A_flat": MA.is_flat,
    }
    phi_v = is_flat(restrict_scalars(FiniteModule.regular(B), phi))
    F, _ = base_change_fiber(phi)
    f_ci, f_mu = is_complete_intersection(F)
    MB = is_flat(M)
    delta, d_ok = check_delta_socle(phi)
    rep = Theorem1Report(
        hypothesis_status=hyp,
        phi_flat=phi_v.is_flat,
        phi_rank=phi_v.rank,
        edim_A=eA,
        edim_B=eB,
        fiber_dim=F.dim,
        fiber_edim=edim(F),
        fiber_ci=f_ci,
        fiber_mu=f_mu,
        M_A_rank=MA.rank,
        M_B_flat=MB.is_flat,
        M_B_rank=MB.rank,
        delta=B.format(delta),
        delta_generates_fiber_socle=d_ok,
    )
    if not rep.hypotheses_hold:
        return rep
    fails = rep.failures
    if not phi_v.is_flat:
        fails.append("B not flat over A")
    elif phi_v.rank * A.dim != B.dim:
        fails.append(f"rank {phi_v.rank} of B over A != dim B / dim A")
    if eA != eB:
        fails.append(f"edim B = {eB} != edim A = {eA}")
    if not f_ci:
        fails.append(f"fiber not a complete intersection (mu = {f_mu}, edim = {rep.fiber_edim})")
    if not MB.is_flat:
        fails.append("M not flat over B")
    if not d_ok:
        fails.append("image of Delta does not span the fiber socle")
    if lemma_checks:
        _lemma_on_instance(rep, phi, M, lemma_checks)
        fails.extend(rep.lemma_failures)
    return rep


def _lemma_on_instance(rep: Theorem1Report, phi, M, budget: int):
    """Certificates m in J_u M for the first vectors of {m : Delta m in J_x M}."""
    inst = instance_from_morphism(phi, M)
    pre = delta_preimage_space(inst)
    for v in pre.basis[:budget]:
        try:
            cert = membership_certificate(inst, v)
        except HypothesisTwoViolated as exc:
            rep.lemma_failures.append(f"lemma hypothesis on relations failed for an A-flat module: {exc}")
            continue
        if not cert.verify() or not direct_membership(inst, v):
            rep.lemma_failures.append("membership certificate failed verification")
        else:
            rep.lemma_certificates += 1


# -- corollary: A-flat implies B-flat ----------------------------------------

@dataclass
class DesmitReport:
    tested: int
    a_flat_nonzero: int
    b_flat: int
    violations: list[str]
    phi_flat: bool
    dim_A: int
    dim_B: int

    @property
    def nontrivial(self) -> bool:
        return self.a_flat_nonzero > 0

    def to_report(self, **header) -> Report:
        return Report("desmit").extend(list(header.items()) + [
            ("dim_A", self.dim_A),
            ("dim_B", self.dim_B),
            ("phi_flat", self.phi_flat),
            ("modules_tested", self.tested),
            ("a_flat_nonzero", self.a_flat_nonzero),
            ("b_flat", self.b_flat),
            ("violations", len(self.violations)),
            ("verdict", "Pass" if not self.violations else "VIOLATION"),
        ])


def check_desmit(phi: AlgebraMorphism, budget: int = 200, seed: int = 0, salt: int = 0) -> DesmitReport:
    A, B = phi.source, phi.target
    if edim(A) != edim(B):
        raise PreconditionFailed(f"edim A = {edim(A)} differs from edim B = {edim(B)}")
    phi_flat = is_flat(restrict_scalars(FiniteModule.regular(B), phi)).is_flat
    tested = a_flat = b_flat = 0
    violations = []
    for shape, M in module_family(B, budget, seed, salt):
        tested += 1
        if M.dim == 0:
            continue
        if is_flat(restrict_scalars(M, phi)).is_flat:
            a_flat += 1
            if is_flat(M).is_flat:
                b_flat += 1
            else:
                violations.append(f"{shape} module of dim {M.dim} is A-flat but not B-flat")
    return DesmitReport(tested, a_flat, b_flat, violations, phi_flat, A.dim, B.dim)


# -- flat iff weakly torsion-free ---------------------------------------------

@dataclass
class WtfEquivReport:
    gorenstein: bool
    mode: str
    tested: int
    flat: int
    wtf: int
    disagreements: list[str]

    def to_report(self, **header) -> Report:
        return Report("wtf_equiv").extend(list(header.items()) + [
            ("gorenstein", self.gorenstein),
            ("mode", self.mode),
            ("modules_tested", self.tested),
            ("flat", self.flat),
            ("weakly_torsion_free", self.wtf),
            ("disagreements", len(self.disagreements)),
            ("verdict", "Pass" if not self.disagreements else "VIOLATION"),
        ])


def check_wtf_equiv_flat(R: FiniteLocalAlgebra, budget: int = 20, seed: int = 0, salt: int = 0,
                         mode: str = "equivalence", module_cap: int = 64) -> WtfEquivReport:
    """``equivalence``: flat <=> wtf (needs R Gorenstein); ``forward``: flat => wtf."""
    gor = is_gorenstein(R)
    if mode == "equivalence" and not gor:
        raise PreconditionFailed("flat <=> weakly torsion-free is only asserted over Gorenstein rings")
    if mode not in ("equivalence", "forward"):
        raise ValueError(f"unknown mode {mode!r}")
    tested = n_flat = n_wtf = 0
    bad = []
    for shape, M in module_family(R, budget, seed, salt, dim_cap=module_cap):
        tested += 1
        fl = is_flat(M).is_flat
        w = is_weakly_torsion_free(M, "exhaustive")
        if w.witness is not None:
            assert verify_wtf_witness(M, w.witness)
        n_flat += fl
        n_wtf += w.holds
        if fl and not w.holds:
            bad.append(f"{shape}: flat but not weakly torsion-free")
        elif mode == "equivalence" and w.holds and not fl:
            bad.append(f"{shape}: weakly torsion-free but not flat")
    return WtfEquivReport(gor, mode, tested, n_flat, n_wtf, bad)


# -- group algebras -------------------------------------------------------------

def group_algebra_edim(p: int, alphas) -> tuple[int, int, int]:
    """(edim k[G], r, dim k[G]) for G = product of cyclic groups of orders alphas."""
    A = generate_algebra(InstanceSpec(0, "group_algebra", p, dim_cap=int(np.prod(alphas)), alphas=tuple(alphas)))
    return edim(A), len(alphas), A.dim


# -- sweeps -----------------------------------------------------------------------

@dataclass
class SweepResult:
    kind: str
    seed: int
    count: int
    reports: list[Report]
    passed: int
    hypothesis_not_met: int
    violations: int
    skipped: int
    elapsed: float

    def summary(self, timing: bool = False) -> Report:
        r = Report("sweep").extend([
            ("kind", self.kind),
            ("seed", self.seed),
            ("count", self.count),
            ("pass", self.passed),
            ("hypothesis_not_met", self.hypothesis_not_met),
            ("theorem_violation", self.violations),
            ("generation_failures", self.skipped),
            ("verdict", "Pass" if not self.violations else "VIOLATION"),
        ])
        if timing:
            r.add("elapsed_seconds", f"{self.elapsed:.3f}")
        return r


def sweep(kind: str, seed: int, count: int, primes=(2, 3, 5), dim_cap: int = 32, n_cap: int = 3,
          lemma_checks: int = 1) -> SweepResult:
    """Check the relative complete intersection theorem on ``count`` generated instances; instance i uses prime primes[i % len(primes)]."""
    if kind not in KINDS or kind == "user_file":
        raise ValueError(f"sweep kind must be one of {', '.join(KINDS[:-1])}")
    t0 = time.perf_counter()
    reports = []
    passed = hnm = viol = skipped = 0
    for i in range(count):
        p = primes[i % len(primes)]
        inst_seed = seed * 1_000_003 + i
        try:
            inst = theorem1_instance(inst_seed, p, kind, dim_cap=dim_cap, n_cap=n_cap)
        except ArtinflatError as exc:
            skipped += 1
            reports.append(Report("instance").extend([("index", i), ("p", p), ("status", f"generation_failed: {exc}")]))
            continue
        rep = check_theorem1(inst.phi, inst.M, lemma_checks=lemma_checks)
        v = rep.verdict
        passed += v == "Pass"
        hnm += v.startswith("HypothesisNotMet")
        viol += rep.is_violation
        reports.append(Report("instance").extend([
            ("index", i),
            ("p", p),
            ("morphism", inst.morphism.description),
            ("module", f"{inst.module_shape} (dim {inst.M.dim})"),
            ("dim_A", inst.A.dim),
            ("dim_B", inst.B.dim),
            ("phi_rank", rep.phi_rank),
            ("fiber_mu", rep.fiber_mu),
            ("M_B_rank", rep.M_B_rank),
            ("delta", rep.delta),
            ("verdict", v),
        ]))
    return SweepResult(kind, seed, count, reports, passed, hnm, viol, skipped, time.perf_counter() - t0)
