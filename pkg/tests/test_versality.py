from fractions import Fraction

import pytest

from mcversal.ainf import (
    AinfStructure,
    Cochain,
    FieldDomain,
    Generator,
    SignedGroupAction,
)
from mcversal.cones import RationalCone
from mcversal.coeff_ring import (
    RingAutomorphism,
    RingGroupAction,
    TruncatedRing,
    apply_automorphism,
)
from mcversal.deformation import RingDeformation, gauge_act
from mcversal.grading import (
    GradingAction,
    GradingDatum,
    SignedGroup,
    cyclic_group,
)
from mcversal.versality import (
    EquivariantData,
    NonInvariantInput,
    NotInSpan,
    VersalityProblem,
    completeness_report,
    equivariant_versal_match,
    verify_certificate,
    versal_match,
)


def g2():
    return GradingDatum(rank=2, torsion=(), i_of_one=(1, 0), sigma=(1, 0))


def rank2_ring(order=6):
    cone = RationalCone(2, ((1, 0), (0, 1)))
    return TruncatedRing(cone, g2(), ((0, 1), (0, -1)), order)


def rank2_base(extra_z=False, max_length=8):
    gens = [Generator(0, 0, (2, -1), "x"), Generator(0, 0, (2, 1), "y")]
    if extra_z:
        gens.append(Generator(0, 0, (2, 0), "z"))
    st = AinfStructure(
        grading=g2(),
        objects=("pt",),
        generators=tuple(gens),
        domain=FieldDomain(),
        max_length=max_length,
    )
    st.set_mu({})
    return st


def rank2_problem(order=6, psi0=None, gamma0=None, extra_z=False, beta_extra=None):
    base = rank2_base(extra_z=extra_z)
    ring = rank2_ring(order)
    lifted_probe = RingDeformation(
        base, ring, Cochain(base, base.grading.i_of_one, {}, domain=FieldDomain(), validate=False)
    )
    lifted = lifted_probe.lifted
    r1, r2 = ring.generator(0), ring.generator(1)
    alpha = Cochain(
        lifted,
        lifted.grading.i_of_one,
        {((), 0): r1, ((), 1): r2},
        domain=lifted.domain,
    )
    deformation = RingDeformation(base, ring, alpha)
    alpha = deformation.alpha
    beta = alpha
    if psi0 is not None:
        comps = {k: apply_automorphism(psi0, c) for k, c in alpha.components.items()}
        beta = Cochain(deformation.lifted, alpha.degree, comps, domain=deformation.lifted.domain)
    if gamma0 is not None:
        beta = gauge_act(deformation.lifted, gamma0, beta)
    if beta_extra is not None:
        beta = beta + beta_extra(deformation)
    problem = VersalityProblem(
        deformation=deformation,
        beta=beta,
        hh_functional=(1, 0),
    )
    return problem


def test_versal_match_identity():
    problem = rank2_problem()
    cert = versal_match(problem)
    assert cert.versal
    one = problem.deformation.ring.one()
    assert all(u == one for u in cert.psi.units)
    assert cert.gamma.is_zero()
    assert all(log["rounds"] >= 1 for log in cert.residue_log)
    assert verify_certificate(problem, cert)


def test_versal_match_recovers_automorphism():
    ring = rank2_ring()
    s = ring.generator(0) * ring.generator(1)
    one = ring.one()
    # terms of m-adic order <= K-1: higher ones act beyond the truncation and
    # are not recoverable (psi is determined mod m^K)
    psi0 = RingAutomorphism(
        ring,
        (
            one + s.scale(2) + (s * s).scale(3),
            one - s + (s * s).scale(Fraction(1, 2)),
        ),
    )
    problem = rank2_problem(psi0=psi0)
    cert = versal_match(problem)
    assert cert.versal
    # coefficient-exact recovery through the truncation order
    assert cert.psi.units[0] == psi0.units[0]
    assert cert.psi.units[1] == psi0.units[1]
    assert cert.gamma.is_zero()
    assert verify_certificate(problem, cert)


def test_versal_match_roundtrip_with_gauge():
    # gamma0 in a non-closed-free piece: here all degree-0 cochains are closed
    # (mu = 0) but the solver's phi-first policy still certifies the identity;
    # assert only the certificate equation for this variant.
    ring = rank2_ring()
    one = ring.one()
    s = ring.generator(0) * ring.generator(1)
    psi0 = RingAutomorphism(ring, (one + s, one))
    problem0 = rank2_problem()
    lifted = problem0.deformation.lifted
    gamma0 = Cochain(
        lifted,
        lifted.grading.zero(),
        {((0,), 0): s.scale(Fraction(1, 3))},
        domain=lifted.domain,
    )
    problem = rank2_problem(psi0=psi0, gamma0=gamma0)
    cert = versal_match(problem)
    assert verify_certificate(problem, cert)
    # the recovered data need not equal (psi0, gamma0) when closed degree-0
    # directions exist; soundness of the certificate is the contract here
    assert cert.versal


def test_not_in_span_at_higher_order():
    # beta = alpha + s * (z-curvature): the s-piece is nonzero but unreachable
    def extra(deformation):
        ring = deformation.ring
        s = ring.generator(0) * ring.generator(1)
        return Cochain(
            deformation.lifted,
            deformation.lifted.grading.i_of_one,
            {((), 2): s},
            domain=deformation.lifted.domain,
        )

    problem = rank2_problem(extra_z=True, beta_extra=extra)
    with pytest.raises(NotInSpan) as err:
        versal_match(problem)
    assert err.value.order == 2
    assert err.value.monomial == (1, 1)


def test_not_in_span_at_first_order():
    # alpha with vanishing first-order class on a nonzero piece
    base = rank2_base()
    ring = rank2_ring()
    probe = RingDeformation(
        base, ring, Cochain(base, base.grading.i_of_one, {}, domain=FieldDomain(), validate=False)
    )
    lifted = probe.lifted
    r2 = ring.generator(1)
    alpha = Cochain(
        lifted, lifted.grading.i_of_one, {((), 1): r2}, domain=lifted.domain
    )
    deformation = RingDeformation(base, ring, alpha)
    beta_comps = dict(deformation.alpha.components)
    beta_comps[((), 0)] = ring.generator(0)
    beta = Cochain(deformation.lifted, deformation.alpha.degree, beta_comps, domain=deformation.lifted.domain)
    problem = VersalityProblem(deformation=deformation, beta=beta, hh_functional=(1, 0))
    with pytest.raises(NotInSpan) as err:
        versal_match(problem)
    assert err.value.order == 1


def test_completeness_report_versal_and_witness():
    problem = rank2_problem()
    report = completeness_report(problem)
    assert report["conclusion"] == "R-versal"
    assert all(report["a_p_nonzero"].values())
    # with the extra z generator the s-piece is a span failure
    problem2 = rank2_problem(extra_z=True)
    report2 = completeness_report(problem2)
    assert report2["conclusion"] == "no conclusion"
    assert report2["span_failures"]


def test_completeness_report_complete_but_not_versal():
    # alpha deforming only in the r2 direction on a base whose r1 piece is zero:
    # drop the x generator so the (1,-1) piece is empty
    g = g2()
    st = AinfStructure(
        grading=g,
        objects=("pt",),
        generators=(Generator(0, 0, (2, 1), "y"),),
        domain=FieldDomain(),
        max_length=8,
    )
    st.set_mu({})
    ring = rank2_ring()
    probe = RingDeformation(
        st, ring, Cochain(st, g.i_of_one, {}, domain=FieldDomain(), validate=False)
    )
    alpha = Cochain(
        probe.lifted, g.i_of_one, {((), 0): ring.generator(1)}, domain=probe.lifted.domain
    )
    deformation = RingDeformation(st, ring, alpha)
    problem = VersalityProblem(
        deformation=deformation, beta=deformation.alpha, hh_functional=(1, 0)
    )
    report = completeness_report(problem)
    assert report["conclusion"] == "R-complete"
    assert not report["a_p_nonzero"][0]
    cert = versal_match(problem)
    assert not cert.versal
    # the rank-zero generator unit is pinned to 1
    assert cert.psi.units[0] == ring.one()


# ---------------------------------------------------------------------------
# equivariant


def swap_equivariant_problem(order=6, psi0_unit=None):
    base = rank2_base()
    ring = rank2_ring(order)
    probe = RingDeformation(
        base, ring, Cochain(base, base.grading.i_of_one, {}, domain=FieldDomain(), validate=False)
    )
    lifted = probe.lifted
    r1, r2 = ring.generator(0), ring.generator(1)
    alpha = Cochain(
        lifted, lifted.grading.i_of_one, {((), 0): r1, ((), 1): r2}, domain=lifted.domain
    )
    deformation = RingDeformation(base, ring, alpha)
    alpha = deformation.alpha
    # the swap action: objects fixed, x <-> y, r_1 <-> r_2, G-action (a,b) -> (a,-b)
    z2 = SignedGroup(cyclic_group(2), (0, 0))
    grading_action = GradingAction(
        z2.group,
        base.grading,
        (
            (((1, 0), (0, 1))),
            (((1, 0), (0, -1))),
        ),
    )
    ring_action = RingGroupAction(
        ring,
        z2,
        (((1, 0), (0, 1)), ((0, 1), (1, 0))),
        p_mor=None,
    )
    action = SignedGroupAction(
        structure=deformation.lifted,
        signed_group=z2,
        object_perms=((0,), (0,)),
        gen_maps=(
            {0: [(0, Fraction(1))], 1: [(1, Fraction(1))]},
            {0: [(1, Fraction(1))], 1: [(0, Fraction(1))]},
        ),
        grading_action=grading_action,
        ring_action=ring_action,
    )
    beta = alpha
    if psi0_unit is not None:
        psi0 = RingAutomorphism(ring, (psi0_unit, psi0_unit))
        comps = {k: apply_automorphism(psi0, c) for k, c in alpha.components.items()}
        beta = Cochain(deformation.lifted, alpha.degree, comps, domain=deformation.lifted.domain)
    return VersalityProblem(
        deformation=deformation,
        beta=beta,
        hh_functional=(1, 0),
        equivariant=EquivariantData(action=action, ring_action=ring_action),
    )


def test_equivariant_match_swap_demo():
    ring = rank2_ring()
    s = ring.generator(0) * ring.generator(1)
    unit = ring.one() + s.scale(2)
    problem = swap_equivariant_problem(psi0_unit=unit)
    cert = equivariant_versal_match(problem)
    assert cert.equivariant
    assert cert.psi.units[0] == unit
    assert cert.psi.units[1] == unit
    # psi_{g . p} = g . psi_p holds exactly
    perm = problem.equivariant.ring_action.generator_permutation(1)
    assert perm == ((1, 1), (0, 1))
    lhs = cert.psi.units[1]
    rhs = problem.equivariant.ring_action.apply(1, cert.psi.units[0])
    assert lhs == rhs
    assert verify_certificate(problem, cert)


def test_equivariant_match_agrees_with_plain_symmetrization():
    ring = rank2_ring()
    s = ring.generator(0) * ring.generator(1)
    unit = ring.one() + s.scale(2)
    problem_eq = swap_equivariant_problem(psi0_unit=unit)
    cert_eq = equivariant_versal_match(problem_eq)
    # plain run on the same data
    problem_plain = swap_equivariant_problem(psi0_unit=unit)
    problem_plain.equivariant = None
    cert_plain = versal_match(problem_plain)
    # symmetrize the plain psi: average over the swap
    ra = problem_eq.equivariant.ring_action
    for p in range(2):
        avg = (
            cert_plain.psi.units[p] + ra.apply(1, cert_plain.psi.units[1 - p])
        ).scale(Fraction(1, 2))
        assert avg == cert_eq.psi.units[p]


def test_equivariant_rejects_noninvariant_beta():
    ring = rank2_ring()
    s = ring.generator(0) * ring.generator(1)
    problem = swap_equivariant_problem()
    # break the symmetry of beta
    psi0 = RingAutomorphism(ring, (ring.one() + s, ring.one()))
    comps = {
        k: apply_automorphism(psi0, c) for k, c in problem.deformation.alpha.components.items()
    }
    problem.beta = Cochain(
        problem.deformation.lifted,
        problem.deformation.alpha.degree,
        comps,
        domain=problem.deformation.lifted.domain,
    )
    with pytest.raises(NonInvariantInput):
        equivariant_versal_match(problem)


def test_trivial_group_equivariant_reduces_to_plain():
    ring = rank2_ring()
    s = ring.generator(0) * ring.generator(1)
    unit = ring.one() + s
    base = rank2_base()
    probe = RingDeformation(
        base, ring, Cochain(base, base.grading.i_of_one, {}, domain=FieldDomain(), validate=False)
    )
    alpha = Cochain(
        probe.lifted,
        base.grading.i_of_one,
        {((), 0): ring.generator(0), ((), 1): ring.generator(1)},
        domain=probe.lifted.domain,
    )
    deformation = RingDeformation(base, ring, alpha)
    z1 = SignedGroup(cyclic_group(1), (0,))
    ring_action = RingGroupAction(ring, z1, (((1, 0), (0, 1)),), p_mor=None)
    action = SignedGroupAction(
        structure=deformation.lifted,
        signed_group=z1,
        object_perms=((0, ),),
        gen_maps=({0: [(0, Fraction(1))], 1: [(1, Fraction(1))]},),
        ring_action=ring_action,
    )
    psi0 = RingAutomorphism(ring, (unit, unit))
    comps = {k: apply_automorphism(psi0, c) for k, c in deformation.alpha.components.items()}
    beta = Cochain(deformation.lifted, deformation.alpha.degree, comps, domain=deformation.lifted.domain)
    problem_eq = VersalityProblem(
        deformation=deformation,
        beta=beta,
        hh_functional=(1, 0),
        equivariant=EquivariantData(action=action, ring_action=ring_action),
    )
    cert_eq = equivariant_versal_match(problem_eq)
    problem_plain = VersalityProblem(
        deformation=deformation, beta=beta, hh_functional=(1, 0)
    )
    cert_plain = versal_match(problem_plain)
    assert [u.to_pairs() for u in cert_eq.psi.units] == [
        u.to_pairs() for u in cert_plain.psi.units
    ]
