import itertools
import random
from fractions import Fraction

import pytest

from mcversal.ainf import (
    AinfStructure,
    Cochain,
    FieldDomain,
    Generator,
    SignedGroupAction,
    average_projector,
    check_relations,
    from_associative_product,
    gerstenhaber_bracket,
    gerstenhaber_product,
    hochschild_differential,
    opposite_cochain,
    opposite_structure,
    signed_act_on_cc,
)
from mcversal.grading import GradingDatum, SignedGroup, cyclic_group, integer_datum


def dual_numbers(max_length=6):
    """A = k[x]/x^2 with |x| = 1 over G = Z, as a shifted-convention structure."""
    g = integer_datum()
    st = AinfStructure(
        grading=g,
        objects=("pt",),
        generators=(
            Generator(0, 0, (0,), "e"),
            Generator(0, 0, (1,), "x"),
        ),
        domain=FieldDomain(),
        max_length=max_length,
    )
    product = {
        (0, 0): {0: Fraction(1)},
        (0, 1): {1: Fraction(1)},
        (1, 0): {1: Fraction(1)},
        (1, 1): {},
    }
    st.set_mu(from_associative_product(st, product))
    return st


def valid_components(st, degree, max_len):
    """All component keys consistent with the declared degree over a field."""
    g = st.grading
    out = []
    for length in range(0, max_len + 1):
        for tensor in st.tensors_of_length(length):
            tdeg = g.zero()
            for i in tensor:
                tdeg = g.add(tdeg, st.shifted_degree(i))
            for b, gen in enumerate(st.generators):
                if tensor:
                    if gen.source != st.generators[tensor[0]].source:
                        continue
                    if gen.target != st.generators[tensor[-1]].target:
                        continue
                else:
                    if gen.source != gen.target:
                        continue
                if g.sub(st.shifted_degree(b), tdeg) == g.reduce(degree):
                    out.append((tensor, b))
    return out


def random_cochain(st, degree, max_len, rng):
    comps = {}
    for key in valid_components(st, degree, max_len):
        c = rng.randint(-2, 2)
        if c:
            comps[key] = Fraction(c)
    return Cochain(st, degree, comps)


def test_mu_squared_zero_for_associative_algebra():
    st = dual_numbers()
    assert check_relations(st).ok


def test_unit_cochain_is_closed():
    st = dual_numbers()
    unit = Cochain(st, st.grading.reduce((-1,)), {((), 0): Fraction(1)})
    assert hochschild_differential(st, unit).is_zero()


def test_perturbed_structure_fails_relations():
    st = dual_numbers()
    comps = dict(st.mu.components)
    comps[((1, 1), 0)] = Fraction(1)  # x.x = e breaks associativity gradings aside
    st2 = AinfStructure(
        grading=st.grading,
        objects=st.objects,
        generators=st.generators,
        domain=FieldDomain(),
        max_length=st.max_length,
    )
    # x.x = e is degree-compatible [2*1 - 1 shift arithmetic: deg' e - 2 deg' x
    # = -1 - 0 = -1 = mu degree? i(1) = 1 so this component is NOT valid];
    # use the curvature-free illegal specification to check the report instead.
    with pytest.raises(ValueError):
        st2.set_mu(comps)


def test_gerstenhaber_identity_cochain_behaves_like_unit():
    st = dual_numbers()
    # length-1 identity cochain of shifted degree 0
    e = Cochain(
        st,
        st.grading.zero(),
        {((0,), 0): Fraction(1), ((1,), 1): Fraction(1)},
    )
    rng = random.Random(11)
    phi = random_cochain(st, (0,), 2, rng)
    # phi o e = (arity of phi) phi-like sum; e o phi = phi (single slot).
    assert gerstenhaber_product(e, phi).components == phi.components


def test_associator_of_mu_vanishes():
    st = dual_numbers()
    sq = gerstenhaber_product(st.mu, st.mu)
    assert sq.is_zero()


def test_pre_lie_symmetry():
    # phi o (psi o chi) - (phi o psi) o chi is symmetric in (psi, chi) up to sign
    st = dual_numbers(max_length=8)
    rng = random.Random(5)
    for da, db, dc in [((0,), (0,), (0,)), ((1,), (0,), (1,)), ((1,), (1,), (1,))]:
        phi = random_cochain(st, da, 2, rng)
        psi = random_cochain(st, db, 2, rng)
        chi = random_cochain(st, dc, 2, rng)
        lhs = gerstenhaber_product(phi, gerstenhaber_product(psi, chi)) - gerstenhaber_product(
            gerstenhaber_product(phi, psi), chi
        )
        rhs = gerstenhaber_product(phi, gerstenhaber_product(chi, psi)) - gerstenhaber_product(
            gerstenhaber_product(phi, chi), psi
        )
        sign = -1 if (psi.parity() and chi.parity()) else 1
        diff = lhs - rhs.scale(Fraction(sign))
        assert diff.is_zero()


def test_bracket_antisymmetry_and_jacobi():
    st = dual_numbers(max_length=8)
    rng = random.Random(23)
    degrees = [(0,), (1,), (2,)]
    for da, db in itertools.product(degrees, repeat=2):
        phi = random_cochain(st, da, 2, rng)
        psi = random_cochain(st, db, 2, rng)
        sign = -1 if (phi.parity() and psi.parity()) else 1
        anti = gerstenhaber_bracket(phi, psi) + gerstenhaber_bracket(psi, phi).scale(
            Fraction(sign)
        )
        assert anti.is_zero()
    for da, db, dc in [((1,), (1,), (1,)), ((0,), (1,), (1,)), ((1,), (0,), (2,))]:
        phi = random_cochain(st, da, 2, rng)
        psi = random_cochain(st, db, 2, rng)
        chi = random_cochain(st, dc, 2, rng)
        s1 = -1 if (phi.parity() and psi.parity()) else 1
        lhs = gerstenhaber_bracket(phi, gerstenhaber_bracket(psi, chi))
        rhs = gerstenhaber_bracket(gerstenhaber_bracket(phi, psi), chi) + gerstenhaber_bracket(
            psi, gerstenhaber_bracket(phi, chi)
        ).scale(Fraction(s1))
        assert (lhs - rhs).is_zero()


def test_differential_squares_to_zero():
    st = dual_numbers(max_length=8)
    rng = random.Random(9)
    for deg in [(0,), (1,), (-1,)]:
        eta = random_cochain(st, deg, 2, rng)
        dd = hochschild_differential(st, hochschild_differential(st, eta))
        assert dd.is_zero()


def test_differential_of_mu_is_zero():
    st = dual_numbers()
    assert hochschild_differential(st, st.mu).is_zero()


def test_differential_derivation_of_bracket():
    st = dual_numbers(max_length=8)
    rng = random.Random(31)
    phi = random_cochain(st, (1,), 2, rng)
    psi = random_cochain(st, (0,), 2, rng)
    lhs = hochschild_differential(st, gerstenhaber_bracket(phi, psi))
    sign = -1 if phi.parity() else 1
    rhs = gerstenhaber_bracket(hochschild_differential(st, phi), psi) + gerstenhaber_bracket(
        phi, hochschild_differential(st, psi)
    ).scale(Fraction(sign))
    assert (lhs - rhs).is_zero()


def test_dual_numbers_differential_hand_expansion():
    # eta: x -> e (arity 1).  Hand expansion of [mu^2, eta]:
    #   (mu o eta)(x, b) = mu2(e, b), (a, x) slot gives signed mu2(a, e);
    #   (eta o mu) inserts mu into eta's only slot.
    # With x odd every term cancels pairwise, so eta is a cocycle (it is the
    # odd derivation x -> 1, and delta(x.x) = x - x = 0 in the graded rule).
    st = dual_numbers()
    eta = Cochain(st, st.grading.reduce((-1,)), {((1,), 0): Fraction(1)})
    d_eta = hochschild_differential(st, eta)
    assert d_eta.evaluate((1, 1)) == {}
    assert d_eta.is_zero()


def test_opposite_signs_match_displayed_formula():
    st = dual_numbers()
    # arity 2, both inputs of unshifted degree 0 (shifted parity 1): sign -1
    eta = Cochain(st, st.grading.reduce((1,)), {((0, 0), 0): Fraction(1)})
    op_eta = opposite_cochain(eta)
    assert op_eta.components == {((0, 0), 0): Fraction(-1)}
    # arity 2, inputs of unshifted degree 1 (shifted parity 0): sign +1
    eta2 = Cochain(st, st.grading.reduce((-1,)), {((1, 1), 0): Fraction(1)})
    op_eta2 = opposite_cochain(eta2)
    assert op_eta2.components == {((1, 1), 0): Fraction(1)}


def test_opposite_involution_and_bracket_intertwining():
    st = dual_numbers(max_length=8)
    op_st = opposite_structure(st)
    assert check_relations(op_st).ok
    rng = random.Random(17)
    for deg in [(0,), (1,)]:
        eta = random_cochain(st, deg, 2, rng)
        roundtrip = opposite_cochain(opposite_cochain(eta, op_st), st)
        assert roundtrip.components == eta.components
    phi = random_cochain(st, (1,), 2, rng)
    psi = random_cochain(st, (1,), 2, rng)
    lhs = opposite_cochain(gerstenhaber_bracket(phi, psi), op_st)
    rhs = gerstenhaber_bracket(opposite_cochain(phi, op_st), opposite_cochain(psi, op_st))
    assert (lhs - rhs).is_zero()


def swap_category():
    """Two objects, arrows both ways, zero products; Z/2 swaps the objects."""
    g = integer_datum()
    st = AinfStructure(
        grading=g,
        objects=("A", "B"),
        generators=(
            Generator(0, 1, (1,), "u"),
            Generator(1, 0, (1,), "v"),
        ),
        domain=FieldDomain(),
        max_length=6,
    )
    st.set_mu({})
    act = SignedGroupAction(
        structure=st,
        signed_group=SignedGroup(cyclic_group(2), (0, 0)),
        object_perms=((0, 1), (1, 0)),
        gen_maps=(
            {0: [(0, Fraction(1))], 1: [(1, Fraction(1))]},
            {0: [(1, Fraction(1))], 1: [(0, Fraction(1))]},
        ),
    )
    return st, act


def test_signed_action_identity_and_average():
    st, act = swap_category()
    eta = Cochain(st, st.grading.zero(), {((0,), 0): Fraction(1)})
    assert signed_act_on_cc(act, 0, eta).components == eta.components
    swapped = signed_act_on_cc(act, 1, eta)
    assert swapped.components == {((1,), 1): Fraction(1)}
    avg = average_projector(act, eta)
    assert avg.components == {
        ((0,), 0): Fraction(1, 2),
        ((1,), 1): Fraction(1, 2),
    }
    # idempotence
    assert average_projector(act, avg).components == avg.components


def test_signed_action_table_compatibility():
    st, act = swap_category()
    rng = random.Random(3)
    eta = random_cochain(st, (0,), 3, rng)
    for i in range(2):
        for j in range(2):
            k = act.signed_group.group.mul(i, j)
            lhs = signed_act_on_cc(act, i, signed_act_on_cc(act, j, eta))
            rhs = signed_act_on_cc(act, k, eta)
            assert (lhs - rhs).is_zero()


def test_odd_signed_action_on_dual_numbers():
    # e -> -e, x -> x with parity 1 preserves mu (checked in validation)
    st = dual_numbers()
    act = SignedGroupAction(
        structure=st,
        signed_group=SignedGroup(cyclic_group(2), (0, 1)),
        object_perms=((0,), (0,)),
        gen_maps=(
            {0: [(0, Fraction(1))], 1: [(1, Fraction(1))]},
            {0: [(0, Fraction(-1))], 1: [(1, Fraction(1))]},
        ),
    )
    mu_acted = signed_act_on_cc(act, 1, st.mu)
    assert (mu_acted - st.mu).is_zero()
    # the action preserves the differential
    rng = random.Random(41)
    eta = random_cochain(st, (1,), 2, rng)
    lhs = signed_act_on_cc(act, 1, hochschild_differential(st, eta))
    rhs = hochschild_differential(st, signed_act_on_cc(act, 1, eta))
    assert (lhs - rhs).is_zero()
