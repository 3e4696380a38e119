import pytest

from mcversal.grading import (
    FiniteGroup,
    GradingAction,
    GradingDatum,
    GradingMorphism,
    check_p_equivariance,
    cyclic_group,
    integer_datum,
    z_mod_4_datum,
)


def test_add_degrees_identity_and_inverse():
    g = GradingDatum(rank=1, torsion=(4,), i_of_one=(1, 0), sigma=(1, 0))
    assert g.add((0, 0), (0, 0)) == (0, 0)
    x = (3, 2)
    assert g.add(x, g.neg(x)) == (0, 0)


def test_add_degrees_torsion_reduction():
    # Z + Z/4: (1,[2]) + (1,[3]) = (2,[1])
    g = GradingDatum(rank=1, torsion=(4,), i_of_one=(1, 0), sigma=(1, 0))
    assert g.add((1, 2), (1, 3)) == (2, 1)


def test_sign_of_composite_is_mod_two():
    g = integer_datum()
    assert g.sign_of(g.zero()) == 0
    assert g.sign_of(g.of_int(1)) == 1
    assert g.sign_of(g.of_int(2)) == 0
    # on a torsion datum too
    z4 = z_mod_4_datum()
    assert z4.sign_of(z4.of_int(1)) == 1
    assert z4.sign_of(z4.of_int(2)) == 0


def test_sigma_must_hit_one():
    with pytest.raises(ValueError):
        GradingDatum(rank=1, torsion=(), i_of_one=(2,), sigma=(1,))


def test_sigma_well_defined_on_torsion():
    # sigma nonzero on a Z/3 factor is not well defined
    with pytest.raises(ValueError):
        GradingDatum(rank=1, torsion=(3,), i_of_one=(1, 0), sigma=(1, 1))
    # on a Z/4 factor it is fine
    GradingDatum(rank=1, torsion=(4,), i_of_one=(1, 0), sigma=(1, 1))


def test_morphism_reduction_mod_4():
    src = integer_datum()
    tgt = z_mod_4_datum()
    p = GradingMorphism(src, tgt, ((1,),))
    assert p.apply((5,)) == (1,)
    assert p.apply((-1,)) == (3,)


def test_morphism_must_commute_with_i():
    src = integer_datum()
    tgt = z_mod_4_datum()
    with pytest.raises(ValueError):
        GradingMorphism(src, tgt, ((3,),))


def test_morphism_composition_respects_i_and_sigma():
    g2 = GradingDatum(rank=2, torsion=(), i_of_one=(1, 0), sigma=(1, 0))
    to_z = GradingMorphism(g2, integer_datum(), ((1,), (0,)))
    to_z4 = GradingMorphism(integer_datum(), z_mod_4_datum(), ((1,),))
    comp = to_z4.compose(to_z)
    assert comp.apply((3, 7)) == (3,)
    assert comp.apply(comp.source.i_of_one) == comp.target.i_of_one


def test_group_table_validation():
    with pytest.raises(ValueError):
        FiniteGroup(("e", "a"), ((0, 1), (1, 1)))
    g = cyclic_group(3)
    assert g.inverse(1) == 2


def test_grading_action_table():
    z2 = cyclic_group(2)
    g = integer_datum()
    act = GradingAction(z2, g, (((1,),), ((-1,),)))
    assert act.apply(1, (3,)) == (-3,)
    with pytest.raises(ValueError):
        # squaring -1 twice is fine, but a non-involution assignment must fail
        GradingAction(z2, g, (((1,),), ((2,),)))


def test_check_p_equivariance_cases():
    z2 = cyclic_group(2)
    g = integer_datum()
    p = GradingMorphism(g, z_mod_4_datum(), ((1,),))
    trivial = GradingAction(z2, g, (((1,),), ((1,),)))
    assert check_p_equivariance(p, trivial, (0, 0))
    negate = GradingAction(z2, g, (((1,),), ((-1,),)))
    assert check_p_equivariance(p, negate, (0, 1))
    assert not check_p_equivariance(p, negate, (0, 0))
