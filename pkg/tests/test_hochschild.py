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
    from_associative_product,
    hochschild_differential,
)
from mcversal.grading import GradingDatum, SignedGroup, cyclic_group, integer_datum
from mcversal.hochschild import (
    cochain_basis,
    cohomology,
    invariant_subspace,
    length_bound,
    span_test,
)
from mcversal.rationals import kernel_basis, rank


def free_point(max_length=8):
    """One object, one generator x of degree 2, mu = 0."""
    st = AinfStructure(
        grading=integer_datum(),
        objects=("pt",),
        generators=(Generator(0, 0, (2,), "x"),),
        domain=FieldDomain(),
        max_length=max_length,
    )
    st.set_mu({})
    return st


def obstructed_pair(max_length=8):
    """Two generators x (deg 2), y (deg 5) with mu3(x,x,x) = y."""
    st = AinfStructure(
        grading=integer_datum(),
        objects=("pt",),
        generators=(Generator(0, 0, (2,), "x"), Generator(0, 0, (5,), "y")),
        domain=FieldDomain(),
        max_length=max_length,
    )
    st.set_mu({((0, 0, 0), 1): Fraction(1)})
    return st


def test_length_bound_certificate():
    st = free_point()
    # shifted degree of x is 1; functional (1,) certifies
    assert length_bound(st, (1,), (1,)) == 0
    assert length_bound(st, (0,), (1,)) == 1
    assert length_bound(st, (-3,), (1,)) == 4
    # degree-0 generators break the certificate
    st2 = AinfStructure(
        grading=integer_datum(),
        objects=("pt",),
        generators=(Generator(0, 0, (0,), "e"),),
        domain=FieldDomain(),
        max_length=4,
    )
    st2.set_mu({})
    assert length_bound(st2, (1,), (1,)) is None


def test_cochain_basis_free_point():
    st = free_point()
    # degree 1: only the arity-0 curvature direction
    assert cochain_basis(st, (1,), 8) == [((), 0)]
    # degree 0: only the identity-type cochain
    assert cochain_basis(st, (0,), 8) == [((0,), 0)]


def test_cohomology_free_point():
    st = free_point()
    piece = cohomology(st, (1,), functional=(1,))
    assert piece.dim == 1
    assert not piece.truncated
    z = Cochain(st, (1,), {((), 0): Fraction(2)})
    assert piece.class_of(z) == (Fraction(2),)


def test_cohomology_requires_certificate_or_override():
    st2 = AinfStructure(
        grading=integer_datum(),
        objects=("pt",),
        generators=(Generator(0, 0, (0,), "e"),),
        domain=FieldDomain(),
        max_length=4,
    )
    st2.set_mu({})
    with pytest.raises(ValueError):
        cohomology(st2, (1,), functional=(1,))
    piece = cohomology(st2, (1,), functional=None, allow_truncation=True)
    assert piece.truncated


def test_cohomology_obstructed_pair_kills_exact_class():
    st = obstructed_pair()
    # the (x,x,x) -> y direction is d of the y -> y identity-type cochain, and
    # the curvature direction x is not closed; check dims in a few degrees
    piece1 = cohomology(st, (1,), functional=(1,))
    # candidates in degree 1: arity-0 x and (x,x,x) -> y; x is not closed,
    # (xxx)->y is exact: H^1 = 0
    assert piece1.dim == 0
    piece0 = cohomology(st, (0,), functional=(1,))
    # degree-0 cochains: x->x, y->y, (xxxx)->y; kernel is spanned by the
    # Euler-type combination; nothing below can hit it
    assert piece0.dim >= 1
    for rep in piece0.representatives:
        assert hochschild_differential(st, rep).is_zero()


def test_class_of_linear_and_coboundary_zero():
    st = free_point(max_length=6)
    piece = cohomology(st, (0,), functional=(1,))
    # identity cochain x -> x is closed (mu = 0 means everything is closed)
    z = Cochain(st, (0,), {((0,), 0): Fraction(1)})
    c1 = piece.class_of(z)
    c2 = piece.class_of(z.scale(Fraction(3)))
    assert tuple(3 * x for x in c1) == c2
    zero = Cochain(st, (0,), {})
    assert piece.class_of(zero) == tuple(Fraction(0) for _ in range(piece.dim))


def test_cohomology_dimension_independent_of_basis_order():
    # recompute with permuted generator order and compare dimensions
    st = obstructed_pair()
    dim_a = cohomology(st, (0,), functional=(1,)).dim
    st2 = AinfStructure(
        grading=integer_datum(),
        objects=("pt",),
        generators=(Generator(0, 0, (5,), "y"), Generator(0, 0, (2,), "x")),
        domain=FieldDomain(),
        max_length=8,
    )
    st2.set_mu({((1, 1, 1), 0): Fraction(1)})
    dim_b = cohomology(st2, (0,), functional=(1,)).dim
    assert dim_a == dim_b


def test_span_test_and_witness():
    st = free_point()
    piece = cohomology(st, (1,), functional=(1,))
    z = Cochain(st, (1,), {((), 0): Fraction(1)})
    assert span_test([z], piece)["spans"]
    report = span_test([], piece)
    assert not report["spans"]
    assert report["witness"] is not None


def test_dense_brute_force_oracle_matches():
    """Independent dense oracle: full kernel/image ranks in one degree."""
    st = obstructed_pair()
    degree = (0,)
    basis = cochain_basis(st, degree, 8)
    below = cochain_basis(st, (-1,), 8)
    above = cochain_basis(st, (1,), 8)
    above_ix = {k: i for i, k in enumerate(above)}

    def dvec(key, deg):
        z = Cochain(st, deg, {key: Fraction(1)})
        dz = hochschild_differential(st, z)
        v = [Fraction(0)] * len(above if deg == degree else basis)
        target_ix = above_ix if deg == degree else {k: i for i, k in enumerate(basis)}
        for k2, c in dz.components.items():
            if k2 in target_ix:
                v[target_ix[k2]] = c
        return v

    out_matrix = [[Fraction(0)] * len(basis) for _ in range(len(above))]
    for j, key in enumerate(basis):
        col = dvec(key, degree)
        for i in range(len(above)):
            out_matrix[i][j] = col[i]
    ker_dim = len(kernel_basis(out_matrix, ncols=len(basis))) if basis else 0
    img = [dvec(k, (-1,)) for k in below]
    img_rank = rank([list(v) for v in img]) if img else 0
    piece = cohomology(st, degree, functional=(1,))
    assert piece.dim == ker_dim - img_rank


def test_invariant_subspace_swap():
    g = integer_datum()
    st = AinfStructure(
        grading=g,
        objects=("A", "B"),
        generators=(Generator(0, 1, (2,), "u"), Generator(1, 0, (2,), "v")),
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
    piece = cohomology(st, (0,), functional=(1,))
    # degree-0 piece: u->u and v->v; swap action has 1-dim invariants
    assert piece.dim == 2
    inv = invariant_subspace(act, piece)
    assert len(inv) == 1
    # invariant representative is fixed by the action
    from mcversal.ainf import signed_act_on_cc

    rep = inv[0]
    assert (signed_act_on_cc(act, 1, rep) - rep).is_zero()


def test_trivial_group_invariants_whole_piece():
    st = free_point()
    act = SignedGroupAction(
        structure=st,
        signed_group=SignedGroup(cyclic_group(1), (0,)),
        object_perms=((0,),),
        gen_maps=({0: [(0, Fraction(1))]},),
    )
    piece = cohomology(st, (1,), functional=(1,))
    inv = invariant_subspace(act, piece)
    assert len(inv) == piece.dim
