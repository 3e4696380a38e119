"""Hochschild cohomology of a finite A-infinity structure in a fixed degree.

Works over the field only; ring-coefficient pieces are handled monomial by
monomial upstream (the maximal ideal is monomial, so its graded pieces are
plain field-coefficient pieces with a degree twist).

A piece's cochain basis is every valid (input tensor, output) pair of the
requested shifted degree, up to a length bound.  The bound comes from a
finiteness certificate (a functional positive on all shifted generator
degrees) when available; otherwise the structure's max_length is used and the
piece is flagged as truncated.  Bases are ordered by (length, tensor, output),
and all solves use deterministic pivoting, so representatives are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .ainf import AinfStructure, Cochain, FieldDomain, SignedGroupAction, average_projector, hochschild_differential, signed_act_on_cc
from .grading import GElement
from .rationals import rank, rref, solve_linear

ComponentKey = tuple[tuple[int, ...], int]


def length_bound(structure: AinfStructure, degree: Sequence[int], functional: Sequence[int] | None):
    """Length bound for cochains of the given shifted degree, or None.

    functional is an integer functional on the free part of G; it must take
    value >= 1 on the shifted degree of every generator.
    """
    if functional is None:
        return None
    g = structure.grading
    lam = tuple(int(x) for x in functional)
    if len(lam) != g.rank:
        raise ValueError("functional must act on the free part of G")

    def value(elt: GElement) -> int:
        return sum(a * b for a, b in zip(lam, elt[: g.rank]))

    gen_values = [value(structure.shifted_degree(i)) for i in range(len(structure.generators))]
    if not gen_values:
        return 0
    if min(gen_values) < 1:
        return None
    max_out = max(gen_values)
    bound = max_out - value(g.reduce(degree))
    return max(bound, 0)


def cochain_basis(
    structure: AinfStructure, degree: Sequence[int], max_len: int
) -> list[ComponentKey]:
    """All valid component keys of the given shifted degree, deterministic order."""
    g = structure.grading
    degree = g.reduce(degree)
    keys = []
    for length in range(0, max_len + 1):
        for tensor in structure.tensors_of_length(length):
            tdeg = g.zero()
            for i in tensor:
                tdeg = g.add(tdeg, structure.shifted_degree(i))
            for b, gen in enumerate(structure.generators):
                if tensor:
                    first = structure.generators[tensor[0]]
                    last = structure.generators[tensor[-1]]
                    if gen.source != first.source or gen.target != last.target:
                        continue
                else:
                    if gen.source != gen.target:
                        continue
                if g.sub(structure.shifted_degree(b), tdeg) == degree:
                    keys.append((tensor, b))
    keys.sort(key=lambda kv: (len(kv[0]), kv[0], kv[1]))
    return keys


@dataclass
class CohomologyPiece:
    """H of the shifted Hochschild complex in one G-degree, with frozen basis."""

    structure: AinfStructure
    degree: GElement
    max_len: int
    truncated: bool
    basis: list[ComponentKey]
    basis_below: list[ComponentKey]
    representatives: list[Cochain]
    rep_vectors: list[tuple[Fraction, ...]]
    image_vectors: list[tuple[Fraction, ...]]

    @property
    def dim(self) -> int:
        return len(self.representatives)

    def vectorize(self, z: Cochain) -> tuple[Fraction, ...]:
        index = {key: i for i, key in enumerate(self.basis)}
        vec = [Fraction(0)] * len(self.basis)
        for key, c in z.components.items():
            if key not in index:
                raise ValueError(f"component {key} outside the piece basis (length bound {self.max_len})")
            vec[index[key]] = Fraction(c)
        return tuple(vec)

    def cochain_from_vector(self, vec: Sequence[Fraction]) -> Cochain:
        comps = {key: Fraction(c) for key, c in zip(self.basis, vec) if c != 0}
        return Cochain(self.structure, self.degree, comps)

    def is_closed(self, z: Cochain) -> bool:
        return hochschild_differential(self.structure, z).is_zero()

    def class_of(self, z: Cochain) -> tuple[Fraction, ...]:
        """Coordinates of the class of a cocycle in the representative basis."""
        if not self.is_closed(z):
            raise ValueError("cochain is not closed")
        vec = self.vectorize(z)
        columns = [list(r) for r in self.rep_vectors] + [list(v) for v in self.image_vectors]
        if not columns:
            if any(x != 0 for x in vec):
                raise ValueError("nonzero cocycle in a zero piece")
            return ()
        matrix = [[col[i] for col in columns] for i in range(len(self.basis))]
        sol = solve_linear(matrix, vec)
        if sol is None:
            raise ValueError("cocycle does not lie in kernel + image (internal error)")
        return tuple(sol[: len(self.rep_vectors)])

    def solve_exact(self, z: Cochain, reverse: bool = False) -> Cochain | None:
        """A cochain c one degree below with d c = z, or None (deterministic).

        reverse flips the pivoting order of the basis below: an alternate but
        equally admissible selection rule, used to probe solver invariance.
        """
        target = self.vectorize(z)
        below_degree = self.structure.grading.sub(
            self.degree, self.structure.grading.i_of_one
        )
        basis_below = list(reversed(self.basis_below)) if reverse else self.basis_below
        columns = []
        for key in basis_below:
            below = Cochain(self.structure, below_degree, {key: Fraction(1)})
            columns.append(self.vectorize(hochschild_differential(self.structure, below)))
        if not columns:
            return None if any(x != 0 for x in target) else Cochain(
                self.structure, below_degree, {}
            )
        matrix = [[col[i] for col in columns] for i in range(len(self.basis))]
        sol = solve_linear(matrix, target)
        if sol is None:
            return None
        comps = {key: c for key, c in zip(basis_below, sol) if c != 0}
        return Cochain(self.structure, below_degree, comps)


def cohomology(
    structure: AinfStructure,
    degree: Sequence[int],
    functional: Sequence[int] | None = None,
    allow_truncation: bool = False,
) -> CohomologyPiece:
    """Kernel-mod-image in one shifted G-degree, with deterministic basis."""
    if not isinstance(structure.domain, FieldDomain):
        raise ValueError("cohomology works over the field; twist ring pieces upstream")
    g = structure.grading
    degree = g.reduce(degree)
    bound = length_bound(structure, degree, functional)
    bound_below = length_bound(structure, g.sub(degree, g.i_of_one), functional)
    truncated = bound is None or bound_below is None
    if truncated and not allow_truncation:
        raise ValueError(
            "no finiteness certificate for this degree; pass allow_truncation=True "
            "to accept the length cutoff"
        )
    max_len = structure.max_length if bound is None else min(bound, structure.max_length)
    max_len_below = (
        structure.max_length if bound_below is None else min(bound_below, structure.max_length)
    )
    basis = cochain_basis(structure, degree, max_len)
    basis_below = cochain_basis(structure, g.sub(degree, g.i_of_one), max_len_below)
    index = {key: i for i, key in enumerate(basis)}

    def d_vector(key: ComponentKey, deg) -> tuple[Fraction, ...]:
        z = Cochain(structure, deg, {key: Fraction(1)})
        dz = hochschild_differential(structure, z)
        vec = [Fraction(0)] * len(basis)
        for k2, c in dz.components.items():
            if k2 in index:
                vec[index[k2]] = Fraction(c)
            # components beyond the window are dropped (quotient complex)
        return tuple(vec)

    # kernel of d going out of this degree
    bound_above = length_bound(structure, g.add(degree, g.i_of_one), functional)
    max_len_above = (
        structure.max_length if bound_above is None else min(bound_above, structure.max_length)
    )
    basis_above = cochain_basis(structure, g.add(degree, g.i_of_one), max_len_above)
    above_index = {key: i for i, key in enumerate(basis_above)}
    out_rows = []
    for key in basis:
        z = Cochain(structure, degree, {key: Fraction(1)})
        dz = hochschild_differential(structure, z)
        row = [Fraction(0)] * len(basis_above)
        for k2, c in dz.components.items():
            if k2 in above_index:
                row[above_index[k2]] = Fraction(c)
        out_rows.append(row)
    # kernel vectors: x with sum_i x_i out_rows[i] = 0  (rows as columns)
    if basis:
        matrix_out = [
            [out_rows[i][j] for i in range(len(basis))] for j in range(len(basis_above))
        ]
        from .rationals import kernel_basis

        kernel = kernel_basis(matrix_out, ncols=len(basis)) if basis_above else [
            tuple(Fraction(1 if i == j else 0) for j in range(len(basis)))
            for i in range(len(basis))
        ]
    else:
        kernel = []
    image = [d_vector(key, g.sub(degree, g.i_of_one)) for key in basis_below]
    image = [v for v in image if any(x != 0 for x in v)]
    # pick representatives: kernel vectors extending a basis of the image
    chosen: list[tuple[Fraction, ...]] = []
    current = [list(v) for v in image]
    base_rank = rank(current) if current else 0
    for v in kernel:
        if all(x == 0 for x in v):
            continue
        cand = current + [list(v)]
        r = rank(cand)
        if r > base_rank + len(chosen):
            chosen.append(tuple(v))
            current = cand
    reps = []
    piece = CohomologyPiece(
        structure=structure,
        degree=degree,
        max_len=max_len,
        truncated=truncated,
        basis=basis,
        basis_below=basis_below,
        representatives=reps,
        rep_vectors=chosen,
        image_vectors=image,
    )
    for v in chosen:
        reps.append(piece.cochain_from_vector(v))
    return piece


def span_test(classes: Sequence[Cochain], piece: CohomologyPiece) -> dict:
    """Do the given cocycles span the piece?  Witness: first unreached class."""
    coords = [piece.class_of(z) for z in classes]
    columns = [list(c) for c in coords if any(x != 0 for x in c)]
    have = rank(columns) if columns else 0
    if have == piece.dim:
        return {"spans": True, "rank": have, "dim": piece.dim}
    # witness: first representative not in the span of the class coordinates
    witness = None
    for i in range(piece.dim):
        unit = [Fraction(1 if j == i else 0) for j in range(piece.dim)]
        test = columns + [unit]
        if rank(test) > have:
            witness = piece.representatives[i]
            break
    return {"spans": False, "rank": have, "dim": piece.dim, "witness": witness}


def invariant_subspace(act: SignedGroupAction, piece: CohomologyPiece) -> list[Cochain]:
    """Basis of the Gamma-invariant part of the piece (image of averaging)."""
    out_coords: list[tuple[Fraction, ...]] = []
    out_reps: list[Cochain] = []
    for rep in piece.representatives:
        avg = average_projector(act, rep)
        coords = piece.class_of(avg)
        if all(x == 0 for x in coords):
            continue
        if out_coords and rank([list(c) for c in out_coords] + [list(coords)]) == len(out_coords):
            continue
        out_coords.append(coords)
        out_reps.append(avg)
    return out_reps
