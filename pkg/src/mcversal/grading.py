"""Grading data {Z -> G -> Z/2}, their morphisms, and finite (signed) group actions.

G is always presented in invariant-factor form Z^rank + sum_j Z/d_j; an element
is a tuple of ints of length rank + len(torsion) with torsion entries stored
reduced mod d_j.  Koszul signs everywhere downstream come from sigma.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

GElement = tuple[int, ...]


@dataclass(frozen=True)
class GradingDatum:
    """An abelian group G with homomorphisms Z -> G -> Z/2, composite surjective."""

    rank: int
    torsion: tuple[int, ...]
    i_of_one: GElement
    sigma: tuple[int, ...]

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("rank must be non-negative")
        if any(d <= 0 for d in self.torsion):
            raise ValueError("invariant factors must be positive")
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        object.__setattr__(self, "i_of_one", self.reduce(self.i_of_one))
        object.__setattr__(self, "sigma", tuple(int(s) % 2 for s in self.sigma))
        if len(self.sigma) != self.dim:
            raise ValueError("sigma must have one entry per component of G")
        # sigma must kill d_j * e_j, else it is not well defined on the torsion part
        for j, d in enumerate(self.torsion):
            if (d * self.sigma[self.rank + j]) % 2 != 0:
                raise ValueError(f"sigma is not well defined on torsion factor {j} (d={d})")
        if self.sign_of(self.i_of_one) != 1:
            raise ValueError("sigma(i(1)) must be 1: Z -> G -> Z/2 must compose to the surjection")

    @property
    def dim(self) -> int:
        return self.rank + len(self.torsion)

    def reduce(self, g: Sequence[int]) -> GElement:
        g = tuple(int(x) for x in g)
        if len(g) != self.dim:
            raise ValueError(f"element {g} has wrong length for G (expected {self.dim})")
        return g[: self.rank] + tuple(
            x % d for x, d in zip(g[self.rank:], self.torsion)
        )

    def zero(self) -> GElement:
        return (0,) * self.dim

    def add(self, a: Sequence[int], b: Sequence[int]) -> GElement:
        return self.reduce([x + y for x, y in zip(a, b, strict=True)])

    def neg(self, a: Sequence[int]) -> GElement:
        return self.reduce([-x for x in a])

    def sub(self, a: Sequence[int], b: Sequence[int]) -> GElement:
        return self.reduce([x - y for x, y in zip(a, b, strict=True)])

    def scale(self, n: int, a: Sequence[int]) -> GElement:
        return self.reduce([n * x for x in a])

    def of_int(self, n: int) -> GElement:
        """Image of n under Z -> G."""
        return self.scale(n, self.i_of_one)

    def sign_of(self, g: Sequence[int]) -> int:
        """sigma(g) in Z/2; the source of all Koszul signs."""
        g = self.reduce(g)
        return sum(s * x for s, x in zip(self.sigma, g)) % 2

    def shifted(self, g: Sequence[int]) -> GElement:
        """g - i(1): the degree of an element placed in a shifted space."""
        return self.sub(g, self.i_of_one)

    def equals(self, a: Sequence[int], b: Sequence[int]) -> bool:
        return self.reduce(a) == self.reduce(b)


def z_mod_4_datum() -> GradingDatum:
    """The grading datum {Z -> Z/4 -> Z/2} (reduction maps)."""
    return GradingDatum(rank=0, torsion=(4,), i_of_one=(1,), sigma=(1,))


def integer_datum() -> GradingDatum:
    """The grading datum {Z = Z -> Z/2}."""
    return GradingDatum(rank=1, torsion=(), i_of_one=(1,), sigma=(1,))


@dataclass(frozen=True)
class GradingMorphism:
    """A homomorphism of grading data: commutes with i and sigma.

    matrix[j] is the image in the target of the j-th generator of the source
    (free generators first, then torsion generators).
    """

    source: GradingDatum
    target: GradingDatum
    matrix: tuple[GElement, ...]

    def __post_init__(self):
        if len(self.matrix) != self.source.dim:
            raise ValueError("need one image per generator of the source")
        object.__setattr__(
            self, "matrix", tuple(self.target.reduce(row) for row in self.matrix)
        )
        # well defined: d_j * image of torsion generator must vanish in target
        for j, d in enumerate(self.source.torsion):
            img = self.target.scale(d, self.matrix[self.source.rank + j])
            if img != self.target.zero():
                raise ValueError(f"morphism not well defined on torsion factor {j}")
        if self.apply(self.source.i_of_one) != self.target.i_of_one:
            raise ValueError("morphism does not commute with i")
        for j in range(self.source.dim):
            e = tuple(1 if i == j else 0 for i in range(self.source.dim))
            if self.source.sign_of(e) != self.target.sign_of(self.apply(e)):
                raise ValueError("morphism does not commute with sigma")

    def apply(self, g: Sequence[int]) -> GElement:
        g = self.source.reduce(g)
        out = self.target.zero()
        for coeff, img in zip(g, self.matrix):
            out = self.target.add(out, self.target.scale(coeff, img))
        return out

    def compose(self, other: "GradingMorphism") -> "GradingMorphism":
        """self after other (source of self = target of other)."""
        if other.target is not self.source and other.target != self.source:
            raise ValueError("morphisms not composable")
        return GradingMorphism(
            source=other.source,
            target=self.target,
            matrix=tuple(self.apply(row) for row in other.matrix),
        )


@dataclass(frozen=True)
class FiniteGroup:
    """A finite group given by labels and an explicit multiplication table.

    table[i][j] = index of element_i * element_j.  Element 0 must be the identity.
    """

    elements: tuple[str, ...]
    table: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.elements)
        if len(self.table) != n or any(len(r) != n for r in self.table):
            raise ValueError("multiplication table must be square")
        for i in range(n):
            if self.table[0][i] != i or self.table[i][0] != i:
                raise ValueError("element 0 must be the identity")
        for i in range(n):
            if sorted(self.table[i]) != list(range(n)):
                raise ValueError("rows of the table must be permutations")
            if sorted(r[i] for r in self.table) != list(range(n)):
                raise ValueError("columns of the table must be permutations")
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if self.table[self.table[i][j]][k] != self.table[i][self.table[j][k]]:
                        raise ValueError("multiplication table is not associative")

    @property
    def order(self) -> int:
        return len(self.elements)

    def mul(self, i: int, j: int) -> int:
        return self.table[i][j]

    def inverse(self, i: int) -> int:
        for j in range(self.order):
            if self.table[i][j] == 0:
                return j
        raise ValueError("no inverse found")  # unreachable for a valid table


def cyclic_group(n: int) -> FiniteGroup:
    return FiniteGroup(
        elements=tuple(f"g{i}" for i in range(n)),
        table=tuple(tuple((i + j) % n for j in range(n)) for i in range(n)),
    )


@dataclass(frozen=True)
class SignedGroup:
    """A finite group with a parity homomorphism sigma: Gamma -> Z/2."""

    group: FiniteGroup
    sigma: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "sigma", tuple(int(s) % 2 for s in self.sigma))
        if len(self.sigma) != self.group.order:
            raise ValueError("need one parity per group element")
        for i in range(self.group.order):
            for j in range(self.group.order):
                if self.sigma[self.group.mul(i, j)] != (self.sigma[i] + self.sigma[j]) % 2:
                    raise ValueError("sigma is not a homomorphism")


@dataclass(frozen=True)
class GradingAction:
    """An action of a finite group on a grading datum by automorphisms.

    action[i] is an integer matrix (rows = images of generators of G) giving the
    automorphism attached to group element i.  Each automorphism must commute
    with sigma; the assignment must satisfy the multiplication table exactly.
    """

    group: FiniteGroup
    datum: GradingDatum
    action: tuple[tuple[GElement, ...], ...]

    def __post_init__(self):
        if len(self.action) != self.group.order:
            raise ValueError("need one automorphism per group element")
        object.__setattr__(
            self,
            "action",
            tuple(tuple(self.datum.reduce(row) for row in mat) for mat in self.action),
        )
        for mat in self.action:
            if len(mat) != self.datum.dim:
                raise ValueError("automorphism matrix has wrong shape")
        ident = tuple(
            tuple(1 if i == j else 0 for i in range(self.datum.dim))
            for j in range(self.datum.dim)
        )
        if self.action[0] != tuple(self.datum.reduce(r) for r in ident):
            raise ValueError("identity element must act as the identity")
        for i in range(self.group.order):
            for j in range(self.group.order):
                k = self.group.mul(i, j)
                for gen in range(self.datum.dim):
                    e = tuple(1 if t == gen else 0 for t in range(self.datum.dim))
                    if self.apply(i, self.apply(j, e)) != self.apply(k, e):
                        raise ValueError("action does not satisfy the multiplication table")
        for i in range(self.group.order):
            for gen in range(self.datum.dim):
                e = tuple(1 if t == gen else 0 for t in range(self.datum.dim))
                if self.datum.sign_of(self.apply(i, e)) != self.datum.sign_of(e):
                    raise ValueError("automorphisms must commute with sigma")

    def apply(self, i: int, g: Sequence[int]) -> GElement:
        g = self.datum.reduce(g)
        out = self.datum.zero()
        for coeff, img in zip(g, self.action[i]):
            out = self.datum.add(out, self.datum.scale(coeff, img))
        return out


def check_p_equivariance(
    p: GradingMorphism, act: GradingAction, sigma_gamma: Sequence[int]
) -> bool:
    """Whether p(gamma_* y) = (-1)^{sigma(gamma)} p(y) for all generators y, all gamma.

    p must target the {Z -> Z/4 -> Z/2} datum; gamma_* is the raw automorphism
    stored in act (no parity twist applied here).
    """
    tgt = p.target
    if tgt.rank != 0 or tgt.torsion != (4,):
        raise ValueError("p must target the Z/4 grading datum")
    sigma_gamma = [int(s) % 2 for s in sigma_gamma]
    if len(sigma_gamma) != act.group.order:
        raise ValueError("need one parity per group element")
    for i in range(act.group.order):
        sign = -1 if sigma_gamma[i] else 1
        for gen in range(act.datum.dim):
            e = tuple(1 if t == gen else 0 for t in range(act.datum.dim))
            lhs = p.apply(act.apply(i, e))
            rhs = tgt.scale(sign, p.apply(e))
            if lhs != rhs:
                return False
    return True
