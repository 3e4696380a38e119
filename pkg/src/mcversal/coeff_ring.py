"""Truncated graded monoid algebras from cones, with the m-adic filtration.

The ring stores every monomial of m-adic order <= K (K = truncation order);
products that would leave the truncation are silently dropped, so all ring
identities downstream are claims "to order K".  Orders are computed by exact
dynamic programming over the monoid's irreducible elements, not by a linear
surrogate, so membership in m^2 is decided correctly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

from .cones import RationalCone, default_interior_point, enumerate_dual_points
from .grading import GElement, GradingAction, GradingDatum, GradingMorphism, SignedGroup
from .rationals import dot, vec_add, vec_neg, vec_sub

IntVec = tuple[int, ...]


@dataclass(frozen=True)
class TruncatedRing:
    """The monoid algebra of NE(N) = N^dual cap Z^P, truncated at m-adic order K.

    f_images[p] = the G-degree of the generator r_p; the degree of a general
    monomial is the corresponding combination.  All monomial degrees must land
    in the even part of G.
    """

    cone: RationalCone
    grading: GradingDatum
    f_images: tuple[GElement, ...]
    order: int
    bound_functional: IntVec | None = None

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("truncation order must be positive")
        if len(self.f_images) != self.cone.ambient_rank:
            raise ValueError("need one grading image per coordinate of Z^P")
        object.__setattr__(
            self, "f_images", tuple(self.grading.reduce(g) for g in self.f_images)
        )
        if not self.cone.is_full_dimensional():
            raise ValueError("the cone must be full-dimensional so its dual is strongly convex")
        bf = self.bound_functional or default_interior_point(self.cone)
        if not self.cone.contains_interior(bf):
            raise ValueError("bound functional must be interior to the cone")
        object.__setattr__(self, "bound_functional", tuple(bf))
        for p in range(self.n_vars):
            up = tuple(1 if q == p else 0 for q in range(self.n_vars))
            if not self.dual_cone.contains(up):
                raise ValueError(
                    f"basis vector u_{p} is not in the dual monoid; "
                    "the cone must sit inside the non-negative orthant"
                )
            if self.grading.sign_of(self.f_images[p]) != 0:
                raise ValueError("monomial degrees must land in the even part of G")

    @property
    def n_vars(self) -> int:
        return self.cone.ambient_rank

    @cached_property
    def dual_cone(self) -> RationalCone:
        return self.cone.dual()

    @cached_property
    def _enumeration(self) -> tuple[tuple[IntVec, ...], dict[IntVec, int], tuple[IntVec, ...]]:
        """(monomials of order <= K, order table, irreducibles)."""
        bf = self.bound_functional
        b0 = sum(dot(bf, g) for g in self.dual_cone.generators)
        pts0 = enumerate_dual_points(self.cone, bf, b0)
        pts0_set = set(pts0)
        nonzero = [u for u in pts0 if any(x != 0 for x in u)]
        irreducibles = []
        for u in nonzero:
            decomposable = False
            for v in nonzero:
                if dot(bf, v) >= dot(bf, u):
                    continue
                w = vec_sub(u, v)
                if w in pts0_set and any(x != 0 for x in w):
                    decomposable = True
                    break
            if not decomposable:
                irreducibles.append(u)
        if not irreducibles:
            zero = (0,) * self.n_vars
            return (zero,), {zero: 0}, ()
        bound = self.order * max(dot(bf, h) for h in irreducibles)
        pts = enumerate_dual_points(self.cone, bf, bound)
        pts_set = set(pts)
        by_value = sorted(pts, key=lambda u: (dot(bf, u), u))
        orders: dict[IntVec, int] = {}
        for u in by_value:
            if all(x == 0 for x in u):
                orders[u] = 0
                continue
            best = 0
            for h in irreducibles:
                w = vec_sub(u, h)
                if w == (0,) * self.n_vars:
                    best = max(best, 1)
                elif w in pts_set and w in orders:
                    best = max(best, 1 + orders[w])
            if best == 0:
                # u is itself irreducible but was missed above (cannot happen)
                best = 1
            orders[u] = best
        kept = tuple(sorted(u for u in pts if orders[u] <= self.order))
        kept_orders = {u: orders[u] for u in kept}
        return kept, kept_orders, tuple(sorted(irreducibles))

    @property
    def monomials(self) -> tuple[IntVec, ...]:
        return self._enumeration[0]

    @property
    def irreducibles(self) -> tuple[IntVec, ...]:
        return self._enumeration[2]

    def madic_order(self, u: Sequence[int]) -> int:
        u = tuple(int(x) for x in u)
        table = self._enumeration[1]
        if u not in table:
            raise ValueError(f"monomial {u} is outside the truncation")
        return table[u]

    def degree(self, u: Sequence[int]) -> GElement:
        out = self.grading.zero()
        for coeff, img in zip(u, self.f_images, strict=True):
            out = self.grading.add(out, self.grading.scale(int(coeff), img))
        return out

    def generator_monomial(self, p: int) -> IntVec:
        return tuple(1 if q == p else 0 for q in range(self.n_vars))

    def zero_monomial(self) -> IntVec:
        return (0,) * self.n_vars

    # ---- elements -------------------------------------------------------

    def element(self, coeffs: Mapping[IntVec, Fraction]) -> "RingElement":
        return RingElement(self, coeffs)

    def zero(self) -> "RingElement":
        return RingElement(self, {})

    def one(self) -> "RingElement":
        return RingElement(self, {self.zero_monomial(): Fraction(1)})

    def generator(self, p: int) -> "RingElement":
        return RingElement(self, {self.generator_monomial(p): Fraction(1)})

    def monomial_element(self, u: Sequence[int], coeff=Fraction(1)) -> "RingElement":
        return RingElement(self, {tuple(int(x) for x in u): Fraction(coeff)})


class RingElement:
    """A sparse truncated ring element: monomial -> nonzero rational coefficient."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: TruncatedRing, coeffs: Mapping[IntVec, Fraction]):
        self.ring = ring
        table = ring._enumeration[1]
        clean: dict[IntVec, Fraction] = {}
        for u, c in coeffs.items():
            c = Fraction(c)
            if c == 0:
                continue
            u = tuple(int(x) for x in u)
            if u not in table:
                raise ValueError(f"monomial {u} is outside the truncation")
            clean[u] = c
        self.coeffs = clean

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RingElement)
            and (self.ring is other.ring or self.ring == other.ring)
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((id(self.ring), tuple(sorted(self.coeffs.items()))))

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "RingElement") -> "RingElement":
        self._check(other)
        out = dict(self.coeffs)
        for u, c in other.coeffs.items():
            out[u] = out.get(u, Fraction(0)) + c
        return RingElement(self.ring, out)

    def __sub__(self, other: "RingElement") -> "RingElement":
        return self + (-other)

    def __neg__(self) -> "RingElement":
        return RingElement(self.ring, {u: -c for u, c in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check(other)
        table = self.ring._enumeration[1]
        out: dict[IntVec, Fraction] = {}
        for u, cu in self.coeffs.items():
            for v, cv in other.coeffs.items():
                w = vec_add(u, v)
                if w in table:  # otherwise order > K: truncated away
                    out[w] = out.get(w, Fraction(0)) + cu * cv
        return RingElement(self.ring, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def scale(self, c) -> "RingElement":
        c = Fraction(c)
        return RingElement(self.ring, {u: c * x for u, x in self.coeffs.items()})

    def _check(self, other: "RingElement"):
        if self.ring is not other.ring and self.ring != other.ring:
            raise ValueError("elements of different rings")

    def order(self) -> int:
        """m-adic order: min over monomials, +inf (= K+1 marker) for zero."""
        if not self.coeffs:
            return self.ring.order + 1
        return min(self.ring.madic_order(u) for u in self.coeffs)

    def constant_term(self) -> Fraction:
        return self.coeffs.get(self.ring.zero_monomial(), Fraction(0))

    def truncate_below(self, min_order: int) -> "RingElement":
        """Keep only monomials of m-adic order >= min_order."""
        return RingElement(
            self.ring,
            {u: c for u, c in self.coeffs.items() if self.ring.madic_order(u) >= min_order},
        )

    def order_part(self, k: int) -> "RingElement":
        return RingElement(
            self.ring,
            {u: c for u, c in self.coeffs.items() if self.ring.madic_order(u) == k},
        )

    def degrees(self) -> set[GElement]:
        return {self.ring.degree(u) for u in self.coeffs}

    def is_homogeneous(self, degree: GElement | None = None) -> bool:
        degs = self.degrees()
        if not degs:
            return True
        if degree is None:
            return len(degs) == 1
        return degs == {self.ring.grading.reduce(degree)}

    def inverse(self) -> "RingElement":
        """Inverse of a unit, by a truncated geometric series."""
        c = self.constant_term()
        if c == 0:
            raise ValueError("not a unit: zero constant term")
        n = self.scale(1 / c) - self.ring.one()
        if not n.is_zero() and n.order() < 1:
            raise ValueError("unit tail must have positive order")
        out = self.ring.one()
        power = self.ring.one()
        sign = 1
        for _ in range(self.ring.order):
            power = power * n
            sign = -sign
            if power.is_zero():
                break
            out = out + power.scale(sign)
        return out.scale(1 / c)

    def power(self, exponent: int) -> "RingElement":
        if exponent < 0:
            return self.inverse().power(-exponent)
        out = self.ring.one()
        base = self
        e = exponent
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def to_pairs(self) -> list[tuple[IntVec, Fraction]]:
        return sorted(self.coeffs.items())

    def __repr__(self):
        if not self.coeffs:
            return "RingElement(0)"
        parts = [f"{c}*r^{list(u)}" for u, c in self.to_pairs()]
        return "RingElement(" + " + ".join(parts) + ")"


@dataclass(frozen=True)
class RingAutomorphism:
    """A graded automorphism determined by units: r_p -> r_p * psi_p."""

    ring: TruncatedRing
    units: tuple[RingElement, ...]

    def __post_init__(self):
        if len(self.units) != self.ring.n_vars:
            raise ValueError("need one unit per generator")
        for p, psi in enumerate(self.units):
            if psi.ring is not self.ring and psi.ring != self.ring:
                raise ValueError("unit from a different ring")
            if psi.constant_term() == 0:
                raise ValueError(f"psi_{p} is not a unit")
            if not psi.is_homogeneous(self.ring.grading.zero()):
                raise ValueError(f"psi_{p} must be homogeneous of degree 0")

    @staticmethod
    def identity(ring: TruncatedRing) -> "RingAutomorphism":
        return RingAutomorphism(ring, tuple(ring.one() for _ in range(ring.n_vars)))

    def is_identity(self) -> bool:
        return all(psi == self.ring.one() for psi in self.units)


def apply_automorphism(psi: RingAutomorphism, x: RingElement) -> RingElement:
    """psi^*(r^u) = r^u * prod_p psi_p^{u_p}, extended linearly."""
    ring = psi.ring
    if x.ring is not ring and x.ring != ring:
        raise ValueError("element from a different ring")
    out = ring.zero()
    unit_powers: dict[tuple[int, int], RingElement] = {}

    def upow(p: int, e: int) -> RingElement:
        key = (p, e)
        if key not in unit_powers:
            unit_powers[key] = psi.units[p].power(e)
        return unit_powers[key]

    for u, c in x.coeffs.items():
        term = ring.monomial_element(u, c)
        for p, e in enumerate(u):
            if e != 0:
                term = term * upow(p, e)
        out = out + term
    return out


def compose_automorphisms(first: RingAutomorphism, second: RingAutomorphism) -> RingAutomorphism:
    """The automorphism x -> second*(first*(x)).

    Its unit for r_p is first's unit transported through second, times second's.
    """
    ring = first.ring
    units = []
    for p in range(ring.n_vars):
        units.append(apply_automorphism(second, first.units[p]) * second.units[p])
    return RingAutomorphism(ring, tuple(units))


@dataclass
class NiceRingReport:
    nice: bool
    failures: list[dict]
    distinct_degrees: bool

    def to_dict(self) -> dict:
        return {
            "nice": self.nice,
            "failures": self.failures,
            "distinct_degrees": self.distinct_degrees,
        }


def certify_nice(ring: TruncatedRing) -> NiceRingReport:
    """Check the generator conditions: r_p generates its graded piece, r_p not in m^2."""
    failures: list[dict] = []
    for p in range(ring.n_vars):
        up = ring.generator_monomial(p)
        deg_p = ring.degree(up)
        if ring.madic_order(up) < 1:
            failures.append({"p": p, "reason": "r_p not in the maximal ideal"})
            continue
        if ring.madic_order(up) != 1:
            failures.append({"p": p, "reason": "r_p lies in m^2", "order": ring.madic_order(up)})
        for v in ring.monomials:
            if v == ring.zero_monomial() or v == up:
                continue
            if ring.degree(v) != deg_p:
                continue
            w = vec_sub(v, up)
            if not ring.dual_cone.contains(w):
                failures.append(
                    {
                        "p": p,
                        "reason": "graded piece not generated by r_p",
                        "witness": list(v),
                    }
                )
    degs = [ring.degree(ring.generator_monomial(p)) for p in range(ring.n_vars)]
    distinct = len(set(degs)) == len(degs)
    if not distinct:
        failures.append({"reason": "generators with equal degrees"})
    return NiceRingReport(nice=not failures, failures=failures, distinct_degrees=distinct)


def involution_ip(ring: TruncatedRing, p_mor: GradingMorphism, x: RingElement) -> RingElement:
    """Scale each monomial by (-1)^{p(deg)/2}; p(deg) must be even in Z/4."""
    if p_mor.source.dim != ring.grading.dim:
        raise ValueError("p must be defined on the ring's grading datum")
    out: dict[IntVec, Fraction] = {}
    for u, c in x.coeffs.items():
        val = p_mor.apply(ring.degree(u))[0] % 4
        if val % 2 != 0:
            raise ValueError(f"monomial {u} has odd image in Z/4")
        sign = -1 if val == 2 else 1
        out[u] = sign * c
    return RingElement(ring, out)


@dataclass(frozen=True)
class RingGroupAction:
    """A signed group acting on the ring: gamma . r^u = i_p^{sigma}(r^{gamma . u}).

    monomial_maps[i] is the matrix of gamma_* on Z^P (rows = images of basis
    vectors); the action on monomials is u -> (-1)^{sigma(gamma)} gamma_* u.
    """

    ring: TruncatedRing
    signed_group: SignedGroup
    monomial_maps: tuple[tuple[IntVec, ...], ...]
    p_mor: GradingMorphism | None = None

    def __post_init__(self):
        if self.p_mor is None and any(s == 1 for s in self.signed_group.sigma):
            raise ValueError("odd group elements need the morphism p to Z/4")
        group = self.signed_group.group
        if len(self.monomial_maps) != group.order:
            raise ValueError("need one monomial map per group element")
        n = self.ring.n_vars
        for mat in self.monomial_maps:
            if len(mat) != n or any(len(r) != n for r in mat):
                raise ValueError("monomial map has wrong shape")
        ident = tuple(self.ring.generator_monomial(p) for p in range(n))
        if self.monomial_maps[0] != ident:
            raise ValueError("identity must act trivially on monomials")
        for i in range(group.order):
            for j in range(group.order):
                k = group.mul(i, j)
                for p in range(n):
                    e = self.ring.generator_monomial(p)
                    if self._star(i, self._star(j, e)) != self._star(k, e):
                        raise ValueError("monomial maps do not satisfy the group law")
        # the action must preserve the stored monoid
        for i in range(group.order):
            for u in self.ring.monomials:
                v = self.monomial_image(i, u)
                if v not in self.ring._enumeration[1]:
                    raise ValueError(
                        f"group element {i} maps monomial {u} outside the enumeration"
                    )

    def _star(self, i: int, u: IntVec) -> IntVec:
        mat = self.monomial_maps[i]
        n = self.ring.n_vars
        out = [0] * n
        for p, x in enumerate(u):
            for q in range(n):
                out[q] += x * mat[p][q]
        return tuple(out)

    def monomial_image(self, i: int, u: Sequence[int]) -> IntVec:
        """gamma . u = (-1)^{sigma(gamma)} gamma_* u."""
        u = tuple(int(x) for x in u)
        v = self._star(i, u)
        if self.signed_group.sigma[i]:
            v = vec_neg(v)
        return v

    def generator_permutation(self, i: int) -> tuple[tuple[int, int], ...]:
        """(target index, sign) per p, from gamma . r_p = +/- r_{g . p}."""
        out = []
        for p in range(self.ring.n_vars):
            img = self.apply(i, self.ring.generator(p))
            if len(img.coeffs) != 1:
                raise ValueError("action is not of the special permutation form")
            (v, c), = img.coeffs.items()
            if sum(1 for x in v if x != 0) != 1 or set(v) - {0} != {1} or c not in (1, -1):
                raise ValueError("action is not of the special permutation form")
            out.append((v.index(1), int(c)))
        return tuple(out)

    def apply(self, i: int, x: RingElement) -> RingElement:
        out: dict[IntVec, Fraction] = {}
        for u, c in x.coeffs.items():
            v = self.monomial_image(i, u)
            sign = 1
            if self.signed_group.sigma[i]:
                val = self.p_mor.apply(self.ring.degree(v))[0] % 4
                if val % 2 != 0:
                    raise ValueError("involution undefined: odd Z/4 degree")
                sign = -1 if val == 2 else 1
            out[v] = out.get(v, Fraction(0)) + sign * c
        return RingElement(self.ring, out)


def smooth_divisor_ring(
    grading: GradingDatum, q_degree: GElement, order: int
) -> TruncatedRing:
    """R = k[[q]] truncated: the smooth-divisor coefficient ring."""
    return TruncatedRing(
        cone=RationalCone(1, ((1,),)),
        grading=grading,
        f_images=(q_degree,),
        order=order,
    )


def specialize(ring: TruncatedRing, disc_map, x: RingElement):
    """Evaluate x under a disc map / Novikov point (see mirror_flat.evaluate)."""
    from .mirror_flat import evaluate

    return evaluate(disc_map, x)
