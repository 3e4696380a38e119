"""Disc maps, Novikov points, valuation vectors, the flat-coordinate criterion,
and the divisible-units base-change rescaling.

Two formal-series models share one implementation: integer exponents (the
k[[q]] target of disc maps) and rational exponents (the Novikov model, whose
unit group is divisible enough for base change: q-powers admit all roots and
leading coefficients must have exact rational roots, else a hard error).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .coeff_ring import RingElement, TruncatedRing
from .grading import GElement
from .rationals import dot

IntVec = tuple[int, ...]


@dataclass(frozen=True)
class FormalSeries:
    """Sparse series in q with rational coefficients and bounded exponents.

    exponents are Fractions (integers for the classical model); terms at or
    beyond the cutoff are dropped by arithmetic.
    """

    terms: tuple[tuple[Fraction, Fraction], ...]  # (exponent, coefficient)
    cutoff: Fraction

    @staticmethod
    def make(terms: Mapping, cutoff) -> "FormalSeries":
        cutoff = Fraction(cutoff)
        clean: dict[Fraction, Fraction] = {}
        for e, c in dict(terms).items():
            e, c = Fraction(e), Fraction(c)
            if c == 0 or e >= cutoff:
                continue
            clean[e] = clean.get(e, Fraction(0)) + c
        return FormalSeries(tuple(sorted((e, c) for e, c in clean.items() if c != 0)), cutoff)

    @staticmethod
    def zero(cutoff) -> "FormalSeries":
        return FormalSeries.make({}, cutoff)

    @staticmethod
    def one(cutoff) -> "FormalSeries":
        return FormalSeries.make({Fraction(0): Fraction(1)}, cutoff)

    @staticmethod
    def q_power(exponent, cutoff) -> "FormalSeries":
        return FormalSeries.make({Fraction(exponent): Fraction(1)}, cutoff)

    def is_zero(self) -> bool:
        return not self.terms

    def valuation(self) -> Fraction | None:
        """Least exponent with nonzero coefficient; None for the zero series."""
        if not self.terms:
            return None
        return self.terms[0][0]

    def leading_coefficient(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        return self.terms[0][1]

    def __add__(self, other: "FormalSeries") -> "FormalSeries":
        cutoff = min(self.cutoff, other.cutoff)
        out: dict[Fraction, Fraction] = dict(self.terms)
        for e, c in other.terms:
            out[e] = out.get(e, Fraction(0)) + c
        return FormalSeries.make(out, cutoff)

    def __neg__(self) -> "FormalSeries":
        return FormalSeries(tuple((e, -c) for e, c in self.terms), self.cutoff)

    def __sub__(self, other: "FormalSeries") -> "FormalSeries":
        return self + (-other)

    def __mul__(self, other: "FormalSeries") -> "FormalSeries":
        cutoff = min(self.cutoff, other.cutoff)
        out: dict[Fraction, Fraction] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = e1 + e2
                if e >= cutoff:
                    continue
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return FormalSeries.make(out, cutoff)

    def scale(self, c) -> "FormalSeries":
        c = Fraction(c)
        return FormalSeries(tuple((e, c * x) for e, x in self.terms), self.cutoff)

    def inverse(self) -> "FormalSeries":
        """Inverse of a series with invertible leading term (Laurent-style)."""
        if not self.terms:
            raise ZeroDivisionError("zero series")
        v, lead = self.terms[0]
        # self = lead q^v (1 + n) with val(n) > 0
        tail = FormalSeries(
            tuple((e - v, c / lead) for e, c in self.terms[1:]),
            self.cutoff,
        )
        out = FormalSeries.one(self.cutoff)
        power = FormalSeries.one(self.cutoff)
        sign = 1
        step = tail.valuation()
        if step is not None and step <= 0:
            raise ValueError("series tail must have positive valuation")
        bound = self.cutoff if step is None else self.cutoff / step + 1
        n = 0
        while not power.is_zero() and n <= bound:
            power = power * tail
            sign = -sign
            n += 1
            if power.is_zero():
                break
            out = out + power.scale(sign)
        return FormalSeries(
            tuple((e - v, c / lead) for e, c in out.terms), self.cutoff
        )

    def power(self, exponent: int) -> "FormalSeries":
        if exponent < 0:
            return self.inverse().power(-exponent)
        out = FormalSeries.one(self.cutoff)
        base = self
        e = exponent
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def nth_root(self, n: int) -> "FormalSeries":
        """Exact n-th root: rational exponent for q, exact rational root of the
        leading coefficient (error when no such root exists), Newton for the tail."""
        if n <= 0:
            raise ValueError("root order must be positive")
        if n == 1:
            return self
        if not self.terms:
            return self
        v, lead = self.terms[0]
        root_lead = _rational_root(lead, n)
        if root_lead is None:
            raise ValueError(
                f"leading coefficient {lead} has no exact rational {n}-th root; "
                "the chosen coefficient model is not divisible enough"
            )
        tail = FormalSeries(
            tuple((e - v, c / lead) for e, c in self.terms[1:]), self.cutoff
        )
        # (1 + tail)^{1/n} via the binomial series
        out = FormalSeries.one(self.cutoff)
        term = FormalSeries.one(self.cutoff)
        coeff = Fraction(1)
        k = 0
        step = tail.valuation()
        limit = 1 if step is None else int(self.cutoff / step) + 2
        alpha = Fraction(1, n)
        while k < limit:
            term = term * tail
            coeff = coeff * (alpha - k) / (k + 1)
            k += 1
            if term.is_zero():
                break
            out = out + term.scale(coeff)
        return FormalSeries(
            tuple((e + v / n, root_lead * c) for e, c in out.terms), self.cutoff
        )

    def __repr__(self):
        if not self.terms:
            return "FormalSeries(0)"
        body = " + ".join(f"{c}*q^{e}" for e, c in self.terms)
        return f"FormalSeries({body}; cutoff {self.cutoff})"


def _rational_root(x: Fraction, n: int) -> Fraction | None:
    if x == 0:
        return Fraction(0)
    sign = 1
    if x < 0:
        if n % 2 == 0:
            return None
        sign = -1
        x = -x

    def iroot(m: int) -> int | None:
        r = round(m ** (1.0 / n))
        for cand in (r - 1, r, r + 1):
            if cand >= 0 and cand**n == m:
                return cand
        return None

    num = iroot(x.numerator)
    den = iroot(x.denominator)
    if num is None or den is None:
        return None
    return Fraction(sign * num, den)


@dataclass(frozen=True)
class DiscMap:
    """An adically continuous map out of the ring: r_p -> phi_p, val(phi_p) > 0."""

    ring: TruncatedRing
    series: tuple[FormalSeries, ...]

    def __post_init__(self):
        if len(self.series) != self.ring.n_vars:
            raise ValueError("need one series per generator")
        for p, phi in enumerate(self.series):
            v = phi.valuation()
            if v is None or v <= 0:
                raise ValueError(f"phi_{p} must have positive valuation")
            if phi.leading_coefficient() == 0:
                raise ValueError(f"phi_{p} must have an invertible leading coefficient")

    @property
    def cutoff(self) -> Fraction:
        return min(phi.cutoff for phi in self.series)

    @staticmethod
    def from_point(ring: TruncatedRing, beta: Sequence, cutoff=None) -> "DiscMap":
        """The monomial (Novikov-point) disc map r_p -> q^{beta_p}."""
        beta = [Fraction(b) for b in beta]
        if cutoff is None:
            cutoff = (ring.order + 1) * max(beta) + 1
        return DiscMap(
            ring, tuple(FormalSeries.q_power(b, cutoff) for b in beta)
        )


def evaluate(d: DiscMap, x: RingElement) -> FormalSeries:
    """Monomial-wise evaluation: r^u -> prod phi_p^{u_p}."""
    cutoff = d.cutoff
    out = FormalSeries.zero(cutoff)
    for u, c in x.coeffs.items():
        term = FormalSeries.one(cutoff)
        for p, e in enumerate(u):
            if e:
                term = term * d.series[p].power(e)
        out = out + term.scale(c)
    return out


def valuation_vector(d: DiscMap) -> tuple[Fraction, ...]:
    """val(d)(u_p) per p; must land in the interior of the cone."""
    vals = tuple(phi.valuation() for phi in d.series)
    if not d.ring.cone.contains_interior(vals):
        raise ValueError(f"valuation vector {vals} is not interior to the cone")
    return vals


def aut_invariance(d: DiscMap, psi) -> bool:
    """val(psi(d)) = val(d): true for every valid input on a nice ring."""
    from .coeff_ring import apply_automorphism

    for p in range(d.ring.n_vars):
        rp = d.ring.generator(p)
        lhs = evaluate(d, apply_automorphism(psi, rp)).valuation()
        rhs = evaluate(d, rp).valuation()
        if lhs != rhs:
            return False
    return True


def is_flat(d: DiscMap, cl_generators: Sequence[IntVec]) -> dict:
    """Monomial-image test on closed-class generators; returns c(u) or a witness.

    cl_generators must be stored monomials spanning the closed-class sublattice.
    """
    c_values = {}
    for u in cl_generators:
        u = tuple(int(x) for x in u)
        series = evaluate(d, d.ring.monomial_element(u))
        if len(series.terms) != 1:
            return {
                "flat": False,
                "witness": list(u),
                "series": [(str(e), str(c)) for e, c in series.terms],
            }
        e, c = series.terms[0]
        c_values[u] = c
    return {"flat": True, "c": {str(list(u)): str(c) for u, c in c_values.items()}}


@dataclass
class BaseChangeResult:
    f_values: dict[tuple[int, ...], FormalSeries]  # on a basis of the H_1 image
    check_passed: bool

    def to_dict(self):
        return {
            "f": {str(list(k)): repr(v) for k, v in self.f_values.items()},
            "check_passed": self.check_passed,
        }


def base_change_iso(
    d: DiscMap,
    e: DiscMap,
    h1_matrix: Sequence[IntVec],
) -> BaseChangeResult:
    """Solve e(r) f(|r|) = d(r) on all stored monomials.

    h1_matrix rows present the degree-to-H_1 map Z^P -> Z^h (|r^u| = h1 u).
    Requires d and e to agree on closed-class monomials (h1 u = 0); f is built
    on the generators u_p via exact root extraction in the rational-exponent
    model, then verified on every stored monomial.
    """
    ring = d.ring
    if e.ring != ring and e.ring is not ring:
        raise ValueError("disc maps over different rings")
    h = len(h1_matrix)

    def h1(u):
        return tuple(dot(row, u) for row in h1_matrix)

    # ratio d(r^u) / e(r^u) per stored monomial, grouped by H_1 image; well-
    # definedness of f is exactly consistency within each group (the group at
    # image 0 is the requirement d_cl = e_cl).
    groups: dict[tuple[int, ...], FormalSeries] = {}
    one = FormalSeries.one(min(d.cutoff, e.cutoff))
    for u in ring.monomials:
        img = h1(u)
        du = evaluate(d, ring.monomial_element(u))
        eu = evaluate(e, ring.monomial_element(u))
        ratio = du * eu.inverse() if not eu.is_zero() else None
        if ratio is None:
            raise ValueError(f"e vanishes on the stored monomial {list(u)}")
        if img == (0,) * h:
            if ratio.terms != one.terms:
                raise ValueError(
                    f"d and e disagree on the closed-class monomial {list(u)}"
                )
            continue
        if img in groups:
            if groups[img].terms != ratio.terms:
                raise ValueError(
                    f"f is not well defined: stored monomials with H_1 image {img} "
                    "have different d/e ratios (d_cl != e_cl on a difference class)"
                )
        else:
            groups[img] = ratio
    f_values = dict(groups)
    # extend by divisibility: exact roots at primitive images demonstrate that
    # the unit group of the chosen model is divisible enough
    from math import gcd

    for img, val in list(groups.items()):
        g = 0
        for x in img:
            g = gcd(g, abs(x))
        if g > 1:
            primitive_img = tuple(x // g for x in img)
            if primitive_img not in f_values:
                f_values[primitive_img] = val.nth_root(g)
    # multiplicativity spot-check on available image sums
    ok = True
    images = sorted(groups)
    for i, img1 in enumerate(images):
        for img2 in images[i:]:
            total = tuple(a + b for a, b in zip(img1, img2))
            if total in groups:
                lhs = groups[img1] * groups[img2]
                if lhs.terms != groups[total].terms:
                    ok = False
    return BaseChangeResult(f_values=f_values, check_passed=ok)


def iota_injectivity_probe(
    ring: TruncatedRing,
    cl_monomials: Sequence[IntVec],
    functionals: Sequence[IntVec] | None = None,
) -> dict:
    """Certify that interior functionals separate the stored closed monomials.

    For each monomial u the probe looks for a functional beta with
    {v stored : beta(v) = beta(u)} = {u}; reports any unseparated pair.
    """
    stored = [tuple(int(x) for x in u) for u in cl_monomials]
    if functionals is None:
        base = ring.bound_functional
        functionals = [base]
        n = ring.n_vars
        for p in range(n):
            cand = list(base)
            cand[p] += 1
            if ring.cone.contains_interior(cand):
                functionals.append(tuple(cand))
        for p in range(n):
            cand = [2 * x for x in base]
            cand[p] += 1
            if ring.cone.contains_interior(cand):
                functionals.append(tuple(cand))
    functionals = [tuple(int(x) for x in b) for b in functionals]
    for b in functionals:
        if not ring.cone.contains_interior(b):
            raise ValueError(f"functional {b} is not interior to the cone")
    isolating: dict[IntVec, IntVec] = {}
    for u in stored:
        for b in functionals:
            value = dot(b, u)
            if all(dot(b, v) != value for v in stored if v != u):
                isolating[u] = b
                break
    unseparated = []
    for i, u in enumerate(stored):
        for v in stored[i + 1 :]:
            if all(dot(b, u) == dot(b, v) for b in functionals):
                unseparated.append((list(u), list(v)))
    return {
        "separated": not unseparated and len(isolating) == len(stored),
        "isolating": {str(list(u)): list(b) for u, b in isolating.items()},
        "unseparated_pairs": unseparated,
        "functionals": [list(b) for b in functionals],
    }
