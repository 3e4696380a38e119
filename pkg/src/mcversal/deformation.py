"""Maurer-Cartan elements over a truncated ring, the gauge flow, curved
functors attached to gauges, and bounding-cochain machinery.

The gauge action and the functor ODE are integrated formally: cochain
coefficients become polynomials in the flow parameter t (degree capped at the
truncation order), Picard iteration reaches a fixed point in at most K steps
because every step raises the minimal m-adic order of the correction, and the
result is evaluated at t = 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .ainf import (
    AinfStructure,
    Cochain,
    FieldDomain,
    RingDomain,
    TPolyDomain,
    gerstenhaber_bracket,
    gerstenhaber_product,
    hochschild_differential,
    lift_cochain_to_tpoly,
    lift_structure,
)
from .coeff_ring import RingElement, TruncatedRing
from .grading import GElement
from .rationals import rank

IntVec = tuple[int, ...]
ComponentKey = tuple[tuple[int, ...], int]


@dataclass
class RingDeformation:
    """A base structure over k, its lift over R, and an MC representative."""

    base: AinfStructure
    ring: TruncatedRing
    alpha: Cochain

    def __post_init__(self):
        self.lifted = lift_structure(self.base, self.ring)
        if self.alpha.structure is not self.lifted.mu.structure:
            # rebuild alpha on the lifted structure if supplied on another copy
            self.alpha = Cochain(
                self.lifted,
                self.alpha.degree,
                self.alpha.components,
                domain=self.lifted.domain,
            )

    def total_mu(self) -> Cochain:
        return self.lifted.mu + self.alpha

    def deformed_structure(self) -> AinfStructure:
        st = AinfStructure(
            grading=self.lifted.grading,
            objects=self.lifted.objects,
            generators=self.lifted.generators,
            domain=self.lifted.domain,
            max_length=self.lifted.max_length,
        )
        curved = any(len(t) == 0 for (t, _b) in self.total_mu().components)
        st.set_mu(dict(self.total_mu().components), curved=curved)
        return st


def make_mc_element(
    lifted: AinfStructure, components: Mapping[ComponentKey, RingElement]
) -> Cochain:
    """An MC candidate: degree i(1), every coefficient of m-adic order >= 1."""
    alpha = Cochain(lifted, lifted.grading.i_of_one, components, domain=lifted.domain)
    if alpha.min_order() < 1:
        raise ValueError("Maurer-Cartan elements must have positive m-adic order")
    return alpha


@dataclass
class MCReport:
    ok: bool
    residues: list[dict]

    def to_dict(self):
        return {"ok": self.ok, "residues": self.residues}


def mc_residue(lifted: AinfStructure, alpha: Cochain) -> Cochain:
    """d alpha + (1/2)[alpha, alpha]."""
    d_alpha = hochschild_differential(lifted, alpha)
    bracket = gerstenhaber_bracket(alpha, alpha)
    return d_alpha + bracket.scale(Fraction(1, 2))


def check_mc(lifted: AinfStructure, alpha: Cochain) -> MCReport:
    if alpha.min_order() < 1 and not alpha.is_zero():
        return MCReport(ok=False, residues=[{"reason": "order-0 term present"}])
    res = mc_residue(lifted, alpha)
    residues = []
    ring = alpha.domain.ring if isinstance(alpha.domain, RingDomain) else None
    for (tensor, out), c in res.to_sorted_items():
        entry = {"tensor": list(tensor), "output": out, "coefficient": repr(c)}
        if ring is not None:
            entry["order"] = alpha.domain.min_order(c)
        residues.append(entry)
    return MCReport(ok=not residues, residues=residues)


def _tpoly_setup(lifted: AinfStructure):
    ring_domain = lifted.domain
    if not isinstance(ring_domain, RingDomain):
        raise ValueError("gauge flow needs ring coefficients")
    tdom = TPolyDomain(ring_domain, max_t_degree=ring_domain.ring.order)
    return ring_domain, tdom


def gauge_act(lifted: AinfStructure, gamma: Cochain, alpha: Cochain) -> Cochain:
    """e^gamma . alpha: the t = 1 value of the flow of -d gamma + [gamma, .].

    gamma must have degree 0 and positive m-adic order (pronilpotence).
    """
    ring_domain, tdom = _tpoly_setup(lifted)
    g = lifted.grading
    if gamma.components and gamma.degree != g.zero():
        raise ValueError("gauge parameters have shifted degree 0")
    if gamma.min_order() < 1:
        raise ValueError("gauge parameters must have positive m-adic order")
    gamma_t = lift_cochain_to_tpoly(gamma, tdom)
    alpha_t = lift_cochain_to_tpoly(alpha, tdom)
    d_gamma = hochschild_differential(lifted, gamma)
    d_gamma_t = lift_cochain_to_tpoly(d_gamma, tdom)
    current = alpha_t
    K = ring_domain.ring.order
    for _step in range(K + 2):
        integrand = gerstenhaber_bracket(gamma_t, current) - d_gamma_t
        integrated = integrand.map_coefficients(tdom.integrate)
        new = alpha_t + integrated
        if new.components == current.components:
            break
        current = new
    else:
        raise ValueError("gauge flow did not converge: gamma has an order-0 part?")
    result = current.map_coefficients(tdom.eval_at_one, domain=ring_domain)
    return Cochain(lifted, alpha.degree, result.components, domain=ring_domain, validate=False)


def gauge_equivalence_preserves_mc(
    lifted: AinfStructure, gamma: Cochain, alpha: Cochain
) -> bool:
    if not check_mc(lifted, alpha).ok:
        return False
    return check_mc(lifted, gauge_act(lifted, gamma, alpha)).ok


# ---------------------------------------------------------------------------
# curved functors


@dataclass
class CurvedFunctor:
    """Components of a (possibly curved) functor between two deformations of
    the same underlying structure; F^1 = id mod m, F^0 of positive order.

    Stored as a degree-0 cochain-like table on the lifted structure.
    """

    lifted: AinfStructure
    components: dict[ComponentKey, RingElement]

    def as_cochain(self, domain=None) -> Cochain:
        dom = domain if domain is not None else self.lifted.domain
        comps = self.components
        if domain is not None and isinstance(domain, TPolyDomain):
            comps = {k: domain.constant(c) for k, c in self.components.items()}
        return Cochain(
            self.lifted,
            self.lifted.grading.zero(),
            comps,
            domain=dom,
            validate=False,
        )

    def linear_term_matrix(self) -> list[list[RingElement]]:
        n = len(self.lifted.generators)
        zero = self.lifted.domain.zero()
        matrix = [[zero for _ in range(n)] for _ in range(n)]
        for (tensor, out), c in self.components.items():
            if len(tensor) == 1:
                matrix[out][tensor[0]] = c
        return matrix

    def is_identity_mod_m(self) -> bool:
        dom = self.lifted.domain
        for (tensor, out), c in self.components.items():
            if len(tensor) == 1 and tensor[0] == out:
                const = c.constant_term()
                if const != 1:
                    return False
                continue
            if dom.min_order(c) < 1:
                return False
        # every generator must carry its identity component
        present = {t[0] for (t, out) in self.components if len(t) == 1 and t[0] == out}
        return present == set(range(len(self.lifted.generators)))

    def linear_term_invertible(self) -> bool:
        matrix = self.linear_term_matrix()
        n = len(matrix)
        const = [[matrix[i][j].constant_term() for j in range(n)] for i in range(n)]
        return rank(const) == n


def identity_functor(lifted: AinfStructure) -> CurvedFunctor:
    ring = lifted.domain.ring
    comps = {
        ((i,), i): ring.one() for i in range(len(lifted.generators))
    }
    return CurvedFunctor(lifted, comps)


def compose_after(eta: Cochain, functor_cochain: Cochain) -> Cochain:
    """(eta o-hat F): feed blocks of F outputs into eta; F blocks carry no sign.

    functor_cochain holds the functor components as a degree-0 cochain.
    """
    st = eta.structure
    dom = eta.domain
    # group functor components by output generator
    by_output: dict[int, list[tuple[tuple[int, ...], object]]] = {}
    for (tensor, out), c in functor_cochain.components.items():
        by_output.setdefault(out, []).append((tensor, c))
    out_components: dict[ComponentKey, object] = {}
    for (slots, out), c_eta in eta.components.items():
        if len(slots) == 0:
            key = ((), out)
            cur = out_components.get(key)
            out_components[key] = c_eta if cur is None else dom.add(cur, c_eta)
            continue
        choices = [by_output.get(s, []) for s in slots]
        if any(not ch for ch in choices):
            continue

        def rec(j, tensor_acc, coeff_acc):
            if j == len(choices):
                if len(tensor_acc) > st.max_length:
                    return
                key = (tuple(tensor_acc), out)
                cur = out_components.get(key)
                out_components[key] = (
                    coeff_acc if cur is None else dom.add(cur, coeff_acc)
                )
                return
            for block, c_f in choices[j]:
                new_coeff = dom.mul(coeff_acc, c_f)
                if dom.is_zero(new_coeff):
                    continue
                rec(j + 1, tensor_acc + list(block), new_coeff)

        rec(0, [], c_eta)
    return Cochain(st, eta.degree, out_components, domain=dom, validate=False)


def functor_equation_residue(
    functor: CurvedFunctor, mu_source: Cochain, mu_target: Cochain
) -> Cochain:
    """(mu_target o-hat F) - (F with mu_source spliced in); zero iff F is a functor."""
    f_cochain = functor.as_cochain()
    lhs = compose_after(mu_target, f_cochain)
    rhs = gerstenhaber_product(f_cochain, mu_source)
    return lhs - rhs


def functor_from_gauge(
    lifted: AinfStructure, gamma: Cochain, beta: Cochain, verify: bool = True
) -> CurvedFunctor:
    """F = F_1 solving dF_t/dt = gamma(F_t, ..., F_t), F_0 = id.

    F is a curved functor from (mu + beta) to (mu + e^gamma beta), identity mod m.
    """
    ring_domain, tdom = _tpoly_setup(lifted)
    K = ring_domain.ring.order
    ident = identity_functor(lifted).as_cochain(domain=tdom)
    gamma_t = lift_cochain_to_tpoly(gamma, tdom)
    current = ident
    for _step in range(K + 2):
        integrand = compose_after(gamma_t, current)
        integrated = integrand.map_coefficients(tdom.integrate)
        new = ident + integrated
        if new.components == current.components:
            break
        current = new
    else:
        raise ValueError("functor flow did not converge")
    comps = {}
    for key, c in current.map_coefficients(tdom.eval_at_one, domain=ring_domain).components.items():
        comps[key] = c
    functor = CurvedFunctor(lifted, comps)
    if verify:
        target = gauge_act(lifted, gamma, beta)
        residue = functor_equation_residue(
            functor, lifted.mu + beta, lifted.mu + target
        )
        if not residue.is_zero():
            raise AssertionError("functor equations fail for the integrated gauge")
        if not functor.is_identity_mod_m():
            raise AssertionError("integrated functor is not the identity mod m")
    return functor


# ---------------------------------------------------------------------------
# bounding cochains


def make_bounding_cochain(
    lifted: AinfStructure, values: Mapping[int, RingElement]
) -> Cochain:
    """Element of (A tensor m)_1 as an arity-0 cochain of shifted degree 0."""
    comps = {((), gen): c for gen, c in values.items()}
    a = Cochain(lifted, lifted.grading.zero(), comps, domain=lifted.domain)
    if a.min_order() < 1:
        raise ValueError("bounding cochains must have positive m-adic order")
    for (_tensor, gen) in a.components:
        g = lifted.generators[gen]
        if g.source != g.target:
            raise ValueError("bounding cochain values must be endomorphism elements")
    return a


def insert_element(eta: Cochain, a: Cochain) -> Cochain:
    """Sum over all ways of filling input slots of eta with values of a.

    a must be an arity-0 degree-0 cochain (its blocks are shifted-even, so no
    Koszul signs appear).  Includes the empty insertion, so this is
    eta_a in the bounding-cochain sense.
    """
    st = eta.structure
    dom = eta.domain
    values: dict[int, object] = {}
    for (tensor, gen), c in a.components.items():
        if tensor != ():
            raise ValueError("insertion element must be arity 0")
        values[gen] = c
    out: dict[ComponentKey, object] = {}
    for (slots, out_gen), c_eta in eta.components.items():
        positions = [j for j, s in enumerate(slots) if s in values]

        def rec(idx, chosen, coeff):
            if idx == len(positions):
                kept = tuple(s for j, s in enumerate(slots) if j not in chosen)
                key = (kept, out_gen)
                cur = out.get(key)
                out[key] = coeff if cur is None else dom.add(cur, coeff)
                return
            j = positions[idx]
            # skip this slot
            rec(idx + 1, chosen, coeff)
            # fill this slot with a
            new_coeff = dom.mul(coeff, values[slots[j]])
            if not dom.is_zero(new_coeff):
                rec(idx + 1, chosen | {j}, new_coeff)

        rec(0, frozenset(), c_eta)
    return Cochain(st, eta.degree, out, domain=dom, validate=False)


def deform_by_bounding_cochain(
    deformation: RingDeformation, a: Cochain
) -> tuple[AinfStructure, Cochain]:
    """(structure with mu_a, residual curvature mu_a^0)."""
    total = deformation.total_mu()
    mu_a = insert_element(total, a)
    curvature_comps = {
        key: c for key, c in mu_a.components.items() if len(key[0]) == 0
    }
    curvature = Cochain(
        deformation.lifted,
        deformation.lifted.grading.i_of_one,
        curvature_comps,
        domain=deformation.lifted.domain,
        validate=False,
    )
    st = AinfStructure(
        grading=deformation.lifted.grading,
        objects=deformation.lifted.objects,
        generators=deformation.lifted.generators,
        domain=deformation.lifted.domain,
        max_length=deformation.lifted.max_length,
    )
    st.set_mu(dict(mu_a.components), curved=bool(curvature_comps))
    return st, curvature


def bounding_cochain_residue(deformation: RingDeformation, a: Cochain) -> Cochain:
    """sum_s mu^s(a, ..., a): zero iff a is a bounding cochain."""
    _st, curvature = deform_by_bounding_cochain(deformation, a)
    return curvature


def disc_potential(structure: AinfStructure, curvature: Cochain) -> dict[int, RingElement] | None:
    """Per-object scalar P with curvature = P . unit, or None if not proportional.

    Needs declared strict units on the structure.
    """
    if structure.strict_units is None:
        return None
    units = {e: obj for obj, e in enumerate(structure.strict_units)}
    potential: dict[int, RingElement] = {
        obj: structure.domain.zero() for obj in range(len(structure.objects))
    }
    for (tensor, out), c in curvature.components.items():
        if tensor != ():
            return None
        if out not in units:
            return None
        obj = units[out]
        potential[obj] = structure.domain.add(potential[obj], c)
    return potential


def bounding_cochain_report(
    deformation: RingDeformation, a: Cochain, weak: bool = False
) -> dict:
    """Classify a candidate: bounding / weak bounding (with disc potential) / neither.

    Weak bounding cochains are accepted only for strictly unital structures
    (and only when asked for): their residual curvature must be a multiple of
    the units, and the multiplier is the disc potential.
    """
    structure, curvature = deform_by_bounding_cochain(deformation, a)
    if curvature.is_zero():
        return {"bounding": True, "weak": False, "potential": None, "structure": structure}
    if not weak:
        return {"bounding": False, "weak": False, "potential": None, "structure": structure}
    base = deformation.base
    if base.strict_units is None:
        raise ValueError("weak bounding cochains need a strictly unital structure")
    base.validate_strict_units()
    structure.strict_units = base.strict_units
    potential = disc_potential(structure, curvature)
    if potential is None:
        return {"bounding": False, "weak": False, "potential": None, "structure": structure}
    return {"bounding": False, "weak": True, "potential": potential, "structure": structure}


def pushforward_bounding_cochain(
    functor: CurvedFunctor, a: Cochain
) -> tuple[Cochain, CurvedFunctor]:
    """b = sum F^s(a..a) and the induced functor F_a (arity-0 part removed)."""
    f_cochain = functor.as_cochain()
    inserted = insert_element(f_cochain, a)
    b_comps = {}
    fa_comps = {}
    for (tensor, gen), c in inserted.components.items():
        if len(tensor) == 0:
            b_comps[((), gen)] = c
        else:
            fa_comps[(tensor, gen)] = c
    b = Cochain(
        functor.lifted,
        functor.lifted.grading.zero(),
        b_comps,
        domain=functor.lifted.domain,
        validate=False,
    )
    return b, CurvedFunctor(functor.lifted, fa_comps)


# ---------------------------------------------------------------------------
# first-order classes


def monomial_part(base: AinfStructure, alpha: Cochain, u: IntVec) -> Cochain:
    """The field-coefficient cochain multiplying the monomial r^u in alpha."""
    ring_domain = alpha.domain
    if not isinstance(ring_domain, RingDomain):
        raise ValueError("alpha must have ring coefficients")
    ring = ring_domain.ring
    g = base.grading
    degree = g.sub(alpha.degree, ring.degree(u))
    comps = {}
    for key, c in alpha.components.items():
        coeff = c.coeffs.get(tuple(u))
        if coeff:
            comps[key] = coeff
    return Cochain(base, degree, comps, domain=base.domain)


def first_order_classes(
    deformation: RingDeformation, pieces: Mapping[int, object] | None = None
) -> dict[int, Cochain]:
    """The cochains multiplying each generator monomial r_p (all closed)."""
    out = {}
    for p in range(deformation.ring.n_vars):
        up = deformation.ring.generator_monomial(p)
        part = monomial_part(deformation.base, deformation.alpha, up)
        d_part = hochschild_differential(deformation.base, part)
        if not d_part.is_zero():
            raise ValueError(
                f"first-order cochain at generator {p} is not closed: invalid deformation"
            )
        out[p] = part
    return out
