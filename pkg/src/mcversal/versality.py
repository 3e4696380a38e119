"""The order-by-order versality matching algorithm and its equivariant variant.

Given an MC element alpha (the reference deformation) and a candidate beta over
the same nice truncated ring, the solver constructs ring-automorphism units
psi_p and a gauge parameter gamma such that

    e^gamma . beta - psi^* alpha = 0   (to the truncation order K)

by induction on the m-adic order: at each order the residue is closed, its
class is expressed in the span of the first-order deformation classes by a
deterministic least-index solve (NotInSpan on failure), the psi_p absorb the
class, and an exact primitive absorbed into gamma kills the rest.  The
correction columns are computed by exact finite differencing of psi^* alpha,
so non-generator order-one monomials and the order-one nonlinearity are
handled without hand-linearization (a few Newton rounds per order).

The equivariant variant averages both corrections over the group at every
step, so psi is equivariant (psi_{g.p} = g . psi_p) and gamma invariant.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .ainf import Cochain, RingDomain, signed_act_on_cc
from .coeff_ring import (
    RingAutomorphism,
    RingElement,
    RingGroupAction,
    TruncatedRing,
    apply_automorphism,
    certify_nice,
)
from .deformation import (
    RingDeformation,
    check_mc,
    first_order_classes,
    functor_from_gauge,
    gauge_act,
    monomial_part,
)
from .hochschild import CohomologyPiece, cohomology, invariant_subspace, span_test
from .rationals import rank, solve_linear

IntVec = tuple[int, ...]


class VersalityError(ValueError):
    pass


class NotInSpan(VersalityError):
    def __init__(self, order: int, monomial: IntVec, detail: str = ""):
        self.order = order
        self.monomial = monomial
        super().__init__(
            f"residue class at order {order}, monomial {monomial}, is not in the "
            f"span of the first-order deformation classes{': ' + detail if detail else ''}"
        )


class NotClosed(VersalityError):
    def __init__(self, order: int, monomial: IntVec):
        self.order = order
        self.monomial = monomial
        super().__init__(f"residue at order {order}, monomial {monomial}, is not closed")


class NonInvariantInput(VersalityError):
    pass


@dataclass
class EquivariantData:
    """Everything the averaged solve needs: the signed action on cochains
    (with its ring action) and the induced signed permutation of generators."""

    action: object  # SignedGroupAction with ring_action set
    ring_action: RingGroupAction


@dataclass
class VersalityProblem:
    deformation: RingDeformation  # base structure, ring, and alpha
    beta: Cochain
    hh_functional: IntVec | None = None
    allow_truncation: bool = False
    equivariant: EquivariantData | None = None
    # "least-index" or "reverse": the admissible primitive-selection rule; the
    # certificate equation and psi^1 are selection-independent
    exactness_rule: str = "least-index"

    def __post_init__(self):
        self.beta = Cochain(
            self.deformation.lifted,
            self.beta.degree,
            self.beta.components,
            domain=self.deformation.lifted.domain,
        )


@dataclass
class VersalityCertificate:
    psi: RingAutomorphism
    gamma: Cochain
    functor: object
    residue_log: list[dict]
    versal: bool
    equivariant: bool = False

    def to_dict(self):
        return {
            "versal": self.versal,
            "equivariant": self.equivariant,
            "orders": self.residue_log,
            "psi": [
                [[list(u), str(c)] for u, c in unit.to_pairs()] for unit in self.psi.units
            ],
            "gamma_components": [
                [list(t), b, [[list(u), str(c)] for u, c in coeff.to_pairs()]]
                for (t, b), coeff in sorted(self.gamma.components.items())
            ],
        }


class _Workspace:
    """Shared state for one versality run."""

    def __init__(self, problem: VersalityProblem):
        self.problem = problem
        self.deformation = problem.deformation
        self.ring = self.deformation.ring
        self.lifted = self.deformation.lifted
        self.base = self.deformation.base
        self.alpha = self.deformation.alpha
        self.beta = problem.beta
        self.g = self.base.grading
        self.K = self.ring.order
        self._pieces: dict[tuple, CohomologyPiece] = {}
        nice = certify_nice(self.ring)
        if not nice.nice:
            raise VersalityError(f"ring is not nice: {nice.failures}")
        if not check_mc(self.lifted, self.alpha).ok:
            raise NotClosed(0, self.ring.zero_monomial())
        if not check_mc(self.lifted, self.beta).ok:
            raise NotClosed(0, self.ring.zero_monomial())
        self.alpha_parts = first_order_classes(self.deformation)
        self.alpha_classes = {}
        for p, part in self.alpha_parts.items():
            piece = self.piece_for_monomial(self.ring.generator_monomial(p))
            self.alpha_classes[p] = piece.class_of(part)
        self.versal_flag = all(
            any(x != 0 for x in coords) for coords in self.alpha_classes.values()
        )
        self.order_one = [
            u
            for u in self.ring.monomials
            if self.ring.madic_order(u) == 1
        ]
        self._check_mc_prime()
        # degree-zero monomial table for the psi corrections
        self.deg0_monomials = [
            u
            for u in self.ring.monomials
            if self.ring.degree(u) == self.g.zero()
        ]

    # -- pieces -------------------------------------------------------------

    def piece_for_degree(self, degree) -> CohomologyPiece:
        key = tuple(self.g.reduce(degree))
        if key not in self._pieces:
            self._pieces[key] = cohomology(
                self.base,
                degree,
                functional=self.problem.hh_functional,
                allow_truncation=self.problem.allow_truncation,
            )
        return self._pieces[key]

    def piece_for_monomial(self, u: IntVec) -> CohomologyPiece:
        degree = self.g.sub(self.g.i_of_one, self.ring.degree(u))
        return self.piece_for_degree(degree)

    # -- hypothesis checks ----------------------------------------------------

    def _check_mc_prime(self):
        """beta must lie in MC': its first-order classes span the m/m^2 pieces."""
        gens = {self.ring.generator_monomial(p): p for p in range(self.ring.n_vars)}
        for u in self.order_one:
            piece = self.piece_for_monomial(u)
            if u in gens:
                p = gens[u]
                b_part = monomial_part(self.base, self.beta, u)
                if not hc_is_closed(piece, b_part):
                    raise NotClosed(1, u)
                coords = piece.class_of(b_part)
                if piece.dim > 1:
                    raise VersalityError(
                        f"piece at generator {p} has dimension {piece.dim} > 1: "
                        "the single class r_p b_p cannot span it"
                    )
                if piece.dim == 1 and all(x == 0 for x in coords):
                    raise VersalityError(
                        f"beta is not in MC': its first-order class at generator {p} "
                        "vanishes on a nonzero piece"
                    )
            else:
                if piece.dim != 0:
                    raise VersalityError(
                        f"beta is not in MC': order-one monomial {u} has a nonzero "
                        f"piece (dim {piece.dim}) not reachable by generators"
                    )

    # -- residue plumbing -----------------------------------------------------

    def psi_alpha(self, units: list[RingElement]) -> Cochain:
        if any(u.constant_term() == 0 for u in units):
            # before the first-order solve: psi^* alpha is declared zero
            return Cochain(
                self.lifted, self.alpha.degree, {}, domain=self.lifted.domain
            )
        psi = RingAutomorphism(self.ring, tuple(units))
        comps = {
            key: apply_automorphism(psi, c) for key, c in self.alpha.components.items()
        }
        return Cochain(
            self.lifted, self.alpha.degree, comps, domain=self.lifted.domain, validate=False
        )

    def epsilon(self, gamma: Cochain, units: list[RingElement]) -> Cochain:
        acted = gauge_act(self.lifted, gamma, self.beta)
        return acted - self.psi_alpha(units)

    def monomial_cochain(self, eps: Cochain, u: IntVec) -> Cochain:
        return monomial_part(self.base, eps, u)

    def order_monomials(self, k: int) -> list[IntVec]:
        return [u for u in self.ring.monomials if self.ring.madic_order(u) == k]


def hc_is_closed(piece: CohomologyPiece, z: Cochain) -> bool:
    return piece.is_closed(z)


def _bootstrap_first_order(ws: _Workspace, units: list[RingElement], averager=None):
    """Solve psi_p^1 from the first-order classes: [beta_p] = psi_p^1 [alpha_p].

    Rank-zero pieces leave psi_p^1 free; the paper allows any nonzero value and
    we pin 1.  A nonzero [beta_p] against [alpha_p] = 0 is a span failure.
    """
    ring = ws.ring
    increments = {p: ring.zero() for p in range(ring.n_vars)}
    for p in range(ring.n_vars):
        up = ring.generator_monomial(p)
        piece = ws.piece_for_monomial(up)
        if piece.dim == 0:
            increments[p] = ring.one()
            continue
        beta_p = monomial_part(ws.base, ws.beta, up)
        coords_b = piece.class_of(beta_p)
        coords_a = ws.alpha_classes[p]
        # both classes live in a piece of dimension <= 1 (MC' check)
        if all(x == 0 for x in coords_a):
            raise NotInSpan(1, up, "alpha has zero first-order class on a nonzero piece")
        scalar = coords_b[0] / coords_a[0]
        if scalar == 0:
            raise VersalityError(f"psi_{p}^1 would vanish; beta is not in MC'")
        increments[p] = ring.one().scale(scalar)
    if averager is not None:
        increments = averager.average_psi_increment(increments)
    for p in range(ring.n_vars):
        units[p] = units[p] + increments[p]
        if units[p].constant_term() == 0:
            raise VersalityError(f"averaged psi_{p}^1 vanishes")


def _run_induction(ws: _Workspace, averager=None):
    ring = ws.ring
    units = [ring.zero() for _ in range(ring.n_vars)]
    gamma = Cochain(ws.lifted, ws.g.zero(), {}, domain=ws.lifted.domain)
    _bootstrap_first_order(ws, units, averager)
    logs = []
    for k in range(1, ws.K + 1):
        log, gamma = _solve_order_loop(ws, k, gamma, units, averager)
        logs.append(log)
    eps = ws.epsilon(gamma, units)
    if not eps.is_zero():
        raise VersalityError("nonzero residue after the final order")
    return units, gamma, logs


def _solve_order_loop(ws, k, gamma, units, averager, max_rounds: int = 8):
    """Like _solve_order but returns the updated gamma."""
    ring = ws.ring
    log = {"order": k, "phi_corrections": 0, "gamma_corrections": 0, "rounds": 0}
    for _round in range(max_rounds):
        log["rounds"] += 1
        eps_k = ws.epsilon(gamma, units).order_part(k)
        monomials = ws.order_monomials(k)
        eps_parts = {u: ws.monomial_cochain(eps_k, u) for u in monomials}
        if all(z.is_zero() for z in eps_parts.values()):
            return log, gamma
        for u, z in eps_parts.items():
            if not z.is_zero() and not ws.piece_for_monomial(u).is_closed(z):
                raise NotClosed(k, u)
        # --- psi step
        unknowns: list[tuple[int, IntVec]] = []
        for p in range(ring.n_vars):
            up = ring.generator_monomial(p)
            for w in ws.deg0_monomials:
                if ring.madic_order(w) != k - 1:
                    continue
                u = tuple(a + b for a, b in zip(up, w))
                if u in ring._enumeration[1] and ring.madic_order(u) == k:
                    unknowns.append((p, w))
        unknowns.sort()
        rhs: list[Fraction] = []
        for u in monomials:
            piece = ws.piece_for_monomial(u)
            z = eps_parts[u]
            coords = (
                piece.class_of(z)
                if not z.is_zero()
                else tuple(Fraction(0) for _ in range(piece.dim))
            )
            rhs.extend(coords)
        if any(x != 0 for x in rhs):
            base_psi_alpha = ws.psi_alpha(units)
            columns = []
            for (p, w) in unknowns:
                trial = list(units)
                trial[p] = trial[p] + ring.monomial_element(w)
                effect = (ws.psi_alpha(trial) - base_psi_alpha).order_part(k)
                col: list[Fraction] = []
                for u in monomials:
                    piece = ws.piece_for_monomial(u)
                    part = ws.monomial_cochain(effect, u)
                    coords = (
                        piece.class_of(part)
                        if not part.is_zero()
                        else tuple(Fraction(0) for _ in range(piece.dim))
                    )
                    col.extend(coords)
                columns.append(col)
            live = [j for j, col in enumerate(columns) if any(x != 0 for x in col)]
            if live:
                matrix = [[columns[j][i] for j in live] for i in range(len(rhs))]
                sol = solve_linear(matrix, rhs)
            else:
                sol = None
            if sol is None:
                bad = next((u for u in monomials if not eps_parts[u].is_zero()), monomials[0])
                raise NotInSpan(k, bad)
            increments = {p: ring.zero() for p in range(ring.n_vars)}
            for idx, j in enumerate(live):
                p, w = unknowns[j]
                if sol[idx] != 0:
                    increments[p] = increments[p] + ring.monomial_element(w, sol[idx])
            if averager is not None:
                increments = averager.average_psi_increment(increments)
            changed = False
            for p in range(ring.n_vars):
                if not increments[p].is_zero():
                    units[p] = units[p] + increments[p]
                    changed = True
                    log["phi_corrections"] += 1
            if changed:
                continue
        # --- gamma step
        eps_k = ws.epsilon(gamma, units).order_part(k)
        gamma_comps: dict = {}
        residual = False
        for u in monomials:
            z = ws.monomial_cochain(eps_k, u)
            if z.is_zero():
                continue
            residual = True
            piece = ws.piece_for_monomial(u)
            coords = piece.class_of(z)
            if any(x != 0 for x in coords):
                raise NotInSpan(k, u, "class survives the psi correction")
            c = piece.solve_exact(z, reverse=ws.problem.exactness_rule == "reverse")
            if c is None:
                raise VersalityError(
                    f"no primitive for the exact residue at order {k}, monomial {u}"
                )
            for (tensor, out), coeff in c.components.items():
                cur = gamma_comps.get((tensor, out), ring.zero())
                gamma_comps[(tensor, out)] = cur + ring.monomial_element(u, coeff)
        if not residual:
            return log, gamma
        increment = Cochain(
            ws.lifted, ws.g.zero(), gamma_comps, domain=ws.lifted.domain, validate=False
        )
        if averager is not None:
            increment = averager.average_gamma_increment(increment)
        gamma = gamma + increment
        log["gamma_corrections"] += 1
    eps_k = ws.epsilon(gamma, units).order_part(k)
    if not eps_k.is_zero():
        raise VersalityError(f"order {k} residue did not converge after {max_rounds} rounds")
    return log, gamma


class _Averager:
    """Averaging maps for the equivariant solve."""

    def __init__(self, ws: _Workspace, eq: EquivariantData):
        self.ws = ws
        self.eq = eq
        self.group = eq.ring_action.signed_group.group
        self.perms = [
            eq.ring_action.generator_permutation(i) for i in range(self.group.order)
        ]

    def average_psi_increment(self, increments: Mapping[int, RingElement]):
        ring = self.ws.ring
        n = self.group.order
        out = {p: ring.zero() for p in range(ring.n_vars)}
        for q in range(ring.n_vars):
            total = ring.zero()
            for i in range(n):
                # find p with g_i . p = q
                inv = self.group.inverse(i)
                p = self.perms[inv][q][0]
                total = total + self.eq.ring_action.apply(i, increments[p])
            out[q] = total.scale(Fraction(1, n))
        return out

    def average_gamma_increment(self, increment: Cochain):
        n = self.group.order
        total = None
        for i in range(n):
            term = signed_act_on_cc(self.eq.action, i, increment)
            total = term if total is None else total + term
        return total.scale(Fraction(1, n))


def versal_match(problem: VersalityProblem) -> VersalityCertificate:
    """Lemma-style matching: produce (psi, gamma, F) with zero residue."""
    ws = _Workspace(problem)
    averager = None
    if problem.equivariant is not None:
        averager = _Averager(ws, problem.equivariant)
        _check_equivariant_inputs(ws, problem.equivariant)
    units, gamma, logs = _run_induction(ws, averager)
    psi = RingAutomorphism(ws.ring, tuple(units))
    functor = functor_from_gauge(ws.lifted, gamma, ws.beta)
    cert = VersalityCertificate(
        psi=psi,
        gamma=gamma,
        functor=functor,
        residue_log=logs,
        versal=ws.versal_flag,
        equivariant=problem.equivariant is not None,
    )
    if not verify_certificate(problem, cert):
        raise AssertionError("certificate failed independent re-verification")
    if averager is not None:
        _assert_equivariant_output(ws, problem.equivariant, cert)
    return cert


def equivariant_versal_match(problem: VersalityProblem) -> VersalityCertificate:
    if problem.equivariant is None:
        raise VersalityError("equivariant matching needs an action")
    return versal_match(problem)


def _check_equivariant_inputs(ws: _Workspace, eq: EquivariantData):
    n = eq.ring_action.signed_group.group.order
    for i in range(n):
        eq.ring_action.generator_permutation(i)  # raises if not special form
        for z, name in ((ws.alpha, "alpha"), (ws.beta, "beta")):
            acted = signed_act_on_cc(eq.action, i, z)
            if not (acted - z).is_zero():
                raise NonInvariantInput(f"{name} is not invariant under element {i}")


def _assert_equivariant_output(ws: _Workspace, eq: EquivariantData, cert: VersalityCertificate):
    n = eq.ring_action.signed_group.group.order
    for i in range(n):
        perm = eq.ring_action.generator_permutation(i)
        for p in range(ws.ring.n_vars):
            q = perm[p][0]
            lhs = cert.psi.units[q]
            rhs = eq.ring_action.apply(i, cert.psi.units[p])
            if lhs != rhs:
                raise AssertionError("psi is not equivariant")
        acted = signed_act_on_cc(eq.action, i, cert.gamma)
        if not (acted - cert.gamma).is_zero():
            raise AssertionError("gamma is not invariant")


def verify_certificate(problem: VersalityProblem, cert: VersalityCertificate) -> bool:
    """Independent check of e^gamma . beta = psi^* alpha, via public APIs only."""
    deformation = problem.deformation
    lifted = deformation.lifted
    acted = gauge_act(lifted, cert.gamma, problem.beta)
    comps = {
        key: apply_automorphism(cert.psi, c)
        for key, c in deformation.alpha.components.items()
    }
    target = Cochain(lifted, deformation.alpha.degree, comps, domain=lifted.domain, validate=False)
    return (acted - target).is_zero()


def completeness_report(problem: VersalityProblem) -> dict:
    """Evaluate the theorem hypotheses and state the strongest conclusion."""
    ws = _Workspace(problem)
    ring = ws.ring
    report: dict = {
        "ring_nice": True,
        "smooth_divisor": ring.n_vars == 1,
        "a_p_nonzero": {},
        "span_failures": [],
        "equivariant": problem.equivariant is not None,
    }
    for p, coords in ws.alpha_classes.items():
        report["a_p_nonzero"][p] = any(x != 0 for x in coords)
    gens = {ring.generator_monomial(p): p for p in range(ring.n_vars)}
    for u in ring.monomials:
        if ring.madic_order(u) < 1:
            continue
        piece = ws.piece_for_monomial(u)
        if piece.dim == 0:
            continue
        reachable = []
        for p in range(ring.n_vars):
            w = tuple(a - b for a, b in zip(u, ring.generator_monomial(p)))
            if w in ring._enumeration[1] and ring.degree(w) == ws.g.zero():
                reachable.append(p)
        columns = [list(ws.alpha_classes[p]) for p in reachable if any(x != 0 for x in ws.alpha_classes[p])]
        if problem.equivariant is not None:
            inv = invariant_subspace(problem.equivariant.action, piece)
            needed = [piece.class_of(z) for z in inv]
        else:
            needed = [
                tuple(Fraction(1 if i == j else 0) for j in range(piece.dim))
                for i in range(piece.dim)
            ]
        base_rank = rank(columns) if columns else 0
        for target in needed:
            if columns:
                unreached = rank(columns + [list(target)]) > base_rank
            else:
                unreached = any(x != 0 for x in target)
            if unreached:
                report["span_failures"].append(
                    {"monomial": list(u), "piece_dim": piece.dim}
                )
                break
    span_ok = not report["span_failures"]
    if not span_ok:
        report["conclusion"] = "no conclusion"
    elif all(report["a_p_nonzero"].values()):
        report["conclusion"] = "R-versal"
    else:
        report["conclusion"] = "R-complete"
    return report
