"""Versioned JSON document formats and loaders for every toolkit object.

All coefficients are serialized as exact-rational strings ("p/q" or "n"); all
documents carry a "schema" field ("<kind>/1").  Loaders validate and raise
ValueError with a readable message; dumpers round-trip losslessly.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Mapping

from .ainf import AinfStructure, Cochain, FieldDomain, Generator, RingDomain
from .cones import AmbientData, DivisorCombinatorics, RationalCone
from .coeff_ring import RingAutomorphism, RingElement, RingGroupAction, TruncatedRing
from .deformation import RingDeformation
from .grading import (
    FiniteGroup,
    GradingAction,
    GradingDatum,
    GradingMorphism,
    SignedGroup,
)
from .mirror_flat import DiscMap, FormalSeries
from .rationals import format_rational, parse_rational

SCHEMA_VERSION = 1


def _expect(doc: Mapping, kind: str) -> Mapping:
    if not isinstance(doc, Mapping):
        raise ValueError(f"{kind} document must be an object")
    tag = doc.get("schema")
    if tag != f"{kind}/{SCHEMA_VERSION}":
        raise ValueError(f"expected schema '{kind}/{SCHEMA_VERSION}', got {tag!r}")
    return doc


def schema_kind(doc: Mapping) -> str:
    tag = doc.get("schema", "")
    return str(tag).split("/")[0]


# -- grading ---------------------------------------------------------------


def dump_grading(g: GradingDatum) -> dict:
    return {
        "schema": f"grading/{SCHEMA_VERSION}",
        "rank": g.rank,
        "torsion": list(g.torsion),
        "i": list(g.i_of_one),
        "sigma": list(g.sigma),
    }


def load_grading(doc: Mapping) -> GradingDatum:
    doc = _expect(doc, "grading")
    return GradingDatum(
        rank=int(doc["rank"]),
        torsion=tuple(int(x) for x in doc.get("torsion", [])),
        i_of_one=tuple(int(x) for x in doc["i"]),
        sigma=tuple(int(x) for x in doc["sigma"]),
    )


# -- cones -------------------------------------------------------------------


def dump_cone(c: RationalCone) -> dict:
    return {
        "schema": f"cone/{SCHEMA_VERSION}",
        "ambient_rank": c.ambient_rank,
        "generators": [list(g) for g in c.generators],
    }


def load_cone(doc: Mapping) -> RationalCone:
    doc = _expect(doc, "cone")
    return RationalCone(
        int(doc["ambient_rank"]),
        tuple(tuple(int(x) for x in g) for g in doc["generators"]),
    )


def dump_divisors(dc: DivisorCombinatorics) -> dict:
    return {
        "schema": f"divisors/{SCHEMA_VERSION}",
        "n_components": dc.n_components,
        "nonempty_strata": [list(k) for k in dc.nonempty_strata],
        "h2_matrix": [list(r) for r in dc.h2_matrix],
        "c1_vector": list(dc.c1_vector),
        "boundary_matrix": [list(r) for r in dc.boundary_matrix],
    }


def load_divisors(doc: Mapping) -> DivisorCombinatorics:
    doc = _expect(doc, "divisors")
    return DivisorCombinatorics(
        n_components=int(doc["n_components"]),
        nonempty_strata=tuple(tuple(int(x) for x in k) for k in doc["nonempty_strata"]),
        h2_matrix=tuple(tuple(int(x) for x in r) for r in doc["h2_matrix"]),
        c1_vector=tuple(int(x) for x in doc["c1_vector"]),
        boundary_matrix=tuple(
            tuple(int(x) for x in r) for r in doc.get("boundary_matrix", [])
        ),
    )


def load_ambient(doc: Mapping) -> AmbientData:
    doc = _expect(doc, "ambient")
    return AmbientData(
        i_map=tuple(int(x) for x in doc["i_map"]),
        h2Y_matrix=tuple(tuple(int(x) for x in r) for r in doc["h2Y_matrix"]),
        c1Y_vector=tuple(int(x) for x in doc["c1Y_vector"]),
    )


def dump_ambient(amb: AmbientData) -> dict:
    return {
        "schema": f"ambient/{SCHEMA_VERSION}",
        "i_map": list(amb.i_map),
        "h2Y_matrix": [list(r) for r in amb.h2Y_matrix],
        "c1Y_vector": list(amb.c1Y_vector),
    }


# -- fans ---------------------------------------------------------------------


def dump_fan(fan) -> dict:
    return {
        "schema": f"fan/{SCHEMA_VERSION}",
        "rays": [list(r) for r in fan.rays],
        "max_cones": [list(c) for c in fan.max_cones],
    }


def load_fan(doc: Mapping):
    from .toric import Fan

    doc = _expect(doc, "fan")
    rays = tuple(tuple(int(x) for x in r) for r in doc["rays"])
    if not rays:
        raise ValueError("fan needs at least one ray")
    return Fan(
        lattice_rank=len(rays[0]),
        rays=rays,
        max_cones=tuple(tuple(int(i) for i in c) for c in doc["max_cones"]),
    )


# -- rings --------------------------------------------------------------------


def dump_ring(ring: TruncatedRing) -> dict:
    return {
        "schema": f"ring/{SCHEMA_VERSION}",
        "grading": dump_grading(ring.grading),
        "cone": dump_cone(ring.cone),
        "f_images": [list(g) for g in ring.f_images],
        "order": ring.order,
        "bound_functional": list(ring.bound_functional),
    }


def load_ring(doc: Mapping) -> TruncatedRing:
    doc = _expect(doc, "ring")
    return TruncatedRing(
        cone=load_cone(doc["cone"]),
        grading=load_grading(doc["grading"]),
        f_images=tuple(tuple(int(x) for x in g) for g in doc["f_images"]),
        order=int(doc["order"]),
        bound_functional=tuple(int(x) for x in doc["bound_functional"])
        if doc.get("bound_functional")
        else None,
    )


def dump_ring_element(x: RingElement) -> list:
    return [[list(u), format_rational(c)] for u, c in x.to_pairs()]


def load_ring_element(ring: TruncatedRing, data) -> RingElement:
    coeffs = {}
    for u, c in data:
        coeffs[tuple(int(v) for v in u)] = parse_rational(c)
    return RingElement(ring, coeffs)


# -- algebras -------------------------------------------------------------------


def dump_algebra(st: AinfStructure) -> dict:
    if not isinstance(st.domain, FieldDomain):
        raise ValueError("algebra documents hold field-coefficient structures")
    return {
        "schema": f"algebra/{SCHEMA_VERSION}",
        "grading": dump_grading(st.grading),
        "objects": list(st.objects),
        "generators": [
            {"source": g.source, "target": g.target, "degree": list(g.degree), "name": g.name}
            for g in st.generators
        ],
        "max_length": st.max_length,
        "curved": st.curved,
        "mu": [
            {"inputs": list(t), "output": out, "coefficient": format_rational(c)}
            for (t, out), c in st.mu.to_sorted_items()
        ],
    }


def load_algebra(doc: Mapping) -> AinfStructure:
    doc = _expect(doc, "algebra")
    grading = load_grading(doc["grading"])
    gens = tuple(
        Generator(
            source=int(g["source"]),
            target=int(g["target"]),
            degree=tuple(int(x) for x in g["degree"]),
            name=str(g.get("name", f"g{i}")),
        )
        for i, g in enumerate(doc["generators"])
    )
    st = AinfStructure(
        grading=grading,
        objects=tuple(str(x) for x in doc["objects"]),
        generators=gens,
        domain=FieldDomain(),
        max_length=int(doc.get("max_length", 8)),
    )
    comps = {}
    for entry in doc.get("mu", []):
        key = (tuple(int(i) for i in entry["inputs"]), int(entry["output"]))
        comps[key] = parse_rational(entry["coefficient"])
    st.set_mu(comps, curved=bool(doc.get("curved", False)))
    return st


def dump_field_cochain(z: Cochain) -> dict:
    return {
        "degree": list(z.degree),
        "components": [
            {"inputs": list(t), "output": out, "coefficient": format_rational(c)}
            for (t, out), c in z.to_sorted_items()
        ],
    }


def load_field_cochain(st: AinfStructure, doc: Mapping) -> Cochain:
    comps = {}
    for entry in doc.get("components", []):
        key = (tuple(int(i) for i in entry["inputs"]), int(entry["output"]))
        comps[key] = parse_rational(entry["coefficient"])
    return Cochain(st, tuple(int(x) for x in doc["degree"]), comps, domain=FieldDomain())


def dump_ring_cochain(z: Cochain) -> dict:
    return {
        "degree": list(z.degree),
        "components": [
            {"inputs": list(t), "output": out, "coefficient": dump_ring_element(c)}
            for (t, out), c in z.to_sorted_items()
        ],
    }


def load_ring_cochain(lifted: AinfStructure, doc: Mapping) -> Cochain:
    if not isinstance(lifted.domain, RingDomain):
        raise ValueError("ring cochains need a ring-coefficient structure")
    ring = lifted.domain.ring
    comps = {}
    for entry in doc.get("components", []):
        key = (tuple(int(i) for i in entry["inputs"]), int(entry["output"]))
        comps[key] = load_ring_element(ring, entry["coefficient"])
    return Cochain(
        lifted, tuple(int(x) for x in doc["degree"]), comps, domain=lifted.domain
    )


# -- deformations -----------------------------------------------------------------


def dump_deformation(d: RingDeformation) -> dict:
    return {
        "schema": f"deformation/{SCHEMA_VERSION}",
        "algebra": dump_algebra(d.base),
        "ring": dump_ring(d.ring),
        "alpha": dump_ring_cochain(d.alpha),
    }


def load_deformation(doc: Mapping) -> RingDeformation:
    doc = _expect(doc, "deformation")
    base = load_algebra(doc["algebra"])
    ring = load_ring(doc["ring"])
    probe = RingDeformation(
        base,
        ring,
        Cochain(base, base.grading.i_of_one, {}, domain=FieldDomain(), validate=False),
    )
    alpha = load_ring_cochain(probe.lifted, doc["alpha"])
    return RingDeformation(base, ring, alpha)


def dump_automorphism(psi: RingAutomorphism) -> dict:
    return {
        "schema": f"automorphism/{SCHEMA_VERSION}",
        "units": [dump_ring_element(u) for u in psi.units],
    }


def load_automorphism(ring: TruncatedRing, doc: Mapping) -> RingAutomorphism:
    doc = _expect(doc, "automorphism")
    return RingAutomorphism(
        ring, tuple(load_ring_element(ring, u) for u in doc["units"])
    )


# -- group actions ------------------------------------------------------------------


def load_signed_group(doc: Mapping) -> SignedGroup:
    group = FiniteGroup(
        elements=tuple(str(x) for x in doc["elements"]),
        table=tuple(tuple(int(i) for i in row) for row in doc["table"]),
    )
    return SignedGroup(group, tuple(int(s) for s in doc["sigma"]))


def dump_signed_group(sg: SignedGroup) -> dict:
    return {
        "elements": list(sg.group.elements),
        "table": [list(r) for r in sg.group.table],
        "sigma": list(sg.sigma),
    }


def load_action(doc: Mapping, deformation: RingDeformation):
    """Equivariant data for a versality problem."""
    from .ainf import SignedGroupAction
    from .versality import EquivariantData

    doc = _expect(doc, "action")
    sg = load_signed_group(doc["group"])
    ring = deformation.ring
    p_mor = None
    if doc.get("p_mor") is not None:
        from .grading import z_mod_4_datum

        p_mor = GradingMorphism(
            deformation.base.grading,
            z_mod_4_datum(),
            tuple(tuple(int(x) for x in row) for row in doc["p_mor"]),
        )
    ring_action = RingGroupAction(
        ring,
        sg,
        tuple(
            tuple(tuple(int(x) for x in row) for row in mat)
            for mat in doc["monomial_maps"]
        ),
        p_mor=p_mor,
    )
    grading_action = None
    if doc.get("grading_action") is not None:
        grading_action = GradingAction(
            sg.group,
            deformation.base.grading,
            tuple(
                tuple(tuple(int(x) for x in row) for row in mat)
                for mat in doc["grading_action"]
            ),
        )
    gen_maps = tuple(
        {
            int(src): [(int(dst), parse_rational(c)) for dst, c in images]
            for src, images in element_map
        }
        for element_map in doc["gen_maps"]
    )
    action = SignedGroupAction(
        structure=deformation.lifted,
        signed_group=sg,
        object_perms=tuple(tuple(int(i) for i in p) for p in doc["object_perms"]),
        gen_maps=gen_maps,
        grading_action=grading_action,
        ring_action=ring_action,
    )
    return EquivariantData(action=action, ring_action=ring_action)


# -- versality problems ----------------------------------------------------------------


def load_versality_problem(doc: Mapping):
    from .versality import VersalityProblem

    doc = _expect(doc, "versal-problem")
    deformation = load_deformation(doc["deformation"])
    beta = load_ring_cochain(deformation.lifted, doc["beta"])
    equivariant = None
    if doc.get("action") is not None:
        equivariant = load_action(doc["action"], deformation)
    return VersalityProblem(
        deformation=deformation,
        beta=beta,
        hh_functional=tuple(int(x) for x in doc["hh_functional"])
        if doc.get("hh_functional") is not None
        else None,
        allow_truncation=bool(doc.get("allow_truncation", False)),
        equivariant=equivariant,
    )


# -- disc maps ----------------------------------------------------------------------


def dump_series(s: FormalSeries) -> dict:
    return {
        "cutoff": format_rational(s.cutoff),
        "terms": [[format_rational(e), format_rational(c)] for e, c in s.terms],
    }


def load_series(doc: Mapping) -> FormalSeries:
    return FormalSeries.make(
        {parse_rational(e): parse_rational(c) for e, c in doc.get("terms", [])},
        parse_rational(doc["cutoff"]),
    )


def dump_discmap(d: DiscMap) -> dict:
    return {
        "schema": f"discmap/{SCHEMA_VERSION}",
        "ring": dump_ring(d.ring),
        "series": [dump_series(s) for s in d.series],
    }


def load_discmap(doc: Mapping) -> DiscMap:
    doc = _expect(doc, "discmap")
    ring = load_ring(doc["ring"])
    return DiscMap(ring, tuple(load_series(s) for s in doc["series"]))


# -- validation entry point ------------------------------------------------------------


_LOADERS = {
    "grading": load_grading,
    "cone": load_cone,
    "divisors": load_divisors,
    "ambient": load_ambient,
    "fan": load_fan,
    "ring": load_ring,
    "algebra": load_algebra,
    "deformation": load_deformation,
    "versal-problem": load_versality_problem,
    "discmap": load_discmap,
}


def validate_document(doc: Mapping) -> dict:
    """Schema + invariant diagnostics without running anything downstream."""
    kind = schema_kind(doc)
    if kind not in _LOADERS and kind != "scenario":
        return {
            "ok": False,
            "kind": kind or None,
            "diagnostics": [f"unknown schema {doc.get('schema')!r}"],
        }
    if kind == "scenario":
        from .scenario import validate_scenario

        return validate_scenario(doc)
    diagnostics = []
    try:
        obj = _LOADERS[kind](doc)
    except (ValueError, KeyError, TypeError) as err:
        return {"ok": False, "kind": kind, "diagnostics": [str(err)]}
    if kind == "algebra":
        from .ainf import check_relations

        report = check_relations(obj)
        if not report.ok:
            diagnostics.append("A-infinity relations fail; see residues")
            diagnostics.extend(str(r) for r in report.residues[:5])
    if kind == "ring":
        for p in range(obj.n_vars):
            if obj.grading.sign_of(obj.degree(obj.generator_monomial(p))) != 0:
                diagnostics.append(f"generator {p} has odd degree (sigma(f(u_p)) != 0)")
    return {"ok": not diagnostics, "kind": kind, "diagnostics": diagnostics}
