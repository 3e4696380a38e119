"""Scenario runner: a declarative pipeline over inline documents.

A scenario is a JSON document with a list of steps; each step names an
operation and carries the documents it needs (inline — the runner never reads
the filesystem, so the service can execute scenarios too; the CLI inlines any
file references before submitting).  Execution is sequential, deterministic,
and halts at the first hard error; hypothesis failures are reported with their
witnesses and give the run the "hypothesis-failed" status.
"""

from __future__ import annotations

from typing import Any, Mapping

from . import schemas
from .ainf import check_relations
from .cones import is_amb_nice, is_nice, positivity_class
from .deformation import check_mc, deform_by_bounding_cochain, gauge_act, make_bounding_cochain
from .mirror_flat import base_change_iso, evaluate, is_flat, valuation_vector
from .rationals import format_rational
from .toric import is_ample, is_nef, polytope_lattice_points, supported_equivalent_divisor
from .versality import (
    NotClosed,
    NotInSpan,
    VersalityError,
    completeness_report,
    versal_match,
)


class StepError(Exception):
    """Hard input/application error inside a step."""


def _step_cones_check_nice(step: Mapping) -> dict:
    cone = schemas.load_cone(step["cone"])
    dc = schemas.load_divisors(step["divisors"])
    if step.get("ambient") is not None:
        amb = schemas.load_ambient(step["ambient"])
        report = is_amb_nice(cone, dc, amb)
    else:
        report = is_nice(cone, dc)
    out = report.to_dict()
    out["positivity"] = positivity_class(cone, dc)
    return out


def _step_toric(step: Mapping) -> dict:
    fan = schemas.load_fan(step["fan"])
    a = tuple(int(x) for x in step["a"])
    query = step.get("query", "nef")
    if query == "nef":
        return {"nef": is_nef(fan, a)}
    if query == "ample":
        return {"ample": is_ample(fan, a), "nef": is_nef(fan, a)}
    if query == "points":
        pts = polytope_lattice_points(fan, a)
        return {"count": len(pts), "points": [list(p) for p in pts]}
    if query == "support":
        out = supported_equivalent_divisor(
            fan, a, tuple(int(i) for i in step.get("k_set", [])), int(step.get("k_max", 12))
        )
        return {"k": out["k"], "point": list(out["point"]), "b": list(out["b"])}
    raise StepError(f"unknown toric query {query!r}")


def _step_ring_certify(step: Mapping) -> dict:
    from .coeff_ring import certify_nice

    ring = schemas.load_ring(step["ring"])
    report = certify_nice(ring)
    return report.to_dict()


def _step_ainf_check(step: Mapping) -> dict:
    st = schemas.load_algebra(step["algebra"])
    return check_relations(st).to_dict()


def _step_hh_compute(step: Mapping) -> dict:
    from .hochschild import cohomology

    st = schemas.load_algebra(step["algebra"])
    degree = tuple(int(x) for x in step["degree"])
    functional = (
        tuple(int(x) for x in step["functional"]) if step.get("functional") else None
    )
    piece = cohomology(
        st, degree, functional=functional, allow_truncation=bool(step.get("allow_truncation"))
    )
    return {
        "dim": piece.dim,
        "truncated": piece.truncated,
        "max_len": piece.max_len,
        "representatives": [schemas.dump_field_cochain(z) for z in piece.representatives],
    }


def _step_deform_check(step: Mapping) -> dict:
    d = schemas.load_deformation(step["deformation"])
    return check_mc(d.lifted, d.alpha).to_dict()


def _step_deform_gauge(step: Mapping) -> dict:
    d = schemas.load_deformation(step["deformation"])
    gamma = schemas.load_ring_cochain(d.lifted, step["gamma"])
    out = gauge_act(d.lifted, gamma, d.alpha)
    report = check_mc(d.lifted, out)
    return {
        "result": schemas.dump_ring_cochain(out),
        "mc_ok": report.ok,
    }


def _step_deform_bc(step: Mapping) -> dict:
    d = schemas.load_deformation(step["deformation"])
    ring = d.ring
    values = {
        int(gen): schemas.load_ring_element(ring, data)
        for gen, data in step["bounding_cochain"]
    }
    a = make_bounding_cochain(d.lifted, values)
    deformed, curvature = deform_by_bounding_cochain(d, a)
    return {
        "bounding": curvature.is_zero(),
        "residual_curvature": schemas.dump_ring_cochain(curvature),
    }


def _step_versal_match(step: Mapping) -> dict:
    problem = schemas.load_versality_problem(step["problem"])
    if step.get("completeness_only"):
        return completeness_report(problem)
    cert = versal_match(problem)
    out = cert.to_dict()
    out["completeness"] = completeness_report(problem)
    return out


def _step_flat(step: Mapping) -> dict:
    d = schemas.load_discmap(step["discmap"])
    query = step.get("query", "check")
    if query == "val":
        return {"valuation": [format_rational(v) for v in valuation_vector(d)]}
    if query == "check":
        gens = [tuple(int(x) for x in u) for u in step["cl_generators"]]
        return is_flat(d, gens)
    if query == "basechange":
        e = schemas.load_discmap(step["second"])
        h1 = tuple(tuple(int(x) for x in row) for row in step["h1_matrix"])
        return base_change_iso(d, e, h1).to_dict()
    if query == "evaluate":
        x = schemas.load_ring_element(d.ring, step["element"])
        return {"series": schemas.dump_series(evaluate(d, x))}
    raise StepError(f"unknown flat query {query!r}")


def _step_validate(step: Mapping) -> dict:
    return schemas.validate_document(step["document"])


_STEPS = {
    "cones.check_nice": _step_cones_check_nice,
    "toric.query": _step_toric,
    "ring.certify": _step_ring_certify,
    "ainf.check": _step_ainf_check,
    "hh.compute": _step_hh_compute,
    "deform.check": _step_deform_check,
    "deform.gauge": _step_deform_gauge,
    "deform.bc": _step_deform_bc,
    "versal.match": _step_versal_match,
    "flat.query": _step_flat,
    "validate": _step_validate,
}


def validate_scenario(doc: Mapping) -> dict:
    diagnostics = []
    if doc.get("schema") != f"scenario/{schemas.SCHEMA_VERSION}":
        diagnostics.append(f"expected schema 'scenario/{schemas.SCHEMA_VERSION}'")
    steps = doc.get("steps")
    if not isinstance(steps, list):
        diagnostics.append("steps must be a list")
        steps = []
    for i, step in enumerate(steps):
        op = step.get("op")
        if op not in _STEPS:
            diagnostics.append(f"step {i}: unknown op {op!r}")
    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        diagnostics.append("seed must be a non-negative integer")
    return {"ok": not diagnostics, "kind": "scenario", "diagnostics": diagnostics}


def run_scenario(doc: Mapping) -> dict:
    """Execute a scenario; returns {status, steps: [{op, status, report}]}.

    status: "ok" | "hypothesis-failed" | "input-error".
    """
    check = validate_scenario(doc)
    if not check["ok"]:
        return {"status": "input-error", "steps": [], "diagnostics": check["diagnostics"]}
    results = []
    status = "ok"
    for i, step in enumerate(doc.get("steps", [])):
        op = step["op"]
        handler = _STEPS[op]
        try:
            report = handler(step)
            results.append({"op": op, "status": "ok", "report": report})
        except (NotInSpan, NotClosed) as err:
            results.append(
                {
                    "op": op,
                    "status": "hypothesis-failed",
                    "error": str(err),
                    "witness": {
                        "order": getattr(err, "order", None),
                        "monomial": list(getattr(err, "monomial", ()) or []),
                    },
                }
            )
            status = "hypothesis-failed"
            break
        except VersalityError as err:
            results.append({"op": op, "status": "hypothesis-failed", "error": str(err)})
            status = "hypothesis-failed"
            break
        except (StepError, ValueError, KeyError, TypeError) as err:
            results.append({"op": op, "status": "input-error", "error": str(err)})
            status = "input-error"
            break
    return {
        "status": status,
        "seed": doc.get("seed", 0),
        "steps": results,
    }
