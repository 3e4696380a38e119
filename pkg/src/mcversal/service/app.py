"""FastAPI service wrapping the core package.

Every endpoint is a pure function of its request body; nothing is persisted
server-side, so responses are byte-deterministic for identical requests.
Input errors surface as 422 (schema envelope) or 400 (document contents);
hypothesis failures are 200 responses with status "hypothesis-failed" so that
clients can read the witness.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import schemas
from ..ainf import check_relations
from ..cones import is_amb_nice, is_nice, positivity_class
from ..coeff_ring import certify_nice
from ..scenario import run_scenario
from ..versality import (
    NotClosed,
    NotInSpan,
    VersalityError,
    completeness_report,
    versal_match,
)
from . import models

SERVICE_NAME = "mcversal"

app = FastAPI(
    title="mcversal service",
    description=(
        "Exact-arithmetic computations for graded deformations over cone "
        "coefficient rings: cone and ring certificates, toric criteria, "
        "Hochschild pieces, Maurer-Cartan checks, versality matching, and "
        "flat-coordinate calculus."
    ),
)


def _bad_request(err: Exception):
    raise HTTPException(status_code=400, detail=str(err))


@app.get("/health", response_model=models.HealthResponse)
def health():
    return models.HealthResponse(
        status="ok", name=SERVICE_NAME, schema_version=schemas.SCHEMA_VERSION
    )


@app.post("/validate", response_model=models.ValidateResponse)
def validate(req: models.ValidateRequest):
    out = schemas.validate_document(req.document)
    return models.ValidateResponse(**out)


@app.post("/cones/check-nice", response_model=models.ConesCheckNiceResponse)
def cones_check_nice(req: models.ConesCheckNiceRequest):
    try:
        cone = schemas.load_cone(req.cone)
        dc = schemas.load_divisors(req.divisors)
        if req.ambient is not None:
            amb = schemas.load_ambient(req.ambient)
            report = is_amb_nice(cone, dc, amb)
        else:
            report = is_nice(cone, dc)
        positivity = positivity_class(cone, dc)
    except (ValueError, KeyError, TypeError) as err:
        _bad_request(err)
    body = report.to_dict()
    return models.ConesCheckNiceResponse(positivity=positivity, **body)


@app.post("/cones/dual", response_model=models.ConesDualResponse)
def cones_dual(req: models.ConesDualRequest):
    try:
        cone = schemas.load_cone(req.cone)
    except (ValueError, KeyError, TypeError) as err:
        _bad_request(err)
    return models.ConesDualResponse(cone=schemas.dump_cone(cone.dual()))


@app.post("/toric/query", response_model=models.ToricResponse)
def toric_query(req: models.ToricRequest):
    from ..scenario import _step_toric

    try:
        report = _step_toric(
            {
                "fan": req.fan,
                "a": req.a,
                "query": req.query,
                "k_set": req.k_set,
                "k_max": req.k_max,
            }
        )
    except (ValueError, KeyError, TypeError) as err:
        _bad_request(err)
    return models.ToricResponse(report=report)


@app.post("/ring/certify", response_model=models.RingCertifyResponse)
def ring_certify(req: models.RingCertifyRequest):
    try:
        ring = schemas.load_ring(req.ring)
    except (ValueError, KeyError, TypeError) as err:
        _bad_request(err)
    report = certify_nice(ring)
    return models.RingCertifyResponse(**report.to_dict())


@app.post("/ainf/check", response_model=models.AinfCheckResponse)
def ainf_check(req: models.AinfCheckRequest):
    try:
        st = schemas.load_algebra(req.algebra)
    except (ValueError, KeyError, TypeError) as err:
        _bad_request(err)
    report = check_relations(st)
    return models.AinfCheckResponse(**report.to_dict())


@app.post("/hh/compute", response_model=models.HHComputeResponse)
def hh_compute(req: models.HHComputeRequest):
    from ..hochschild import cohomology

    try:
        st = schemas.load_algebra(req.algebra)
        if req.twist is not None:
            ring = schemas.load_ring(req.twist["ring"])
            lo, hi = (int(x) for x in req.twist.get("band", [1, 1]))
            blocks = {}
            for u in ring.monomials:
                k = ring.madic_order(u)
                if lo <= k <= hi:
                    degree = st.grading.sub(
                        st.grading.reduce(tuple(int(x) for x in req.degree)),
                        ring.degree(u),
                    )
                    piece = cohomology(
                        st,
                        degree,
                        functional=tuple(req.functional) if req.functional else None,
                        allow_truncation=req.allow_truncation,
                    )
                    blocks[str(list(u))] = {
                        "dim": piece.dim,
                        "truncated": piece.truncated,
                        "representatives": [
                            schemas.dump_field_cochain(z) for z in piece.representatives
                        ],
                    }
            return models.HHComputeResponse(
                report={"twisted": True, "blocks": blocks}
            )
        piece = cohomology(
            st,
            tuple(int(x) for x in req.degree),
            functional=tuple(req.functional) if req.functional else None,
            allow_truncation=req.allow_truncation,
        )
    except (ValueError, KeyError, TypeError) as err:
        _bad_request(err)
    return models.HHComputeResponse(
        report={
            "twisted": False,
            "dim": piece.dim,
            "truncated": piece.truncated,
            "max_len": piece.max_len,
            "representatives": [
                schemas.dump_field_cochain(z) for z in piece.representatives
            ],
        }
    )


@app.post("/deform/check", response_model=models.DeformResponse)
def deform_check(req: models.DeformRequest):
    from ..scenario import _step_deform_check

    try:
        report = _step_deform_check({"deformation": req.deformation})
    except (ValueError, KeyError, TypeError) as err:
        _bad_request(err)
    return models.DeformResponse(report=report)


@app.post("/deform/gauge", response_model=models.DeformResponse)
def deform_gauge(req: models.DeformRequest):
    from ..scenario import _step_deform_gauge

    if req.gamma is None:
        raise HTTPException(status_code=422, detail="gamma cochain required")
    try:
        report = _step_deform_gauge(
            {"deformation": req.deformation, "gamma": req.gamma}
        )
    except (ValueError, KeyError, TypeError) as err:
        _bad_request(err)
    return models.DeformResponse(report=report)


@app.post("/deform/bc", response_model=models.DeformResponse)
def deform_bc(req: models.DeformRequest):
    from ..scenario import _step_deform_bc

    if req.bounding_cochain is None:
        raise HTTPException(status_code=422, detail="bounding cochain required")
    try:
        report = _step_deform_bc(
            {"deformation": req.deformation, "bounding_cochain": req.bounding_cochain}
        )
    except (ValueError, KeyError, TypeError) as err:
        _bad_request(err)
    return models.DeformResponse(report=report)


@app.post("/versal/match", response_model=models.VersalMatchResponse)
def versal_match_endpoint(req: models.VersalMatchRequest):
    try:
        problem = schemas.load_versality_problem(req.problem)
    except (ValueError, KeyError, TypeError) as err:
        _bad_request(err)
    try:
        completeness = completeness_report(problem)
        if req.completeness_only:
            return models.VersalMatchResponse(status="ok", completeness=completeness)
        cert = versal_match(problem)
    except (NotInSpan, NotClosed) as err:
        return models.VersalMatchResponse(
            status="hypothesis-failed",
            error=str(err),
            witness={
                "order": getattr(err, "order", None),
                "monomial": list(getattr(err, "monomial", ()) or ()),
            },
        )
    except VersalityError as err:
        return models.VersalMatchResponse(status="hypothesis-failed", error=str(err))
    return models.VersalMatchResponse(
        status="ok", certificate=cert.to_dict(), completeness=completeness
    )


@app.post("/flat/query", response_model=models.FlatResponse)
def flat_query(req: models.FlatRequest):
    from ..scenario import _step_flat

    step = {
        "discmap": req.discmap,
        "query": req.query,
        "cl_generators": req.cl_generators,
    }
    if req.second is not None:
        step["second"] = req.second
    if req.h1_matrix is not None:
        step["h1_matrix"] = req.h1_matrix
    if req.element is not None:
        step["element"] = req.element
    try:
        report = _step_flat(step)
    except (ValueError, KeyError, TypeError) as err:
        _bad_request(err)
    return models.FlatResponse(report=report)


@app.post("/run", response_model=models.ScenarioResponse)
def run(req: models.ScenarioRequest):
    out = run_scenario(req.scenario)
    return models.ScenarioResponse(**out)
