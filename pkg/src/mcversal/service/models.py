"""Pydantic request/response models for the compute service.

The payloads are the toolkit's versioned JSON documents (validated in depth by
the loaders); the models pin the envelope shapes and the typed options.
"""

from __future__ import annotations

from typing import Any, Optional

from pydantic import BaseModel, Field


class Document(BaseModel):
    model_config = {"extra": "allow"}

    schema_tag: str = Field(alias="schema")


class ValidateRequest(BaseModel):
    document: dict


class ValidateResponse(BaseModel):
    ok: bool
    kind: Optional[str] = None
    diagnostics: list[str] = []


class ConesCheckNiceRequest(BaseModel):
    cone: dict
    divisors: dict
    ambient: Optional[dict] = None


class ConesCheckNiceResponse(BaseModel):
    verdict: str
    strata: list[dict]
    notes: list[str]
    positivity: dict


class ConesDualRequest(BaseModel):
    cone: dict


class ConesDualResponse(BaseModel):
    cone: dict


class ToricRequest(BaseModel):
    fan: dict
    a: list[int]
    query: str = "nef"
    k_set: list[int] = []
    k_max: int = 12


class ToricResponse(BaseModel):
    report: dict


class RingCertifyRequest(BaseModel):
    ring: dict


class RingCertifyResponse(BaseModel):
    nice: bool
    failures: list[dict]
    distinct_degrees: bool


class AinfCheckRequest(BaseModel):
    algebra: dict


class AinfCheckResponse(BaseModel):
    ok: bool
    curvature_ok: bool
    residues: list[dict]


class HHComputeRequest(BaseModel):
    algebra: dict
    degree: list[int]
    functional: Optional[list[int]] = None
    allow_truncation: bool = False
    twist: Optional[dict] = None


class HHComputeResponse(BaseModel):
    report: dict


class DeformRequest(BaseModel):
    deformation: dict
    gamma: Optional[dict] = None
    bounding_cochain: Optional[list] = None


class DeformResponse(BaseModel):
    report: dict


class VersalMatchRequest(BaseModel):
    problem: dict
    completeness_only: bool = False


class VersalMatchResponse(BaseModel):
    status: str  # "ok" | "hypothesis-failed"
    certificate: Optional[dict] = None
    completeness: Optional[dict] = None
    error: Optional[str] = None
    witness: Optional[dict] = None


class FlatRequest(BaseModel):
    discmap: dict
    query: str = "check"
    cl_generators: list[list[int]] = []
    second: Optional[dict] = None
    h1_matrix: Optional[list[list[int]]] = None
    element: Optional[list] = None


class FlatResponse(BaseModel):
    report: dict


class ScenarioRequest(BaseModel):
    scenario: dict


class ScenarioResponse(BaseModel):
    status: str
    seed: int = 0
    steps: list[dict]
    diagnostics: list[str] = []


class HealthResponse(BaseModel):
    status: str
    name: str
    schema_version: int
