"""Command-line client for the service.

The CLI is a thin client: every subcommand serializes its input files into a
request and posts it to the FastAPI app — in-process over an ASGI transport by
default (no server needed, fully offline and deterministic), or to a remote
instance given --url.  Exit codes: 0 ok, 2 hypothesis failure, 3 input error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import httpx

EXIT_OK = 0
EXIT_HYPOTHESIS = 2
EXIT_INPUT = 3


def _client(url: str | None) -> httpx.Client:
    if url:
        return httpx.Client(base_url=url.rstrip("/"), timeout=600.0)
    # in-process client against the ASGI app: offline and deterministic
    from fastapi.testclient import TestClient

    from .service.app import app

    return TestClient(app)


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as err:
        click.echo(f"cannot read {path}: {err}", err=True)
        sys.exit(EXIT_INPUT)


def _emit(ctx, payload: dict, summary: str | None = None):
    text = json.dumps(payload, indent=2, sort_keys=True)
    report_path = ctx.obj.get("report")
    if report_path:
        Path(report_path).write_text(text + "\n")
        if summary:
            click.echo(summary)
        click.echo(f"report written to {report_path}")
    else:
        if summary:
            click.echo(summary)
        click.echo(text)


def _post(ctx, endpoint: str, body: dict) -> dict:
    with _client(ctx.obj.get("url")) as client:
        response = client.post(endpoint, json=body)
    if response.status_code == 200:
        return response.json()
    detail = response.json().get("detail", response.text) if response.content else ""
    click.echo(f"error ({response.status_code}): {detail}", err=True)
    sys.exit(EXIT_INPUT)


def _parse_ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip() != ""]


@click.group()
@click.option("--url", default=None, help="Remote service URL (default: in-process).")
@click.option("--report", default=None, type=click.Path(), help="Write the JSON report here.")
@click.option("--seed", default=0, type=int, help="Seed recorded in reports.")
@click.pass_context
def main(ctx, url, report, seed):
    """Exact-arithmetic toolkit for graded deformations over cone rings."""
    ctx.ensure_object(dict)
    ctx.obj["url"] = url
    ctx.obj["report"] = report
    ctx.obj["seed"] = seed


# -- cones ---------------------------------------------------------------------


@main.group()
def cones():
    """Cone certificates."""


@cones.command("check-nice")
@click.argument("cone_file", type=click.Path(exists=True))
@click.argument("divisors_file", type=click.Path(exists=True))
@click.option("--ambient", type=click.Path(exists=True), default=None)
@click.pass_context
def cones_check_nice(ctx, cone_file, divisors_file, ambient):
    body = {"cone": _read_json(cone_file), "divisors": _read_json(divisors_file)}
    if ambient:
        body["ambient"] = _read_json(ambient)
    out = _post(ctx, "/cones/check-nice", body)
    verdict = out["verdict"]
    summary = f"verdict: {verdict}; positivity: {out['positivity']['class']}"
    _emit(ctx, out, summary)
    if verdict == "not_nice":
        sys.exit(EXIT_HYPOTHESIS)


@cones.command("dual")
@click.argument("cone_file", type=click.Path(exists=True))
@click.pass_context
def cones_dual(ctx, cone_file):
    out = _post(ctx, "/cones/dual", {"cone": _read_json(cone_file)})
    _emit(ctx, out)


# -- toric ----------------------------------------------------------------------


@main.group()
def toric():
    """Fans, nef/ample tests, polytopes."""


def _toric_command(ctx, fan_file, a, query, k_set="", k_max=12):
    body = {
        "fan": _read_json(fan_file),
        "a": _parse_ints(a),
        "query": query,
        "k_set": _parse_ints(k_set) if k_set else [],
        "k_max": k_max,
    }
    out = _post(ctx, "/toric/query", body)
    _emit(ctx, out["report"])


@toric.command("nef")
@click.argument("fan_file", type=click.Path(exists=True))
@click.option("-a", "--divisor", "a", required=True, help="Comma-separated coefficients.")
@click.pass_context
def toric_nef(ctx, fan_file, a):
    _toric_command(ctx, fan_file, a, "nef")


@toric.command("ample")
@click.argument("fan_file", type=click.Path(exists=True))
@click.option("-a", "--divisor", "a", required=True)
@click.pass_context
def toric_ample(ctx, fan_file, a):
    _toric_command(ctx, fan_file, a, "ample")


@toric.command("points")
@click.argument("fan_file", type=click.Path(exists=True))
@click.option("-a", "--divisor", "a", required=True)
@click.pass_context
def toric_points(ctx, fan_file, a):
    _toric_command(ctx, fan_file, a, "points")


@toric.command("support")
@click.argument("fan_file", type=click.Path(exists=True))
@click.option("-a", "--divisor", "a", required=True)
@click.option("-K", "--k-set", default="", help="Comma-separated facet indices.")
@click.option("--k-max", default=12, type=int)
@click.pass_context
def toric_support(ctx, fan_file, a, k_set, k_max):
    _toric_command(ctx, fan_file, a, "support", k_set, k_max)


# -- ring --------------------------------------------------------------------------


@main.group()
def ring():
    """Truncated coefficient rings."""


@ring.command("certify")
@click.argument("ring_file", type=click.Path(exists=True))
@click.pass_context
def ring_certify(ctx, ring_file):
    out = _post(ctx, "/ring/certify", {"ring": _read_json(ring_file)})
    _emit(ctx, out, f"nice: {out['nice']}")
    if not out["nice"]:
        sys.exit(EXIT_HYPOTHESIS)


# -- ainf ----------------------------------------------------------------------------


@main.group()
def ainf():
    """A-infinity structures."""


@ainf.command("check")
@click.argument("algebra_file", type=click.Path(exists=True))
@click.pass_context
def ainf_check(ctx, algebra_file):
    out = _post(ctx, "/ainf/check", {"algebra": _read_json(algebra_file)})
    _emit(ctx, out, f"relations ok: {out['ok']}")
    if not out["ok"]:
        sys.exit(EXIT_HYPOTHESIS)


# -- hh ---------------------------------------------------------------------------------


@main.group()
def hh():
    """Hochschild cohomology pieces."""


@hh.command("compute")
@click.argument("algebra_file", type=click.Path(exists=True))
@click.option("--degree", required=True, help="Comma-separated shifted G-degree.")
@click.option("--functional", default=None, help="Finiteness functional on the free part.")
@click.option("--allow-truncation", is_flag=True, default=False)
@click.option("--twist", type=click.Path(exists=True), default=None, help="Twist spec file.")
@click.pass_context
def hh_compute(ctx, algebra_file, degree, functional, allow_truncation, twist):
    body = {
        "algebra": _read_json(algebra_file),
        "degree": _parse_ints(degree),
        "functional": _parse_ints(functional) if functional else None,
        "allow_truncation": allow_truncation,
    }
    if twist:
        body["twist"] = _read_json(twist)
    out = _post(ctx, "/hh/compute", body)
    report = out["report"]
    if report.get("twisted"):
        summary = f"twisted piece dims: " + ", ".join(
            f"{k}: {v['dim']}" for k, v in sorted(report["blocks"].items())
        )
    else:
        summary = f"dim: {report['dim']} (truncated: {report['truncated']})"
    _emit(ctx, report, summary)


# -- deform ---------------------------------------------------------------------------------


@main.group()
def deform():
    """Maurer-Cartan elements, gauges, bounding cochains."""


@deform.command("check")
@click.argument("deformation_file", type=click.Path(exists=True))
@click.pass_context
def deform_check(ctx, deformation_file):
    out = _post(ctx, "/deform/check", {"deformation": _read_json(deformation_file)})
    _emit(ctx, out["report"], f"MC ok: {out['report']['ok']}")
    if not out["report"]["ok"]:
        sys.exit(EXIT_HYPOTHESIS)


@deform.command("gauge")
@click.argument("deformation_file", type=click.Path(exists=True))
@click.argument("gamma_file", type=click.Path(exists=True))
@click.pass_context
def deform_gauge(ctx, deformation_file, gamma_file):
    out = _post(
        ctx,
        "/deform/gauge",
        {"deformation": _read_json(deformation_file), "gamma": _read_json(gamma_file)},
    )
    _emit(ctx, out["report"], f"gauge-acted MC ok: {out['report']['mc_ok']}")


@deform.command("bc")
@click.argument("deformation_file", type=click.Path(exists=True))
@click.argument("bounding_cochain_file", type=click.Path(exists=True))
@click.pass_context
def deform_bc(ctx, deformation_file, bounding_cochain_file):
    out = _post(
        ctx,
        "/deform/bc",
        {
            "deformation": _read_json(deformation_file),
            "bounding_cochain": _read_json(bounding_cochain_file),
        },
    )
    _emit(ctx, out["report"], f"bounding: {out['report']['bounding']}")
    if not out["report"]["bounding"]:
        sys.exit(EXIT_HYPOTHESIS)


# -- versal ------------------------------------------------------------------------------------


@main.group()
def versal():
    """Order-by-order versality matching."""


@versal.command("match")
@click.argument("problem_file", type=click.Path(exists=True))
@click.option("--equivariant", is_flag=True, default=False)
@click.option("--order", default=None, type=int, help="Override the truncation order K.")
@click.option("--completeness-only", is_flag=True, default=False)
@click.pass_context
def versal_match_cmd(ctx, problem_file, equivariant, order, completeness_only):
    problem = _read_json(problem_file)
    if equivariant and not problem.get("action"):
        click.echo("--equivariant requires an action in the problem file", err=True)
        sys.exit(EXIT_INPUT)
    if not equivariant and problem.get("action"):
        problem = dict(problem)
        problem.pop("action")
    if order is not None:
        problem = json.loads(json.dumps(problem))
        problem["deformation"]["ring"]["order"] = order
    out = _post(
        ctx, "/versal/match", {"problem": problem, "completeness_only": completeness_only}
    )
    if out["status"] != "ok":
        _emit(ctx, out, f"hypothesis failed: {out.get('error')}")
        sys.exit(EXIT_HYPOTHESIS)
    if completeness_only:
        _emit(ctx, out["completeness"], f"conclusion: {out['completeness']['conclusion']}")
        return
    cert = out["certificate"]
    summary = (
        f"certificate: versal={cert['versal']} equivariant={cert['equivariant']}; "
        f"conclusion: {out['completeness']['conclusion']}"
    )
    _emit(ctx, out, summary)


# -- flat ----------------------------------------------------------------------------------------


@main.group()
def flat():
    """Disc maps and flat coordinates."""


@flat.command("check")
@click.argument("discmap_file", type=click.Path(exists=True))
@click.option("--cl", required=True, help="Semicolon-separated closed-class monomials, e.g. '1,1;2,2'.")
@click.pass_context
def flat_check(ctx, discmap_file, cl):
    gens = [_parse_ints(part) for part in cl.split(";") if part.strip()]
    out = _post(
        ctx,
        "/flat/query",
        {"discmap": _read_json(discmap_file), "query": "check", "cl_generators": gens},
    )
    _emit(ctx, out["report"], f"flat: {out['report']['flat']}")
    if not out["report"]["flat"]:
        sys.exit(EXIT_HYPOTHESIS)


@flat.command("val")
@click.argument("discmap_file", type=click.Path(exists=True))
@click.pass_context
def flat_val(ctx, discmap_file):
    out = _post(ctx, "/flat/query", {"discmap": _read_json(discmap_file), "query": "val"})
    _emit(ctx, out["report"])


@flat.command("basechange")
@click.argument("discmap_file", type=click.Path(exists=True))
@click.argument("second_file", type=click.Path(exists=True))
@click.option("--h1", required=True, help="Semicolon-separated rows of the H_1 matrix.")
@click.pass_context
def flat_basechange(ctx, discmap_file, second_file, h1):
    rows = [_parse_ints(part) for part in h1.split(";") if part.strip()]
    out = _post(
        ctx,
        "/flat/query",
        {
            "discmap": _read_json(discmap_file),
            "query": "basechange",
            "second": _read_json(second_file),
            "h1_matrix": rows,
        },
    )
    _emit(ctx, out["report"], f"check passed: {out['report']['check_passed']}")


# -- run / validate ----------------------------------------------------------------------------------


def _inline_references(doc, base_dir: Path):
    """Replace {"$file": "relative path"} markers with the file contents."""
    if isinstance(doc, dict):
        if set(doc.keys()) == {"$file"}:
            return json.loads((base_dir / doc["$file"]).read_text())
        return {k: _inline_references(v, base_dir) for k, v in doc.items()}
    if isinstance(doc, list):
        return [_inline_references(v, base_dir) for v in doc]
    return doc


@main.command("run")
@click.argument("scenario_file", type=click.Path(exists=True))
@click.pass_context
def run_cmd(ctx, scenario_file):
    """Execute a scenario (file references are inlined before submission)."""
    doc = _read_json(scenario_file)
    doc = _inline_references(doc, Path(scenario_file).parent)
    if ctx.obj.get("seed") and not doc.get("seed"):
        doc["seed"] = ctx.obj["seed"]
    out = _post(ctx, "/run", {"scenario": doc})
    _emit(ctx, out, f"scenario status: {out['status']}")
    if out["status"] == "hypothesis-failed":
        sys.exit(EXIT_HYPOTHESIS)
    if out["status"] == "input-error":
        sys.exit(EXIT_INPUT)


@main.command("validate")
@click.argument("document_file", type=click.Path(exists=True))
@click.pass_context
def validate_cmd(ctx, document_file):
    """Schema and invariant diagnostics without execution."""
    out = _post(ctx, "/validate", {"document": _read_json(document_file)})
    _emit(ctx, out, f"ok: {out['ok']} (kind: {out.get('kind')})")
    if not out["ok"]:
        sys.exit(EXIT_INPUT)


@main.command("serve")
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8008, type=int)
def serve(host, port):
    """Run the service with uvicorn."""
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
