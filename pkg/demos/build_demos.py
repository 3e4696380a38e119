"""Regenerate the demo documents and golden reports in this directory.

Run from the repository root:  python3 demos/build_demos.py
The goldens are byte-stable: rerunning this script must be a no-op diff.
"""

import json
from fractions import Fraction
from pathlib import Path

from click.testing import CliRunner

from mcversal import schemas
from mcversal.ainf import AinfStructure, Cochain, FieldDomain, Generator
from mcversal.cli import main
from mcversal.coeff_ring import RingAutomorphism, apply_automorphism, smooth_divisor_ring
from mcversal.cones import RationalCone
from mcversal.deformation import RingDeformation, gauge_act
from mcversal.grading import GradingDatum, integer_datum
from mcversal.versality import VersalityProblem

HERE = Path(__file__).parent


def write(path: Path, doc):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def smooth_divisor_demo():
    """x(2), y(3), z(5) with mu2(y,x) = z over k[[q]]: the headline round-trip."""
    out = HERE / "smooth_divisor"
    base = AinfStructure(
        grading=integer_datum(),
        objects=("pt",),
        generators=(
            Generator(0, 0, (2,), "x"),
            Generator(0, 0, (3,), "y"),
            Generator(0, 0, (5,), "z"),
        ),
        domain=FieldDomain(),
        max_length=8,
    )
    base.set_mu({((1, 0), 2): Fraction(1)})
    ring = smooth_divisor_ring(integer_datum(), (0,), 6)
    probe = RingDeformation(
        base, ring, Cochain(base, (1,), {}, domain=FieldDomain(), validate=False)
    )
    q = ring.generator(0)
    alpha = Cochain(probe.lifted, (1,), {((0, 1), 2): q}, domain=probe.lifted.domain)
    d = RingDeformation(base, ring, alpha)
    # known round-trip data: psi0 a unit series, gamma0 along the (x,x) -> y dial
    psi0 = RingAutomorphism(ring, (ring.one() + q + (q * q * q).scale(2),))
    gamma0 = Cochain(
        d.lifted,
        (0,),
        {((0, 0), 1): q + (q * q).scale(Fraction(1, 2))},
        domain=d.lifted.domain,
    )
    beta = Cochain(
        d.lifted,
        d.alpha.degree,
        {k: apply_automorphism(psi0, c) for k, c in d.alpha.components.items()},
        domain=d.lifted.domain,
    )
    beta = gauge_act(d.lifted, gamma0, beta)
    deformation_doc = schemas.dump_deformation(d)
    write(out / "algebra.json", schemas.dump_algebra(base))
    write(out / "ring.json", schemas.dump_ring(ring))
    write(out / "deformation.json", deformation_doc)
    problem_doc = {
        "schema": "versal-problem/1",
        "deformation": deformation_doc,
        "beta": schemas.dump_ring_cochain(beta),
        "hh_functional": [1],
    }
    write(out / "problem.json", problem_doc)
    scenario = {
        "schema": "scenario/1",
        "seed": 1,
        "steps": [
            {"op": "ainf.check", "algebra": {"$file": "algebra.json"}},
            {"op": "ring.certify", "ring": {"$file": "ring.json"}},
            {"op": "deform.check", "deformation": {"$file": "deformation.json"}},
            {"op": "versal.match", "problem": {"$file": "problem.json"}},
        ],
    }
    write(out / "scenario.json", scenario)
    runner = CliRunner()
    golden = out / "golden_report.json"
    result = runner.invoke(
        main, ["--report", str(golden), "run", str(out / "scenario.json")]
    )
    if result.exit_code != 0:
        raise SystemExit(f"demo scenario failed: {result.output}")


def rank2_demo():
    out = HERE / "rank2"
    g = GradingDatum(rank=2, torsion=(), i_of_one=(1, 0), sigma=(1, 0))
    base = AinfStructure(
        grading=g,
        objects=("pt",),
        generators=(Generator(0, 0, (2, -1), "x"), Generator(0, 0, (2, 1), "y")),
        domain=FieldDomain(),
        max_length=8,
    )
    base.set_mu({})
    ring = TruncatedRing = None
    from mcversal.coeff_ring import TruncatedRing

    ring = TruncatedRing(RationalCone(2, ((1, 0), (0, 1))), g, ((0, 1), (0, -1)), 6)
    probe = RingDeformation(
        base, ring, Cochain(base, g.i_of_one, {}, domain=FieldDomain(), validate=False)
    )
    alpha = Cochain(
        probe.lifted,
        g.i_of_one,
        {((), 0): ring.generator(0), ((), 1): ring.generator(1)},
        domain=probe.lifted.domain,
    )
    d = RingDeformation(base, ring, alpha)
    s = ring.generator(0) * ring.generator(1)
    psi0 = RingAutomorphism(
        ring, (ring.one() + s.scale(2), ring.one() - s)
    )
    beta = Cochain(
        d.lifted,
        d.alpha.degree,
        {k: apply_automorphism(psi0, c) for k, c in d.alpha.components.items()},
        domain=d.lifted.domain,
    )
    problem_doc = {
        "schema": "versal-problem/1",
        "deformation": schemas.dump_deformation(d),
        "beta": schemas.dump_ring_cochain(beta),
        "hh_functional": [1, 0],
    }
    write(out / "problem.json", problem_doc)
    scenario = {
        "schema": "scenario/1",
        "seed": 2,
        "steps": [{"op": "versal.match", "problem": {"$file": "problem.json"}}],
    }
    write(out / "scenario.json", scenario)
    runner = CliRunner()
    golden = out / "golden_report.json"
    result = runner.invoke(
        main, ["--report", str(golden), "run", str(out / "scenario.json")]
    )
    if result.exit_code != 0:
        raise SystemExit(f"rank2 scenario failed: {result.output}")


def toric_demo():
    out = HERE / "toric"
    write(
        out / "p2_fan.json",
        {
            "schema": "fan/1",
            "rays": [[1, 0], [0, 1], [-1, -1]],
            "max_cones": [[0, 1], [1, 2], [0, 2]],
        },
    )
    write(
        out / "p2_boundary_cone.json",
        schemas.dump_cone(RationalCone(3, ((1, 0, 0), (0, 1, 0), (0, 0, 1)))),
    )
    from mcversal.cones import DivisorCombinatorics

    write(
        out / "p2_divisors.json",
        schemas.dump_divisors(
            DivisorCombinatorics(
                n_components=3,
                nonempty_strata=((), (0,), (1,), (2,), (0, 1), (0, 2), (1, 2)),
                h2_matrix=((1, 1, 1),),
                c1_vector=(3,),
                boundary_matrix=((1, -1, 0), (0, 1, -1)),
            )
        ),
    )


if __name__ == "__main__":
    smooth_divisor_demo()
    rank2_demo()
    toric_demo()
    print("demos written under", HERE)
