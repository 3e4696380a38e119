"""Rational polyhedral cones: duals, lattice point enumeration, niceness checks.

All computations are exact.  The single primitive is `dual_generators`, which
turns an inequality description {y : r . y >= 0 for r in rows} into a generator
description; cones store generators and cache their facet normals (= generators
of the dual).  Non-pointed cones are represented with +/- pairs of generators
along the lineality space.

Desk scale: ambient rank <= ~8, <= ~12 rays.  Extreme rays of pointed cones are
enumerated from (r-1)-subsets of the constraints, which is complete because in
a pointed cone every extreme ray is cut out by a rank-(r-1) active set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import ceil, floor
from typing import Iterable, Sequence

from .rationals import (
    dot,
    in_row_span,
    integer_kernel_basis,
    is_zero_vec,
    kernel_basis,
    mat_vec,
    primitive,
    rank,
    scale_to_integer,
    solve_linear,
    vec_add,
    vec_neg,
    vec_sub,
)

IntVec = tuple[int, ...]


def _unit(n: int, i: int) -> IntVec:
    return tuple(1 if j == i else 0 for j in range(n))


def _pointed_cone_rays(constraints: list[IntVec], r: int) -> list[IntVec]:
    """Extreme rays of {x in R^r : a.x >= 0 for a in constraints}.

    Requires the kernel of the constraint matrix to be zero (pointed cone).
    """
    if r == 0:
        return []
    if r == 1:
        lo = any(a[0] > 0 for a in constraints)
        hi = any(a[0] < 0 for a in constraints)
        if lo and hi:
            return []
        return [(1,)] if lo else [(-1,)] if hi else [(1,), (-1,)]
    rays: set[IntVec] = set()
    for subset in itertools.combinations(range(len(constraints)), r - 1):
        sub = [constraints[i] for i in subset]
        ker = integer_kernel_basis(sub, ncols=r)
        if len(ker) != 1:
            continue
        v = primitive(ker[0])
        for cand in (v, vec_neg(v)):
            if all(dot(a, cand) >= 0 for a in constraints):
                rays.add(tuple(cand))
    return sorted(rays)


def dual_generators(rows: Sequence[Sequence[int]], n: int) -> list[IntVec]:
    """Generators of {y in R^n : r . y >= 0 for all r in rows}, exact.

    Lineality directions contribute +/- pairs of generators.
    """
    rows = [primitive(r) for r in rows if not is_zero_vec(r)]
    if not rows:
        gens = [_unit(n, i) for i in range(n)]
        return gens + [vec_neg(g) for g in gens]
    lineality = integer_kernel_basis(rows, ncols=n)
    if lineality:
        # work in coordinates on the saturation of the row space
        complement = integer_kernel_basis(lineality, ncols=n)
    else:
        complement = [_unit(n, i) for i in range(n)]
    r = len(complement)
    constraints = [tuple(dot(g, b) for b in complement) for g in rows]
    rays_x = _pointed_cone_rays(constraints, r)
    rays = []
    for x in rays_x:
        y = tuple(sum(x[j] * complement[j][i] for j in range(r)) for i in range(n))
        rays.append(primitive(y))
    out = rays + [tuple(b) for b in lineality] + [vec_neg(b) for b in lineality]
    return sorted(set(out))


@dataclass(frozen=True)
class RationalCone:
    """The non-negative hull of finitely many integer vectors in Z^n."""

    ambient_rank: int
    generators: tuple[IntVec, ...]

    def __post_init__(self):
        gens = sorted(
            {primitive(g) for g in self.generators if not is_zero_vec(g)}
        )
        for g in gens:
            if len(g) != self.ambient_rank:
                raise ValueError("generator has wrong length")
        object.__setattr__(self, "generators", tuple(gens))

    @staticmethod
    def from_inequalities(rows: Sequence[Sequence[int]], n: int) -> "RationalCone":
        return RationalCone(n, tuple(dual_generators(rows, n)))

    @cached_property
    def facet_normals(self) -> tuple[IntVec, ...]:
        """An inequality description: the cone is {x : d.x >= 0 for d here}."""
        return tuple(dual_generators(self.generators, self.ambient_rank))

    def dual(self) -> "RationalCone":
        return RationalCone(self.ambient_rank, self.facet_normals)

    def contains(self, x: Sequence) -> bool:
        return all(dot(d, x) >= 0 for d in self.facet_normals)

    def contains_interior(self, x: Sequence) -> bool:
        """Membership in the topological interior (empty unless full-dimensional)."""
        if not self.is_full_dimensional():
            return False
        return all(dot(d, x) > 0 for d in self.facet_normals)

    def contains_relative_interior(self, x: Sequence) -> bool:
        """Membership in the relative interior (strict on non-lineality normals)."""
        normals = set(self.facet_normals)
        for d in self.facet_normals:
            paired = vec_neg(d) in normals
            v = dot(d, x)
            if paired:
                if v != 0:
                    return False
            elif v <= 0:
                return False
        return True

    def dim(self) -> int:
        if not self.generators:
            return 0
        return rank(self.generators)

    def is_full_dimensional(self) -> bool:
        return self.dim() == self.ambient_rank

    def is_strongly_convex(self) -> bool:
        """True iff the cone contains no line."""
        gen_set = set(self.generators)
        for g in self.generators:
            if vec_neg(g) in gen_set:
                return False
            if self.contains(vec_neg(g)):
                return False
        return True

    def intersect_coordinate_subspace(self, zero_coords: Iterable[int]) -> "RationalCone":
        """The cone cut by {x_p = 0 : p in zero_coords}."""
        rows = list(self.facet_normals)
        for p in zero_coords:
            e = _unit(self.ambient_rank, p)
            rows.append(e)
            rows.append(vec_neg(e))
        return RationalCone.from_inequalities(rows, self.ambient_rank)

    def same_cone(self, other: "RationalCone") -> bool:
        return all(other.contains(g) for g in self.generators) and all(
            self.contains(g) for g in other.generators
        )

    def image_cone(self, matrix: Sequence[Sequence[int]]) -> "RationalCone":
        """Image under an integer linear map given by rows of `matrix`."""
        m = len(matrix)
        return RationalCone(m, tuple(mat_vec(matrix, g) for g in self.generators))


def polytope_vertices(
    inequalities: Sequence[tuple[IntVec, int]], n: int
) -> list[tuple[Fraction, ...]]:
    """Vertices of {x : a.x >= -b for (a, b) in inequalities}, assumed bounded.

    Brute-force: solve all n-subsets with full rank, keep feasible solutions.
    """
    verts: set[tuple[Fraction, ...]] = set()
    idx = range(len(inequalities))
    for subset in itertools.combinations(idx, n):
        rows = [inequalities[i][0] for i in subset]
        rhs = [Fraction(-inequalities[i][1]) for i in subset]
        if rank(rows) != n:
            continue
        x = solve_linear(rows, rhs)
        if x is None:
            continue
        if all(dot(a, x) >= -b for a, b in inequalities):
            verts.add(tuple(x))
    return sorted(verts)


def enumerate_dual_points(
    cone: RationalCone, bound_functional: Sequence[int], bound: int
) -> list[IntVec]:
    """All u in cone^dual with <bound_functional, u> <= bound, sorted lex.

    bound_functional must be an interior point of `cone` so the slice is compact.
    """
    n = cone.ambient_rank
    if not cone.contains_interior(bound_functional):
        raise ValueError("bound functional must be an interior point of the cone")
    if bound < 0:
        return []
    # the slice {u : g.u >= 0 for generators g, bf.u <= bound} is a polytope
    ineqs: list[tuple[IntVec, int]] = [(g, 0) for g in cone.generators]
    ineqs.append((vec_neg(tuple(bound_functional)), bound))
    verts = polytope_vertices(ineqs, n)
    if not verts:
        return [(0,) * n] if bound >= 0 else []
    lo_i = [floor(min(v[i] for v in verts)) for i in range(n)]
    hi_i = [ceil(max(v[i] for v in verts)) for i in range(n)]
    pts = []
    ranges = [range(lo_i[i], hi_i[i] + 1) for i in range(n)]
    bf = tuple(bound_functional)
    for u in itertools.product(*ranges):
        if dot(bf, u) > bound:
            continue
        if all(dot(g, u) >= 0 for g in cone.generators):
            pts.append(u)
    return sorted(pts)


@dataclass(frozen=True)
class DivisorCombinatorics:
    """Combinatorial shadow of a divisor arrangement.

    nonempty_strata: the subsets K of P = {0..n_components-1} with nonempty
    intersection (must contain the empty set and be closed under subsets).
    h2_matrix: the map R^P -> H^2(ambient space), one row per target coordinate,
    each row of length n_components.
    c1_vector: anticanonical class in the target of h2_matrix.
    boundary_matrix: the map Z^P -> H_1(complement) used to carve out the
    closed-class submonoid (may be empty for trivial H_1).
    """

    n_components: int
    nonempty_strata: tuple[tuple[int, ...], ...]
    h2_matrix: tuple[IntVec, ...]
    c1_vector: IntVec
    boundary_matrix: tuple[IntVec, ...] = ()

    def __post_init__(self):
        strata = {tuple(sorted(set(k))) for k in self.nonempty_strata}
        if () not in strata:
            raise ValueError("the empty stratum must be present")
        for k in strata:
            if any(p < 0 or p >= self.n_components for p in k):
                raise ValueError("stratum index out of range")
            for sub in itertools.chain.from_iterable(
                itertools.combinations(k, r) for r in range(len(k))
            ):
                if tuple(sub) not in strata:
                    raise ValueError("nonempty strata must be closed under subsets")
        object.__setattr__(self, "nonempty_strata", tuple(sorted(strata)))
        object.__setattr__(
            self, "h2_matrix", tuple(tuple(int(x) for x in row) for row in self.h2_matrix)
        )
        object.__setattr__(self, "c1_vector", tuple(int(x) for x in self.c1_vector))
        object.__setattr__(
            self,
            "boundary_matrix",
            tuple(tuple(int(x) for x in row) for row in self.boundary_matrix),
        )
        for row in self.h2_matrix:
            if len(row) != self.n_components:
                raise ValueError("h2_matrix rows must have one entry per component")
        if len(self.h2_matrix) != len(self.c1_vector):
            raise ValueError("c1_vector must live in the target of h2_matrix")
        for row in self.boundary_matrix:
            if len(row) != self.n_components:
                raise ValueError("boundary_matrix rows must have one entry per component")

    @property
    def h2_target_dim(self) -> int:
        return len(self.c1_vector)

    def h2_image(self, v: Sequence[int]) -> IntVec:
        return tuple(mat_vec(self.h2_matrix, v))


def _h2_rows_as_map(dc: DivisorCombinatorics) -> list[IntVec]:
    """h2 as a list of target-coordinate rows acting on R^P."""
    return [tuple(row) for row in dc.h2_matrix]


@dataclass
class StratumReport:
    stratum: tuple[int, ...]
    full_dimensional: bool
    image_matches: bool
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.full_dimensional and self.image_matches


@dataclass
class NicenessReport:
    verdict: str  # "nice" | "not_nice" | "smooth_divisor"
    strata: list[StratumReport]
    notes: list[str]

    @property
    def is_nice(self) -> bool:
        return self.verdict in ("nice", "smooth_divisor")

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "strata": [
                {
                    "stratum": list(s.stratum),
                    "full_dimensional": s.full_dimensional,
                    "image_matches": s.image_matches,
                    "note": s.note,
                    "passed": s.passed,
                }
                for s in self.strata
            ],
            "notes": list(self.notes),
        }


def is_nice(cone: RationalCone, dc: DivisorCombinatorics) -> NicenessReport:
    """Per-stratum full-dimensionality and image checks for niceness."""
    if cone.ambient_rank != dc.n_components:
        raise ValueError("cone must live in R^P")
    notes: list[str] = []
    if dc.n_components == 1:
        return NicenessReport(
            verdict="smooth_divisor",
            strata=[],
            notes=["single component: handled as the smooth-divisor case"],
        )
    if not cone.is_full_dimensional():
        return NicenessReport(
            verdict="not_nice",
            strata=[],
            notes=["cone is not full-dimensional in R^P"],
        )
    h2_rows = _h2_rows_as_map(dc)
    image_all = cone.image_cone(h2_rows)
    reports = []
    for stratum in dc.nonempty_strata:
        k = set(stratum)
        kbar = [p for p in range(dc.n_components) if p not in k]
        sub = cone.intersect_coordinate_subspace(k)
        if kbar:
            sub_rows = [tuple(g[p] for p in kbar) for g in sub.generators]
            full = bool(sub_rows) and rank(sub_rows) == len(kbar)
            note = ""
        else:
            full = True
            note = "K = P convention: vacuously full-dimensional; image condition reads image(N) = {0}"
        image_sub = sub.image_cone(h2_rows)
        matches = image_all.same_cone(image_sub)
        if not matches and not note:
            note = "image of N^K differs from image of N"
        reports.append(StratumReport(tuple(stratum), full, matches, note))
    verdict = "nice" if all(r.passed for r in reports) else "not_nice"
    return NicenessReport(verdict=verdict, strata=reports, notes=notes)


@dataclass(frozen=True)
class AmbientData:
    """Embedding data for a pair sitting inside a larger arrangement.

    i_map[p] = index in P' of the ambient component containing component p.
    P_amb is the (sorted) image of i_map.  h2Y_matrix / c1Y_vector play the role
    of h2_matrix / c1_vector for the ambient space, in coordinates indexed by
    P_amb (rows of h2Y_matrix have one entry per element of P_amb).
    """

    i_map: tuple[int, ...]
    h2Y_matrix: tuple[IntVec, ...]
    c1Y_vector: IntVec

    @property
    def p_amb(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.i_map)))


def ambient_strata(dc: DivisorCombinatorics, amb: AmbientData) -> list[tuple[int, ...]]:
    """Subsets K of P_amb with nonempty ambient stratum meeting the subpair.

    D'_K meets X iff K is contained in i(J) for some nonempty stratum J.
    """
    p_amb = amb.p_amb
    images = {tuple(sorted({amb.i_map[p] for p in j})) for j in dc.nonempty_strata}
    out = set()
    for k_len in range(len(p_amb) + 1):
        for k in itertools.combinations(p_amb, k_len):
            if any(set(k) <= set(img) for img in images):
                out.add(k)
    return sorted(out)


def ambient_cone(cone: RationalCone, amb: AmbientData) -> RationalCone:
    """N_amb = N intersected with the ambient subspace, in P_amb coordinates.

    The ambient subspace of R^P is spanned by w_q = sum of e_p over i(p) = q.
    """
    p_amb = amb.p_amb
    n = cone.ambient_rank
    w = []
    for q in p_amb:
        w.append(tuple(1 if amb.i_map[p] == q else 0 for p in range(n)))
    rows = [tuple(dot(d, wq) for wq in w) for d in cone.facet_normals]
    return RationalCone.from_inequalities(rows, len(p_amb))


def is_amb_nice(
    cone: RationalCone, dc: DivisorCombinatorics, amb: AmbientData
) -> NicenessReport:
    """Ambient analogue of is_nice, run in P_amb coordinates."""
    if len(amb.i_map) != dc.n_components:
        raise ValueError("i_map must have one entry per component")
    p_amb = amb.p_amb
    namb = ambient_cone(cone, amb)
    # N_amb must meet the interior of N; test on the sum of its generators
    if namb.generators:
        w = []
        for q in p_amb:
            w.append(tuple(1 if amb.i_map[p] == q else 0 for p in range(dc.n_components)))
        probe = [0] * dc.n_components
        for g in namb.generators:
            emb = [sum(g[j] * w[j][i] for j in range(len(p_amb))) for i in range(dc.n_components)]
            probe = [a + b for a, b in zip(probe, emb)]
        interior_ok = cone.contains_interior(probe)
    else:
        interior_ok = False
    if not interior_ok:
        raise ValueError("N_amb does not meet the interior of N")
    m = len(p_amb)
    pos = {q: j for j, q in enumerate(p_amb)}
    h2_rows = [
        tuple(amb.h2Y_matrix[j_row][j] for j in range(m))
        for j_row in range(len(amb.h2Y_matrix))
    ]
    image_all = namb.image_cone(h2_rows)
    reports = []
    for stratum in ambient_strata(dc, amb):
        k = {pos[q] for q in stratum}
        kbar = [j for j in range(m) if j not in k]
        sub = namb.intersect_coordinate_subspace(k)
        if kbar:
            sub_rows = [tuple(g[j] for j in kbar) for g in sub.generators]
            full = bool(sub_rows) and rank(sub_rows) == len(kbar)
            note = ""
        else:
            full = True
            note = "K = P_amb convention: vacuously full-dimensional"
        image_sub = sub.image_cone(h2_rows)
        matches = image_all.same_cone(image_sub)
        reports.append(StratumReport(tuple(stratum), full, matches, note))
    verdict = "nice" if all(r.passed for r in reports) else "not_nice"
    return NicenessReport(verdict=verdict, strata=reports, notes=["ambient check"])


def positivity_class(cone: RationalCone, dc: DivisorCombinatorics) -> dict:
    """Classify the anticanonical class against the image of the cone."""
    h2_rows = _h2_rows_as_map(dc)
    image = cone.image_cone(h2_rows)
    c1 = tuple(dc.c1_vector)
    calabi_yau = is_zero_vec(c1)
    semi_positive = image.contains(c1)
    positive = (not calabi_yau) and image.contains_relative_interior(c1)
    if calabi_yau:
        klass = "calabi_yau"
    elif positive:
        klass = "positive"
    elif semi_positive:
        klass = "semi_positive"
    else:
        klass = "none"
    return {
        "class": klass,
        "positive": positive,
        "calabi_yau": calabi_yau,
        "semi_positive": semi_positive or calabi_yau,
        "note": "positive implies semi_positive; calabi_yau means c1 = 0",
    }


def default_interior_point(cone: RationalCone) -> IntVec:
    """Sum of the generators: interior whenever the cone is full-dimensional."""
    if not cone.generators:
        raise ValueError("cone has no generators")
    total = cone.generators[0]
    for g in cone.generators[1:]:
        total = vec_add(total, g)
    return total


def extremal_face_check(
    cone: RationalCone,
    k: Sequence[int],
    bound_functional: Sequence[int] | None = None,
    bound: int | None = None,
) -> bool:
    """Test that R^K meets the dual monoid in an extremal face, exhaustively.

    Checks on the enumerated monoid: v + w supported on K with v, w in NE
    forces v and w supported on K.  The enumeration bound defaults to a small
    multiple of the interior-functional values of the monoid generators.
    """
    k = set(k)
    if bound_functional is None:
        bound_functional = default_interior_point(cone)
    if bound is None:
        mins = [dot(bound_functional, g) for g in cone.dual().generators]
        pos = [m for m in mins if m > 0]
        bound = 4 * max(pos) if pos else 4
    pts = enumerate_dual_points(cone, bound_functional, bound)
    pts_set = set(pts)
    nonzero = [p for p in pts if not is_zero_vec(p)]
    for v in nonzero:
        for w in nonzero:
            s = vec_add(v, w)
            if s not in pts_set:
                continue
            if all(s[p] == 0 for p in range(cone.ambient_rank) if p not in k):
                if any(v[p] != 0 for p in range(cone.ambient_rank) if p not in k):
                    return False
                if any(w[p] != 0 for p in range(cone.ambient_rank) if p not in k):
                    return False
    return True


def build_nice_cone(
    dc: DivisorCombinatorics,
    target_class: Sequence,
    candidate_pool: Sequence[Sequence],
    max_perturbation_steps: int = 6,
) -> tuple[RationalCone, NicenessReport]:
    """Span a cone from the pool (plus perturbations of the target) and re-check.

    The pool is expected to contain, per stratum K, classes supported on the
    complement of K with the right images; when it does the result is nice.
    Niceness failure is reported, not raised; a target outside the interior of
    the final cone is an error.
    """
    if not candidate_pool:
        raise ValueError("candidate pool is empty")
    n = dc.n_components
    pool = [scale_to_integer(v) for v in candidate_pool]
    target = tuple(Fraction(x) for x in target_class)
    cone = RationalCone(n, tuple(pool))
    if not cone.contains_interior(target):
        chosen = None
        for j in range(1, max_perturbation_steps + 1):
            eps = Fraction(1, 2**j)
            pert = []
            for p in range(n):
                e = _unit(n, p)
                pert.append(scale_to_integer([t + eps * u for t, u in zip(target, e)]))
                pert.append(scale_to_integer([t - eps * u for t, u in zip(target, e)]))
            cand = RationalCone(n, tuple(pool + pert))
            if cand.contains_interior(target):
                chosen = cand
                if is_nice(cand, dc).is_nice:
                    break
        if chosen is None:
            raise ValueError("target class is not interior to any perturbed cone")
        cone = chosen
    report = is_nice(cone, dc)
    if not cone.contains_interior(target):
        raise ValueError("target class is not interior to the constructed cone")
    return cone, report
