"""Smooth complete fans, piecewise-linear divisor functions, nef/ample tests,
polytope lattice points, and supported linearly-equivalent divisors.

Exact arithmetic throughout; fans are simplicial and unimodular by contract.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import floor
from typing import Sequence

from .cones import polytope_vertices
from .rationals import dot, primitive, rank, solve_linear

IntVec = tuple[int, ...]


def _det(matrix: list[list[int]]) -> int:
    """Integer determinant by fraction-free expansion (desk scale)."""
    n = len(matrix)
    if n == 0:
        return 1
    if n == 1:
        return matrix[0][0]
    total = 0
    for j in range(n):
        if matrix[0][j] == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in matrix[1:]]
        total += (-1) ** j * matrix[0][j] * _det(minor)
    return total


@dataclass(frozen=True)
class Fan:
    """A complete, non-singular (unimodular simplicial) fan."""

    lattice_rank: int
    rays: tuple[IntVec, ...]
    max_cones: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = self.lattice_rank
        rays = tuple(primitive(r) for r in self.rays)
        object.__setattr__(self, "rays", rays)
        object.__setattr__(
            self, "max_cones", tuple(tuple(sorted(c)) for c in self.max_cones)
        )
        for r in rays:
            if len(r) != n:
                raise ValueError("ray has wrong length")
        seen = set()
        for c in self.max_cones:
            if len(set(c)) != n:
                raise ValueError(f"max cone {c} is not simplicial of full dimension")
            if any(i < 0 or i >= len(rays) for i in c):
                raise ValueError("ray index out of range")
            if c in seen:
                raise ValueError("duplicate max cone")
            seen.add(c)
            d = _det([list(rays[i]) for i in c])
            if abs(d) != 1:
                raise ValueError(f"max cone {c} is not unimodular (det {d})")
        self._check_complete()

    def _check_complete(self):
        """Every ridge shared by exactly two max cones, and the wall graph connected."""
        n = self.lattice_rank
        if n == 1:
            covered = {tuple(self.rays[i] for i in c) for c in self.max_cones}
            dirs = {r[0] > 0 for c in self.max_cones for r in [self.rays[c[0]]]}
            if dirs != {True, False}:
                raise ValueError("fan does not cover R^1")
            return
        ridges: dict[tuple[int, ...], list[int]] = {}
        for ci, c in enumerate(self.max_cones):
            for facet in itertools.combinations(c, n - 1):
                ridges.setdefault(tuple(facet), []).append(ci)
        for facet, owners in ridges.items():
            if len(owners) != 2:
                raise ValueError(
                    f"ridge {facet} belongs to {len(owners)} max cones; fan is not complete"
                )
        # wall-adjacency graph must be connected
        adj: dict[int, set[int]] = {i: set() for i in range(len(self.max_cones))}
        for owners in ridges.values():
            a, b = owners
            adj[a].add(b)
            adj[b].add(a)
        seen = {0}
        stack = [0]
        while stack:
            cur = stack.pop()
            for nb in adj[cur]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        if len(seen) != len(self.max_cones):
            raise ValueError("fan support is disconnected; fan is not complete")
        # deterministic sample coverage cross-check
        for sample in self._sample_points():
            if self.cone_containing(sample) is None:
                raise ValueError(f"sample point {sample} not covered; fan is not complete")

    def _sample_points(self) -> list[tuple[Fraction, ...]]:
        n = self.lattice_rank
        base = [Fraction(1, k + 2) for k in range(n)]
        pts = []
        for signs in itertools.product((1, -1), repeat=n):
            pts.append(tuple(s * b for s, b in zip(signs, base)))
        return pts

    def cone_containing(self, v: Sequence) -> tuple[int, ...] | None:
        """First max cone (in storage order) containing v, with its coefficients."""
        for c in self.max_cones:
            coords = self._cone_coords(c, v)
            if coords is not None and all(x >= 0 for x in coords):
                return c
        return None

    def _cone_coords(self, cone_idx: tuple[int, ...], v: Sequence):
        cols = [self.rays[i] for i in cone_idx]
        matrix = [[Fraction(cols[j][i]) for j in range(len(cols))] for i in range(self.lattice_rank)]
        return solve_linear(matrix, [Fraction(x) for x in v])

    @cached_property
    def walls(self) -> list[tuple[tuple[int, ...], int, int]]:
        """(ridge ray indices, cone index a, cone index b) per interior wall."""
        n = self.lattice_rank
        ridges: dict[tuple[int, ...], list[int]] = {}
        for ci, c in enumerate(self.max_cones):
            if n == 1:
                ridges.setdefault((), []).append(ci)
                continue
            for facet in itertools.combinations(c, n - 1):
                ridges.setdefault(tuple(facet), []).append(ci)
        return [(f, o[0], o[1]) for f, o in sorted(ridges.items()) if len(o) == 2]


def _linear_form_on_cone(fan: Fan, cone_idx: tuple[int, ...], a: Sequence[int]) -> tuple[Fraction, ...]:
    """The unique linear form with value -a_p on each ray of the cone."""
    rows = [list(fan.rays[i]) for i in cone_idx]
    rhs = [Fraction(-a[i]) for i in cone_idx]
    sol = solve_linear(rows, rhs)
    assert sol is not None  # unimodular cones always solve
    return sol


def pl_function_value(fan: Fan, a: Sequence[int], v: Sequence) -> Fraction:
    """Value at v of the PL function linear on cones with value -a_p on ray p."""
    if len(a) != len(fan.rays):
        raise ValueError("divisor needs one coefficient per ray")
    c = fan.cone_containing(v)
    if c is None:
        raise ValueError(f"point {v} is not covered by the fan")
    form = _linear_form_on_cone(fan, c, a)
    return dot(form, [Fraction(x) for x in v])


def _wall_comparisons(fan: Fan, a: Sequence[int]):
    """Yield (linear extension value, true value) across each wall."""
    for facet, ca, cb in fan.walls:
        for src, dst in ((ca, cb), (cb, ca)):
            form = _linear_form_on_cone(fan, fan.max_cones[src], a)
            other = [i for i in fan.max_cones[dst] if i not in facet]
            for i in other:
                ext = dot(form, [Fraction(x) for x in fan.rays[i]])
                yield ext, Fraction(-a[i])


def is_nef(fan: Fan, a: Sequence[int]) -> bool:
    """Convexity of the PL function across every wall."""
    return all(ext >= true for ext, true in _wall_comparisons(fan, a))


def is_ample(fan: Fan, a: Sequence[int]) -> bool:
    """Strict convexity across every wall."""
    return all(ext > true for ext, true in _wall_comparisons(fan, a))


def polytope_lattice_points(fan: Fan, a: Sequence[int]) -> list[IntVec]:
    """All lattice points u with <u, v_p> >= -a_p for every ray p."""
    n = fan.lattice_rank
    ineqs = [(tuple(r), int(ap)) for r, ap in zip(fan.rays, a, strict=True)]
    if rank([r for r, _ in ineqs]) < n:
        raise ValueError("polytope is unbounded: rays do not span")
    # completeness of the fan means the rays positively span, so P_a is bounded
    verts = polytope_vertices(ineqs, n)
    if not verts:
        return []
    lo = [floor(min(v[i] for v in verts)) for i in range(n)]
    hi = [floor(max(v[i] for v in verts)) for i in range(n)]
    pts = []
    for u in itertools.product(*[range(lo[i], hi[i] + 1) for i in range(n)]):
        if all(dot(u, r) >= -ap for r, ap in ineqs):
            pts.append(u)
    return sorted(pts)


def supported_equivalent_divisor(
    fan: Fan, a: Sequence[int], k_set: Sequence[int], k_max: int = 12
) -> dict:
    """Smallest k with a lattice point of P_{k a} on all facets indexed by K.

    Returns k, the lexicographically smallest such point m, and the effective
    divisor b with b_p = <m, v_p> + k a_p (so b_p = 0 on K).
    """
    if not is_nef(fan, a):
        raise ValueError("divisor must be nef (semi-ample)")
    k_set = sorted(set(k_set))
    for k in range(1, k_max + 1):
        ka = [k * x for x in a]
        pts = polytope_lattice_points(fan, ka)
        on_face = [
            m for m in pts if all(dot(m, fan.rays[p]) == -ka[p] for p in k_set)
        ]
        if on_face:
            m = min(on_face)
            b = tuple(dot(m, r) + kap for r, kap in zip(fan.rays, ka))
            return {"k": k, "point": m, "b": b}
    raise ValueError(f"no k <= {k_max} admits a lattice point on the requested facets")


def projective_plane_fan() -> Fan:
    return Fan(2, ((1, 0), (0, 1), (-1, -1)), ((0, 1), (1, 2), (0, 2)))


def product_of_lines_fan() -> Fan:
    return Fan(
        2,
        ((1, 0), (-1, 0), (0, 1), (0, -1)),
        ((0, 2), (2, 1), (1, 3), (3, 0)),
    )
