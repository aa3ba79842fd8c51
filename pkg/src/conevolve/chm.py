"""Convex hull method: polytope projection by LP-driven inner bounds.

The inner bound B (a polytope in the k projection coordinates) is kept as
the polar of its homogenization, a pointed cone C in R^(k+1):

* each vertex v of B is a row -(1, v) of C,
* each facet a.x >= b of B is a ray (b, -a) of C.

Adding an LP-discovered boundary point is then a single DD step on C, and
the facets of the grown hull are read back off the rays.  Every facet of the
final hull is certified terminal by an LP over the parent whose optimum
equals the facet offset exactly.
"""

from __future__ import annotations

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import lp
from .dd import Cone
from .errors import (
    InfeasibleParent,
    PointsAffinelyDependent,
    ProjectionNotFullDimensional,
    UnboundedParent,
    VertexInsideHull,
)
from .polyhedra import (
    DDPair,
    HRepresentation,
    LinearInequality,
    canonical_line,
    canonicalize_inequality,
    make_dd_pair,
)
from .rational import Q, dot, invert, nullspace, primitive, rank, rat, vec


def vertex_of_row(row) -> tuple:
    """Recover the inner-bound vertex from its polar row -(1, v) (scaled)."""
    r0 = rat(row[0])
    return tuple(rat(c) / r0 for c in row[1:])


def ineq_of_ray(ray) -> LinearInequality:
    """Inner-bound facet a.x >= b encoded by the polar ray (b, -a)."""
    return canonicalize_inequality(
        LinearInequality(tuple(-c for c in ray[1:]), rat(ray[0]))
    )


def ray_of_ineq(row: LinearInequality) -> tuple:
    return primitive((rat(row.offset),) + tuple(-c for c in row.normal))


def polar_row_of_point(point) -> tuple[int, ...]:
    return primitive((-1,) + tuple(-rat(c) for c in point))


class InnerBound:
    """DD state of the current inner bound plus facet terminal flags."""

    def __init__(self, k: int, cone: Cone, terminal=None):
        self.k = k
        self.cone = cone
        self.terminal: dict[tuple, bool] = dict(terminal or {})
        for ray in cone.rays:
            self.terminal.setdefault(ray, False)

    @property
    def facet_rays(self) -> list[tuple]:
        return list(self.cone.rays)

    def facets(self) -> list[LinearInequality]:
        return sorted(ineq_of_ray(r) for r in self.cone.rays)

    def vertices(self) -> list[tuple]:
        """Vertices of the hull: rows of C whose tight rays span a facet of C."""
        out = []
        for i, row in enumerate(self.cone.rows):
            tight = [self.cone.rays[j] for j in range(len(self.cone.rays))
                     if self.cone.inc[j] >> i & 1]
            if rank(tight) == self.k:
                out.append(vertex_of_row(row))
        return sorted(set(out))

    def contains(self, point) -> bool:
        return all(ineq_of_ray(r).evaluate(point) >= 0 for r in self.cone.rays)

    def insert_vertex(self, point):
        """One DD step adding the point; returns (pos, neg, zero) facet rays."""
        row = polar_row_of_point(point)
        if row in set(self.cone.rows):
            raise VertexInsideHull(f"{point} is already a vertex")
        pos, neg, zero = self.cone.insert(row)
        if not neg:
            raise VertexInsideHull(f"{point} violates no facet of the inner bound")
        for r in neg:
            self.terminal.pop(r, None)
        for r in self.cone.rays:
            self.terminal.setdefault(r, False)
        return pos, neg, zero

    def snapshot(self) -> DDPair:
        return self.cone.to_dd_pair()


@dataclass(frozen=True)
class ProjectionStats:
    """LP accounting for a projection run.

    ``vertex_lps`` counts LPs that discovered a new hull vertex (for the
    symmetric variant: a new vertex orbit); ``facet_lps`` is every other LP
    (terminal certifications and rejected candidates).
    """

    vertex_lps: int
    facet_lps: int
    dd_steps: int

    @property
    def total_lps(self) -> int:
        return self.vertex_lps + self.facet_lps


@dataclass(frozen=True)
class ProjectionResult:
    """Exact DD description of the projected polytope."""

    h: HRepresentation            # facets, including any bounding row
    vertices: tuple               # vertices of the projection
    polar_cone: DDPair            # the homogenized-polar bookkeeping cone
    stats: ProjectionStats

    def dd(self) -> DDPair:
        """DD pair of the projection's homogenization."""
        rows = [LinearInequality((-rat(r.offset),) + tuple(r.normal), 0)
                for r in self.h.inequalities]
        h = HRepresentation.of(self.h.dim + 1, rows)
        rays = [(1,) + tuple(v) for v in self.vertices]
        return make_dd_pair(h, rays)


class _Parent:
    """Parent polyhedron with a warm-started solver and an LP call counter."""

    def __init__(self, parent: HRepresentation, k: int):
        if not 1 <= k <= parent.dim:
            raise ValueError("projection dimension out of range")
        self.h = parent
        self.k = k
        self.system = lp.LinearSystem(parent)
        self.lp_calls = 0
        self.vertex_lps = 0

    def pad(self, c) -> tuple:
        return tuple(c) + (0,) * (self.h.dim - self.k)

    def minimize(self, c_k):
        self.lp_calls += 1
        out = self.system.minimize(vec(self.pad(c_k)))
        if out.status == lp.INFEASIBLE:
            raise InfeasibleParent("parent polyhedron is empty")
        if out.status == lp.UNBOUNDED:
            raise UnboundedParent(
                "parent polyhedron is unbounded; apply boundedness_transform first"
            )
        return out


def extreme_point(parent: HRepresentation, c) -> tuple:
    """Projection of the parent vertex minimizing [c, 0...].x."""
    par = parent if isinstance(parent, _Parent) else _Parent(parent, len(c))
    out = par.minimize(vec(c))
    return tuple(out.primal_vertex[: par.k])


def hyperplane(points) -> tuple:
    """Canonical normal of a hyperplane containing all the points."""
    pts = [vec(p) for p in points]
    k = len(pts[0])
    if not 2 <= len(pts) <= k:
        raise PointsAffinelyDependent("need between 2 and k points")
    diffs = [tuple(a - b for a, b in zip(p, pts[0])) for p in pts[1:]]
    if rank(diffs) < len(pts) - 1:
        raise PointsAffinelyDependent("points are affinely dependent")
    basis = nullspace(diffs, k)
    if not basis:
        raise PointsAffinelyDependent("points already span the space")
    return canonical_line(basis[0])


def facets_from_simplex(points) -> HRepresentation:
    """Facet inequalities of a simplex on k+1 affinely independent points.

    Inverts the homogenized point matrix; the inverse's columns are the rays
    of the simplex's homogenized polar, i.e. its facets.
    """
    pts = [vec(p) for p in points]
    k = len(pts[0])
    if len(pts) != k + 1:
        raise PointsAffinelyDependent(f"need exactly {k + 1} points")
    cone = _simplex_cone(pts)
    return HRepresentation.of(k, [ineq_of_ray(r) for r in cone.rays])


def _simplex_cone(pts) -> Cone:
    k = len(pts[0])
    rows = [polar_row_of_point(p) for p in pts]
    try:
        return Cone.from_simplicial_rows(k + 1, rows)
    except ValueError:
        raise PointsAffinelyDependent("points are affinely dependent")


def _affinely_independent(points, candidate) -> bool:
    if not points:
        return True
    diffs = [tuple(rat(a) - rat(b) for a, b in zip(p, points[0]))
             for p in points[1:]]
    cand = tuple(rat(a) - rat(b) for a, b in zip(candidate, points[0]))
    return rank(diffs + [cand]) == rank(diffs) + 1


def initial_hull(parent, k: int) -> InnerBound:
    """Full-dimensional simplex of k+1 boundary points of the projection.

    Follows the two-LPs-per-hyperplane search; if neither sign of a
    hyperplane normal yields an affinely independent point the projection is
    flat along that normal and ProjectionNotFullDimensional is raised.
    """
    par = parent if isinstance(parent, _Parent) else _Parent(parent, k)
    e1 = (1,) + (0,) * (k - 1)
    points = [extreme_point(par, e1)]
    par.vertex_lps += 1
    second = extreme_point(par, tuple(-c for c in e1))
    if second == points[0]:
        raise ProjectionNotFullDimensional(
            "projection is a single point along the first axis",
            normal=e1, value=dot(e1, points[0]),
        )
    points.append(second)
    par.vertex_lps += 1
    while len(points) < k + 1:
        normal = hyperplane(points)
        grew = False
        for c in (normal, tuple(-x for x in normal)):
            cand = extreme_point(par, c)
            if _affinely_independent(points, cand):
                points.append(cand)
                par.vertex_lps += 1
                grew = True
                break
        if not grew:
            raise ProjectionNotFullDimensional(
                "projection lies in a hyperplane",
                normal=normal, value=dot(normal, points[0]),
            )
    return InnerBound(k, _simplex_cone(points))


def update_hull(v, bound: InnerBound) -> InnerBound:
    """conv(hull ∪ {v}): removes facets violated by v, adds the new ones."""
    bound.insert_vertex(vec(v))
    return bound


def chm_project(parent: HRepresentation, k: int, threads: int = 1) -> ProjectionResult:
    """Project a bounded polytope onto its first k coordinates, exactly.

    Facets of the growing inner bound are checked in FIFO order of creation
    (canonical order within each batch); a facet whose LP optimum equals its
    offset is terminal, otherwise the optimal parent vertex projects to a new
    hull vertex.  Ends when every facet is terminal.
    """
    par = _Parent(parent, k)
    bound = initial_hull(par, k)
    dd_steps = 0
    queue: deque = deque(sorted(bound.cone.rays))
    while queue:
        batch = []
        live = set(bound.cone.rays)
        while queue and len(batch) < max(1, threads):
            ray = queue.popleft()
            if ray in live and not bound.terminal.get(ray, False):
                batch.append(ray)
        if not batch:
            continue
        facets = {ray: ineq_of_ray(ray) for ray in batch}
        if threads > 1 and len(batch) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                outs = list(pool.map(
                    lambda r: par.minimize(facets[r].normal), batch))
            outcomes = dict(zip(batch, outs))
        else:
            outcomes = {ray: par.minimize(facets[ray].normal) for ray in batch}
        for ray in sorted(batch):
            out = outcomes[ray]
            facet = facets[ray]
            if out.value > facet.offset:  # pragma: no cover - soundness guard
                raise AssertionError("inner bound facet not valid for projection")
            if out.value == facet.offset:
                if ray in set(bound.cone.rays):
                    bound.terminal[ray] = True
                continue
            v = tuple(out.primal_vertex[:k])
            if bound.contains(v):
                # stale batch result: the hull already grew past this point
                if ray in set(bound.cone.rays) and not bound.terminal.get(ray, False):
                    queue.append(ray)
                continue
            par.vertex_lps += 1
            before = set(bound.cone.rays)
            bound.insert_vertex(v)
            dd_steps += 1
            new_rays = sorted(set(bound.cone.rays) - before)
            queue.extend(new_rays)
    h = HRepresentation.of(k, [ineq_of_ray(r) for r in bound.cone.rays])
    vertices = bound.vertices()
    stats = ProjectionStats(par.vertex_lps, par.lp_calls - par.vertex_lps, dd_steps)
    return ProjectionResult(h, tuple(vertices), bound.snapshot(), stats)
