"""Symmetry-exploiting convex hull method.

Keeps only one representative per orbit of vertices and facets of the inner
bound under a known coordinate-permutation symmetry group of the projection.
One LP per vertex orbit replaces one LP per vertex, and each symmetric update
runs one full-size DD step plus a handful of steps on the lower-dimensional
cone obtained by tightening the inserted inequality (the |A| extra steps for
orbit members adjacent to the new vertex).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from . import lp
from .chm import (
    InnerBound,
    ProjectionResult,
    ProjectionStats,
    _Parent,
    ineq_of_ray,
    initial_hull,
    polar_row_of_point,
    vertex_of_row,
)
from .dd import Cone
from .errors import (
    ActionDimensionMismatch,
    GroupDoesNotStabilize,
    NonPermutationAction,
    NotAFacet,
    VertexInsideHull,
)
from .groups import FiniteGroup, Permutation
from .polyhedra import (
    DDPair,
    HRepresentation,
    LinearEquality,
    LinearInequality,
    canonical_ray,
    canonicalize_inequality,
    make_dd_pair,
)
from .rational import Q, dot, primitive, rank, rat, vec


def act_point(g: Permutation, point) -> tuple:
    return g.act_vector(tuple(point))


def act_polar_ray(g: Permutation, ray) -> tuple:
    """Permutations of projection coordinates fix the homogenization coord."""
    return (ray[0],) + g.act_vector(tuple(ray[1:]))


def orbit_of(x, group: FiniteGroup, action) -> list:
    """Orbit by breadth-first closure over the generators."""
    seen = {x}
    frontier = [x]
    while frontier:
        nxt = []
        for y in frontier:
            for g in group.generators:
                z = action(g, y)
                if z not in seen:
                    seen.add(z)
                    nxt.append(z)
        frontier = nxt
    return sorted(seen)


def _check_group(group: FiniteGroup, k: int):
    if not group.is_permutation_group:
        raise NonPermutationAction(
            "only coordinate-permutation groups are supported here"
        )
    if group.degree != k:
        raise ActionDimensionMismatch(
            f"group degree {group.degree} != projection dimension {k}"
        )


@dataclass(frozen=True)
class SymmetricInnerBound:
    """Transversal view of a group-invariant inner bound."""

    k: int
    group: FiniteGroup
    vertex_transversal: tuple          # orbit-min vertices (Q tuples)
    facet_transversal: tuple           # orbit-min polar rays (int tuples)
    terminal: dict                     # facet representative -> bool

    def expand_vertices(self) -> list:
        out = set()
        for v in self.vertex_transversal:
            out.update(orbit_of(tuple(v), self.group, act_point))
        return sorted(out)

    def expand_facet_rays(self) -> list:
        out = set()
        for r in self.facet_transversal:
            out.update(orbit_of(r, self.group, act_polar_ray))
        return sorted(out)

    def facets(self) -> list[LinearInequality]:
        return sorted(ineq_of_ray(r) for r in self.facet_transversal)

    def expanded_cone(self) -> Cone:
        cone = Cone(self.k + 1)
        cone.rows = [polar_row_of_point(v) for v in self.expand_vertices()]
        for ray in self.expand_facet_rays():
            mask = 0
            for i, row in enumerate(cone.rows):
                val = dot(row, ray)
                if val < 0:
                    raise AssertionError("expanded bound is not a valid DD pair")
                if val == 0:
                    mask |= 1 << i
            cone.rays.append(tuple(ray))
            cone.inc.append(mask)
        return cone

    def expanded_inner_bound(self) -> InnerBound:
        bound = InnerBound(self.k, self.expanded_cone())
        for ray in bound.cone.rays:
            rep = min(orbit_of(ray, self.group, act_polar_ray))
            bound.terminal[ray] = self.terminal.get(rep, False)
        return bound


def _transversal_reps(items, group, action) -> list:
    reps = set()
    for x in items:
        reps.add(min(orbit_of(x, group, action)))
    return sorted(reps)


def membership_point(parent: HRepresentation, k: int, point) -> bool:
    """Is the point in the projection of the parent onto the first k coords?"""
    pins = []
    for i, q in enumerate(vec(point)):
        normal = [0] * parent.dim
        normal[i] = 1
        pins.append(LinearEquality(tuple(normal), q))
    system = parent.with_rows(extra_equalities=pins)
    return lp.LinearSystem(system).minimize((0,) * parent.dim).status != lp.INFEASIBLE


def sym_initial_hull(parent, k: int, group: FiniteGroup) -> SymmetricInnerBound:
    """Initial hull symmetrized: every orbit member inserted via DD steps.

    Each generator image of each initial vertex is checked for membership in
    the projection (one small feasibility LP per point); a failure raises
    GroupDoesNotStabilize.
    """
    _check_group(group, k)
    par = parent if isinstance(parent, _Parent) else _Parent(parent, k)
    bound = initial_hull(par, k)
    base_points = [vertex_of_row(r) for r in bound.cone.rows]
    for p in base_points:
        for g in group.generators:
            img = act_point(g, p)
            if img == tuple(p):
                continue
            if not membership_point(par.h, k, img):
                raise GroupDoesNotStabilize(
                    f"generator {g.cycle_notation()} maps {p} outside the projection"
                )
    pending = set()
    for p in base_points:
        pending.update(orbit_of(tuple(p), group, act_point))
    existing = {vertex_of_row(r) for r in bound.cone.rows}
    for p in sorted(pending):
        if p in existing:
            continue
        if bound.contains(p):
            continue
        bound.insert_vertex(p)
        existing.add(p)
    vert_reps = _transversal_reps(bound.vertices(), group, act_point)
    facet_reps = _transversal_reps(bound.cone.rays, group, act_polar_ray)
    return SymmetricInnerBound(
        k, group, tuple(vert_reps), tuple(facet_reps),
        {r: False for r in facet_reps},
    )


def tighten_facet(dd: DDPair, a: LinearInequality) -> DDPair:
    """DD pair of the cone's facet {a.x == 0}, one dimension down.

    Rays are the input rays tight on `a`; inequalities are the rows adjacent
    to `a` (algebraic ridge test), re-expressed by eliminating the
    homogenization coordinate via a.x == 0.
    """
    a = canonicalize_inequality(a)
    rows = list(dd.h.inequalities)
    if a not in rows:
        raise NotAFacet(f"{a} is not a row of the pair")
    dim = dd.h.dim
    a_idx = rows.index(a)
    tight_sets = dd.facet_ray_sets()
    ridge_base = tight_sets[a_idx]
    if rank([dd.v.rays[i] for i in ridge_base]) != dim - 1:
        raise NotAFacet(f"{a} is not a facet of the cone")
    if a.normal[0] == 0:
        raise NotAFacet("expected the homogenization coordinate in the facet")
    sub = _substituter(a.normal)
    new_rows = []
    for m, row in enumerate(rows):
        if m == a_idx:
            continue
        common = [dd.v.rays[i] for i in (tight_sets[m] & ridge_base)]
        if rank(common) != dim - 2:
            continue
        normal = sub(row.normal)
        if any(c != 0 for c in normal):
            new_rows.append(LinearInequality(normal, 0))
    rays = [tuple(r[1:]) for i, r in enumerate(dd.v.rays) if i in ridge_base]
    h = HRepresentation.of(dim - 1, new_rows)
    return make_dd_pair(h, rays)


def _substituter(a_normal):
    """Eliminate coordinate 0 using a.y == 0 (a[0] != 0)."""
    a0 = rat(a_normal[0])
    rest = [rat(c) for c in a_normal[1:]]

    def sub(normal):
        m0 = rat(normal[0])
        return tuple(rat(c) - m0 * r / a0 for c, r in zip(normal[1:], rest))

    return sub


@dataclass(frozen=True)
class SymDDOutcome:
    bound: SymmetricInnerBound
    adjacency_steps: int        # |A| in the update


def sym_dd(bound: SymmetricInnerBound, v) -> SymDDOutcome:
    """Insert a new vertex orbit into the symmetric inner bound.

    Pipeline: expand the transversals, one full DD step for v itself, tighten
    the inserted inequality into the lower-dimensional cone, find the orbit
    members adjacent to v (the set A) by ray checks against that cone, run
    |A| small DD steps, lift the surviving rays, and assemble the new facet
    transversal from the lifted facets plus the untouched positive rays.
    """
    group = bound.group
    k = bound.k
    v = vec(v)
    cone = bound.expanded_cone()
    inner = InnerBound(k, cone)
    if inner.contains(v):
        raise VertexInsideHull(f"{v} is inside the expanded inner bound")
    pos, neg, zero = cone.insert(polar_row_of_point(v))
    new_row_idx = len(cone.rows) - 1

    # cone of the tightened facet, in the k coordinates left after using
    # (1, v).y == 0 to eliminate the homogenization coordinate
    sub = _substituter(cone.rows[new_row_idx])
    ridge_mask_bit = 1 << new_row_idx
    tight_ray_ids = [i for i in range(len(cone.rays)) if cone.inc[i] & ridge_mask_bit]
    tight_rays = [cone.rays[i] for i in tight_ray_ids]
    small = Cone(k)
    small.rays = [canonical_ray(r[1:]) for r in tight_rays]
    for m, row in enumerate(cone.rows):
        if m == new_row_idx:
            continue
        common = [cone.rays[i] for i in tight_ray_ids
                  if cone.inc[i] >> m & 1]
        if rank(common) != (k + 1) - 2:
            continue
        normal = sub(row)
        if any(c != 0 for c in normal):
            small.rows.append(primitive(normal))
    small.inc = []
    for ray in small.rays:
        mask = 0
        for i, row in enumerate(small.rows):
            if dot(row, ray) == 0:
                mask |= 1 << i
        small.inc.append(mask)

    # the set A: orbit members of v adjacent to v, detected by a violated ray
    adjacency_rows = []
    for z in orbit_of(tuple(v), group, act_point):
        if z == tuple(v):
            continue
        normal = primitive(tuple(a - b for a, b in zip(v, z)))
        if any(dot(normal, ray) < 0 for ray in small.rays):
            adjacency_rows.append(normal)
    for normal in adjacency_rows:
        small.insert(normal)

    lifted = []
    vq = [rat(c) for c in v]
    for ray in small.rays:
        y0 = -dot(vq, ray)
        lifted.append(canonical_ray((y0,) + tuple(ray)))

    n_expanded = set()
    for r in neg:
        n_expanded.update(orbit_of(r, group, act_polar_ray))
    survivors = [r for r in pos if r not in n_expanded] + lifted
    facet_reps = _transversal_reps(survivors, group, act_polar_ray)
    vert_reps = sorted(set(bound.vertex_transversal)
                       | {min(orbit_of(tuple(v), group, act_point))})
    terminal = {r: bound.terminal.get(r, False) for r in facet_reps}
    new_bound = SymmetricInnerBound(
        k, group, tuple(vert_reps), tuple(facet_reps), terminal
    )
    return SymDDOutcome(new_bound, len(adjacency_rows))


@dataclass(frozen=True)
class SymProjectionResult:
    """Projection result plus its orbit structure under the supplied group."""

    result: ProjectionResult
    group: FiniteGroup
    facet_orbit_reps: tuple
    vertex_orbit_reps: tuple

    @property
    def h(self) -> HRepresentation:
        return self.result.h

    @property
    def vertices(self) -> tuple:
        return self.result.vertices

    @property
    def stats(self) -> ProjectionStats:
        return self.result.stats

    def facet_orbits(self) -> list[tuple]:
        group = self.group
        out = []
        for rep in self.facet_orbit_reps:
            out.append(tuple(sorted(
                {ineq_of_ray(r) for r in orbit_of(rep, group, act_polar_ray)}
            )))
        return out


def sym_chm_project(parent: HRepresentation, k: int,
                    group: FiniteGroup) -> SymProjectionResult:
    """Algorithm-2 projection: transversals only, one LP per orbit.

    The expanded transversals equal the plain projection exactly; a facet
    representative certified terminal marks its whole orbit terminal.
    """
    _check_group(group, k)
    par = _Parent(parent, k)
    bound = sym_initial_hull(par, k, group)
    # vertex-ORBIT discoveries so far: one per orbit of the initial hull
    orbit_lps = len(bound.vertex_transversal)
    queue: deque = deque(bound.facet_transversal)
    dd_steps = 0
    while queue:
        rep = queue.popleft()
        if rep not in set(bound.facet_transversal):
            continue
        if bound.terminal.get(rep, False):
            continue
        facet = ineq_of_ray(rep)
        out = par.minimize(facet.normal)
        if out.value > facet.offset:  # pragma: no cover - soundness guard
            raise AssertionError("inner bound facet not valid for projection")
        if out.value == facet.offset:
            bound.terminal[rep] = True
            continue
        v = tuple(out.primal_vertex[:k])
        orbit_lps += 1
        step = sym_dd(bound, v)
        dd_steps += 1 + step.adjacency_steps
        new_reps = [r for r in step.bound.facet_transversal
                    if r not in set(bound.facet_transversal)]
        bound = step.bound
        queue.extend(sorted(new_reps))
    expanded = bound.expanded_inner_bound()
    h = HRepresentation.of(k, [ineq_of_ray(r) for r in expanded.cone.rays])
    vertices = tuple(expanded.vertices())
    stats = ProjectionStats(orbit_lps, par.lp_calls - orbit_lps, dd_steps)
    result = ProjectionResult(h, vertices, expanded.snapshot(), stats)
    vert_reps = _transversal_reps(vertices, group, act_point)
    return SymProjectionResult(result, group, tuple(bound.facet_transversal),
                               tuple(vert_reps))


def reduced_terminal_check(parent: HRepresentation, facet: LinearInequality,
                           parent_group: FiniteGroup) -> bool:
    """Terminal test via the fixed subspace of the cost's stabilizer.

    The facet normal (zero-padded to the parent dimension) must be invariant
    under the chosen stabilizer subgroup; the reduced LP optimum equals the
    full one, so terminality can be decided in the smaller space.
    """
    from .groups import fix_subspace, setwise_stabilizer

    if not parent_group.is_permutation_group:
        raise NonPermutationAction("parent group must act by permutations")
    if parent_group.degree != parent.dim:
        raise ActionDimensionMismatch("parent group degree != parent dimension")
    for g in parent_group.generators:
        from .groups import act_equality, act_inequality
        if {act_inequality(g, r) for r in parent.inequalities} != set(parent.inequalities) \
                or {act_equality(g, r) for r in parent.equalities} != set(parent.equalities):
            raise GroupDoesNotStabilize(
                f"{g.cycle_notation()} does not fix the parent constraints"
            )
    cost = tuple(facet.normal) + (0,) * (parent.dim - len(facet.normal))
    stab = setwise_stabilizer(
        parent_group, {cost}, lambda g, x: g.act_vector(x)
    )
    reduced, embed = fix_subspace(parent, stab)
    c_red = [Q(0)] * len(embed.free_columns)
    shift = Q(0)
    for i, ci in enumerate(cost):
        if ci == 0:
            continue
        ci = rat(ci)
        shift += ci * embed.offset[i]
        for j, m in enumerate(embed.matrix[i]):
            if m:
                c_red[j] += ci * m
    out = lp.LinearSystem(reduced).minimize(tuple(c_red))
    if out.status != lp.OPTIMAL:
        return False
    return out.value + shift == rat(facet.offset)
