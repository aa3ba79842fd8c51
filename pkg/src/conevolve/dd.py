"""Incremental double description: single steps, adjacency, full conversion.

The working state (`Cone`) keeps integer canonical rows and rays plus one
incidence bitmask per ray, so adjacency tests are plain integer operations.
New rays for an inserted halfspace are built only from adjacent
positive/negative ray pairs, with combination coefficients
lambda_p = -(a.n), lambda_n = (a.p), which keeps every generated ray extreme.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    NonHomogeneousInequality,
    NotFullDimensional,
    NotPointed,
    RayNotInPair,
)
from .polyhedra import (
    DDPair,
    HRepresentation,
    LinearInequality,
    VRepresentation,
    canonical_ray,
    canonicalize_inequality,
    make_dd_pair,
)
from .rational import dot, independent_subset, invert, primitive, rank


class Cone:
    """Mutable DD state of a pointed cone in R^dim."""

    def __init__(self, dim: int):
        self.dim = dim
        self.rows: list[tuple[int, ...]] = []
        self.rays: list[tuple[int, ...]] = []
        self.inc: list[int] = []          # bitmask over row indices, per ray

    @classmethod
    def from_simplicial_rows(cls, dim: int, rows: list[tuple[int, ...]]) -> "Cone":
        """Cone of `dim` independent rows; rays are the inverse's columns."""
        minv = invert(rows)
        if minv is None:
            raise ValueError("rows are not independent")
        cone = cls(dim)
        cone.rows = [tuple(r) for r in rows]
        full = (1 << dim) - 1
        for j in range(dim):
            col = canonical_ray([minv[i][j] for i in range(dim)])
            cone.rays.append(col)
            cone.inc.append(full ^ (1 << j))
        return cone

    @classmethod
    def from_dd_pair(cls, dd: DDPair) -> "Cone":
        if not dd.h.is_cone():
            raise NonHomogeneousInequality("DD pair is not a cone")
        cone = cls(dd.h.dim)
        cone.rows = [tuple(r.normal) for r in dd.h.inequalities]
        cone.rays = [tuple(r) for r in dd.v.rays]
        for inc in dd.incidence:
            mask = 0
            for i in inc:
                mask |= 1 << i
            cone.inc.append(mask)
        return cone

    def adjacent(self, i: int, j: int) -> bool:
        """Combinatorial adjacency of rays i and j (Fukuda's oracle)."""
        common = self.inc[i] & self.inc[j]
        if common.bit_count() < self.dim - 2:
            return False
        for k, other in enumerate(self.inc):
            if k != i and k != j and common & ~other == 0:
                return False
        return True

    def insert(self, normal) -> tuple[list, list, list]:
        """One DD step: intersect with normal.x >= 0.

        Returns the (positive, negative, zero) ray partitions, where `zero`
        also contains the newly generated combination rays.  The state is
        updated in place.
        """
        row = canonicalize_inequality(LinearInequality(tuple(normal), 0)).normal
        vals = [dot(row, ray) for ray in self.rays]
        pos = [i for i, v in enumerate(vals) if v > 0]
        neg = [i for i, v in enumerate(vals) if v < 0]
        zero = [i for i, v in enumerate(vals) if v == 0]
        rowbit = 1 << len(self.rows)
        new_rays: list[tuple[tuple[int, ...], int]] = []
        for i in pos:
            vi = vals[i]
            ri = self.rays[i]
            for j in neg:
                if not self.adjacent(i, j):
                    continue
                vj = vals[j]
                rj = self.rays[j]
                # lambda_p = -(a.n) > 0, lambda_n = (a.p) > 0
                combo = tuple(-vj * a + vi * b for a, b in zip(ri, rj))
                new_rays.append(
                    (canonical_ray(combo), (self.inc[i] & self.inc[j]) | rowbit)
                )
        p_rays = [self.rays[i] for i in pos]
        n_rays = [self.rays[i] for i in neg]
        z_rays = [self.rays[i] for i in zero] + [r for r, _ in new_rays]
        keep = pos + zero
        rays = [self.rays[i] for i in keep]
        inc = [self.inc[i] | (rowbit if vals[i] == 0 else 0) for i in keep]
        order = sorted(range(len(new_rays)), key=lambda t: new_rays[t][0])
        rays.extend(new_rays[t][0] for t in order)
        inc.extend(new_rays[t][1] for t in order)
        self.rows.append(row)
        self.rays = rays
        self.inc = inc
        return sorted(p_rays), sorted(n_rays), sorted(z_rays)

    def to_dd_pair(self) -> DDPair:
        h = HRepresentation.of(
            self.dim, [LinearInequality(r, 0) for r in self.rows]
        )
        return make_dd_pair(h, self.rays)

    def tight_rows_of_ray(self, ray_index: int) -> list[int]:
        mask = self.inc[ray_index]
        return [i for i in range(len(self.rows)) if mask >> i & 1]


@dataclass(frozen=True)
class DDStepResult:
    """Outcome of one DD step: ray partitions plus the updated pair."""

    positive: tuple
    negative: tuple
    zero: tuple
    updated: DDPair


def dd_step(dd: DDPair, new_ineq: LinearInequality) -> DDStepResult:
    """Intersect the cone with one homogeneous halfspace."""
    if not new_ineq.is_homogeneous():
        raise NonHomogeneousInequality(f"{new_ineq} has a nonzero offset")
    cone = Cone.from_dd_pair(dd)
    p, n, z = cone.insert(new_ineq.normal)
    return DDStepResult(tuple(p), tuple(n), tuple(z), cone.to_dd_pair())


def adjacency_test(r1, r2, dd: DDPair) -> bool:
    """True iff the minimal face containing both rays is two-dimensional."""
    rays = list(dd.v.rays)
    c1, c2 = canonical_ray(r1), canonical_ray(r2)
    try:
        i, j = rays.index(c1), rays.index(c2)
    except ValueError as exc:
        raise RayNotInPair(f"{exc}")
    if i == j:
        raise RayNotInPair("rays must be distinct")
    cone = Cone.from_dd_pair(dd)
    return cone.adjacent(i, j)


def algebraic_adjacency_test(r1, r2, dd: DDPair) -> bool:
    """Rank-based adjacency oracle, for cross-checking the combinatorial one."""
    rays = list(dd.v.rays)
    i, j = rays.index(canonical_ray(r1)), rays.index(canonical_ray(r2))
    common = dd.incidence[i] & dd.incidence[j]
    tight = [dd.h.inequalities[t].normal for t in common]
    return rank(tight) == dd.h.dim - 2


def convert_h_to_v(h: HRepresentation) -> DDPair:
    """Extreme rays of a pointed full-dimensional cone, by incremental DD.

    Inequalities are inserted in canonical-sorted order starting from a
    simplicial subcone, which makes the run reproducible.
    """
    if h.equalities:
        raise ValueError("eliminate equalities before conversion")
    if not h.is_cone():
        raise NonHomogeneousInequality("conversion expects a cone")
    rows = [tuple(r.normal) for r in h.inequalities]
    if rank(rows) < h.dim:
        raise NotPointed("inequality normals do not span; cone has lineality")
    basis = independent_subset(rows)[: h.dim]
    cone = Cone.from_simplicial_rows(h.dim, [rows[i] for i in basis])
    basis_set = set(basis)
    for i, row in enumerate(rows):
        if i not in basis_set:
            cone.insert(row)
    if rank(cone.rays) < h.dim:
        raise NotFullDimensional("cone is lower-dimensional than its ambient space")
    return make_dd_pair(h, cone.rays)


def convert_v_to_h(v: VRepresentation) -> DDPair:
    """Facet description of a pointed full-dimensional conic hull."""
    if v.vertices or v.lineality:
        raise ValueError("conversion expects a cone given by rays only")
    if rank(v.rays) < v.dim:
        raise NotFullDimensional("rays do not span the space")
    polar_h = HRepresentation.of(
        v.dim, [LinearInequality(tuple(-c for c in ray), 0) for ray in v.rays]
    )
    polar_dd = convert_h_to_v(polar_h)
    facets = HRepresentation.of(
        v.dim, [LinearInequality(tuple(-c for c in ray), 0) for ray in polar_dd.v.rays]
    )
    extreme = []
    for ray in v.rays:
        tight = [row.normal for row in facets.inequalities
                 if dot(row.normal, ray) == 0]
        if rank(tight) == v.dim - 1:
            extreme.append(ray)
    return make_dd_pair(facets, extreme)


def verify_dd_pair(dd: DDPair, extremality_cap: int = 16) -> bool:
    """Check feasibility, exact incidence, and (small scale) ray extremality."""
    for ri, ray in enumerate(dd.v.rays):
        tight = set()
        for i, row in enumerate(dd.h.inequalities):
            val = dot(row.normal, ray)
            if val < 0:
                return False
            if val == 0:
                tight.add(i)
        if tight != set(dd.incidence[ri]):
            return False
    if len(dd.v.rays) <= extremality_cap:
        for ri, ray in enumerate(dd.v.rays):
            tight = [dd.h.inequalities[i].normal for i in dd.incidence[ri]]
            if rank(tight) != dd.h.dim - 1:
                return False
    return True
