"""Exact-rational polyhedra: representations, canonical forms and reductions.

Conventions used package-wide:

* Inequalities are stored as ``normal . x >= offset``.  Canonical form clears
  denominators to coprime integers; the halfspace orientation is preserved
  (only positive scaling), so two inequalities have equal canonical forms iff
  they cut out the same halfspace.
* Equalities additionally flip sign so the first nonzero coefficient is
  positive.
* Rays canonicalize by positive scaling only: a ray and its negation are
  different geometric objects, so no sign normalization is applied.
* Cones are inequality systems with all offsets zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import (
    InconsistentEqualities,
    InfeasibleSystem,
    NotFullDimensional,
    NotPointed,
    RayCapExceeded,
    ZeroNormalInfeasible,
)
from .rational import (
    Q,
    dot,
    independent_subset,
    invert,
    nullspace,
    primitive,
    primitive_scale,
    rank,
    rat,
    vec,
)

DEFAULT_RAY_CAP = 64


@dataclass(frozen=True, order=True)
class LinearInequality:
    """Halfspace ``normal . x >= offset``."""

    normal: tuple
    offset: object = 0

    @property
    def dim(self) -> int:
        return len(self.normal)

    def evaluate(self, point: Sequence):
        """Slack of the point: normal . point - offset."""
        return dot(self.normal, point) - self.offset

    def is_homogeneous(self) -> bool:
        return self.offset == 0

    def scaled_key(self):
        return (self.normal, self.offset)


@dataclass(frozen=True, order=True)
class LinearEquality:
    """Hyperplane ``normal . x == offset``."""

    normal: tuple
    offset: object = 0

    @property
    def dim(self) -> int:
        return len(self.normal)

    def evaluate(self, point: Sequence):
        return dot(self.normal, point) - self.offset

    def is_homogeneous(self) -> bool:
        return self.offset == 0


def canonicalize_inequality(ineq: LinearInequality) -> LinearInequality:
    """Unique representative of the halfspace; positive scaling only.

    Raises ZeroNormalInfeasible for 0.x >= b with b > 0.  Idempotent.
    """
    prim = primitive(tuple(ineq.normal) + (ineq.offset,))
    normal, offset = prim[:-1], prim[-1]
    if all(c == 0 for c in normal):
        if offset > 0:
            raise ZeroNormalInfeasible(f"0 >= {ineq.offset} is infeasible")
        # trivial constraint; normalize offset to 0 or -1
        return LinearInequality(normal, -1 if offset < 0 else 0)
    # primitive() preserves signs, but guard the orientation explicitly:
    # find the scale sign via the first nonzero coefficient pair.
    for a, b in zip(tuple(ineq.normal) + (rat(ineq.offset),), prim):
        if b != 0:
            if (a > 0) != (b > 0):
                normal = tuple(-c for c in normal)
                offset = -offset
            break
    return LinearInequality(normal, offset)


def canonicalize_equality(eq: LinearEquality) -> LinearEquality:
    """Coprime integers, first nonzero coefficient of (normal, offset) positive."""
    prim = primitive(tuple(eq.normal) + (eq.offset,))
    lead = next((c for c in prim if c != 0), 0)
    if lead < 0:
        prim = tuple(-c for c in prim)
    if all(c == 0 for c in prim[:-1]) and prim[-1] != 0:
        raise InconsistentEqualities("0 == nonzero has no solution")
    return LinearEquality(prim[:-1], prim[-1])


def canonical_ray(direction: Sequence) -> tuple[int, ...]:
    """Primitive integer representative of the ray; sign preserved."""
    return primitive(direction)


def canonical_line(direction: Sequence) -> tuple[int, ...]:
    """Primitive representative of a full line; first nonzero positive."""
    prim = primitive(direction)
    lead = next((c for c in prim if c != 0), 0)
    return tuple(-c for c in prim) if lead < 0 else prim


def _is_trivial(ineq: LinearInequality) -> bool:
    return all(c == 0 for c in ineq.normal) and ineq.offset <= 0


@dataclass(frozen=True)
class HRepresentation:
    """Inequality-and-equality description of a polyhedron.

    Rows are stored canonicalized, deduplicated and sorted, so equal sets
    compare equal and all scans are deterministic.
    """

    dim: int
    inequalities: tuple[LinearInequality, ...] = ()
    equalities: tuple[LinearEquality, ...] = ()
    coordinate_names: tuple[str, ...] | None = None

    @classmethod
    def of(cls, dim, inequalities=(), equalities=(), coordinate_names=None):
        ineqs = set()
        for row in inequalities:
            if not isinstance(row, LinearInequality):
                row = LinearInequality(vec(row[0]), rat(row[1]))
            if row.dim != dim:
                raise ValueError(f"inequality dim {row.dim} != {dim}")
            row = canonicalize_inequality(row)
            if not _is_trivial(row):
                ineqs.add(row)
        eqs = set()
        for row in equalities:
            if not isinstance(row, LinearEquality):
                row = LinearEquality(vec(row[0]), rat(row[1]))
            if row.dim != dim:
                raise ValueError(f"equality dim {row.dim} != {dim}")
            row = canonicalize_equality(row)
            if any(c != 0 for c in row.normal):
                eqs.add(row)
        names = tuple(coordinate_names) if coordinate_names else None
        if names is not None and len(names) != dim:
            raise ValueError("coordinate_names length != dim")
        return cls(dim, tuple(sorted(ineqs)), tuple(sorted(eqs)), names)

    def is_cone(self) -> bool:
        return all(r.is_homogeneous() for r in self.inequalities) and all(
            r.is_homogeneous() for r in self.equalities
        )

    def with_rows(self, extra_inequalities=(), extra_equalities=()):
        return HRepresentation.of(
            self.dim,
            self.inequalities + tuple(extra_inequalities),
            self.equalities + tuple(extra_equalities),
            self.coordinate_names,
        )

    def contains(self, point: Sequence) -> bool:
        return all(r.evaluate(point) >= 0 for r in self.inequalities) and all(
            r.evaluate(point) == 0 for r in self.equalities
        )


@dataclass(frozen=True)
class VRepresentation:
    """Generator description: rays (canonical), vertices, lineality lines."""

    dim: int
    rays: tuple[tuple, ...] = ()
    vertices: tuple[tuple, ...] = ()
    lineality: tuple[tuple, ...] = ()

    @classmethod
    def of(cls, dim, rays=(), vertices=(), lineality=()):
        crays = sorted({canonical_ray(r) for r in rays if any(x != 0 for x in r)})
        cverts = sorted({vec(v) for v in vertices})
        clines = sorted({canonical_line(l) for l in lineality if any(x != 0 for x in l)})
        return cls(dim, tuple(crays), tuple(cverts), tuple(clines))


@dataclass(frozen=True)
class DDPair:
    """Matched H- and V-descriptions of a pointed cone.

    ``incidence[i]`` is the frozenset of inequality indices (into
    ``h.inequalities``) satisfied with equality by ray ``v.rays[i]``.
    """

    h: HRepresentation
    v: VRepresentation
    incidence: tuple[frozenset[int], ...]

    def facet_ray_sets(self) -> list[frozenset[int]]:
        """For each inequality, the set of ray indices tight on it."""
        sets = [set() for _ in self.h.inequalities]
        for ri, inc in enumerate(self.incidence):
            for fi in inc:
                sets[fi].add(ri)
        return [frozenset(s) for s in sets]


def make_dd_pair(h: HRepresentation, rays: Iterable[Sequence],
                 vertices=()) -> DDPair:
    """Assemble a DDPair, computing exact incidence and checking feasibility."""
    vrep = VRepresentation.of(h.dim, rays=rays, vertices=vertices)
    incidence = []
    for ray in vrep.rays:
        tight = set()
        for i, row in enumerate(h.inequalities):
            val = dot(row.normal, ray)
            if val < 0:
                raise ValueError(f"ray {ray} violates inequality {row}")
            if val == 0:
                tight.add(i)
        for eq in h.equalities:
            if dot(eq.normal, ray) != 0:
                raise ValueError(f"ray {ray} violates equality {eq}")
        incidence.append(frozenset(tight))
    return DDPair(h, vrep, tuple(incidence))


@dataclass(frozen=True)
class FaceCountProfile:
    """Number of nonempty faces of each dimension 1..dim of a cone."""

    counts: dict[int, int]

    def as_tuple(self) -> tuple[int, ...]:
        top = max(self.counts) if self.counts else 0
        return tuple(self.counts.get(d, 0) for d in range(1, top + 1))

    @property
    def total(self) -> int:
        return sum(self.counts.values())


# --- transforms --------------------------------------------------------------


def homogenize(p: HRepresentation) -> HRepresentation:
    """Lift to a cone one dimension up: a.x >= b becomes -b.x0 + a.x >= 0.

    A new coordinate x0 is prepended, together with the row x0 >= 0.
    """
    ineqs = [LinearInequality((-rat(r.offset),) + tuple(r.normal), 0)
             for r in p.inequalities]
    ineqs.append(LinearInequality((1,) + (0,) * p.dim, 0))
    eqs = [LinearEquality((-rat(r.offset),) + tuple(r.normal), 0)
           for r in p.equalities]
    names = None
    if p.coordinate_names:
        names = ("x0",) + tuple(p.coordinate_names)
    return HRepresentation.of(p.dim + 1, ineqs, eqs, names)


def polar_swap(dd: DDPair) -> DDPair:
    """DD pair of the polar cone {y : x . y <= 0 for all x in the cone}.

    Rays of the input become (up to the polar's sign convention) inequality
    normals of the output and vice versa; involutive on canonical forms.
    """
    if dd.v.lineality:
        raise NotPointed("polar of a non-pointed cone is lower-dimensional")
    if not dd.h.is_cone():
        raise ValueError("polar_swap expects a cone (homogeneous rows)")
    if rank(dd.v.rays) < dd.h.dim:
        raise NotFullDimensional("polar of a lower-dimensional cone is not pointed")
    h = HRepresentation.of(
        dd.h.dim,
        [LinearInequality(tuple(-c for c in ray), 0) for ray in dd.v.rays],
    )
    rays = [tuple(-c for c in row.normal) for row in dd.h.inequalities]
    return make_dd_pair(h, rays)


def boundedness_transform(cone: HRepresentation, k: int) -> HRepresentation:
    """Add sum(x_1..x_k) <= 1 so a pointed nonnegative cone becomes a polytope."""
    if not 1 <= k <= cone.dim:
        raise ValueError("k out of range")
    normal = tuple(-1 if i < k else 0 for i in range(cone.dim))
    return cone.with_rows([LinearInequality(normal, -1)])


def bounding_inequality(dim: int, k: int) -> LinearInequality:
    return canonicalize_inequality(
        LinearInequality(tuple(-1 if i < k else 0 for i in range(dim)), -1)
    )


def strip_bounding(h: HRepresentation, k: int) -> HRepresentation:
    """Remove exactly the inequality added by boundedness_transform."""
    row = bounding_inequality(h.dim, k)
    if row not in h.inequalities:
        raise ValueError("bounding inequality not present")
    return HRepresentation.of(
        h.dim,
        [r for r in h.inequalities if r != row],
        h.equalities,
        h.coordinate_names,
    )


@dataclass(frozen=True)
class AffineMap:
    """x_original = matrix @ x_reduced + offset."""

    matrix: tuple[tuple, ...]          # n_original x n_reduced
    offset: tuple
    free_columns: tuple[int, ...]      # original indices of the reduced coords

    def apply(self, point: Sequence) -> tuple:
        return tuple(dot(row, point) + o for row, o in zip(self.matrix, self.offset))

    def apply_direction(self, direction: Sequence) -> tuple:
        return tuple(dot(row, direction) for row in self.matrix)


@dataclass(frozen=True)
class EqualityElimination:
    """Solved equality system: pivot coords as affine functions of free coords."""

    dim: int
    pivots: tuple[int, ...]                      # pivot original coordinates
    free: tuple[int, ...]                        # free original coordinates
    expressions: dict                            # pivot -> (coeffs over free, const)

    def substitute(self, normal: Sequence, offset):
        """Rewrite normal.x >= / == offset over the free coordinates."""
        red = {f: rat(normal[f]) for f in self.free}
        const = rat(offset)
        for p in self.pivots:
            c = rat(normal[p])
            if c == 0:
                continue
            coeffs, pconst = self.expressions[p]
            for f, m in coeffs.items():
                red[f] += c * m
            const -= c * pconst
        return tuple(red[f] for f in self.free), const

    def back_map(self) -> AffineMap:
        nfree = len(self.free)
        pos = {f: j for j, f in enumerate(self.free)}
        matrix = []
        offs = []
        for i in range(self.dim):
            if i in pos:
                row = [Q(0)] * nfree
                row[pos[i]] = Q(1)
                matrix.append(tuple(row))
                offs.append(Q(0))
            else:
                coeffs, const = self.expressions[i]
                row = [Q(0)] * nfree
                for f, m in coeffs.items():
                    row[pos[f]] = m
                matrix.append(tuple(row))
                offs.append(const)
        return AffineMap(tuple(matrix), tuple(offs), self.free)


def solve_equalities(equalities: Sequence[LinearEquality], dim: int,
                     pivot_order: Sequence[int] | None = None) -> EqualityElimination:
    """Exact Gaussian elimination of an equality system.

    Pivots are chosen scanning coordinates in ``pivot_order`` (default: highest
    index first, which keeps low-index coordinates alive).  Raises
    InconsistentEqualities when the system has no solution.
    """
    order = list(pivot_order) if pivot_order is not None else list(range(dim - 1, -1, -1))
    rows = [[rat(c) for c in eq.normal] + [rat(eq.offset)] for eq in equalities]
    pivots: list[tuple[int, list]] = []   # (pivot col, reduced row)
    for row in rows:
        for col, prow in pivots:
            if row[col] != 0:
                f = row[col]
                row = [a - f * b for a, b in zip(row, prow)]
        col = next((c for c in order if row[c] != 0), None)
        if col is None:
            if row[dim] != 0:
                raise InconsistentEqualities("equality system has no solution")
            continue
        piv = row[col]
        row = [x / piv for x in row]
        for i, (pc, prow) in enumerate(pivots):
            if prow[col] != 0:
                f = prow[col]
                pivots[i] = (pc, [a - f * b for a, b in zip(prow, row)])
        pivots.append((col, row))
    pivot_cols = sorted(c for c, _ in pivots)
    free = tuple(i for i in range(dim) if i not in set(pivot_cols))
    expressions = {}
    for col, row in pivots:
        coeffs = {f: -row[f] for f in free if row[f] != 0}
        expressions[col] = (coeffs, row[dim])
    return EqualityElimination(dim, tuple(pivot_cols), free, expressions)


def eliminate_equalities(h: HRepresentation,
                         pivot_order: Sequence[int] | None = None):
    """Substitute the equalities away; returns (reduced system, back map).

    The reduced system is full-rank-free of equalities with
    reduced.dim == h.dim - rank(equalities).  Rows that become identically
    true are dropped; a row reducing to 0 >= positive raises InfeasibleSystem.
    """
    elim = solve_equalities(h.equalities, h.dim, pivot_order)
    reduced_rows = []
    for row in h.inequalities:
        normal, offset = elim.substitute(row.normal, row.offset)
        if all(c == 0 for c in normal):
            if offset > 0:
                raise InfeasibleSystem(f"row {row} became 0 >= {offset}")
            continue
        reduced_rows.append(LinearInequality(normal, offset))
    names = None
    if h.coordinate_names:
        names = tuple(h.coordinate_names[i] for i in elim.free)
    reduced = HRepresentation.of(len(elim.free), reduced_rows, (), names)
    return reduced, elim.back_map()


def remove_redundancies(h: HRepresentation) -> HRepresentation:
    """Drop inequalities implied by the rest; deterministic sparsest-first scan.

    Equalities are substituted away first, duplicate substituted forms are
    merged, and the surviving forms are scanned sparsest-first (number of
    nonzero coefficients, then canonical order).  Each candidate a.x >= b is
    tested by minimizing a.x subject to all other surviving constraints plus
    the relaxation a.x >= b - 1; it is redundant iff the optimum is still
    >= b.  On degenerate systems (implicit equalities) the surviving count
    depends on the scan order, which is why the order is pinned.
    """
    from . import lp  # local import; lp depends on this module

    elim = solve_equalities(h.equalities, h.dim)
    by_form: dict[LinearInequality, LinearInequality] = {}
    for row in h.inequalities:
        normal, offset = elim.substitute(row.normal, row.offset)
        if all(c == 0 for c in normal):
            if offset > 0:
                raise InfeasibleSystem(f"row {row} became 0 >= {offset}")
            continue
        form = canonicalize_inequality(LinearInequality(normal, offset))
        if form not in by_form:
            by_form[form] = row
    ndim = len(elim.free)
    forms = sorted(by_form, key=lambda r: (sum(1 for c in r.normal if c), r))
    kept = [True] * len(forms)
    for i, red in enumerate(forms):
        rest = [forms[j] for j in range(len(forms)) if j != i and kept[j]]
        relaxed = LinearInequality(red.normal, rat(red.offset) - 1)
        system = HRepresentation.of(ndim, rest + [relaxed])
        outcome = lp.solve(lp.LinearProgram(vec(red.normal), system))
        if outcome.status == lp.INFEASIBLE:
            raise InfeasibleSystem("input system is infeasible")
        if outcome.status == lp.OPTIMAL and outcome.value >= red.offset:
            kept[i] = False
    return HRepresentation.of(
        h.dim,
        [by_form[forms[i]] for i in range(len(forms)) if kept[i]],
        h.equalities,
        h.coordinate_names,
    )


def full_dimension_check(h: HRepresentation):
    """(is_full_dimensional, witness interior point or None).

    Maximizes the common slack t (capped at 1); the set is full-dimensional
    iff there are no equalities and the optimum slack is positive.
    """
    from . import lp

    dim = h.dim
    rows = [LinearInequality(tuple(r.normal) + (-1,), r.offset) for r in h.inequalities]
    rows.append(LinearInequality((0,) * dim + (-1,), -1))   # t <= 1
    eqs = [LinearEquality(tuple(r.normal) + (0,), r.offset) for r in h.equalities]
    system = HRepresentation.of(dim + 1, rows, eqs)
    objective = vec([0] * dim + [-1])                        # maximize t
    outcome = lp.solve(lp.LinearProgram(objective, system))
    if outcome.status == lp.INFEASIBLE:
        raise InfeasibleSystem("system is infeasible")
    if outcome.status != lp.OPTIMAL:  # pragma: no cover - t is capped
        raise AssertionError("slack LP cannot be unbounded")
    t = -outcome.value
    if t <= 0 or h.equalities:
        return False, None
    return True, outcome.primal_vertex[:dim]


# --- face enumeration ---------------------------------------------------------


def face_ray_masks(dd: DDPair, ray_cap: int = DEFAULT_RAY_CAP) -> set[int]:
    """All faces of the cone as bitmasks over ray indices.

    Includes the cone itself (full mask) and excludes the empty/apex face.
    Faces are closed intersections of facet ray sets.
    """
    nrays = len(dd.v.rays)
    if nrays > ray_cap:
        raise RayCapExceeded(f"{nrays} rays exceeds cap {ray_cap}")
    full = (1 << nrays) - 1
    facet_masks = []
    for rays in dd.facet_ray_sets():
        m = 0
        for ri in rays:
            m |= 1 << ri
        facet_masks.append(m)
    faces = {full}
    frontier = [full]
    while frontier:
        nxt = []
        for face in frontier:
            for fm in facet_masks:
                cut = face & fm
                if cut and cut not in faces:
                    faces.add(cut)
                    nxt.append(cut)
        frontier = nxt
    return faces


def enumerate_faces(dd: DDPair, ray_cap: int = DEFAULT_RAY_CAP) -> FaceCountProfile:
    """Count nonempty faces of each dimension 1..dim via the incidence closure."""
    faces = face_ray_masks(dd, ray_cap)
    rays = dd.v.rays
    counts: dict[int, int] = {}
    rank_cache: dict[int, int] = {}
    for mask in faces:
        if mask in rank_cache:
            d = rank_cache[mask]
        else:
            members = [rays[i] for i in range(len(rays)) if mask >> i & 1]
            d = rank(members)
            rank_cache[mask] = d
        counts[d] = counts.get(d, 0) + 1
    return FaceCountProfile(counts)


# --- text serialization -------------------------------------------------------


def _format_scalar(x) -> str:
    q = rat(x)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _format_coeffs(values: Sequence) -> str:
    parts = []
    for x in values:
        s = _format_scalar(x)
        if s != "0" and not s.startswith("-"):
            s = "+" + s
        parts.append(s)
    return " ".join(parts)


def format_h(h: HRepresentation) -> str:
    """One constraint per line: signed coefficients, '>=' or '=', offset."""
    lines = [f"# dim {h.dim}"]
    for row in h.inequalities:
        lines.append(f"{_format_coeffs(row.normal)} >= {_format_scalar(row.offset)}")
    for row in h.equalities:
        lines.append(f"{_format_coeffs(row.normal)} = {_format_scalar(row.offset)}")
    return "\n".join(lines) + "\n"


def format_v(v: VRepresentation) -> str:
    lines = [f"# dim {v.dim}"]
    for ray in v.rays:
        lines.append("ray: " + " ".join(_format_scalar(x) for x in ray))
    for vertex in v.vertices:
        lines.append("vertex: " + " ".join(_format_scalar(x) for x in vertex))
    for line in v.lineality:
        lines.append("line: " + " ".join(_format_scalar(x) for x in line))
    return "\n".join(lines) + "\n"


def parse_h(text: str) -> HRepresentation:
    """Parse the format written by format_h (comments and blank lines allowed)."""
    ineqs = []
    eqs = []
    dim = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line or line.lower().startswith(("h-representation", "v-representation")):
            continue
        if ">=" in line:
            lhs, rhs = line.split(">=")
            target = ineqs
        elif "=" in line:
            lhs, rhs = line.split("=", 1)
            target = eqs
        else:
            raise ValueError(f"cannot parse constraint line: {raw!r}")
        normal = vec(lhs.split())
        offset = rat(rhs.strip())
        if dim is None:
            dim = len(normal)
        elif len(normal) != dim:
            raise ValueError(f"inconsistent dimension on line: {raw!r}")
        target.append((normal, offset))
    if dim is None:
        raise ValueError("no constraints found")
    return HRepresentation.of(
        dim,
        [LinearInequality(n, o) for n, o in ineqs],
        [LinearEquality(n, o) for n, o in eqs],
    )


def parse_v(text: str) -> VRepresentation:
    rays, vertices, lines = [], [], []
    dim = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line or line.lower().startswith(("h-representation", "v-representation")):
            continue
        kind, _, rest = line.partition(":")
        kind = kind.strip().lower()
        entries = vec(rest.split())
        if dim is None:
            dim = len(entries)
        elif len(entries) != dim:
            raise ValueError(f"inconsistent dimension on line: {raw!r}")
        if kind == "ray":
            rays.append(entries)
        elif kind == "vertex":
            vertices.append(entries)
        elif kind == "line":
            lines.append(entries)
        else:
            raise ValueError(f"unknown generator kind {kind!r}")
    if dim is None:
        raise ValueError("no generators found")
    return VRepresentation.of(dim, rays, vertices, lines)
