"""Network information theory layer.

Compiles network coding problems into entropy-space constraint systems,
computes Shannon outer bounds and network symmetry groups, and drives the
projection algorithms to produce explicit polyhedral outer bounds on rate
regions (with optional per-inequality Farkas certificates).  Also hosts the
three scalar LP applications: weighted sum-rate, secret-sharing information
ratio, and guessing numbers.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from itertools import combinations, permutations

from . import chm, lp, symchm
from .errors import (
    GroupDoesNotStabilize,
    InvalidAccessStructure,
    InvalidDigraph,
    InvalidProblem,
    NotFullDimensional,
    NotImplied,
    NTooLarge,
    ProjectionNotFullDimensional,
    SearchCapExceeded,
)
from .groups import (
    FiniteGroup,
    Permutation,
    group_closure,
    minimal_generators,
)
from .polyhedra import (
    HRepresentation,
    LinearEquality,
    LinearInequality,
    boundedness_transform,
    canonicalize_equality,
    canonicalize_inequality,
    eliminate_equalities,
    remove_redundancies,
    solve_equalities,
    strip_bounding,
)
from .rational import Q, dot, rat, vec

logger = logging.getLogger(__name__)

MAX_N = 10                      # entropy-space cap: dimension 2^N - 1
NSG_SEARCH_CAP = 4_000_000      # |S_sources| * |S_edges| brute-force cap
AUTO_REDUCE_CELL_CAP = 40_000   # rows*dim threshold for the redundancy pass


class EntropyIndex:
    """Coordinates 1..2^N-1 of entropy space; coordinate i is subset mask i."""

    def __init__(self, n: int):
        if not 1 <= n <= 20:
            raise NTooLarge(f"N={n} out of range")
        self.n = n
        self.dim = (1 << n) - 1

    def mask_of(self, subset) -> int:
        mask = 0
        for i in subset:
            if not 1 <= i <= self.n:
                raise ValueError(f"variable {i} out of range 1..{self.n}")
            mask |= 1 << (i - 1)
        return mask

    def subset_of(self, mask: int) -> tuple[int, ...]:
        return tuple(i + 1 for i in range(self.n) if mask >> i & 1)

    def coord(self, subset) -> int:
        """0-based coordinate index of a nonempty subset."""
        mask = subset if isinstance(subset, int) else self.mask_of(subset)
        if not 1 <= mask <= self.dim:
            raise ValueError("empty or out-of-range subset")
        return mask - 1

    def name(self, mask: int) -> str:
        return "h_{" + ",".join(str(i) for i in self.subset_of(mask)) + "}"

    def names(self) -> list[str]:
        return [self.name(m) for m in range(1, self.dim + 1)]


def shannon_outer_bound(n: int) -> HRepresentation:
    """The elemental Shannon inequalities: C(N,2) 2^(N-2) + N canonical rows."""
    if n > MAX_N:
        raise NTooLarge(f"N={n} exceeds the cap {MAX_N}")
    idx = EntropyIndex(n)
    dim = idx.dim
    full = dim
    rows = []
    for i in range(n):
        v = [0] * dim
        v[full - 1] += 1
        v[(full ^ (1 << i)) - 1] -= 1
        rows.append(LinearInequality(tuple(v), 0))
    for i, j in combinations(range(n), 2):
        rest = [k for k in range(n) if k not in (i, j)]
        for r in range(len(rest) + 1):
            for ks in combinations(rest, r):
                km = sum(1 << k for k in ks)
                v = [0] * dim
                v[(km | 1 << i) - 1] += 1
                v[(km | 1 << j) - 1] += 1
                if km:
                    v[km - 1] -= 1
                v[(km | 1 << i | 1 << j) - 1] -= 1
                rows.append(LinearInequality(tuple(v), 0))
    return HRepresentation.of(dim, rows, coordinate_names=idx.names())


# --- network problems ---------------------------------------------------------


@dataclass(frozen=True)
class NetworkProblem:
    """Sources 1..S, hyperedges S+1..N with input sets, sinks with demands."""

    num_sources: int
    edges: tuple                     # ((edge_id, frozenset inputs), ...)
    sinks: tuple                     # ((frozenset has, frozenset wants), ...)
    rate_ties: tuple = ()            # (frozenset of edge ids, ...)

    def __post_init__(self):
        s = self.num_sources
        if s < 1:
            raise InvalidProblem("need at least one source")
        ids = [e for e, _ in self.edges]
        expected = list(range(s + 1, s + 1 + len(ids)))
        if ids != expected:
            raise InvalidProblem(
                f"edge labels must be consecutive {expected}, got {ids}"
            )
        n = self.n
        for e, inputs in self.edges:
            if not inputs:
                raise InvalidProblem(f"edge {e} has no inputs")
            if not all(1 <= x <= n and x != e for x in inputs):
                raise InvalidProblem(f"edge {e} has invalid inputs {sorted(inputs)}")
        # acyclicity of the edge dependency relation
        state = {}

        def visit(e):
            if state.get(e) == 1:
                raise InvalidProblem("edge dependencies contain a cycle")
            if state.get(e) == 2:
                return
            state[e] = 1
            for x in dict(self.edges)[e]:
                if x > s:
                    visit(x)
            state[e] = 2

        for e, _ in self.edges:
            visit(e)
        if not self.sinks:
            raise InvalidProblem("need at least one sink")
        for has, wants in self.sinks:
            if not has or not all(1 <= x <= n for x in has):
                raise InvalidProblem(f"sink inputs {sorted(has)} invalid")
            if not wants or not all(1 <= x <= s for x in wants):
                raise InvalidProblem(f"sink demands {sorted(wants)} must be sources")
        edge_ids = set(ids)
        for tie in self.rate_ties:
            if not set(tie) <= edge_ids or len(tie) < 2:
                raise InvalidProblem(f"rate tie {sorted(tie)} invalid")

    @property
    def n(self) -> int:
        return self.num_sources + len(self.edges)

    @property
    def source_ids(self) -> tuple[int, ...]:
        return tuple(range(1, self.num_sources + 1))

    @property
    def edge_ids(self) -> tuple[int, ...]:
        return tuple(e for e, _ in self.edges)

    @classmethod
    def of(cls, num_sources, edges, sinks, rate_ties=()):
        return cls(
            num_sources,
            tuple((int(e), frozenset(int(x) for x in inputs)) for e, inputs in edges),
            tuple((frozenset(int(x) for x in has), frozenset(int(x) for x in wants))
                  for has, wants in sinks),
            tuple(frozenset(int(x) for x in tie) for tie in rate_ties),
        )

    @classmethod
    def from_json(cls, text: str) -> "NetworkProblem":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidProblem(f"problem file is not valid JSON: {exc}")
        try:
            edges = [(e["id"], e["inputs"]) for e in data["edges"]]
            sinks = [(t["has"], t["wants"]) for t in data["sinks"]]
        except (KeyError, TypeError) as exc:
            raise InvalidProblem(f"problem file is missing field: {exc}")
        return cls.of(data["sources"], edges, sinks, data.get("rate_ties", ()))

    def to_json(self) -> str:
        return json.dumps({
            "sources": self.num_sources,
            "edges": [{"id": e, "inputs": sorted(i)} for e, i in self.edges],
            "sinks": [{"has": sorted(h), "wants": sorted(w)} for h, w in self.sinks],
            "rate_ties": [sorted(t) for t in self.rate_ties],
        }, indent=2)

    def encoder_groups(self) -> list[tuple[frozenset, frozenset]]:
        """Edges grouped by identical input set: one coding node per group."""
        groups: dict[frozenset, set] = {}
        for e, inputs in self.edges:
            groups.setdefault(inputs, set()).add(e)
        return sorted(
            ((ins, frozenset(outs)) for ins, outs in groups.items()),
            key=lambda p: (sorted(p[0]), sorted(p[1])),
        )


def problem_coordinate_names(p: NetworkProblem) -> list[str]:
    return [f"w{s}" for s in p.source_ids] + [f"R{e}" for e in p.edge_ids]


def build_constraints(p: NetworkProblem):
    """Network constraints over (h, r) space: dim 2^N - 1 + |edges|.

    Returns (equalities, inequalities): source independence (one row),
    coding constraints h_{In u Out} == h_In per coding node, decoding
    constraints h_{wants u has} == h_has per sink, edge capacity rows
    R_e >= h_e, and any rate-tie equalities.
    """
    idx = EntropyIndex(p.n)
    hdim = idx.dim
    dim = hdim + len(p.edges)
    rate_pos = {e: hdim + i for i, e in enumerate(p.edge_ids)}

    def hrow(*pairs):
        v = [0] * dim
        for coef, subset in pairs:
            v[idx.coord(subset)] += coef
        return v

    equalities = []
    src_mask = idx.mask_of(p.source_ids)
    row = hrow((-1, src_mask), *[(1, (s,)) for s in p.source_ids])
    if any(c != 0 for c in row):
        equalities.append(LinearEquality(tuple(row), 0))
    for ins, outs in p.encoder_groups():
        both = idx.mask_of(ins) | idx.mask_of(outs)
        if both != idx.mask_of(ins):
            equalities.append(LinearEquality(
                tuple(hrow((1, both), (-1, idx.mask_of(ins)))), 0))
    for has, wants in p.sinks:
        both = idx.mask_of(has) | idx.mask_of(wants)
        if both != idx.mask_of(has):
            equalities.append(LinearEquality(
                tuple(hrow((1, both), (-1, idx.mask_of(has)))), 0))
    for tie in p.rate_ties:
        members = sorted(tie)
        lead = members[0]
        for other in members[1:]:
            v = [0] * dim
            v[rate_pos[lead]] = 1
            v[rate_pos[other]] = -1
            equalities.append(LinearEquality(tuple(v), 0))

    inequalities = []
    for e in p.edge_ids:
        v = [0] * dim
        v[rate_pos[e]] = 1
        v[idx.coord((e,))] = -1
        inequalities.append(LinearInequality(tuple(v), 0))
    return (
        tuple(canonicalize_equality(e) for e in equalities),
        tuple(canonicalize_inequality(r) for r in inequalities),
    )


def _structure_signature(p: NetworkProblem):
    encoders = frozenset((ins, outs) for ins, outs in p.encoder_groups())
    sinks = {}
    for has, wants in p.sinks:
        key = (has, wants)
        sinks[key] = sinks.get(key, 0) + 1
    ties = frozenset(p.rate_ties)
    return encoders, sinks, ties


def network_symmetry_group(p: NetworkProblem,
                           search_cap: int = NSG_SEARCH_CAP) -> FiniteGroup:
    """Random-variable permutations fixing the constraint set setwise.

    Searched inside S_sources x S_edges (sources and edges can never swap
    because the independence constraint names only sources).
    """
    import math

    if p.n > 12:
        raise SearchCapExceeded("NSG brute force is capped at N = 12")
    s, m = p.num_sources, len(p.edges)
    if math.factorial(s) * math.factorial(m) > search_cap:
        raise SearchCapExceeded("NSG search space exceeds the cap")
    encoders, sinks, ties = _structure_signature(p)
    n = p.n
    found = []
    for src_perm in permutations(range(1, s + 1)):
        for edge_perm in permutations(range(s + 1, n + 1)):
            images = src_perm + edge_perm
            g = Permutation(images)

            def act_set(fs):
                return frozenset(images[x - 1] for x in fs)

            enc_img = frozenset((act_set(i), act_set(o)) for i, o in encoders)
            if enc_img != encoders:
                continue
            sink_img = {}
            for (has, wants), cnt in sinks.items():
                key = (act_set(has), act_set(wants))
                sink_img[key] = sink_img.get(key, 0) + cnt
            if sink_img != sinks:
                continue
            if frozenset(act_set(t) for t in ties) != ties:
                continue
            found.append(g)
    gens = minimal_generators(found, n)
    group = FiniteGroup(gens, degree=n)
    group._elements = tuple(sorted(found))
    return group


def nsg_projection_action(p: NetworkProblem, group: FiniteGroup) -> FiniteGroup:
    """Restrict a variable-permutation NSG to the (w, R) projection coords."""
    k = p.num_sources + len(p.edges)
    pos = {s: i + 1 for i, s in enumerate(p.source_ids)}
    pos.update({e: p.num_sources + i + 1 for i, e in enumerate(p.edge_ids)})
    gens = []
    for g in group.generators:
        images = [0] * k
        for label, position in pos.items():
            images[position - 1] = pos[g(label)]
        gens.append(Permutation(tuple(images)))
    return FiniteGroup(gens, degree=k)


# --- rate regions ---------------------------------------------------------------


@dataclass(frozen=True)
class RateRegion:
    """Explicit polyhedral outer bound in the (w, R) coordinates."""

    coordinates: tuple[str, ...]
    inequalities: tuple[LinearInequality, ...]
    rays: tuple = ()
    group: FiniteGroup | None = None
    facet_orbit_reps: tuple | None = None
    vertex_orbit_reps: tuple | None = None
    certificates: dict | None = None
    stats: chm.ProjectionStats | None = None
    parent: HRepresentation | None = None

    @property
    def k(self) -> int:
        return len(self.coordinates)


def parse_entropy_inequalities(text: str, n: int) -> list[LinearInequality]:
    """One homogeneous inequality per line over named coordinates h_{...}.

    Grammar per line:  [+-] [coef] h_{i,j,...} ... >= 0
    """
    import re

    idx = EntropyIndex(n)
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ">=" not in line:
            raise ValueError(f"line {lineno}: expected '>= 0'")
        lhs, rhs = line.split(">=")
        if rat(rhs.strip()) != 0:
            raise ValueError(f"line {lineno}: inequalities must be homogeneous")
        v = [Q(0)] * idx.dim
        token = re.compile(
            r"\s*([+-]?)\s*(\d+(?:/\d+)?)?\s*\*?\s*h_\{([0-9,\s]+)\}"
        )
        pos = 0
        matched = False
        while pos < len(lhs.rstrip()):
            m = token.match(lhs, pos)
            if not m:
                break
            matched = True
            sign = -1 if m.group(1) == "-" else 1
            coef = rat(m.group(2)) if m.group(2) else Q(1)
            subset = [int(x) for x in m.group(3).replace(" ", "").split(",") if x]
            v[idx.coord(subset)] += sign * coef
            pos = m.end()
        if not matched or lhs[pos:].strip():
            raise ValueError(f"line {lineno}: cannot parse {raw!r}")
        rows.append(canonicalize_inequality(LinearInequality(tuple(v), 0)))
    return rows


def determination_closure(p: NetworkProblem):
    """Closure operator on variable subsets under the coding/decoding rules.

    Each coding node determines its outputs from its inputs and each sink
    determines its demands from its inputs, so h_{cl(A)} == h_A holds on the
    whole constrained cone (H(D|C) == 0 and C <= A give H(D|A) == 0).
    Returns a mask -> closed-mask table.
    """
    idx = EntropyIndex(p.n)
    rules = []
    for ins, outs in p.encoder_groups():
        rules.append((idx.mask_of(ins), idx.mask_of(outs)))
    for has, wants in p.sinks:
        rules.append((idx.mask_of(has), idx.mask_of(wants)))
    table = {}
    for mask in range(1, idx.dim + 1):
        cur = mask
        changed = True
        while changed:
            changed = False
            for cond, add in rules:
                if cur & cond == cond and cur | add != cur:
                    cur |= add
                    changed = True
        table[mask] = cur
    return table


def _assemble_parent(p: NetworkProblem, extra_rows=()):
    """Parent system in kept-first coordinate order: (w, R) then other h's.

    Besides the network constraints, the Shannon-implied determination
    equalities h_{cl(A)} == h_A are added; they do not change the cone but
    collapse its hidden degeneracy, which keeps the projection LPs small.
    Returns (parent HRepresentation, k, kept-first coordinate names).
    """
    idx = EntropyIndex(p.n)
    hdim = idx.dim
    dim = hdim + len(p.edges)
    tie_drop = set()
    for tie in p.rate_ties:
        members = sorted(tie)
        tie_drop.update(members[1:])
    kept_edges = [e for e in p.edge_ids if e not in tie_drop]
    k = p.num_sources + len(kept_edges)

    # natural order: h-coordinates by mask, then rates by edge order
    kept_natural = [idx.coord((s,)) for s in p.source_ids]
    kept_natural += [hdim + p.edge_ids.index(e) for e in kept_edges]
    rest = [i for i in range(dim) if i not in set(kept_natural)]
    order = kept_natural + rest                 # assembled index -> natural index
    inv = {nat: new for new, nat in enumerate(order)}

    def permute(row):
        return tuple(row[order[i]] for i in range(dim))

    shannon = shannon_outer_bound(p.n)
    equalities, l4 = build_constraints(p)
    ineqs = [LinearInequality(permute(tuple(r.normal) + (0,) * len(p.edges)), 0)
             for r in shannon.inequalities]
    ineqs += [LinearInequality(permute(r.normal), 0) for r in l4]
    for r in extra_rows:
        if r.dim != hdim:
            raise ValueError("extra inequalities must live in entropy space")
        ineqs.append(LinearInequality(
            permute(tuple(r.normal) + (0,) * len(p.edges)), rat(r.offset)))
    eqs = [LinearEquality(permute(r.normal), 0) for r in equalities]
    for mask, closed in determination_closure(p).items():
        if closed != mask:
            v = [0] * dim
            v[closed - 1] += 1
            v[mask - 1] -= 1
            eqs.append(LinearEquality(permute(tuple(v)), 0))
    names = [f"w{s}" for s in p.source_ids] + [f"R{e}" for e in kept_edges]
    for nat in rest:
        if nat < hdim:
            names.append(idx.name(nat + 1))
        else:
            names.append(f"R{p.edge_ids[nat - hdim]}")
    parent = HRepresentation.of(dim, ineqs, eqs, names)
    return parent, k, names


def rate_region(p: NetworkProblem, use_symmetry: bool = True,
                extra_entropy_inequalities=(), group_override=None,
                reduce_redundancies: str | bool = "auto",
                certify: bool = False, threads: int = 1) -> RateRegion:
    """Explicit polyhedral outer bound of the network's rate region.

    Pipeline: assemble the Shannon bound (plus any user inequalities) with
    the network constraints in (h, r) space, eliminate the equalities,
    optionally remove redundant rows, add the bounding inequality over the
    kept (w, R) block, project with CHM or symCHM, and strip the bounding
    row.
    """
    parent_full, k, names = _assemble_parent(p, tuple(extra_entropy_inequalities))
    reduced, back = eliminate_equalities(parent_full)
    kept_names = reduced.coordinate_names[:k] if reduced.coordinate_names else ()
    if tuple(kept_names) != tuple(names[:k]):
        pinned = [n for n in names[:k] if n not in set(kept_names)]
        raise NotFullDimensional(
            f"projection coordinates {pinned} are pinned by the constraints"
        )
    if reduce_redundancies is True or (
        reduce_redundancies == "auto"
        and len(reduced.inequalities) * reduced.dim <= AUTO_REDUCE_CELL_CAP
    ):
        logger.info("reducing %d inequalities in dimension %d",
                    len(reduced.inequalities), reduced.dim)
        reduced = remove_redundancies(reduced)
        logger.info("%d inequalities remain", len(reduced.inequalities))
    bounded = boundedness_transform(reduced, k)
    group = None
    if use_symmetry:
        if group_override is not None:
            group = group_override
        elif not p.rate_ties:
            group = nsg_projection_action(p, network_symmetry_group(p))
        else:
            group = FiniteGroup.trivial(k)
        if group.order == 1:
            group = None
    try:
        if group is not None:
            sym = symchm.sym_chm_project(bounded, k, group)
            res = sym.result
            facet_reps = sym.facet_orbit_reps
            vertex_reps = sym.vertex_orbit_reps
        else:
            res = chm.chm_project(bounded, k, threads=threads)
            facet_reps = None
            vertex_reps = None
    except ProjectionNotFullDimensional as exc:
        raise NotFullDimensional(
            f"rate region is lower-dimensional: implied equality "
            f"{exc.normal} . x == {exc.value} over {names[:k]}"
        ) from exc
    region_h = strip_bounding(res.h, k)
    from .polyhedra import canonical_ray
    rays = tuple(sorted({canonical_ray(v) for v in res.vertices
                         if any(c != 0 for c in v)}))
    region = RateRegion(
        coordinates=tuple(names[:k]),
        inequalities=region_h.inequalities,
        rays=rays,
        group=group,
        facet_orbit_reps=facet_reps,
        vertex_orbit_reps=vertex_reps,
        stats=res.stats,
        parent=parent_full,
    )
    if certify:
        region = certify_region(region, parent_full)
    return region


def certify_region(region: RateRegion, parent: HRepresentation) -> RateRegion:
    """Attach an arithmetic-verified Farkas certificate to every inequality."""
    from dataclasses import replace

    certs = {}
    for row in region.inequalities:
        target = LinearInequality(
            tuple(row.normal) + (0,) * (parent.dim - region.k), rat(row.offset)
        )
        lam, mu = lp.farkas_certificate(parent, target)
        if not lp.verify_certificate(parent, target, lam, mu):
            raise NotImplied(
                f"internal soundness bug: certificate for {row} failed arithmetic"
            )
        certs[row] = {"inequalities": lam, "equalities": mu}
    return replace(region, certificates=certs)


# --- ITCP-style rendering -------------------------------------------------------


def _coef_str(q) -> str:
    q = rat(q)
    if q == 1:
        return ""
    if q.denominator == 1:
        return f"{q.numerator} "
    return f"{q.numerator}/{q.denominator} "


def render_inequality(row: LinearInequality, names) -> str:
    """ITCP text style: rate terms left, source terms right, e.g. "+R4 >= +w3"."""
    lhs, rhs = [], []
    for c, name in zip(row.normal, names):
        if c == 0:
            continue
        c = rat(c)
        if name.startswith("R"):
            side, coef = lhs, c
        else:
            side, coef = rhs, -c
        sign = "+" if coef > 0 else "-"
        side.append(f"{sign}{_coef_str(abs(coef))}{name}")
    if rat(row.offset) != 0:
        rhs.append(f"{'+' if -rat(row.offset) > 0 else '-'}"
                   f"{_coef_str(abs(rat(row.offset)))}1")
    return f"{' '.join(lhs) if lhs else '0'} >= {' '.join(rhs) if rhs else '0'}"


def region_lines(region: RateRegion, expand: bool = True) -> list[str]:
    rows = region.inequalities
    if not expand and region.facet_orbit_reps is not None:
        rows = sorted(chm.ineq_of_ray(r) for r in region.facet_orbit_reps)
    return [render_inequality(r, region.coordinates) for r in rows]


# --- scalar LP applications ----------------------------------------------------


@dataclass(frozen=True)
class ScalarBoundResult:
    value: object
    lp_dim: int
    lp_dim_reduced: int
    group_order: int


def _merge_equalities(dim: int, blocks) -> list[LinearEquality]:
    merges = []
    for block in blocks:
        rep = block[0]
        for other in block[1:]:
            v = [0] * dim
            v[rep] = 1
            v[other] = -1
            merges.append(LinearEquality(tuple(v), 0))
    return merges


def _solve_substituted(dim, ineq_rows, eq_rows, closure_eqs, objective,
                       minimize=True):
    """Minimize the objective after substituting the closure equalities.

    Returns (status, value, posed dimension).  `eq_rows` stay as rows of the
    LP rather than being eliminated, so the posed dimension counts only the
    closure substitutions.
    """
    elim = solve_equalities(closure_eqs, dim)
    posed_dim = len(elim.free)
    ineqs = []
    for row in ineq_rows:
        normal, off = elim.substitute(row.normal, row.offset)
        if any(c != 0 for c in normal):
            ineqs.append(LinearInequality(normal, off))
        elif off > 0:
            return lp.INFEASIBLE, None, posed_dim
    eqs = []
    for row in eq_rows:
        normal, off = elim.substitute(row.normal, row.offset)
        if any(c != 0 for c in normal):
            eqs.append(LinearEquality(normal, off))
        elif off != 0:
            return lp.INFEASIBLE, None, posed_dim
    system = HRepresentation.of(posed_dim, ineqs, eqs)
    c, shift = elim.substitute(objective, 0)
    out = lp.LinearSystem(system).minimize(c)
    if out.status != lp.OPTIMAL:
        return out.status, None, posed_dim
    return lp.OPTIMAL, out.value - shift, posed_dim


def sum_rate_upper_bound(p: NetworkProblem, weights=None,
                         capacities=None) -> ScalarBoundResult:
    """Max weighted sum of source rates under pinned edge capacities.

    The coding/decoding closure equalities are substituted away; source
    independence and the capacity pins stay as rows.  The symmetric solve
    merges entropy coordinates over orbits of the weight/capacity stabilizer
    inside the network symmetry group; both optima must agree exactly.
    """
    idx = EntropyIndex(p.n)
    hdim = idx.dim
    dim = hdim + len(p.edges)
    rate_pos = {e: hdim + i for i, e in enumerate(p.edge_ids)}
    if weights is None:
        weights = [1] * p.num_sources
    if capacities is None:
        capacities = [1] * len(p.edges)
    weights = {s: rat(w) for s, w in zip(p.source_ids, weights)}
    capacities = {e: rat(c) for e, c in zip(p.edge_ids, capacities)}
    if any(c < 0 for c in capacities.values()):
        raise InvalidProblem("capacities must be nonnegative")

    _, l4 = build_constraints(p)
    closure = []
    for e, inputs in p.edges:           # one determination row per edge
        both = idx.mask_of(inputs) | idx.mask_of((e,))
        if both != idx.mask_of(inputs):
            v = [0] * dim
            v[both - 1] += 1
            v[idx.mask_of(inputs) - 1] -= 1
            closure.append(LinearEquality(tuple(v), 0))
    for has, wants in p.sinks:
        both = idx.mask_of(has) | idx.mask_of(wants)
        if both != idx.mask_of(has):
            v = [0] * dim
            v[both - 1] += 1
            v[idx.mask_of(has) - 1] -= 1
            closure.append(LinearEquality(tuple(v), 0))
    row_eqs = []
    src_mask = idx.mask_of(p.source_ids)
    v = [0] * dim
    v[src_mask - 1] -= 1
    for s in p.source_ids:
        v[idx.mask_of((s,)) - 1] += 1
    if any(c != 0 for c in v):
        row_eqs.append(LinearEquality(tuple(v), 0))    # source independence
    for tie in p.rate_ties:
        members = sorted(tie)
        for other in members[1:]:
            v = [0] * dim
            v[rate_pos[members[0]]] = 1
            v[rate_pos[other]] = -1
            row_eqs.append(LinearEquality(tuple(v), 0))
    for e in p.edge_ids:
        v = [0] * dim
        v[rate_pos[e]] = 1
        row_eqs.append(LinearEquality(tuple(v), capacities[e]))
    shannon = shannon_outer_bound(p.n)
    ineqs = [LinearInequality(tuple(r.normal) + (0,) * len(p.edges), 0)
             for r in shannon.inequalities]
    ineqs += list(l4)
    objective = [Q(0)] * dim
    for s in p.source_ids:
        objective[idx.coord((s,))] = -weights[s]

    status, value, lp_dim = _solve_substituted(
        dim, ineqs, row_eqs, closure, tuple(objective))
    logger.info("Original LP dimension...%d", lp_dim)
    if status == lp.INFEASIBLE:
        raise InvalidProblem("capacity-pinned system is infeasible")
    if status == lp.UNBOUNDED:
        raise InvalidProblem("sum-rate LP unbounded; are all capacities pinned?")

    nsg = network_symmetry_group(p)
    stab = [g for g in nsg.elements
            if all(weights[g(s)] == weights[s] for s in p.source_ids)
            and all(capacities[g(e)] == capacities[e] for e in p.edge_ids)]
    gens = minimal_generators(stab, p.n)
    group = FiniteGroup(gens, degree=p.n)
    group._elements = tuple(sorted(stab))
    seen = set()
    blocks = []
    for mask in range(1, hdim + 1):
        if mask in seen:
            continue
        block = sorted({g.act_mask(mask) for g in group.elements})
        seen.update(block)
        if len(block) > 1:
            blocks.append(tuple(m - 1 for m in block))
    merges = _merge_equalities(dim, blocks)
    status2, value2, lp_dim_red = _solve_substituted(
        dim, ineqs, row_eqs, closure + merges, tuple(objective))
    logger.info("LP dimension after considering symmetries...%d", lp_dim_red)
    if status2 != lp.OPTIMAL or value2 != value:
        raise AssertionError("reduced and full sum-rate optima disagree")
    return ScalarBoundResult(-value, lp_dim, lp_dim_red, group.order)


def _monotone_closure(minimal_sets, parties) -> list[frozenset]:
    out = []
    for r in range(1, len(parties) + 1):
        for sub in combinations(sorted(parties), r):
            s = frozenset(sub)
            if any(m <= s for m in minimal_sets):
                out.append(s)
    return out


def secret_sharing_info_ratio_lb(authorized_sets, n_vars: int) -> ScalarBoundResult:
    """Lower bound on the worst-case information ratio of an access structure.

    Dealer is variable 1; shares are variables 2..n.  Minimizes t subject to
    the Shannon cone with: h_{A u 1} == h_A for authorized A (monotone
    closure), independence h_{U u 1} == h_U + h_1 for maximal unauthorized U,
    h_1 == 1, and h_i <= t for every party.  All of these are substituted
    into the LP, whose dimension is reported before and after merging
    coordinates over the access structure's symmetry group.
    """
    parties = frozenset(range(2, n_vars + 1))
    minimal = [frozenset(a) for a in authorized_sets]
    if not minimal:
        raise InvalidAccessStructure("need at least one authorized set")
    for a in minimal:
        if 1 in a:
            raise InvalidAccessStructure("authorized sets cannot contain the dealer")
        if not a <= parties:
            raise InvalidAccessStructure(f"authorized set {sorted(a)} out of range")
    idx = EntropyIndex(n_vars)
    hdim = idx.dim
    dim = hdim + 1                       # last coordinate is t
    t_pos = hdim

    authorized = _monotone_closure(minimal, parties)
    auth_set = set(authorized)
    unauthorized = [frozenset(s) for r in range(1, len(parties) + 1)
                    for s in combinations(sorted(parties), r)
                    if frozenset(s) not in auth_set]
    maximal_unauth = [u for u in unauthorized
                      if all(u | {q} in auth_set for q in parties - u)]

    def hrow(*pairs):
        v = [0] * dim
        for coef, subset in pairs:
            v[idx.coord(subset)] += coef
        return v

    closure = []
    for a in authorized:
        closure.append(LinearEquality(
            tuple(hrow((1, a | {1}), (-1, a))), 0))
    for u in maximal_unauth:
        closure.append(LinearEquality(
            tuple(hrow((1, u | {1}), (-1, u), (-1, {1}))), 0))
    pin = [0] * dim
    pin[idx.coord({1})] = 1
    closure.append(LinearEquality(tuple(pin), 1))

    shannon = shannon_outer_bound(n_vars)
    ineqs = [LinearInequality(tuple(r.normal) + (0,), 0)
             for r in shannon.inequalities]
    for q in sorted(parties):
        v = [0] * dim
        v[idx.coord({q})] = -1
        v[t_pos] = 1
        ineqs.append(LinearInequality(tuple(v), 0))   # t >= h_q
    objective = [Q(0)] * dim
    objective[t_pos] = Q(1)

    status, value, lp_dim = _solve_substituted(dim, ineqs, [], closure,
                                               tuple(objective))
    logger.info("Original LP dimension...%d", lp_dim)
    if status != lp.OPTIMAL:
        raise InvalidAccessStructure(f"information-ratio LP is {status}")

    autos = []
    for img in permutations(sorted(parties)):
        perm = Permutation((1,) + img)
        if {frozenset(perm(x) for x in a) for a in minimal} == set(minimal):
            autos.append(perm)
    gens = minimal_generators(autos, n_vars)
    group = FiniteGroup(gens, degree=n_vars)
    group._elements = tuple(sorted(autos))
    seen = set()
    blocks = []
    for mask in range(1, hdim + 1):
        if mask in seen:
            continue
        block = sorted({g.act_mask(mask) for g in group.elements})
        seen.update(block)
        if len(block) > 1:
            blocks.append(tuple(m - 1 for m in block))
    status2, value2, lp_dim_red = _solve_substituted(
        dim, ineqs, [], closure + _merge_equalities(dim, blocks),
        tuple(objective))
    logger.info("LP dimension after considering symmetries...%d", lp_dim_red)
    if status2 != lp.OPTIMAL or value2 != value:
        raise AssertionError("reduced and full information-ratio optima disagree")
    return ScalarBoundResult(value, lp_dim, lp_dim_red, group.order)


def guessing_number_ub(vertices, in_neighbors) -> ScalarBoundResult:
    """Shannon upper bound on the guessing number of a simple digraph.

    Maximizes h_N subject to h_{In(i) u i} == h_{In(i)} per vertex and
    h_i <= 1; the full-set coordinate is substituted via h_N == h_{N minus
    last vertex}.  The reported dimensions bracket the merge over the
    digraph's automorphism orbits.
    """
    verts = sorted(int(v) for v in vertices)
    n = len(verts)
    if n < 1 or n > 8:
        raise InvalidDigraph("need between 1 and 8 vertices")
    if verts != list(range(1, n + 1)):
        raise InvalidDigraph("vertices must be labeled 1..n")
    ins = {int(v): frozenset(int(x) for x in in_neighbors.get(v, in_neighbors.get(str(v), ())))
           for v in verts}
    for v, nb in ins.items():
        if v in nb or not nb <= set(verts):
            raise InvalidDigraph(f"invalid in-neighborhood for vertex {v}")
    idx = EntropyIndex(n)
    hdim = idx.dim

    def hrow(*pairs):
        v = [0] * hdim
        for coef, subset in pairs:
            if subset:
                v[idx.coord(subset)] += coef
        return v

    closure = []
    for v in verts:
        if ins[v]:
            closure.append(LinearEquality(
                tuple(hrow((1, ins[v] | {v}), (-1, ins[v]))), 0))
        else:
            closure.append(LinearEquality(tuple(hrow((1, {v}))), 0))
    full = frozenset(verts)
    if n > 1:
        closure.append(LinearEquality(
            tuple(hrow((1, full), (-1, full - {n}))), 0))

    shannon = shannon_outer_bound(n)
    ineqs = list(shannon.inequalities)
    for v in verts:
        row = [0] * hdim
        row[idx.coord({v})] = -1
        ineqs.append(LinearInequality(tuple(row), -1))    # h_v <= 1
    objective = [Q(0)] * hdim
    objective[idx.coord(full)] = Q(-1)

    status, value, lp_dim = _solve_substituted(hdim, ineqs, [], closure,
                                               tuple(objective))
    logger.info("Original LP dimension...%d", lp_dim)
    if status != lp.OPTIMAL:
        raise InvalidDigraph(f"guessing LP is {status}")

    autos = []
    for img in permutations(range(1, n + 1)):
        perm = Permutation(img)
        if all(frozenset(perm(x) for x in ins[v]) == ins[perm(v)] for v in verts):
            autos.append(perm)
    gens = minimal_generators(autos, n)
    group = FiniteGroup(gens, degree=n)
    group._elements = tuple(sorted(autos))
    seen = set()
    blocks = []
    for mask in range(1, hdim + 1):
        if mask in seen:
            continue
        block = sorted({g.act_mask(mask) for g in group.elements})
        seen.update(block)
        if len(block) > 1:
            blocks.append(tuple(m - 1 for m in block))
    status2, value2, lp_dim_red = _solve_substituted(
        hdim, ineqs, [], closure + _merge_equalities(hdim, blocks),
        tuple(objective))
    logger.info("LP dimension after considering symmetries...%d", lp_dim_red)
    if status2 != lp.OPTIMAL or value2 != value:
        raise AssertionError("reduced and full guessing optima disagree")
    return ScalarBoundResult(-value, lp_dim, lp_dim_red, group.order)
