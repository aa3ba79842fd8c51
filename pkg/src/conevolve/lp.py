"""Exact rational linear programming.

Minimizes c.x over an HRepresentation.  The solver is an active-set simplex
working directly on the inequality rows: a vertex is held as a basis of dim
tight rows and the inverse of the basis matrix is updated per pivot.  The
pivot rule is steepest reduced cost with a least-index (Bland) fallback that
engages after a run of degenerate pivots, so runs are deterministic, cannot
cycle, and stay fast on the very degenerate cones arising here.

Equalities are eliminated exactly up front; lineality directions of the
remaining inequality system are quotiented out the same way, so a starting
vertex always exists.  Dual multipliers come straight from the optimal basis
and are mapped back to the original rows, with equality multipliers recovered
by one exact linear solve.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    DimensionMismatch,
    InconsistentEqualities,
    InfeasibleSystem,
    NotImplied,
)
from .polyhedra import (
    HRepresentation,
    LinearInequality,
    canonicalize_inequality,
    solve_equalities,
)
from .rational import Q, dot, intify, nullspace, primitive_scale, rat, solve_linear, vec

OPTIMAL = "optimal"
UNBOUNDED = "unbounded"
INFEASIBLE = "infeasible"

_MAX_PIVOTS = 5_000_000
_STALL_LIMIT = 50        # degenerate pivots before switching to Bland's rule


@dataclass(frozen=True)
class LinearProgram:
    """Minimize objective . x subject to the constraints."""

    objective: tuple
    constraints: HRepresentation

    @property
    def dim(self) -> int:
        return self.constraints.dim


@dataclass(frozen=True)
class LPOutcome:
    status: str
    value: object = None
    primal_vertex: tuple | None = None
    dual_inequalities: dict | None = None      # inequality index -> multiplier >= 0
    dual_equalities: dict | None = None        # equality index -> multiplier
    ray: tuple | None = None
    farkas_inequalities: dict | None = None
    farkas_equalities: dict | None = None


class _Unbounded(Exception):
    def __init__(self, direction):
        self.direction = direction


class _ActiveSet:
    """Simplex core over {x : rows[i] . x >= offsets[i]} in R^n.

    ``basis`` holds n row indices whose normals are independent; ``minv`` is
    the inverse of the basis matrix with columns indexed by basis position.
    Rows are also kept in sparse form, which makes the pricing pass cheap on
    the very sparse systems arising from entropy inequalities.
    """

    def __init__(self, rows, offsets, n):
        self.rows = rows                    # list[tuple[int, ...]]
        self.sparse = [[(j, c) for j, c in enumerate(row) if c]
                       for row in rows]
        self.offsets = offsets              # list[Q]
        self.n = n
        self.point = None                   # list[Q]
        self.slacks = None                  # list[Q]
        self.basis = None                   # list[int]
        self.minv = None                    # list[list[Q]] (n x n)
        self.pivots = 0

    def clone(self):
        other = _ActiveSet.__new__(_ActiveSet)
        other.rows = self.rows
        other.sparse = self.sparse
        other.offsets = self.offsets
        other.n = self.n
        other.point = list(self.point)
        other.slacks = list(self.slacks)
        other.basis = list(self.basis)
        other.minv = [col_row[:] for col_row in self.minv]
        other.pivots = 0
        return other

    def set_basis(self, basis, minv=None):
        from .rational import invert

        self.basis = list(basis)
        if minv is None:
            minv = invert([self.rows[i] for i in self.basis])
            if minv is None:
                raise ValueError("basis rows are dependent")
        self.minv = minv
        rhs = [self.offsets[i] for i in self.basis]
        self.point = [dot(self.minv[i], rhs) for i in range(self.n)]
        self.slacks = [dot(self.rows[j], self.point) - self.offsets[j]
                       for j in range(len(self.rows))]

    def minimize(self, c):
        """Phase 2 from the current feasible vertex; exact and deterministic.

        Pivot rule: steepest reduced cost (Dantzig), falling back to the
        least-index (Bland) rule while a run of degenerate pivots exceeds the
        stall limit, which preserves the termination guarantee.  Returns
        duals per basis position; raises _Unbounded with the improving
        feasible direction when the LP is unbounded below.
        """
        n = self.n
        sparse = self.sparse
        basis_set = set(self.basis)
        zero = Q(0)
        stall = 0
        bland = False
        for _ in range(_MAX_PIVOTS):
            minv = self.minv
            lam = [zero] * n
            for i in range(n):
                ci = c[i]
                if ci == 0:
                    continue
                col = minv[i]
                for p in range(n):
                    if col[p]:
                        lam[p] += ci * col[p]
            leave_pos = -1
            leave_row = None
            if bland:
                for p in range(n):
                    if lam[p] < 0:
                        r = self.basis[p]
                        if leave_row is None or r < leave_row:
                            leave_row = r
                            leave_pos = p
            else:
                best = zero
                for p in range(n):
                    lp_ = lam[p]
                    if lp_ < best or (lp_ == best and lp_ < 0
                                      and self.basis[p] < leave_row):
                        best = lp_
                        leave_row = self.basis[p]
                        leave_pos = p
            if leave_row is None:
                duals = {}
                for p in range(n):
                    if lam[p] != 0:
                        duals[self.basis[p]] = lam[p]
                return duals
            u = [minv[i][leave_pos] for i in range(n)]
            best_t = None
            enter = -1
            wvals = {}
            slacks = self.slacks
            for j in range(len(sparse)):
                if j in basis_set:
                    continue
                w = zero
                for jj, coef in sparse[j]:
                    uj = u[jj]
                    if uj:
                        w += coef * uj
                if w:
                    wvals[j] = w
                    if w < 0:
                        t = slacks[j] / -w
                        if best_t is None or t < best_t:
                            best_t = t
                            enter = j
            if enter < 0:
                raise _Unbounded(tuple(u))
            t = best_t
            self.pivots += 1
            if t != 0:
                point = self.point
                for i in range(n):
                    if u[i]:
                        point[i] += t * u[i]
                for j, w in wvals.items():
                    slacks[j] += t * w
                stall = 0
                bland = False
            else:
                stall += 1
                if stall >= _STALL_LIMIT:
                    bland = True
            slacks[enter] = zero
            slacks[leave_row] = t
            basis_set.discard(leave_row)
            basis_set.add(enter)
            self.basis[leave_pos] = enter
            g = [zero] * n
            for jj, coef in sparse[enter]:
                col = minv[jj]
                for p in range(n):
                    if col[p]:
                        g[p] += coef * col[p]
            piv = g[leave_pos]
            newcol = [minv[i][leave_pos] / piv for i in range(n)]
            for p in range(n):
                if p == leave_pos:
                    continue
                gp = g[p]
                if gp:
                    for i in range(n):
                        if newcol[i]:
                            minv[i][p] -= gp * newcol[i]
            for i in range(n):
                minv[i][leave_pos] = newcol[i]
        raise RuntimeError("simplex exceeded the pivot cap; please report")


class LinearSystem:
    """Reusable exact solver bound to one constraint system.

    Equality elimination, lineality quotient and the phase-1 feasible vertex
    are computed once; each `minimize` call clones the cached vertex and runs
    only phase 2, so solving many objectives over the same system is cheap.
    """

    def __init__(self, constraints: HRepresentation):
        self.h = constraints
        self.dim = constraints.dim
        self.reuse_basis = True                  # warm-start follow-up solves
        self.pivots = 0
        self._infeasible = None                  # cached farkas pair
        self._feasible = None                    # cached _ActiveSet at a vertex
        try:
            self.elim1 = solve_equalities(constraints.equalities, constraints.dim)
        except InconsistentEqualities:
            mu = _equality_farkas(constraints.equalities, constraints.dim)
            self._infeasible = ({}, mu)
            return
        stage1 = []
        for idx, row in enumerate(constraints.inequalities):
            normal, offset = self.elim1.substitute(row.normal, row.offset)
            stage1.append((normal, offset))
        n1 = len(self.elim1.free)
        self.lineality = nullspace([nrm for nrm, _ in stage1], n1)
        if self.lineality:
            from .polyhedra import LinearEquality

            self.elim2 = solve_equalities(
                [LinearEquality(l, 0) for l in self.lineality], n1
            )
        else:
            self.elim2 = solve_equalities([], n1)
        self.nfinal = len(self.elim2.free)
        self._rows = []        # (int normal, offset Q, scale Q, original index)
        for idx, (normal, offset) in enumerate(stage1):
            normal, offset = self.elim2.substitute(normal, offset)
            if all(c == 0 for c in normal):
                if offset > 0:
                    lam = {idx: Q(1)}
                    mu = self._lift_equality_duals(
                        [-c for c in constraints.inequalities[idx].normal]
                    )
                    self._infeasible = (lam, mu)
                    return
                continue
            prim, scale = primitive_scale(tuple(normal) + (offset,))
            self._rows.append((prim[:-1], rat(prim[-1]), scale, idx))

    # -- helpers ------------------------------------------------------------

    def _lift_equality_duals(self, residual):
        """Solve sum_t mu_t * eq_t == residual (as row vectors)."""
        eqs = self.h.equalities
        if not eqs:
            if any(x != 0 for x in residual):
                raise AssertionError("residual outside equality span")
            return {}
        cols = [[rat(eq.normal[i]) for eq in eqs] for i in range(self.dim)]
        mu = solve_linear(cols, residual)
        if mu is None:
            raise AssertionError("residual outside equality span")
        return {t: m for t, m in enumerate(mu) if m != 0}

    def _lift_point(self, point_final):
        p1 = self.elim2.back_map().apply(point_final)
        return self.elim1.back_map().apply(p1)

    def _lift_direction(self, direction_final):
        d1 = self.elim2.back_map().apply_direction(direction_final)
        return self.elim1.back_map().apply_direction(d1)

    def _phase1(self):
        """Find a feasible vertex; cache it or a Farkas certificate."""
        if self._feasible is not None or self._infeasible is not None:
            return
        n = self.nfinal
        rows = [r[0] for r in self._rows]
        offsets = [r[1] for r in self._rows]
        if n == 0:
            engine = _ActiveSet([], [], 0)
            engine.point, engine.slacks, engine.basis, engine.minv = [], [], [], []
            self._feasible = engine
            return
        from .rational import independent_subset, invert

        base_idx = independent_subset(rows)[:n]
        if len(base_idx) < n:  # pragma: no cover - lineality was quotiented out
            raise AssertionError("inequality rows do not span after quotient")
        engine = _ActiveSet(rows, offsets, n)
        engine.set_basis(base_idx)
        if all(s >= 0 for s in engine.slacks):
            self._feasible = engine
            return
        # lifted phase-1: rows [a_i | w_i] with w_i = 1 on violated rows,
        # minimize t subject to t >= 0, starting from (y0, max violation).
        viol = [j for j, s in enumerate(engine.slacks) if s < 0]
        wcol = [1 if engine.slacks[j] < 0 else 0 for j in range(len(rows))]
        for j in base_idx:
            wcol[j] = 0
        lrows = [tuple(rows[j]) + (wcol[j],) for j in range(len(rows))]
        lrows.append((0,) * n + (1,))                       # t >= 0
        loffs = offsets + [Q(0)]
        t0 = max(-engine.slacks[j] for j in viol)
        anchor = min(j for j in viol if -engine.slacks[j] == t0)
        lifted = _ActiveSet(lrows, loffs, n + 1)
        # inverse of [[A_B, 0], [a_anchor, 1]] assembled from A_B^-1
        m0 = engine.minv
        arow = rows[anchor]
        bottom = [Q(0)] * (n + 1)
        for p in range(n):
            s = Q(0)
            for i in range(n):
                if arow[i] and m0[i][p]:
                    s += arow[i] * m0[i][p]
            bottom[p] = -s
        bottom[n] = Q(1)
        minv = [list(m0[i]) + [Q(0)] for i in range(n)]
        minv.append(bottom)
        lifted.basis = list(base_idx) + [anchor]
        lifted.minv = minv
        lifted.point = list(engine.point) + [t0]
        lifted.slacks = [dot(lrows[j], lifted.point) - loffs[j]
                         for j in range(len(lrows))]
        cobj = tuple([Q(0)] * n + [Q(1)])
        try:
            duals = lifted.minimize(cobj)
        except _Unbounded:  # pragma: no cover - t >= 0 bounds the objective
            raise AssertionError("phase-1 objective cannot be unbounded")
        tstar = lifted.point[n]
        if tstar > 0:
            lam = {}
            for j, m in duals.items():
                if j < len(self._rows) and m != 0:
                    _, _, scale, orig = self._rows[j]
                    lam[orig] = lam.get(orig, Q(0)) + m * scale
            residual = [Q(0)] * self.dim
            for orig, m in lam.items():
                for i, a in enumerate(self.h.inequalities[orig].normal):
                    residual[i] -= m * a
            mu = self._lift_equality_duals(residual)
            self._infeasible = (lam, mu)
            return
        # extract a vertex basis of the original rows at y*
        ystar = lifted.point[:n]
        tight = [j for j in range(len(rows))
                 if dot(rows[j], ystar) == offsets[j]]
        pref = [j for j in lifted.basis if j < len(rows) and j in set(tight)]
        ordered = pref + [j for j in tight if j not in set(pref)]
        chosen_rel = independent_subset([rows[j] for j in ordered])
        basis = [ordered[i] for i in chosen_rel][:n]
        if len(basis) < n:  # pragma: no cover - see phase-1 vertex argument
            raise AssertionError("phase-1 endpoint is not a vertex")
        engine = _ActiveSet(rows, offsets, n)
        engine.set_basis(sorted(basis))
        self._feasible = engine

    # -- public -------------------------------------------------------------

    def minimize(self, objective) -> LPOutcome:
        c = vec(objective)
        if len(c) != self.dim:
            raise DimensionMismatch(f"objective length {len(c)} != dim {self.dim}")
        if self._infeasible is None and self._feasible is None:
            self._phase1()
        if self._infeasible is not None:
            lam, mu = self._infeasible
            return LPOutcome(INFEASIBLE, farkas_inequalities=dict(lam),
                             farkas_equalities=dict(mu))
        c1, off1 = self.elim1.substitute(c, 0)
        for l in self.lineality:
            s = dot(c1, l)
            if s != 0:
                direction = l if s < 0 else tuple(-x for x in l)
                return LPOutcome(
                    UNBOUNDED,
                    ray=self.elim1.back_map().apply_direction(direction),
                )
        c2, off2 = self.elim2.substitute(c1, 0)
        shift = -off1 - off2     # c.x == c2.y + shift on the feasible set
        engine = self._feasible.clone()
        try:
            duals = engine.minimize(tuple(c2))
        except _Unbounded as ub:
            self.pivots += engine.pivots
            return LPOutcome(UNBOUNDED, ray=self._lift_direction(ub.direction))
        self.pivots += engine.pivots
        if self.reuse_basis:
            # the optimal vertex stays feasible: warm-start the next objective
            self._feasible = engine
        value = dot(c2, engine.point) + shift
        vertex = self._lift_point(engine.point)
        lam = {}
        for j, m in duals.items():
            _, _, scale, orig = self._rows[j]
            if m != 0:
                lam[orig] = lam.get(orig, Q(0)) + m * scale
        residual = list(c)
        for orig, m in lam.items():
            for i, a in enumerate(self.h.inequalities[orig].normal):
                if a:
                    residual[i] -= m * a
        mu = self._lift_equality_duals(residual)
        return LPOutcome(OPTIMAL, value=value, primal_vertex=vertex,
                         dual_inequalities=lam, dual_equalities=mu)


def _equality_farkas(equalities, dim):
    """mu with sum mu_t eq_t == 0 and sum mu_t d_t != 0, for an inconsistent system."""
    cols = [[rat(eq.normal[i]) for eq in equalities] for i in range(dim)]
    cols.append([rat(eq.offset) for eq in equalities])
    target = [Q(0)] * dim + [Q(1)]
    mu = solve_linear(cols, target)
    if mu is None:  # pragma: no cover - called only on inconsistent systems
        raise AssertionError("equality system is consistent")
    return {t: m for t, m in enumerate(mu) if m != 0}


def solve(lp: LinearProgram) -> LPOutcome:
    """Exact two-phase simplex; deterministic, anti-cycling."""
    if lp.dim < 1:
        raise DimensionMismatch("dimension must be at least 1")
    if len(lp.objective) != lp.dim:
        raise DimensionMismatch("objective length does not match dimension")
    return LinearSystem(lp.constraints).minimize(lp.objective)


def feasible_point(h: HRepresentation):
    """Any feasible point of the system, or None."""
    out = LinearSystem(h).minimize((0,) * h.dim)
    if out.status == INFEASIBLE:
        return None
    return out.primal_vertex


def farkas_certificate(h: HRepresentation, target: LinearInequality):
    """Multipliers proving h implies target, or raise NotImplied with a witness.

    Returns (ineq_multipliers, eq_multipliers) with nonnegative multipliers on
    inequalities such that the combination dominates the target:
    sum lam_i a_i + sum mu_t e_t == a_target and the combined offset
    >= b_target.
    """
    system = LinearSystem(h)
    out = system.minimize(target.normal)
    if out.status == INFEASIBLE:
        raise InfeasibleSystem("system is infeasible")
    if out.status == UNBOUNDED:
        base = feasible_point(h)
        val0 = dot(target.normal, base) - rat(target.offset)
        step = dot(target.normal, out.ray)
        k = 1
        while val0 + k * step >= 0:
            k *= 2
        witness = tuple(b + k * r for b, r in zip(base, out.ray))
        raise NotImplied("target is unbounded below over the system",
                         point=witness, ray=out.ray)
    if out.value < rat(target.offset):
        raise NotImplied("optimal vertex violates the target",
                         point=out.primal_vertex)
    return dict(out.dual_inequalities), dict(out.dual_equalities)


def verify_certificate(h: HRepresentation, target: LinearInequality,
                       lam: dict, mu: dict) -> bool:
    """Re-check a Farkas certificate by direct arithmetic."""
    combo = [Q(0)] * h.dim
    offset = Q(0)
    for i, m in lam.items():
        if m < 0:
            return False
        row = h.inequalities[i]
        for j, a in enumerate(row.normal):
            combo[j] += m * a
        offset += m * rat(row.offset)
    for t, m in mu.items():
        row = h.equalities[t]
        for j, a in enumerate(row.normal):
            combo[j] += m * a
        offset += m * rat(row.offset)
    return tuple(combo) == tuple(vec(target.normal)) and offset >= rat(target.offset)
