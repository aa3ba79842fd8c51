"""Exact LP: worked fixtures, duality invariants, brute-force oracle."""

from __future__ import annotations

import random
from itertools import combinations

import pytest

from conevolve import lp
from conevolve.errors import DimensionMismatch, InfeasibleSystem, NotImplied
from conevolve.polyhedra import (
    HRepresentation,
    LinearEquality,
    LinearInequality,
)
from conevolve.rational import Q, dot, invert, rat, vec


def check_duality(system: HRepresentation, objective, out: lp.LPOutcome):
    """Strong duality, exactly: duals rebuild the objective row and value."""
    assert out.status == lp.OPTIMAL
    assert system.contains(out.primal_vertex)
    assert dot(objective, out.primal_vertex) == out.value
    combo = [Q(0)] * system.dim
    total = Q(0)
    for i, m in out.dual_inequalities.items():
        assert m >= 0
        row = system.inequalities[i]
        for j, a in enumerate(row.normal):
            combo[j] += m * a
        total += m * rat(row.offset)
    for t, m in out.dual_equalities.items():
        row = system.equalities[t]
        for j, a in enumerate(row.normal):
            combo[j] += m * a
        total += m * rat(row.offset)
    assert tuple(combo) == tuple(vec(objective))
    assert total == out.value


class TestWorkedExamples:
    def test_min_x_over_halfline(self):
        system = HRepresentation.of(1, [((1,), 3)])
        out = lp.solve(lp.LinearProgram(vec([1]), system))
        assert out.value == 3
        assert out.primal_vertex == (Q(3),)
        assert out.dual_inequalities == {0: Q(1)}

    def test_unbounded_with_ray(self):
        system = HRepresentation.of(1, [((1,), 0)])
        out = lp.solve(lp.LinearProgram(vec([-1]), system))
        assert out.status == lp.UNBOUNDED
        assert out.ray == (Q(1),)

    def test_running_example_first_vertex(self, idsc3):
        # maximizing w1 over the bounded running-example parent gives a
        # vertex projecting to (1/2, 0, 0, 0, 1/2, 0) or a symmetric twin
        from conevolve.netinfo import _assemble_parent
        from conevolve.polyhedra import boundedness_transform, eliminate_equalities

        parent, k, _ = _assemble_parent(idsc3)
        reduced, _ = eliminate_equalities(parent)
        bounded = boundedness_transform(reduced, k)
        out = lp.solve(lp.LinearProgram(
            vec([-1] + [0] * (bounded.dim - 1)), bounded))
        assert out.value == Q(-1, 2)
        w = out.primal_vertex[:6]
        assert w[0] == Q(1, 2) and w[1] == 0 and w[2] == 0
        assert sorted(w[3:]) == [0, 0, Q(1, 2)]

    def test_infeasible_farkas(self):
        system = HRepresentation.of(1, [((1,), 3), ((-1,), -2)])
        out = lp.solve(lp.LinearProgram(vec([0]), system))
        assert out.status == lp.INFEASIBLE
        combo = Q(0)
        total = Q(0)
        for i, m in out.farkas_inequalities.items():
            assert m >= 0
            combo += m * system.inequalities[i].normal[0]
            total += m * rat(system.inequalities[i].offset)
        assert combo == 0 and total > 0

    def test_equalities_native(self):
        system = HRepresentation.of(
            3, [((1, 1, 1), 1)], [((1, -1, 0), 0), ((0, 1, -1), 1)])
        objective = vec([1, 0, 0])
        out = lp.solve(lp.LinearProgram(objective, system))
        check_duality(system, objective, out)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            lp.solve(lp.LinearProgram(vec([1, 2]), HRepresentation.of(1, [((1,), 0)])))

    def test_determinism(self):
        system = HRepresentation.of(
            3, [((1, 2, -1), -3), ((0, 1, 1), 0), ((1, 0, 0), -5),
                ((-1, -1, -1), -9), ((2, -1, 0), -4)])
        objective = vec([1, 1, 1])
        a = lp.solve(lp.LinearProgram(objective, system))
        b = lp.solve(lp.LinearProgram(objective, system))
        assert a == b


class TestFarkasCertificate:
    def test_row_sum(self):
        h = HRepresentation.of(2, [((1, 1), 1), ((1, -1), 0)])
        lam, mu = lp.farkas_certificate(h, LinearInequality((2, 0), 1))
        assert lp.verify_certificate(h, LinearInequality((2, 0), 1), lam, mu)

    def test_gamma2_nonnegativity(self, gamma2):
        target = LinearInequality((0, 0, 1), 0)         # h12 >= 0
        lam, mu = lp.farkas_certificate(gamma2, target)
        assert lp.verify_certificate(gamma2, target, lam, mu)

    def test_decode_rate_bound(self, idsc3):
        # w2 <= R4 over the running-example parent constraints
        from conevolve.netinfo import _assemble_parent

        parent, k, names = _assemble_parent(idsc3)
        normal = [0] * parent.dim
        normal[names.index("R4")] = 1
        normal[names.index("w2")] = -1
        target = LinearInequality(tuple(normal), 0)
        lam, mu = lp.farkas_certificate(parent, target)
        assert lp.verify_certificate(parent, target, lam, mu)

    def test_not_implied_witness(self):
        h = HRepresentation.of(2, [((1, 0), 0), ((0, 1), 0)])
        with pytest.raises(NotImplied) as exc:
            lp.farkas_certificate(h, LinearInequality((-1, -1), -1))
        witness = exc.value.point
        assert witness is not None
        assert h.contains(witness)
        assert dot((-1, -1), witness) < -1

    def test_infeasible_system(self):
        h = HRepresentation.of(1, [((1,), 1), ((-1,), 0)])
        with pytest.raises(InfeasibleSystem):
            lp.farkas_certificate(h, LinearInequality((1,), 0))


def brute_force_min(system: HRepresentation, objective):
    """Enumerate all basic solutions, filter feasible, take the minimum."""
    rows = [(r.normal, rat(r.offset)) for r in system.inequalities]
    rows += [(r.normal, rat(r.offset)) for r in system.equalities]
    n = system.dim
    best = None
    for subset in combinations(range(len(rows)), n):
        mat = [rows[i][0] for i in subset]
        inv = invert(mat)
        if inv is None:
            continue
        rhs = [rows[i][1] for i in subset]
        point = tuple(dot(inv[i], rhs) for i in range(n))
        if system.contains(point):
            val = dot(objective, point)
            if best is None or val < best:
                best = val
    return best


class TestRandomOracle:
    def test_two_hundred_random_lps(self):
        rng = random.Random(20250810)
        checked_optimal = 0
        for trial in range(200):
            n = rng.randint(1, 4)
            m = rng.randint(n, 8)
            rows = []
            for _ in range(m):
                normal = tuple(rng.randint(-3, 3) for _ in range(n))
                if all(c == 0 for c in normal):
                    continue
                rows.append((normal, rng.randint(-4, 2)))
            if not rows:
                continue
            system = HRepresentation.of(n, rows)
            objective = vec([rng.randint(-3, 3) for _ in range(n)])
            out = lp.solve(lp.LinearProgram(objective, system))
            if out.status == lp.OPTIMAL:
                check_duality(system, objective, out)
                oracle = brute_force_min(system, objective)
                assert oracle is not None
                assert out.value == oracle
                checked_optimal += 1
            elif out.status == lp.UNBOUNDED:
                assert all(dot(r.normal, out.ray) >= 0
                           for r in system.inequalities)
                assert dot(objective, out.ray) < 0
            else:
                combo = [Q(0)] * n
                total = Q(0)
                for i, mlt in out.farkas_inequalities.items():
                    assert mlt >= 0
                    row = system.inequalities[i]
                    for j, a in enumerate(row.normal):
                        combo[j] += mlt * a
                    total += mlt * rat(row.offset)
                assert all(c == 0 for c in combo) and total > 0
        assert checked_optimal >= 40
