"""Double description: steps, adjacency, conversions, brute-force oracle."""

from __future__ import annotations

import random
from itertools import combinations

import pytest

from conevolve import dd
from conevolve.errors import (
    NonHomogeneousInequality,
    NotFullDimensional,
    NotPointed,
    RayNotInPair,
)
from conevolve.polyhedra import (
    HRepresentation,
    LinearInequality,
    VRepresentation,
    canonical_ray,
    make_dd_pair,
)
from conevolve.rational import dot, invert, nullspace, rank, vec

from conftest import GAMMA2_RAYS, GAMMA3_RAYS


class TestDDStep:
    def test_satisfied_row_changes_nothing(self, gamma2_pair):
        step = dd.dd_step(gamma2_pair, LinearInequality((1, 1, 0), 0))
        assert step.negative == ()
        assert set(step.updated.v.rays) == set(gamma2_pair.v.rays)

    def test_nonhomogeneous_rejected(self, gamma2_pair):
        with pytest.raises(NonHomogeneousInequality):
            dd.dd_step(gamma2_pair, LinearInequality((1, 0, 0), 1))

    def test_cube_polar_insert(self):
        # simplex polar from the worked cube example: inserting the vertex
        # (1,0,1) leaves exactly the five printed extreme rays
        rows = [(-1, 0, 0, 0), (-1, 0, 0, -1), (-1, 0, -1, 0), (-1, -1, 0, 0)]
        rays = [(0, -1, 0, 0), (0, 0, -1, 0), (0, 0, 0, -1), (-1, 1, 1, 1)]
        pair = make_dd_pair(HRepresentation.of(4, [(r, 0) for r in rows]), rays)
        step = dd.dd_step(pair, LinearInequality((-1, -1, 0, -1), 0))
        want = {(0, -1, 0, 0), (0, 0, 0, -1), (0, 0, -1, 0),
                (-1, 0, 1, 1), (-1, 1, 1, 0)}
        assert set(step.updated.v.rays) == want
        assert set(step.negative) == {(-1, 1, 1, 1)}
        assert set(step.positive) == {(0, -1, 0, 0), (0, 0, 0, -1)}

    def test_new_rays_are_tight_adjacent_combinations(self, gamma3_pair):
        row = LinearInequality((1, 1, -1, 1, 0, 0, 0), 0)
        step = dd.dd_step(gamma3_pair, row)
        for ray in step.updated.v.rays:
            assert dot(row.normal, ray) >= 0
        for ray in step.zero:
            if ray not in set(gamma3_pair.v.rays):
                assert dot(row.normal, ray) == 0


class TestAdjacency:
    def test_gamma2_all_pairs_adjacent(self, gamma2_pair):
        rays = gamma2_pair.v.rays
        for a, b in combinations(rays, 2):
            assert dd.adjacency_test(a, b, gamma2_pair)
            assert dd.algebraic_adjacency_test(a, b, gamma2_pair)

    def test_planar_fan_intermediate_blocks(self):
        # rays (1,0), (1,1), (0,1) in the quarter-plane-ish fan: the outer
        # pair is separated by the middle ray
        h = HRepresentation.of(2, [((1, 0), 0), ((0, 1), 0)])
        pair = make_dd_pair(h, [(1, 0), (0, 1)])
        step = dd.dd_step(pair, LinearInequality((1, 1), 0))
        assert dd.adjacency_test((1, 0), (0, 1), pair)

    def test_combinatorial_matches_algebraic(self, gamma3_pair):
        rays = gamma3_pair.v.rays
        for a, b in combinations(rays, 2):
            assert dd.adjacency_test(a, b, gamma3_pair) == \
                dd.algebraic_adjacency_test(a, b, gamma3_pair)

    def test_unknown_ray_rejected(self, gamma2_pair):
        with pytest.raises(RayNotInPair):
            dd.adjacency_test((7, 5, 5), (1, 0, 1), gamma2_pair)


class TestConversion:
    def test_gamma2_rays(self, gamma2_pair):
        assert set(gamma2_pair.v.rays) == GAMMA2_RAYS

    def test_gamma3_rays(self, gamma3_pair):
        assert set(gamma3_pair.v.rays) == GAMMA3_RAYS

    def test_gamma4_ray_count(self, gamma4):
        pair = dd.convert_h_to_v(gamma4)
        assert len(pair.v.rays) == 41

    def test_lineality_rejected(self):
        h = HRepresentation.of(2, [((1, 1), 0)])
        with pytest.raises(NotPointed):
            dd.convert_h_to_v(h)

    def test_v_to_h_standard_basis(self):
        v = VRepresentation.of(3, rays=[(1, 0, 0), (0, 1, 0), (0, 0, 1)])
        pair = dd.convert_v_to_h(v)
        want = HRepresentation.of(
            3, [((1, 0, 0), 0), ((0, 1, 0), 0), ((0, 0, 1), 0)])
        assert pair.h.inequalities == want.inequalities

    def test_gamma3_rays_to_facets(self, gamma3):
        v = VRepresentation.of(7, rays=sorted(GAMMA3_RAYS))
        pair = dd.convert_v_to_h(v)
        assert pair.h.inequalities == gamma3.inequalities

    def test_round_trip_gamma2(self, gamma2, gamma2_pair):
        back = dd.convert_v_to_h(gamma2_pair.v)
        assert back.h.inequalities == gamma2.inequalities

    def test_round_trip_cube_homogenization(self):
        from conevolve.polyhedra import homogenize
        from conftest import cube_h

        hom = homogenize(cube_h(3))
        pair = dd.convert_h_to_v(hom)
        again = dd.convert_v_to_h(pair.v)
        facets = {r for r in again.h.inequalities}
        # x0 >= 0 is not a facet of the homogenized cube; all others are
        assert len(facets) == 6
        back = dd.convert_h_to_v(again.h)
        assert set(back.v.rays) == set(pair.v.rays)

    def test_verify_dd_pair(self, gamma3_pair):
        assert dd.verify_dd_pair(gamma3_pair)


def brute_force_rays(h: HRepresentation):
    """Oracle: candidate rays from (d-1)-subsets of rows, filtered exactly."""
    rows = [r.normal for r in h.inequalities]
    d = h.dim
    found = set()
    for subset in combinations(range(len(rows)), d - 1):
        sub = [rows[i] for i in subset]
        basis = nullspace(sub, d)
        if len(basis) != 1:
            continue
        for cand in (basis[0], tuple(-c for c in basis[0])):
            if all(dot(r, cand) >= 0 for r in rows):
                tight = [r for r in rows if dot(r, cand) == 0]
                if rank(tight) == d - 1:
                    found.add(canonical_ray(cand))
    return found


class TestRandomConeOracle:
    def test_hundred_random_cones(self):
        rng = random.Random(4242)
        done = 0
        while done < 100:
            d = rng.randint(2, 5)
            m = rng.randint(d, 8)
            rows = []
            for _ in range(m):
                normal = tuple(rng.randint(-2, 2) for _ in range(d))
                if any(normal):
                    rows.append((normal, 0))
            if not rows:
                continue
            h = HRepresentation.of(d, rows)
            if rank([r.normal for r in h.inequalities]) < d:
                continue
            pair = dd.convert_h_to_v(h)
            assert dd.verify_dd_pair(pair)
            assert set(pair.v.rays) == brute_force_rays(h)
            done += 1
