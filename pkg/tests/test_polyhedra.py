"""Core polyhedra: canonical forms, transforms, reductions, faces."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conevolve import dd, lp
from conevolve.errors import (
    InconsistentEqualities,
    NotPointed,
    ZeroNormalInfeasible,
)
from conevolve.polyhedra import (
    HRepresentation,
    LinearEquality,
    LinearInequality,
    VRepresentation,
    boundedness_transform,
    bounding_inequality,
    canonical_ray,
    canonicalize_equality,
    canonicalize_inequality,
    eliminate_equalities,
    enumerate_faces,
    format_h,
    format_v,
    full_dimension_check,
    homogenize,
    make_dd_pair,
    parse_h,
    parse_v,
    polar_swap,
    remove_redundancies,
    strip_bounding,
)
from conevolve.rational import Q, dot, rat, vec

from conftest import GAMMA2_RAYS


class TestCanonicalize:
    def test_positive_scaling_is_identity(self):
        row = LinearInequality(vec([Q(2, 3), Q(2, 3), Q(-2, 3)]), 0)
        assert canonicalize_inequality(row) == LinearInequality((1, 1, -1), 0)

    def test_gcd_division_keeps_orientation(self):
        row = LinearInequality((-4, 2), 0)
        assert canonicalize_inequality(row) == LinearInequality((-2, 1), 0)

    def test_gamma2_row_unchanged(self):
        row = LinearInequality((-1, 0, 1), 0)   # h12 - h1 >= 0
        assert canonicalize_inequality(row) == row

    def test_idempotent(self):
        row = LinearInequality(vec(["3/7", "-6/7", 0]), "9/7")
        once = canonicalize_inequality(row)
        assert canonicalize_inequality(once) == once

    @given(st.integers(1, 50), st.integers(1, 50))
    @settings(max_examples=50, deadline=None)
    def test_scale_invariance(self, num, den):
        row = LinearInequality((6, -4, 0), -2)
        scaled = LinearInequality(
            tuple(c * Q(num, den) for c in row.normal), row.offset * Q(num, den)
        )
        assert canonicalize_inequality(scaled) == canonicalize_inequality(row)

    def test_zero_normal_infeasible(self):
        with pytest.raises(ZeroNormalInfeasible):
            canonicalize_inequality(LinearInequality((0, 0), 1))

    def test_equality_sign_normalized(self):
        eq = canonicalize_equality(LinearEquality((-2, 4), 0))
        assert eq == LinearEquality((1, -2), 0)

    def test_ray_sign_preserved(self):
        assert canonical_ray((0, -2, 4)) == (0, -1, 2)


class TestHomogenize:
    def test_cone_fixed_point(self, gamma2):
        hom = homogenize(gamma2)
        assert hom.dim == 4
        lifted = {LinearInequality((0,) + tuple(r.normal), 0)
                  for r in gamma2.inequalities}
        lifted.add(LinearInequality((1, 0, 0, 0), 0))
        assert set(hom.inequalities) == lifted

    def test_unit_segment(self):
        seg = HRepresentation.of(1, [((1,), 0), ((-1,), -1)])
        hom = homogenize(seg)
        want = HRepresentation.of(2, [((0, 1), 0), ((1, -1), 0), ((1, 0), 0)])
        assert hom.inequalities == want.inequalities

    def test_vertex_becomes_ray(self):
        # a vertex p of a polytope lifts to the ray (1, p)
        square = HRepresentation.of(
            2, [((1, 0), 0), ((0, 1), 0), ((-1, 0), -1), ((0, -1), -1)])
        hom = homogenize(square)
        assert all(r.evaluate((1, Q(1, 2), 0)) >= 0 for r in hom.inequalities)


class TestPolar:
    def test_gamma2_polar_rays_are_negated_normals(self, gamma2_pair):
        pol = polar_swap(gamma2_pair)
        want = {tuple(-c for c in r.normal)
                for r in gamma2_pair.h.inequalities}
        assert set(pol.v.rays) == {canonical_ray(r) for r in want}

    def test_involution(self, gamma3_pair):
        back = polar_swap(polar_swap(gamma3_pair))
        assert set(back.v.rays) == set(gamma3_pair.v.rays)
        assert back.h.inequalities == gamma3_pair.h.inequalities

    def test_homogenized_initial_hull_matrix(self):
        # the polar of the homogenized running-example initial hull has the
        # inequality rows -(1, v_i) for the seven simplex points
        pts = [
            (Q(1, 2), 0, 0, 0, Q(1, 2), 0), (0, 0, 0, 0, 0, 0),
            (Q(1, 2), 0, 0, 0, 0, Q(1, 2)), (0, 0, 0, 0, 1, 0),
            (0, Q(1, 4), 0, Q(1, 4), Q(1, 4), Q(1, 4)), (0, 0, 0, 1, 0, 0),
            (0, 0, Q(2, 5), Q(1, 5), Q(1, 5), Q(1, 5)),
        ]
        hom = make_dd_pair(
            HRepresentation.of(7, [(tuple(-rat(c) for c in (1,) + tuple(p)), 0)
                                   for p in pts]),
            [],
        )
        # rows are exactly the printed matrix A1 up to primitive scaling
        a1_first = canonicalize_inequality(
            LinearInequality(vec([-1, Q(-1, 2), 0, 0, 0, Q(-1, 2), 0]), 0))
        assert a1_first in hom.h.inequalities

    def test_not_pointed_rejected(self):
        v = VRepresentation.of(2, rays=[(1, 0)], lineality=[(0, 1)])
        h = HRepresentation.of(2, [((1, 0), 0)])
        pair = dd.DDPair(h, v, (frozenset(),))
        with pytest.raises(NotPointed):
            polar_swap(pair)


class TestBoundedness:
    def test_running_example_row(self):
        cone = HRepresentation.of(6, [((1, 0, 0, 0, 0, 0), 0)])
        bounded = boundedness_transform(cone, 6)
        assert bounding_inequality(6, 6) in bounded.inequalities

    def test_nonneg_orthant_to_simplex(self):
        orthant = HRepresentation.of(2, [((1, 0), 0), ((0, 1), 0)])
        simplex = boundedness_transform(orthant, 2)
        assert len(simplex.inequalities) == 3
        assert strip_bounding(simplex, 2).inequalities == orthant.inequalities

    def test_strip_rejects_missing_row(self, gamma2):
        with pytest.raises(ValueError):
            strip_bounding(gamma2, 2)


class TestEliminateEqualities:
    def test_no_equalities_identity(self, gamma2):
        reduced, back = eliminate_equalities(gamma2)
        assert reduced.inequalities == gamma2.inequalities
        assert back.apply((1, 2, 3)) == (1, 2, 3)

    def test_diagonal(self):
        h = HRepresentation.of(2, [((1, 0), 0), ((0, 1), 0)], [((1, -1), 0)])
        reduced, back = eliminate_equalities(h)
        assert reduced.dim == 1
        assert len(reduced.inequalities) == 1
        assert back.apply((Q(5),)) == (5, 5)

    def test_back_map_solves_equalities(self):
        h = HRepresentation.of(
            3, [((1, 1, 1), 0)], [((1, 1, 0), 2), ((0, 1, -1), 1)])
        reduced, back = eliminate_equalities(h)
        assert reduced.dim == 1
        for t in (Q(0), Q(3), Q(-7, 2)):
            point = back.apply((t,))
            assert point[0] + point[1] == 2
            assert point[1] - point[2] == 1

    def test_inconsistent(self):
        with pytest.raises(InconsistentEqualities):
            eliminate_equalities(HRepresentation.of(
                1, [], [((1,), 0), ((1,), 1)]))

    def test_rank_counting(self):
        h = HRepresentation.of(
            3, [], [((1, 0, 0), 0), ((2, 0, 0), 0), ((0, 1, 0), 0)])
        reduced, _ = eliminate_equalities(h)
        assert reduced.dim == 1


class TestRemoveRedundancies:
    def test_duplicate_halfspace(self):
        h = HRepresentation.of(1, [((1,), 0), ((2,), 0)])
        assert len(remove_redundancies(h).inequalities) == 1

    def test_gamma3_all_facets_retained(self, gamma3):
        reduced = remove_redundancies(gamma3)
        assert reduced.inequalities == gamma3.inequalities

    def test_membership_preserved(self, gamma3):
        random.seed(7)
        mixed = gamma3.with_rows(
            [LinearInequality(
                tuple(a + b for a, b in zip(r1.normal, r2.normal)), 0)
             for r1 in gamma3.inequalities[:5] for r2 in gamma3.inequalities[:3]])
        reduced = remove_redundancies(mixed)
        for _ in range(1000):
            point = tuple(Q(random.randint(-4, 8), random.randint(1, 3))
                          for _ in range(7))
            assert mixed.contains(point) == reduced.contains(point)


class TestFullDimension:
    def test_gamma3(self, gamma3):
        ok, witness = full_dimension_check(gamma3)
        assert ok
        assert all(r.evaluate(witness) > 0 for r in gamma3.inequalities)

    def test_pinned_line(self):
        h = HRepresentation.of(1, [((1,), 0), ((-1,), 0)])
        ok, witness = full_dimension_check(h)
        assert not ok

    def test_unit_simplex(self):
        h = HRepresentation.of(
            2, [((1, 0), 0), ((0, 1), 0), ((-1, -1), -1)])
        ok, _ = full_dimension_check(h)
        assert ok


class TestFaces:
    def test_gamma2(self, gamma2_pair):
        assert enumerate_faces(gamma2_pair).as_tuple() == (3, 3, 1)

    def test_gamma3(self, gamma3_pair):
        assert enumerate_faces(gamma3_pair).as_tuple() == (
            8, 27, 49, 51, 30, 9, 1)

    def test_single_ray(self):
        h = HRepresentation.of(1, [((1,), 0)])
        pair = make_dd_pair(h, [(1,)])
        assert enumerate_faces(pair).as_tuple() == (1,)

    def test_top_face_unique_and_ray_count(self, gamma3_pair):
        prof = enumerate_faces(gamma3_pair)
        assert prof.counts[gamma3_pair.h.dim] == 1
        assert prof.counts[1] == len(gamma3_pair.v.rays)


class TestSerialization:
    def test_h_round_trip(self, gamma3):
        assert parse_h(format_h(gamma3)).inequalities == gamma3.inequalities

    def test_h_round_trip_with_equalities(self):
        h = HRepresentation.of(
            2, [((1, 0), Q(1, 2))], [((1, -1), 3)])
        again = parse_h(format_h(h))
        assert again.inequalities == h.inequalities
        assert again.equalities == h.equalities

    def test_v_round_trip(self, gamma2_pair):
        v = parse_v(format_v(gamma2_pair.v))
        assert v.rays == gamma2_pair.v.rays

    def test_example_line_format(self):
        h = HRepresentation.of(3, [((1, -1, 0), 0)])
        assert "+1 -1 0 >= 0" in format_h(h)


class TestDDPairInvariants:
    def test_incidence_exact(self, gamma2_pair):
        for ri, ray in enumerate(gamma2_pair.v.rays):
            for i, row in enumerate(gamma2_pair.h.inequalities):
                tight = dot(row.normal, ray) == 0
                assert (i in gamma2_pair.incidence[ri]) == tight

    def test_rays_feasible_rejected_otherwise(self, gamma2):
        with pytest.raises(ValueError):
            make_dd_pair(gamma2, [(1, 1, 3)])
