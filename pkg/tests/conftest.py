"""Shared fixtures: paper-derived cones, networks, and expected regions."""

from __future__ import annotations

import pytest

from conevolve import dd
from conevolve.netinfo import NetworkProblem, shannon_outer_bound
from conevolve.polyhedra import HRepresentation
from conevolve.rational import Q


@pytest.fixture(scope="session")
def gamma2():
    return shannon_outer_bound(2)


@pytest.fixture(scope="session")
def gamma3():
    return shannon_outer_bound(3)


@pytest.fixture(scope="session")
def gamma4():
    return shannon_outer_bound(4)


@pytest.fixture(scope="session")
def gamma2_pair(gamma2):
    return dd.convert_h_to_v(gamma2)


@pytest.fixture(scope="session")
def gamma3_pair(gamma3):
    return dd.convert_h_to_v(gamma3)


# extreme rays of the three-variable Shannon cone, coordinates
# (h1, h2, h12, h3, h13, h23, h123)
GAMMA3_RAYS = {
    (0, 1, 1, 1, 1, 1, 1),
    (1, 0, 1, 1, 1, 1, 1),
    (1, 1, 1, 1, 1, 1, 1),
    (0, 1, 1, 0, 0, 1, 1),
    (1, 0, 1, 0, 1, 0, 1),
    (0, 0, 0, 1, 1, 1, 1),
    (1, 1, 1, 0, 1, 1, 1),
    (1, 1, 2, 1, 2, 2, 2),
}

GAMMA2_RAYS = {(1, 0, 1), (0, 1, 1), (1, 1, 1)}


@pytest.fixture(scope="session")
def idsc3() -> NetworkProblem:
    """Three sources observed by three encoders; seven single-demand decoders."""
    return NetworkProblem.of(
        3,
        edges=[(4, [1, 2, 3]), (5, [1, 2, 3]), (6, [1, 2, 3])],
        sinks=[([4, 5, 6], [1]), ([4], [2]), ([5], [2]), ([6], [2]),
               ([4, 5], [3]), ([4, 6], [3]), ([5, 6], [3])],
    )


@pytest.fixture(scope="session")
def fano() -> NetworkProblem:
    return NetworkProblem.of(
        3,
        edges=[(4, [1, 2]), (5, [2, 3]), (6, [4, 5]), (7, [3, 4])],
        sinks=[([1, 6], [3]), ([6, 7], [2]), ([5, 7], [1])],
    )


@pytest.fixture(scope="session")
def idsc8() -> NetworkProblem:
    """Size-8 instance whose symmetry group has order 20."""
    return NetworkProblem.of(
        3,
        edges=[(e, [1, 2, 3]) for e in range(4, 9)],
        sinks=[([4, 5], [1, 2]), ([5, 6], [1, 2]), ([6, 7], [1, 2]),
               ([7, 8], [1, 2]), ([4, 8], [1, 2]),
               ([4, 6], [3]), ([5, 8], [3]), ([4, 7], [3]),
               ([5, 7], [3]), ([6, 8], [3])],
    )


@pytest.fixture(scope="session")
def sumrate_net() -> NetworkProblem:
    """Five-variable instance with symmetry group {(), (3,4)}."""
    return NetworkProblem.of(
        2,
        edges=[(3, [1]), (4, [1]), (5, [1, 2])],
        sinks=[([2, 3], [1]), ([2, 4], [1]), ([3, 4, 5], [2])],
    )


def idsc3_region_rows() -> HRepresentation:
    """The thirteen inequalities of the running example's rate region.

    Coordinates (w1, w2, w3, R4, R5, R6).  The sum-rate row is
    2w1 + 6w2 + 3w3 <= 2(R4 + R5 + R6); its printed form in the source
    display drops the factor two on the right-hand side, which the worked
    update table and the region's own vertices contradict.
    """
    rows = [
        ((1, 0, 0, 0, 0, 0), 0), ((0, 1, 0, 0, 0, 0), 0), ((0, 0, 1, 0, 0, 0), 0),
        ((0, -1, 0, 1, 0, 0), 0), ((0, -1, 0, 0, 1, 0), 0), ((0, -1, 0, 0, 0, 1), 0),
        ((0, -2, -1, 1, 1, 0), 0), ((0, -2, -1, 1, 0, 1), 0), ((0, -2, -1, 0, 1, 1), 0),
        ((-2, -6, -3, 2, 2, 2), 0),
        ((-1, -4, -2, 2, 1, 1), 0), ((-1, -4, -2, 1, 2, 1), 0), ((-1, -4, -2, 1, 1, 2), 0),
    ]
    return HRepresentation.of(6, rows)


def fano_region_rows() -> HRepresentation:
    """The thirteen-line Fano region, coordinates (w1, w2, w3, R4..R7)."""
    rows = [
        ((1, 0, 0, 0, 0, 0, 0), 0), ((0, 1, 0, 0, 0, 0, 0), 0),
        ((0, 0, 1, 0, 0, 0, 0), 0),
        ((0, 0, -1, 0, 0, 1, 0), 0), ((0, 0, -1, 0, 1, 0, 0), 0),
        ((-1, 0, 0, 0, 0, 0, 1), 0), ((-1, 0, 0, 1, 0, 0, 0), 0),
        ((0, -1, -1, 0, 0, 1, 1), 0), ((0, -1, -1, 1, 0, 1, 0), 0),
        ((0, -1, -1, 1, 1, 0, 0), 0),
        ((-1, -1, 0, 0, 0, 1, 1), 0), ((-1, -1, 0, 1, 0, 1, 0), 0),
        ((-1, -1, 0, 1, 1, 0, 0), 0),
    ]
    return HRepresentation.of(7, rows)


def cube_h(d: int) -> HRepresentation:
    rows = []
    for i in range(d):
        e = [0] * d
        e[i] = 1
        rows.append((tuple(e), 0))
        rows.append((tuple(-x for x in e), -1))
    return HRepresentation.of(d, rows)
