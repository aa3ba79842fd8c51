"""Finite permutation and rational matrix groups, orbits and stabilizers.

Groups are stored extensionally: the full element list is enumerated by
breadth-first closure from the generators (all the groups arising here are
tiny), which keeps orbit, transversal and stabilizer code simple and exact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import permutations as _permutations

from .errors import (
    ActionDimensionMismatch,
    ElementCapExceeded,
    NonInvertibleGenerator,
    NonPermutationAction,
    RayCapExceeded,
)
from .polyhedra import (
    DDPair,
    HRepresentation,
    LinearEquality,
    LinearInequality,
    canonicalize_equality,
    canonicalize_inequality,
    eliminate_equalities,
    face_ray_masks,
)
from .rational import Q, invert as _matrix_invert, rat, vec

DEFAULT_ELEMENT_CAP = 10_000_000


@dataclass(frozen=True, order=True)
class Permutation:
    """Bijection of {1..degree}; images[i-1] is the image of i."""

    images: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(1, len(self.images) + 1)):
            raise ValueError(f"not a permutation of 1..{len(self.images)}")

    @property
    def degree(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        return cls(tuple(range(1, degree + 1)))

    @classmethod
    def from_cycles(cls, cycles, degree: int) -> "Permutation":
        images = list(range(1, degree + 1))
        for cycle in cycles:
            for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                images[a - 1] = b
        return cls(tuple(images))

    @classmethod
    def parse(cls, text: str, degree: int) -> "Permutation":
        """Parse cycle notation like "(4,5)(6,8)"; "()" is the identity."""
        text = text.strip()
        if text in ("()", "", "e", "id"):
            return cls.identity(degree)
        cycles = []
        for group in re.findall(r"\(([^()]*)\)", text):
            entries = [int(tok) for tok in re.split(r"[,\s]+", group.strip()) if tok]
            if entries:
                cycles.append(entries)
        if not cycles:
            raise ValueError(f"cannot parse permutation {text!r}")
        return cls.from_cycles(cycles, degree)

    def __call__(self, point: int) -> int:
        return self.images[point - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        """Composition: (self * other) maps i to self(other(i))."""
        if self.degree != other.degree:
            raise ActionDimensionMismatch("degrees differ")
        return Permutation(tuple(self.images[o - 1] for o in other.images))

    def inverse(self) -> "Permutation":
        images = [0] * self.degree
        for i, img in enumerate(self.images, start=1):
            images[img - 1] = i
        return Permutation(tuple(images))

    def is_identity(self) -> bool:
        return all(img == i for i, img in enumerate(self.images, start=1))

    def cycles(self) -> list[tuple[int, ...]]:
        seen = set()
        out = []
        for start in range(1, self.degree + 1):
            if start in seen:
                continue
            cycle = [start]
            seen.add(start)
            nxt = self(start)
            while nxt != start:
                cycle.append(nxt)
                seen.add(nxt)
                nxt = self(nxt)
            if len(cycle) > 1:
                out.append(tuple(cycle))
        return out

    def cycle_notation(self) -> str:
        cycles = self.cycles()
        if not cycles:
            return "()"
        return "".join("(" + ",".join(str(x) for x in c) + ")" for c in cycles)

    def act_mask(self, mask: int) -> int:
        """Image of a subset given as a bitmask over {1..degree}."""
        out = 0
        for i in range(self.degree):
            if mask >> i & 1:
                out |= 1 << (self(i + 1) - 1)
        return out

    def act_vector(self, values) -> tuple:
        """Permute coordinate positions: result[pi(i)] = values[i]."""
        if len(values) != self.degree:
            raise ActionDimensionMismatch("vector length != degree")
        out = [None] * self.degree
        for i, v in enumerate(values):
            out[self(i + 1) - 1] = v
        return tuple(out)


def act_inequality(p: Permutation, row: LinearInequality) -> LinearInequality:
    return canonicalize_inequality(
        LinearInequality(p.act_vector(row.normal), row.offset)
    )


def act_equality(p: Permutation, row: LinearEquality) -> LinearEquality:
    return canonicalize_equality(LinearEquality(p.act_vector(row.normal), row.offset))


class FiniteGroup:
    """Finite group given by generators; elements enumerated on demand.

    Generators are Permutations (or, for matrix groups, tuples of tuples of
    rationals acting by left multiplication).
    """

    def __init__(self, generators, degree=None, element_cap=DEFAULT_ELEMENT_CAP):
        generators = list(generators)
        self.is_permutation_group = all(
            isinstance(g, Permutation) for g in generators
        )
        if self.is_permutation_group:
            if degree is None:
                if not generators:
                    raise ValueError("degree required for an empty generator list")
                degree = generators[0].degree
            for g in generators:
                if g.degree != degree:
                    raise ActionDimensionMismatch("generator degrees differ")
            self.degree = degree
            self.generators = tuple(g for g in generators if not g.is_identity())
        else:
            mats = []
            for g in generators:
                m = tuple(tuple(rat(x) for x in row) for row in g)
                if _matrix_invert(m) is None:
                    raise NonInvertibleGenerator(f"singular generator {g}")
                mats.append(m)
            if degree is None:
                degree = len(mats[0]) if mats else 0
            self.degree = degree
            self.generators = tuple(mats)
        self.element_cap = element_cap
        self._elements = None

    @classmethod
    def trivial(cls, degree: int) -> "FiniteGroup":
        return cls([], degree=degree)

    @classmethod
    def symmetric(cls, degree: int, points=None) -> "FiniteGroup":
        """Symmetric group on the given points (default 1..degree)."""
        pts = list(points) if points is not None else list(range(1, degree + 1))
        gens = []
        if len(pts) >= 2:
            gens.append(Permutation.from_cycles([pts[:2]], degree))
            if len(pts) > 2:
                gens.append(Permutation.from_cycles([pts], degree))
        return cls(gens, degree=degree)

    def _identity(self):
        if self.is_permutation_group:
            return Permutation.identity(self.degree)
        return tuple(
            tuple(Q(1) if i == j else Q(0) for j in range(self.degree))
            for i in range(self.degree)
        )

    def _compose(self, a, b):
        if self.is_permutation_group:
            return a * b
        n = self.degree
        return tuple(
            tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
            for i in range(n)
        )

    @property
    def elements(self):
        """Full element tuple via breadth-first closure; deterministic order."""
        if self._elements is None:
            seen = {self._identity()}
            frontier = [self._identity()]
            gens = sorted(self.generators) if self.is_permutation_group else list(self.generators)
            while frontier:
                nxt = []
                for x in frontier:
                    for g in gens:
                        y = self._compose(g, x)
                        if y not in seen:
                            if len(seen) >= self.element_cap:
                                raise ElementCapExceeded(
                                    f"group exceeds cap {self.element_cap}"
                                )
                            seen.add(y)
                            nxt.append(y)
                frontier = nxt
            if self.is_permutation_group:
                self._elements = tuple(sorted(seen))
            else:
                self._elements = tuple(sorted(seen))
        return self._elements

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, element) -> bool:
        return element in set(self.elements)

    def generator_notation(self) -> str:
        if not self.generators:
            return "()"
        if self.is_permutation_group:
            return ", ".join(g.cycle_notation() for g in self.generators)
        return ", ".join(str(g) for g in self.generators)


def group_closure(generators, degree=None,
                  element_cap=DEFAULT_ELEMENT_CAP) -> FiniteGroup:
    """Group generated by the given permutations or invertible matrices."""
    group = FiniteGroup(generators, degree=degree, element_cap=element_cap)
    group.elements  # force closure so cap violations surface here
    return group


def minimal_generators(elements, degree: int) -> list[Permutation]:
    """Greedy small generating set for a set of permutations."""
    target = set(elements)
    gens: list[Permutation] = []
    current = {Permutation.identity(degree)}
    for x in sorted(target):
        if x in current:
            continue
        gens.append(x)
        current = set(group_closure(gens, degree=degree).elements)
        if current == target:
            break
    return gens


def orbit(x, group: FiniteGroup, action) -> tuple:
    """Sorted orbit {action(g, x) : g in group}, deduplicated.

    Computed by breadth-first closure over the generators, so the full
    element list is never materialized.
    """
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
    return tuple(sorted(seen))


@dataclass(frozen=True)
class OrbitPartition:
    """Disjoint orbits of a ground set, with canonical-minimum representatives."""

    ground: tuple
    blocks: tuple[tuple, ...]
    representatives: tuple

    def block_of(self, x):
        for block in self.blocks:
            if x in block:
                return block
        raise KeyError(x)


def transversal(vectors, group: FiniteGroup, action) -> OrbitPartition:
    """Partition the set into orbits; representative = minimum of each block."""
    ground = sorted(set(vectors))
    remaining = set(ground)
    blocks = []
    for x in ground:
        if x not in remaining:
            continue
        blk = [y for y in orbit(x, group, action) if y in remaining]
        extra = [y for y in orbit(x, group, action) if y not in set(ground)]
        if extra:
            raise ValueError(f"orbit of {x} leaves the ground set: {extra[:3]}")
        remaining.difference_update(blk)
        blocks.append(tuple(sorted(blk)))
    blocks.sort()
    reps = tuple(blk[0] for blk in blocks)
    return OrbitPartition(tuple(ground), tuple(blocks), reps)


def induced_subset_action(p: Permutation) -> Permutation:
    """Action on the 2^N - 1 subset coordinates: coordinate (mask m) -> p(m)."""
    n = p.degree
    if n > 20:
        raise ActionDimensionMismatch("degree too large for subset action")
    images = [0] * ((1 << n) - 1)
    for mask in range(1, 1 << n):
        images[mask - 1] = p.act_mask(mask)
    return Permutation(tuple(images))


def setwise_stabilizer(group: FiniteGroup, target, action) -> FiniteGroup:
    """Subgroup of elements g with {action(g, x) : x in target} == target."""
    target = set(target)
    kept = [g for g in group.elements
            if {action(g, x) for x in target} == target]
    if group.is_permutation_group:
        gens = minimal_generators(kept, group.degree)
        sub = FiniteGroup(gens, degree=group.degree)
        sub._elements = tuple(sorted(kept))
        return sub
    sub = FiniteGroup([], degree=group.degree)
    sub._elements = tuple(sorted(kept))
    sub.is_permutation_group = False
    return sub


def coordinate_orbits(group: FiniteGroup, dim: int) -> list[tuple[int, ...]]:
    """Orbits of the 0-based coordinate indices under a permutation group."""
    if not group.is_permutation_group:
        raise NonPermutationAction("coordinate orbits need a permutation group")
    if group.degree != dim:
        raise ActionDimensionMismatch(f"group degree {group.degree} != dim {dim}")
    seen = set()
    orbits = []
    for i in range(1, dim + 1):
        if i in seen:
            continue
        block = orbit(i, group, lambda g, x: g(x))
        seen.update(block)
        orbits.append(tuple(b - 1 for b in block))
    return orbits


def fix_subspace(h: HRepresentation, group: FiniteGroup):
    """Restrict to the subspace fixed by a coordinate-permutation group.

    Adds x_i == x_j for all coordinates in a common orbit, then eliminates
    the equalities.  Returns (reduced system, embedding back map); for any
    group-invariant objective, optimizing over the reduced system matches
    optimizing over the original.
    """
    merges = []
    for block in coordinate_orbits(group, h.dim):
        rep = block[0]
        for other in block[1:]:
            normal = [0] * h.dim
            normal[rep] = 1
            normal[other] = -1
            merges.append(LinearEquality(tuple(normal), 0))
    return eliminate_equalities(h.with_rows(extra_equalities=merges))


def csg_order(dd: DDPair, ray_cap: int = 10) -> int:
    """Order of the combinatorial symmetry group of a cone.

    Counts the ray permutations that map the face lattice (faces as ray
    subsets) onto itself, by backtracking over degree-profile-compatible
    images.
    """
    nrays = len(dd.v.rays)
    if nrays > ray_cap:
        raise RayCapExceeded(f"{nrays} rays exceeds cap {ray_cap}")
    faces = face_ray_masks(dd, ray_cap=max(ray_cap, nrays))
    profile = []
    for i in range(nrays):
        sizes = sorted(f.bit_count() for f in faces if f >> i & 1)
        profile.append(tuple(sizes))
    candidates = [
        [j for j in range(nrays) if profile[j] == profile[i]] for i in range(nrays)
    ]
    # faces become checkable once their highest ray index is mapped
    by_last = [[] for _ in range(nrays)]
    for f in faces:
        by_last[f.bit_length() - 1].append(f)
    count = 0
    image = [-1] * nrays
    used = [False] * nrays

    def extend(i: int):
        nonlocal count
        if i == nrays:
            count += 1
            return
        for j in candidates[i]:
            if used[j]:
                continue
            image[i] = j
            ok = True
            for f in by_last[i]:
                mapped = 0
                k = 0
                ff = f
                while ff:
                    if ff & 1:
                        mapped |= 1 << image[k]
                    ff >>= 1
                    k += 1
                if mapped not in faces:
                    ok = False
                    break
            if ok:
                used[j] = True
                extend(i + 1)
                used[j] = False
        image[i] = -1

    extend(0)
    return count
