"""Exact rational scalars and dense exact linear algebra.

Everything numeric in this package is exact: Python ints, `Q` rationals
(gmpy2.mpq, with a fractions.Fraction fallback), and primitive integer
vectors obtained by clearing denominators.  No floats anywhere.
"""

from __future__ import annotations

from math import gcd
from typing import Iterable, Sequence

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    from fractions import Fraction as Q

QLike = object  # int | Q | Fraction | str


def rat(value) -> Q:
    """Coerce ints, strings like "3/4", Fractions and Q itself to Q."""
    if isinstance(value, str):
        text = value.strip()
        if text.startswith("+"):
            text = text[1:]
        return Q(text)
    if isinstance(value, float):
        raise TypeError("floats are not allowed; use exact rationals")
    return Q(value)


def as_int(q) -> int:
    """Exact integer value of q, or raise ValueError."""
    q = Q(q)
    if q.denominator != 1:
        raise ValueError(f"{q} is not an integer")
    return int(q.numerator)


def vec(values: Iterable) -> tuple:
    return tuple(rat(v) for v in values)


def dot(u: Sequence, v: Sequence):
    s = 0
    for a, b in zip(u, v):
        s += a * b
    return s


def vec_add(u: Sequence, v: Sequence) -> tuple:
    return tuple(a + b for a, b in zip(u, v))

def vec_sub(u: Sequence, v: Sequence) -> tuple:
    return tuple(a - b for a, b in zip(u, v))


def vec_scale(u: Sequence, s) -> tuple:
    return tuple(a * s for a in u)


def is_zero_vector(u: Sequence) -> bool:
    return all(a == 0 for a in u)


def primitive(values: Sequence) -> tuple[int, ...]:
    """Scale by a positive rational so the entries are coprime integers.

    The sign pattern is preserved; (0, ..., 0) maps to itself.  Returns a
    tuple of Python ints.
    """
    nums = []
    dens = []
    for v in values:
        q = Q(v)
        nums.append(int(q.numerator))
        dens.append(int(q.denominator))
    if all(n == 0 for n in nums):
        return tuple(0 for _ in nums)
    mult = 1
    for d in dens:
        mult = mult * d // gcd(mult, d)
    ints = [n * (mult // d) for n, d in zip(nums, dens)]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return tuple(x // g for x in ints)


def primitive_scale(values: Sequence):
    """Return (primitive integer tuple, s) with s > 0 and prim == s * values."""
    prim = primitive(values)
    for p, v in zip(prim, values):
        if v != 0:
            return prim, Q(p) / Q(v)
    return prim, Q(1)


def intify(values: Sequence) -> tuple[tuple[int, ...], int]:
    """Clear denominators: return (integer tuple, den) with values == ints/den."""
    dens = [int(Q(v).denominator) for v in values]
    mult = 1
    for d in dens:
        mult = mult * d // gcd(mult, d)
    ints = tuple(int(Q(v).numerator) * (mult // int(Q(v).denominator)) for v in values)
    return ints, mult


# --- dense exact linear algebra ---------------------------------------------

def _echelon(rows: list[list], ncols: int, pivot_order=None):
    """In-place row echelon form; returns list of (row_index, pivot_col).

    ``pivot_order`` gives the column scan order (default 0..ncols-1); the
    pivot of each row is its first nonzero column in that order.
    """
    order = list(range(ncols)) if pivot_order is None else list(pivot_order)
    pivots = []
    used = set()
    r = 0
    for col in order:
        if r >= len(rows):
            break
        sel = None
        for i in range(r, len(rows)):
            if rows[i][col] != 0:
                sel = i
                break
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        piv = rows[r][col]
        rows[r] = [x / piv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        used.add(col)
        pivots.append((r, col))
        r += 1
    return pivots


def rank(vectors: Sequence[Sequence]) -> int:
    if not vectors:
        return 0
    rows = [[Q(x) for x in v] for v in vectors]
    return len(_echelon(rows, len(rows[0])))


def independent_subset(vectors: Sequence[Sequence]) -> list[int]:
    """Indices of a maximal linearly independent subset, scanning in order."""
    basis: list[list] = []
    piv_cols: list[int] = []
    chosen = []
    for idx, v in enumerate(vectors):
        row = [Q(x) for x in v]
        for b, pc in zip(basis, piv_cols):
            if row[pc] != 0:
                f = row[pc]
                row = [a - f * c for a, c in zip(row, b)]
        col = next((j for j, x in enumerate(row) if x != 0), None)
        if col is None:
            continue
        piv = row[col]
        row = [x / piv for x in row]
        basis.append(row)
        piv_cols.append(col)
        chosen.append(idx)
    return chosen


def invert(matrix: Sequence[Sequence]) -> list[list] | None:
    """Exact inverse of a square matrix, or None if singular."""
    n = len(matrix)
    aug = [[Q(x) for x in row] + [Q(1) if j == i else Q(0) for j in range(n)]
           for i, row in enumerate(matrix)]
    for col in range(n):
        sel = next((i for i in range(col, n) if aug[i][col] != 0), None)
        if sel is None:
            return None
        aug[col], aug[sel] = aug[sel], aug[col]
        piv = aug[col][col]
        aug[col] = [x / piv for x in aug[col]]
        for i in range(n):
            if i != col and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[col])]
    return [row[n:] for row in aug]


def solve_linear(rows: Sequence[Sequence], rhs: Sequence):
    """One exact solution x of rows @ x = rhs, or None if inconsistent.

    Under-determined systems get the solution with free variables at 0.
    """
    if not rows:
        return tuple()
    n = len(rows[0])
    aug = [[Q(x) for x in row] + [Q(b)] for row, b in zip(rows, rhs)]
    pivots = _echelon(aug, n)
    for i in range(len(aug)):
        if all(aug[i][j] == 0 for j in range(n)) and aug[i][n] != 0:
            return None
    x = [Q(0)] * n
    for r, c in pivots:
        x[c] = aug[r][n]
    return tuple(x)


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[tuple]:
    """Deterministic basis of {x : row . x = 0 for all rows}."""
    mat = [[Q(x) for x in row] for row in rows]
    pivots = _echelon(mat, ncols) if mat else []
    pivot_cols = {c for _, c in pivots}
    basis = []
    for free in range(ncols):
        if free in pivot_cols:
            continue
        v = [Q(0)] * ncols
        v[free] = Q(1)
        for r, c in pivots:
            v[c] = -mat[r][free]
        basis.append(tuple(v))
    return basis
