"""Exact linear algebra over the rationals.

Small dense routines on tuples of :class:`fractions.Fraction`, used wherever
floating point is not acceptable: row reduction and rank, nullspaces, span
membership, orthogonal projection, and a phase-1 simplex for exact linear
feasibility (convex-hull membership in barycentric form).

All inputs are sequences of ints/Fractions; floats are rejected so that a
rounding error can never masquerade as an exact certificate.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

Vector = tuple[Fraction, ...]


def frac(x) -> Fraction:
    """Coerce to Fraction, refusing floats."""
    if isinstance(x, float):
        raise TypeError("refusing to coerce float %r to Fraction" % (x,))
    return Fraction(x)


def vector(xs: Iterable) -> Vector:
    return tuple(frac(x) for x in xs)


def dot(a: Sequence, b: Sequence) -> Fraction:
    return sum((frac(x) * frac(y) for x, y in zip(a, b, strict=True)), Fraction(0))


def vsub(a: Sequence, b: Sequence) -> Vector:
    return tuple(frac(x) - frac(y) for x, y in zip(a, b, strict=True))


def vadd(a: Sequence, b: Sequence) -> Vector:
    return tuple(frac(x) + frac(y) for x, y in zip(a, b, strict=True))


def vscale(c, a: Sequence) -> Vector:
    c = frac(c)
    return tuple(c * frac(x) for x in a)


def is_zero_vector(a: Sequence) -> bool:
    return all(x == 0 for x in a)


def row_reduce(rows: Sequence[Sequence]) -> tuple[list[Vector], tuple[int, ...]]:
    """Reduced row echelon form. Returns (reduced nonzero-padded rows, pivot columns)."""
    mat = [list(vector(r)) for r in rows]
    if not mat:
        return [], ()
    n_cols = len(mat[0])
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        pivot_row = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if pivot_row is None:
            continue
        mat[r], mat[pivot_row] = mat[pivot_row], mat[r]
        pv = mat[r][c]
        mat[r] = [x / pv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return [tuple(row) for row in mat], tuple(pivots)


def rank(rows: Sequence[Sequence]) -> int:
    _, pivots = row_reduce(rows)
    return len(pivots)


def row_space_basis(rows: Sequence[Sequence]) -> list[Vector]:
    """Canonical (RREF) basis of the row space."""
    red, pivots = row_reduce(rows)
    return [red[i] for i in range(len(pivots))]


def nullspace(rows: Sequence[Sequence], n_cols: int | None = None) -> list[Vector]:
    """Basis of {x : A x = 0}, one vector per free column of A."""
    if not rows:
        if n_cols is None:
            raise ValueError("n_cols required for an empty matrix")
        return [tuple(Fraction(int(i == j)) for j in range(n_cols)) for i in range(n_cols)]
    n = len(rows[0])
    red, pivots = row_reduce(rows)
    pivot_set = set(pivots)
    basis = []
    for free in range(n):
        if free in pivot_set:
            continue
        v = [Fraction(0)] * n
        v[free] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -red[i][free]
        basis.append(tuple(v))
    return basis


def solve_linear(rows: Sequence[Sequence], rhs: Sequence) -> Vector | None:
    """One exact solution of A x = b (free variables set to 0), or None if inconsistent."""
    if not rows:
        return None
    n = len(rows[0])
    aug = [list(vector(r)) + [frac(b)] for r, b in zip(rows, rhs, strict=True)]
    red, pivots = row_reduce(aug)
    if n in pivots:
        return None  # pivot in the rhs column
    x = [Fraction(0)] * n
    for i, pc in enumerate(pivots):
        x[pc] = red[i][n]
    return tuple(x)


def in_row_span(rows: Sequence[Sequence], v: Sequence) -> bool:
    base = [vector(r) for r in rows]
    return rank(base + [vector(v)]) == rank(base)


def project_onto_row_span(rows: Sequence[Sequence], v: Sequence) -> Vector:
    """Exact orthogonal projection of v onto span(rows)."""
    v = vector(v)
    basis = row_space_basis(rows)
    if not basis:
        return tuple(Fraction(0) for _ in v)
    gram = [[dot(bi, bj) for bj in basis] for bi in basis]
    rhs = [dot(bi, v) for bi in basis]
    y = solve_linear(gram, rhs)
    assert y is not None  # Gram matrix of a basis is invertible
    out = [Fraction(0)] * len(v)
    for yi, bi in zip(y, basis):
        for j, bij in enumerate(bi):
            out[j] += yi * bij
    return tuple(out)


def primitive_integer_vector(v: Sequence) -> tuple[int, ...]:
    """Scale a nonzero rational vector by a positive rational to coprime integers."""
    v = vector(v)
    if is_zero_vector(v):
        raise ValueError("zero vector has no primitive form")
    denom = lcm(*(x.denominator for x in v))
    ints = [int(x * denom) for x in v]
    g = gcd(*ints)
    return tuple(x // g for x in ints)


def standard_form_feasible(rows: Sequence[Sequence], rhs: Sequence) -> bool:
    """Exact feasibility of ``A x = b, x >= 0`` via a phase-1 simplex.

    Bland's rule for both the entering and leaving variable guarantees
    termination; all arithmetic is in Fractions, so the answer is a
    certificate-grade decision, not an approximation.
    """
    m = len(rows)
    if m == 0:
        return True
    n = len(rows[0])
    tab: list[list[Fraction]] = []
    b: list[Fraction] = []
    for row, beta in zip(rows, rhs, strict=True):
        r = [frac(x) for x in row]
        beta = frac(beta)
        if beta < 0:
            r = [-x for x in r]
            beta = -beta
        tab.append(r + [Fraction(0)] * m)
        b.append(beta)
    for i in range(m):
        tab[i][n + i] = Fraction(1)
    basis = list(range(n, n + m))

    while True:
        art_rows = [i for i in range(m) if basis[i] >= n]
        if sum((b[i] for i in art_rows), Fraction(0)) == 0:
            return True
        reduced = [sum((tab[i][j] for i in art_rows), Fraction(0)) for j in range(n)]
        enter = next((j for j in range(n) if reduced[j] > 0), None)
        if enter is None:
            return False
        best_key = None
        pivot_row = None
        for i in range(m):
            if tab[i][enter] > 0:
                key = (b[i] / tab[i][enter], basis[i])
                if best_key is None or key < best_key:
                    best_key, pivot_row = key, i
        assert pivot_row is not None  # the phase-1 objective is bounded below by 0
        pv = tab[pivot_row][enter]
        tab[pivot_row] = [x / pv for x in tab[pivot_row]]
        b[pivot_row] /= pv
        for i in range(m):
            if i != pivot_row and tab[i][enter] != 0:
                f = tab[i][enter]
                tab[i] = [x - f * y for x, y in zip(tab[i], tab[pivot_row])]
                b[i] -= f * b[pivot_row]
        basis[pivot_row] = enter


def point_in_hull(points: Sequence[Sequence], q: Sequence) -> bool:
    """Is q a convex combination of the given points? Exact barycentric feasibility."""
    pts = [vector(p) for p in points]
    q = vector(q)
    if not pts:
        return False
    dim = len(q)
    rows = [[p[d] for p in pts] for d in range(dim)]
    rows.append([Fraction(1)] * len(pts))
    rhs = list(q) + [Fraction(1)]
    return standard_form_feasible(rows, rhs)
