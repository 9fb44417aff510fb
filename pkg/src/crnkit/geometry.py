"""Exact convex geometry over rational point sets.

Face enumeration works in pure rational arithmetic and is therefore
bit-reproducible: facets are found by a pivoting (gift-wrapping) sweep
inside the affine hull, and the full proper-face lattice is the closure of
the facet vertex sets under intersection. Each face carries a supporting
certificate (primitive integer normal + offset) with the convention

    normal . p == offset  on the face,
    normal . q  > offset  for every other hull point.

On top of that sit the reaction-network tests: containment of vertices in
the source hull, the exact face criterion for strong endotacticity with a
witness face on failure, and sampled sweep tests (sound for refutation,
heuristic for acceptance) for endotactic / strongly endotactic networks.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import rational
from .network import Reaction, ReactionNetwork, stoichiometric_subspace


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class Face:
    """A proper face of a convex hull, as the set of input points lying on it."""

    vertex_indices: tuple[int, ...]
    normal: tuple[int, ...]
    offset: Fraction
    dim: int

    def to_json(self) -> dict:
        return {
            "vertex_indices": list(self.vertex_indices),
            "normal": list(self.normal),
            "offset": str(self.offset),
            "dim": self.dim,
        }


def _as_points(points) -> list[rational.Vector]:
    pts = [rational.vector(p) for p in points]
    if not pts:
        raise GeometryError("empty point set")
    if len({len(p) for p in pts}) != 1:
        raise GeometryError("points have mixed dimensions")
    return pts


def affine_dim(points) -> int:
    """Dimension of the affine hull (exact rank of difference vectors)."""
    pts = _as_points(points)
    diffs = [rational.vsub(p, pts[0]) for p in pts[1:]]
    return rational.rank(diffs)


def _tight_set(pts, w) -> tuple[Fraction, tuple[int, ...]]:
    values = [rational.dot(w, p) for p in pts]
    m = min(values)
    return m, tuple(i for i, v in enumerate(values) if v == m)


def _facets_full_dim(pts: list[rational.Vector]) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Facets of conv(pts) for pts affinely spanning their whole space.

    Returns (primitive inward normal, tight index tuple) pairs. Facets are
    discovered by pivoting: an initial supporting hyperplane is rotated onto
    points until its contact set has facet dimension, then a breadth-first
    sweep pivots around every ridge to reach all neighbouring facets.
    """
    k = len(pts[0])
    if k == 1:
        lo, lo_set = _tight_set(pts, (Fraction(1),))
        hi, hi_set = _tight_set(pts, (Fraction(-1),))
        return [((1,), lo_set), ((-1,), hi_set)]

    def rank_of(indices) -> int:
        base = pts[indices[0]]
        return rational.rank([rational.vsub(pts[i], base) for i in indices[1:]])

    # --- initial facet: rotate a supporting hyperplane until it is a facet
    w = tuple(Fraction(int(j == 0)) for j in range(k))
    _, tight = _tight_set(pts, w)
    while rank_of(tight) < k - 1:
        t0 = pts[tight[0]]
        diffs = [rational.vsub(pts[i], t0) for i in tight[1:]]
        null = rational.nullspace(diffs, n_cols=k) if diffs else rational.nullspace([], n_cols=k)
        c = next(v for v in null if rational.rank([w, v]) == 2)
        u = {q: rational.dot(c, rational.vsub(pts[q], t0)) for q in range(len(pts))}
        if not any(val < 0 for val in u.values()):
            c = tuple(-x for x in c)
            u = {q: -val for q, val in u.items()}
        assert any(val < 0 for val in u.values())  # c is inside the span of the points
        t_star = None
        for q, uq in u.items():
            if uq < 0:
                vq = rational.dot(w, rational.vsub(pts[q], t0))
                ratio = vq / (-uq)
                if t_star is None or ratio < t_star:
                    t_star = ratio
        w = tuple(a + t_star * b for a, b in zip(w, c))
        w = tuple(Fraction(x) for x in rational.primitive_integer_vector(w))
        _, tight = _tight_set(pts, w)

    first = (rational.primitive_integer_vector(w), tight)
    facets = [first]
    seen = {frozenset(tight)}
    queue = [first]
    while queue:
        w_f, tight_f = queue.pop()
        w_f = tuple(Fraction(x) for x in w_f)
        sub_pts = [pts[i] for i in tight_f]
        for c_sub, ridge_local in _facets_any_dim(sub_pts):
            c = tuple(Fraction(x) for x in c_sub)
            ridge = [tight_f[i] for i in ridge_local]
            r0 = pts[ridge[0]]
            u = [rational.dot(c, rational.vsub(p, r0)) for p in pts]
            v = [rational.dot(w_f, rational.vsub(p, r0)) for p in pts]
            negatives = [q for q in range(len(pts)) if u[q] < 0]
            if negatives:
                t_star = min(v[q] / (-u[q]) for q in negatives)
                w_new = tuple(a + t_star * b for a, b in zip(w_f, c))
            else:
                s_star = min(u[q] / v[q] for q in range(len(pts)) if v[q] > 0)
                w_new = tuple(a - s_star * b for a, b in zip(c, w_f))
            w_new_int = rational.primitive_integer_vector(w_new)
            _, tight_new = _tight_set(pts, w_new_int)
            key = frozenset(tight_new)
            if key not in seen:
                seen.add(key)
                entry = (w_new_int, tight_new)
                facets.append(entry)
                queue.append(entry)
    return facets


_FACET_CACHE: dict[tuple[rational.Vector, ...], list] = {}


def _facets_any_dim(points: Sequence[rational.Vector]) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Facets of conv(points) inside their own affine hull, normals lifted
    back to the ambient space (zero outside the hull's pivot coordinates).

    Memoized on the point tuple: ridge recursion revisits shared subfaces
    along many facet paths, and caching collapses that to one visit each.
    """
    key = tuple(points)
    cached = _FACET_CACHE.get(key)
    if cached is not None:
        return cached
    pts = list(points)
    ambient = len(pts[0])
    p0 = pts[0]
    diffs = [rational.vsub(p, p0) for p in pts[1:]]
    _, pivots = rational.row_reduce(diffs)
    if not pivots:
        raise GeometryError("all points identical")
    coords = [tuple(p[j] - p0[j] for j in pivots) for p in pts]
    out = []
    for a, tight in _facets_full_dim(coords):
        w = [0] * ambient
        for val, j in zip(a, pivots):
            w[j] = val
        out.append((tuple(w), tight))
    if len(_FACET_CACHE) > 4096:
        _FACET_CACHE.clear()
    _FACET_CACHE[key] = out
    return out


def enumerate_proper_faces(points) -> list[Face]:
    """All proper nonempty faces of conv(points), each with a supporting
    certificate. `vertex_indices` lists every input point on the face."""
    pts = _as_points(points)
    if len(pts) < 2:
        raise GeometryError("need at least 2 points")
    if affine_dim(pts) == 0:
        raise GeometryError("all points identical")
    facets = _facets_any_dim(pts)
    facet_sets = [frozenset(t) for _, t in facets]
    all_sets = set(facet_sets)
    frontier = list(all_sets)
    while frontier:
        fresh = []
        for f in frontier:
            for g in facet_sets:
                h = f & g
                if h and h not in all_sets:
                    all_sets.add(h)
                    fresh.append(h)
        frontier = fresh

    normals = [tuple(Fraction(x) for x in w) for w, _ in facets]
    faces = []
    for vertex_set in all_sets:
        containing = [i for i, fs in enumerate(facet_sets) if vertex_set <= fs]
        total = [Fraction(0)] * len(pts[0])
        for i in containing:
            total = [a + b for a, b in zip(total, normals[i])]
        normal = rational.primitive_integer_vector(total)
        idx = tuple(sorted(vertex_set))
        offset = rational.dot(normal, pts[idx[0]])
        dim = 0 if len(idx) == 1 else rational.rank(
            [rational.vsub(pts[i], pts[idx[0]]) for i in idx[1:]]
        )
        faces.append(Face(idx, normal, offset, dim))
    faces.sort(key=lambda f: (f.dim, f.vertex_indices))
    return faces


# ---------------------------------------------------------------------------
# endotacticity
# ---------------------------------------------------------------------------


def sources_contain_all_vertices(net: ReactionNetwork) -> bool:
    """Does every vertex of the network lie in the convex hull of its sources?"""
    sources = [tuple(c.coeffs) for c in net.source_complexes]
    if not sources:
        return True
    source_set = set(sources)
    targets = {tuple(r.target.coeffs) for r in net.reactions}
    return all(rational.point_in_hull(sources, t) for t in targets if t not in source_set)


@dataclass(frozen=True)
class EndotacticResult:
    strongly_endotactic: bool
    witness_face: Face | None
    source_points: tuple[tuple[int, ...], ...]

    def to_json(self) -> dict:
        return {
            "strongly_endotactic": self.strongly_endotactic,
            "witness_face": self.witness_face.to_json() if self.witness_face else None,
            "source_points": [list(p) for p in self.source_points],
        }


def strongly_endotactic_exact(net: ReactionNetwork) -> EndotacticResult:
    """Exact decision via the face criterion: with all vertices inside the
    source hull, the network is strongly endotactic iff every proper face of
    that hull carries a reaction whose target leaves the face. On failure the
    witness face (all incident reactions stay on it) is returned.

    Raises GeometryError when the containment precondition fails; callers
    must fall back to the sampled sweep test in that case.
    """
    if not sources_contain_all_vertices(net):
        raise GeometryError(
            "exact test requires every vertex inside the convex hull of the sources"
        )
    sources = [tuple(c.coeffs) for c in net.source_complexes]
    if len(set(sources)) < 2:
        return EndotacticResult(True, None, tuple(sources))  # no proper faces
    faces = enumerate_proper_faces(sources)
    reaction_data = [(tuple(r.source.coeffs), tuple(r.target.coeffs)) for r in net.reactions]
    for face in faces:
        escapes = False
        for src, tgt in reaction_data:
            if rational.dot(face.normal, src) == face.offset:
                t_val = rational.dot(face.normal, tgt)
                assert t_val >= face.offset  # containment guarantees this
                if t_val > face.offset:
                    escapes = True
                    break
        if not escapes:
            return EndotacticResult(False, face, tuple(sources))
    return EndotacticResult(True, None, tuple(sources))


@dataclass(frozen=True)
class SweepVerdict:
    """Outcome of a sampled sweep test.

    `refuted=True` is a sound certificate (checkable against the definition);
    `refuted=False` only means no violating direction was found among those
    tested, not a proof.
    """

    refuted: bool
    witness_direction: tuple[Fraction, ...] | None = None
    witness_reaction: Reaction | None = None
    directions_tested: int = 0

    def to_json(self) -> dict:
        return {
            "refuted": self.refuted,
            "witness_direction": [str(x) for x in self.witness_direction]
            if self.witness_direction
            else None,
            "witness_reaction": {
                "source": list(self.witness_reaction.source.coeffs),
                "target": list(self.witness_reaction.target.coeffs),
            }
            if self.witness_reaction
            else None,
            "directions_tested": self.directions_tested,
        }


def _direction_in_s_perp(net: ReactionNetwork, w) -> bool:
    return all(rational.dot(w, r.vector) == 0 for r in net.reactions)


def candidate_directions(net: ReactionNetwork, extra: int = 16, seed: int = 0) -> list[rational.Vector]:
    """Deterministic direction set for the sampled sweeps: +- facet normals of
    the source hull, +- coordinate axes, +- reaction vectors, plus `extra`
    seeded random rational directions projected onto the stoichiometric
    subspace. Directions orthogonal to every reaction vector are excluded."""
    n = net.n_species
    base: list[rational.Vector] = []
    sources = [tuple(c.coeffs) for c in net.source_complexes]
    if len(set(sources)) >= 2 and affine_dim(sources) >= 1:
        for w, _ in _facets_any_dim(_as_points(sources)):
            base.append(rational.vector(w))
    for i in range(n):
        base.append(tuple(Fraction(int(i == j)) for j in range(n)))
    for r in net.reactions:
        base.append(rational.vector(r.vector))

    s_basis = stoichiometric_subspace(net)
    out: list[rational.Vector] = []
    seen: set[tuple[int, ...]] = set()

    def push(v):
        if rational.is_zero_vector(v) or _direction_in_s_perp(net, v):
            return
        key = rational.primitive_integer_vector(v)
        if key not in seen:
            seen.add(key)
            out.append(rational.vector(key))

    for v in base:
        push(v)
        push(tuple(-x for x in v))

    rng = random.Random(seed)
    attempts = 0
    found = 0
    while found < extra and attempts < 50 * max(extra, 1):
        attempts += 1
        raw = [Fraction(rng.randint(-9, 9)) for _ in range(n)]
        if s_basis:
            raw = list(rational.project_onto_row_span(s_basis, raw))
        if rational.is_zero_vector(raw) or _direction_in_s_perp(net, raw):
            continue
        key = rational.primitive_integer_vector(raw)
        if key not in seen:
            seen.add(key)
            out.append(rational.vector(key))
            found += 1
    return out


def parallel_sweep_sampled(net: ReactionNetwork, directions: Sequence[Sequence]) -> SweepVerdict:
    """Sweep test for strong endotacticity over the given directions.

    For each direction w, the supporting hyperplane through the w-minimal
    sources is inspected: a reaction leaving it against w, or no reaction
    leaving it along w, refutes strong endotacticity.
    """
    if not directions:
        raise GeometryError("no directions supplied")
    if not net.reactions:
        return SweepVerdict(False, directions_tested=len(directions))
    sources = [tuple(c.coeffs) for c in net.source_complexes]
    for w_raw in directions:
        w = rational.vector(w_raw)
        if _direction_in_s_perp(net, w):
            raise GeometryError(f"direction {w_raw} is orthogonal to the stoichiometric subspace")
        minimum = min(rational.dot(w, s) for s in sources)
        gains = False
        for r in net.reactions:
            if rational.dot(w, r.source.coeffs) != minimum:
                continue
            step = rational.dot(w, r.vector)
            if step < 0:
                return SweepVerdict(True, w, r, len(directions))
            if step > 0:
                gains = True
        if not gains:
            return SweepVerdict(True, w, None, len(directions))
    return SweepVerdict(False, directions_tested=len(directions))


def endotactic_sampled(net: ReactionNetwork, directions: Sequence[Sequence]) -> SweepVerdict:
    """Sweep test for endotacticity: a direction w refutes it when some
    reaction loses along w and no reaction with a w-smaller source gains."""
    if not directions:
        raise GeometryError("no directions supplied")
    for w_raw in directions:
        w = rational.vector(w_raw)
        for r in net.reactions:
            if rational.dot(w, r.vector) >= 0:
                continue
            level = rational.dot(w, r.source.coeffs)
            compensated = any(
                rational.dot(w, other.vector) > 0 and rational.dot(w, other.source.coeffs) < level
                for other in net.reactions
            )
            if not compensated:
                return SweepVerdict(True, w, r, len(directions))
    return SweepVerdict(False, directions_tested=len(directions))


# ---------------------------------------------------------------------------
# truncated simplices
# ---------------------------------------------------------------------------


def truncated_simplex(n: int) -> list[tuple[int, ...]]:
    """The n(n-1) points 2e_i + e_j (i != j) in R^n: the vertex set of the
    simplex with corners 3e_i truncated at one third of each edge."""
    if n < 2:
        raise GeometryError("truncated simplex needs n >= 2")
    points = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            p = [0] * n
            p[i] = 2
            p[j] = 1
            points.append(tuple(p))
    return points


@dataclass(frozen=True)
class SimplexFace:
    """Face lies on the cut simplex at a doubled species (x_apex = 2)."""

    apex: int


@dataclass(frozen=True)
class TruncatedSubsimplex:
    """Face is an entire truncated r-simplex over the given species."""

    r: int
    species: tuple[int, ...]


def classify_truncated_face(face: Face, n: int) -> SimplexFace | TruncatedSubsimplex:
    """Classify a proper face of `truncated_simplex(n)` as either a face of a
    cut simplex or an entire truncated subsimplex. The two cases are mutually
    exclusive; violating either way raises GeometryError."""
    points = truncated_simplex(n)
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    if not face.vertex_indices or max(face.vertex_indices) >= len(points):
        raise GeometryError("face does not index the truncated-simplex vertex set")
    for idx, p in enumerate(points):
        val = rational.dot(face.normal, p)
        on = idx in face.vertex_indices
        if on and val != face.offset:
            raise GeometryError("input is not a face of the truncated simplex")
        if not on and val <= face.offset:
            raise GeometryError("input is not a face of the truncated simplex")
    chosen = [pairs[i] for i in face.vertex_indices]
    apexes = {a for a, _ in chosen}
    simplex_case = len(apexes) == 1
    species = tuple(sorted({a for a, _ in chosen} | {b for _, b in chosen}))
    expected = {(a, b) for a in species for b in species if a != b}
    truncated_case = len(species) >= 2 and set(chosen) == expected
    if simplex_case == truncated_case:
        raise GeometryError("face classification dichotomy violated")
    if simplex_case:
        return SimplexFace(next(iter(apexes)))
    return TruncatedSubsimplex(len(species) - 1, species)
