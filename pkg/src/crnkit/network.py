"""Reaction networks as integer-embedded directed graphs.

A network is a species list plus directed edges between complexes, where a
complex is a vector of non-negative integer stoichiometric coefficients.
This module holds the immutable data model and the purely combinatorial
analyses: stoichiometric subspace, linkage classes, (weak) reversibility,
production graphs, bimolecular-autocatalytic recognition, species closures,
and compatibility-class membership. Everything here is exact; numerical
dynamics live in :mod:`crnkit.simulate`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from . import rational


class NetworkError(ValueError):
    """Invalid network construction or operation precondition."""


@dataclass(frozen=True, order=True)
class Species:
    """A named species; `index` is its position in the network's species list."""

    index: int
    name: str = ""

    def __post_init__(self):
        if not self.name:
            object.__setattr__(self, "name", f"X{self.index + 1}")


@dataclass(frozen=True, order=True)
class Complex:
    """A vertex of the embedded graph: non-negative integer coefficients per species."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        coeffs = []
        for c in self.coeffs:
            if c != int(c):
                raise NetworkError(f"complex coefficients must be integers: {tuple(self.coeffs)}")
            if c < 0:
                raise NetworkError(f"complex coefficients must be non-negative: {tuple(self.coeffs)}")
            coeffs.append(int(c))
        object.__setattr__(self, "coeffs", tuple(coeffs))

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i]

    def __iter__(self):
        return iter(self.coeffs)

    @property
    def molecularity(self) -> int:
        return sum(self.coeffs)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.coeffs) if c > 0)

    def plus_unit(self, i: int) -> "Complex":
        c = list(self.coeffs)
        c[i] += 1
        return Complex(tuple(c))

    def shifted(self, v: Sequence[int]) -> "Complex":
        return Complex(tuple(c + int(d) for c, d in zip(self.coeffs, v, strict=True)))

    def format(self, species: Sequence[Species]) -> str:
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            parts.append(species[i].name if c == 1 else f"{c}{species[i].name}")
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True, order=True)
class Reaction:
    """A directed edge source -> target between complexes of equal length."""

    source: Complex
    target: Complex
    label: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.source) != len(self.target):
            raise NetworkError("source and target complexes have different lengths")
        if self.source == self.target:
            raise NetworkError(f"reaction source equals target: {self.source.coeffs}")

    @property
    def vector(self) -> tuple[int, ...]:
        """Net stoichiometric change target - source (entries may be negative)."""
        return tuple(t - s for s, t in zip(self.source, self.target))

    def format(self, species: Sequence[Species]) -> str:
        return f"{self.source.format(species)} -> {self.target.format(species)}"


@dataclass(frozen=True)
class ReactionNetwork:
    species: tuple[Species, ...]
    reactions: tuple[Reaction, ...]

    def __post_init__(self):
        object.__setattr__(self, "species", tuple(self.species))
        object.__setattr__(self, "reactions", tuple(self.reactions))
        names = [s.name for s in self.species]
        if len(set(names)) != len(names):
            raise NetworkError(f"duplicate species names: {names}")
        for i, s in enumerate(self.species):
            if s.index != i:
                raise NetworkError(f"species {s.name} has index {s.index}, expected {i}")
        n = len(self.species)
        seen: set[tuple[tuple[int, ...], tuple[int, ...]]] = set()
        for r in self.reactions:
            if len(r.source) != n:
                raise NetworkError(
                    f"reaction {r.source.coeffs}->{r.target.coeffs} has wrong length for {n} species"
                )
            key = (r.source.coeffs, r.target.coeffs)
            if key in seen:
                raise NetworkError(f"duplicate reaction {r.format(self.species)}")
            seen.add(key)

    @classmethod
    def from_coeffs(
        cls,
        species_names: Sequence[str],
        reactions: Iterable[tuple[Sequence[int], Sequence[int]] | tuple[Sequence[int], Sequence[int], str | None]],
    ) -> "ReactionNetwork":
        species = tuple(Species(i, name) for i, name in enumerate(species_names))
        rxns = []
        for entry in reactions:
            src, tgt = entry[0], entry[1]
            label = entry[2] if len(entry) > 2 else None
            rxns.append(Reaction(Complex(tuple(src)), Complex(tuple(tgt)), label))
        return cls(species, tuple(rxns))

    @property
    def n_species(self) -> int:
        return len(self.species)

    @cached_property
    def complexes(self) -> tuple[Complex, ...]:
        """All distinct complexes, in first-appearance order over the reaction list."""
        seen: dict[Complex, None] = {}
        for r in self.reactions:
            seen.setdefault(r.source)
            seen.setdefault(r.target)
        return tuple(seen)

    @cached_property
    def source_complexes(self) -> tuple[Complex, ...]:
        seen: dict[Complex, None] = {}
        for r in self.reactions:
            seen.setdefault(r.source)
        return tuple(seen)

    def species_index(self, name: str) -> int:
        for s in self.species:
            if s.name == name:
                return s.index
        raise KeyError(name)

    def __str__(self) -> str:
        from .io import format_network

        return format_network(self)


@dataclass(frozen=True)
class ProductionGraph:
    """Species-level digraph: edge (i, j) when a single-species source can produce j."""

    n_species: int
    edges: frozenset[tuple[int, int]]


# ---------------------------------------------------------------------------
# combinatorial analyses
# ---------------------------------------------------------------------------


def stoichiometric_subspace(net: ReactionNetwork) -> list[rational.Vector]:
    """Canonical rational basis of span{target - source} over all reactions."""
    vectors = [r.vector for r in net.reactions]
    return rational.row_space_basis(vectors)


def _adjacency(net: ReactionNetwork) -> tuple[dict[Complex, int], list[list[int]]]:
    index = {c: i for i, c in enumerate(net.complexes)}
    succ: list[list[int]] = [[] for _ in index]
    for r in net.reactions:
        succ[index[r.source]].append(index[r.target])
    return index, succ


def linkage_classes(net: ReactionNetwork) -> list[tuple[Complex, ...]]:
    """Weakly-connected components of the complex graph, as a partition of its vertices."""
    complexes = net.complexes
    index = {c: i for i, c in enumerate(complexes)}
    parent = list(range(len(complexes)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for r in net.reactions:
        a, b = find(index[r.source]), find(index[r.target])
        if a != b:
            parent[a] = b
    groups: dict[int, list[Complex]] = {}
    for c in complexes:
        groups.setdefault(find(index[c]), []).append(c)
    classes = [tuple(sorted(g)) for g in groups.values()]
    classes.sort()
    return classes


def _strongly_connected_components(n: int, succ: Sequence[Sequence[int]]) -> list[int]:
    """Iterative Tarjan; returns the component id of each vertex."""
    comp = [-1] * n
    low = [0] * n
    num = [-1] * n
    counter = 0
    n_comps = 0
    stack: list[int] = []
    on_stack = [False] * n
    for root in range(n):
        if num[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                num[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            recurse = False
            for i in range(pi, len(succ[v])):
                w = succ[v][i]
                if num[w] == -1:
                    work[-1] = (v, i + 1)
                    work.append((w, 0))
                    recurse = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], num[w])
            if recurse:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == num[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = n_comps
                    if w == v:
                        break
                n_comps += 1
    return comp


def is_weakly_reversible(net: ReactionNetwork) -> bool:
    """True iff every reaction lies on a directed cycle of the complex graph."""
    index, succ = _adjacency(net)
    comp = _strongly_connected_components(len(index), succ)
    return all(comp[index[r.source]] == comp[index[r.target]] for r in net.reactions)


def reaction_lies_on_cycle(net: ReactionNetwork, reaction: Reaction) -> bool:
    """Direct reachability check: is there a path target ~> source? (test oracle)"""
    index, succ = _adjacency(net)
    start, goal = index[reaction.target], index[reaction.source]
    seen = {start}
    frontier = [start]
    while frontier:
        v = frontier.pop()
        if v == goal:
            return True
        for w in succ[v]:
            if w not in seen:
                seen.add(w)
                frontier.append(w)
    return goal in seen


def is_reversible(net: ReactionNetwork) -> bool:
    edges = {(r.source, r.target) for r in net.reactions}
    return all((t, s) in edges for s, t in edges)


def production_graph(net: ReactionNetwork) -> ProductionGraph:
    """Edge (i, j) iff some reaction has source supported on species i alone
    (any multiplicity) and species j in its target's support."""
    edges = set()
    for r in net.reactions:
        supp = r.source.support
        if len(supp) != 1:
            continue
        i = supp[0]
        for j in r.target.support:
            edges.add((i, j))
    return ProductionGraph(net.n_species, frozenset(edges))


def is_strongly_connected(g: ProductionGraph) -> bool:
    n = g.n_species
    if n == 0:
        return True
    succ: list[list[int]] = [[] for _ in range(n)]
    pred: list[list[int]] = [[] for _ in range(n)]
    for i, j in g.edges:
        succ[i].append(j)
        pred[j].append(i)

    def reach(adj):
        seen = {0}
        frontier = [0]
        while frontier:
            v = frontier.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    frontier.append(w)
        return seen

    return len(reach(succ)) == n and len(reach(pred)) == n


def bimolecular_pattern(reaction: Reaction) -> tuple[int, int, int] | None:
    """Decompose a reaction as X_i + X_j -> X_i + X_j + X_l (i <= j), else None."""
    if reaction.source.molecularity != 2:
        return None
    diff = reaction.vector
    produced = [k for k, d in enumerate(diff) if d != 0]
    if len(produced) != 1 or diff[produced[0]] != 1:
        return None
    supp = reaction.source.support
    if len(supp) == 1:
        i = j = supp[0]
    else:
        i, j = supp
    return (i, j, produced[0])


def is_bimolecular_autocatalytic(net: ReactionNetwork) -> bool:
    """True iff every reaction has the form X_i + X_j -> X_i + X_j + X_l."""
    return all(bimolecular_pattern(r) is not None for r in net.reactions)


def species_closure(net: ReactionNetwork, seed: Iterable[int]) -> frozenset[int]:
    """Least fixed point: add the species produced by any reaction whose full
    source support lies in the current set. Monotone and idempotent in the seed."""
    current = set(seed)
    if not current:
        raise NetworkError("species_closure requires a non-empty seed")
    changed = True
    while changed:
        changed = False
        for r in net.reactions:
            if set(r.source.support) <= current:
                new = set(r.target.support) - current
                if new:
                    current |= new
                    changed = True
    return frozenset(current)


def pairwise_production_check(net: ReactionNetwork) -> tuple[bool, tuple[int, int] | None]:
    """For every unordered pair i != j, some reaction X_i + X_j -> X_i + X_j + X_k
    with k outside {i, j} must exist whose closure from {i, j, k} reaches all
    species. Returns (holds, first failing pair)."""
    if not is_bimolecular_autocatalytic(net):
        raise NetworkError("pairwise_production_check requires a bimolecular autocatalytic network")
    n = net.n_species
    all_species = frozenset(range(n))
    patterns = [bimolecular_pattern(r) for r in net.reactions]
    for i, j in itertools.combinations(range(n), 2):
        ok = False
        for pat in patterns:
            pi, pj, k = pat
            if {pi, pj} == {i, j} and k not in (i, j):
                if species_closure(net, {i, j, k}) == all_species:
                    ok = True
                    break
        if not ok:
            return False, (i, j)
    return True, None


def compatibility_class_contains(
    net: ReactionNetwork, x0: Sequence, x: Sequence, rel_tol: float = 1e-9
) -> bool:
    """Is x in the positive compatibility class of x0, i.e. x - x0 in the
    stoichiometric subspace? Exact when inputs are rational, least-squares
    residual test otherwise."""
    if len(x0) != net.n_species or len(x) != net.n_species:
        raise NetworkError("state dimension does not match the species count")
    if any(v <= 0 for v in x0) or any(v <= 0 for v in x):
        raise NetworkError("compatibility-class membership requires strictly positive states")
    exact = not any(isinstance(v, float) for v in tuple(x0) + tuple(x))
    vectors = [r.vector for r in net.reactions]
    if exact:
        diff = rational.vsub(rational.vector(x), rational.vector(x0))
        if rational.is_zero_vector(diff):
            return True
        return rational.in_row_span(vectors, diff)
    import numpy as np

    diff = np.asarray(x, dtype=float) - np.asarray(x0, dtype=float)
    if not vectors:
        return bool(np.linalg.norm(diff) <= rel_tol)
    basis = np.asarray(vectors, dtype=float).T
    coeffs, *_ = np.linalg.lstsq(basis, diff, rcond=None)
    residual = np.linalg.norm(basis @ coeffs - diff)
    return bool(residual <= rel_tol * (1.0 + np.linalg.norm(diff)))
