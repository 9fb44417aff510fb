"""Generators for the named network families, golden fixtures, and the
seeded samplers used by the test corpus.

Families (species X1..Xn, cyclic indexing X_{n+1} = X_1):

* ``hypercycle(n)``: X_i + X_{i+1} -> X_i + 2X_{i+1}
* ``rep_recomb(n)``: 2X_i -> 3X_i and 2X_i -> 2X_i + X_{i+1}
  (repeated-reactant recombination)
* ``recomb(n)``: X_i + X_{i+1} -> X_i + 2X_{i+1} and
  X_i + X_{i+1} -> X_i + X_{i+1} + X_{i+2} (distinct-reactant recombination)

``golden_networks()`` loads byte-stable hand-checked fixtures of these
families together with their relative-population networks; transcription
rows that were evidently garbled in the original listings are carried as
flagged typo records with the construction's output substituted in place.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from .dynamics import MassActionSystem, relative_network
from .io import parse_system
from .network import (
    Complex,
    NetworkError,
    Reaction,
    ReactionNetwork,
    Species,
    is_strongly_connected,
    pairwise_production_check,
    production_graph,
)

FIXTURE_VERSION = "v1"


def _cyclic_network(n: int, rows: list[tuple[dict[int, int], dict[int, int], str]]) -> ReactionNetwork:
    species = tuple(Species(i) for i in range(n))
    reactions = []
    for src, tgt, label in rows:
        s = [0] * n
        t = [0] * n
        for i, c in src.items():
            s[i % n] += c
        for i, c in tgt.items():
            t[i % n] += c
        reactions.append(Reaction(Complex(tuple(s)), Complex(tuple(t)), label))
    return ReactionNetwork(species, tuple(reactions))


def hypercycle(n: int) -> ReactionNetwork:
    """Cyclic cross-catalysis: X_i + X_{i+1} -> X_i + 2X_{i+1}."""
    if n < 2:
        raise NetworkError("hypercycle needs n >= 2")
    rows = [({i: 1, i + 1: 1}, {i: 1, i + 1: 2}, f"k{i + 1}") for i in range(n)]
    return _cyclic_network(n, rows)


def rep_recomb(n: int) -> ReactionNetwork:
    """Repeated-reactant recombination: 2X_i -> 3X_i and 2X_i -> 2X_i + X_{i+1}."""
    if n < 2:
        raise NetworkError("rep_recomb needs n >= 2")
    rows = []
    for i in range(n):
        rows.append(({i: 2}, {i: 3}, f"k{2 * i + 1}"))
        rows.append(({i: 2}, {i: 2, i + 1: 1}, f"k{2 * i + 2}"))
    return _cyclic_network(n, rows)


def recomb(n: int) -> ReactionNetwork:
    """Distinct-reactant recombination: X_i + X_{i+1} -> X_i + 2X_{i+1} and
    X_i + X_{i+1} -> X_i + X_{i+1} + X_{i+2}."""
    if n < 3:
        raise NetworkError("recomb needs n >= 3")
    rows = []
    for i in range(n):
        rows.append(({i: 1, i + 1: 1}, {i: 1, i + 1: 2}, f"k{i + 1}"))
    for i in range(n):
        rows.append(({i: 1, i + 1: 1}, {i: 1, i + 1: 1, i + 2: 1}, f"k{n + i + 1}"))
    return _cyclic_network(n, rows)


FAMILIES = {"hypercycle": hypercycle, "rep-recomb": rep_recomb, "recomb": recomb}


# ---------------------------------------------------------------------------
# golden fixtures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TypoRow:
    """A transcription row flagged as garbled, with the construction's output."""

    printed: str
    corrected: str


@dataclass(frozen=True)
class GoldenPair:
    key: str
    base: MassActionSystem
    relative: MassActionSystem
    typo_rows: tuple[TypoRow, ...]


def _load_fixture(name: str) -> tuple[MassActionSystem, tuple[TypoRow, ...]]:
    path = resources.files(__package__).joinpath("fixtures", FIXTURE_VERSION, name)
    text = path.read_text(encoding="utf-8")
    active_lines = []
    typos = []
    for line in text.splitlines():
        stripped = line.strip()
        if stripped.startswith("# typo-row:"):
            body = stripped[len("# typo-row:") :]
            printed, _, corrected = body.partition("||")
            typos.append(TypoRow(printed.strip(), corrected.strip()))
            active_lines.append(corrected.strip())
        else:
            active_lines.append(line)
    return parse_system("\n".join(active_lines)), tuple(typos)


def golden_networks() -> dict[str, GoldenPair]:
    """Hand-checked fixtures: each family network paired with the transcribed
    relative-population network (typo rows corrected and flagged)."""
    out = {}
    for key in ("rep_recomb_3", "rep_recomb_4", "recomb_3", "recomb_4"):
        base, base_typos = _load_fixture(f"{key}.crn")
        rel, rel_typos = _load_fixture(f"{key}_relative.crn")
        out[key] = GoldenPair(key, base, rel, base_typos + rel_typos)
    return out


# ---------------------------------------------------------------------------
# seeded samplers (test corpus)
# ---------------------------------------------------------------------------


def sample_bimolecular_system(seed: int, n_max: int = 6, max_reactions: int = 12) -> MassActionSystem:
    """Random bimolecular autocatalytic system with rational rates."""
    rng = random.Random(f"bimolecular:{seed}")
    n = rng.randint(2, n_max)
    species = tuple(Species(i) for i in range(n))
    n_rxns = rng.randint(1, max_reactions)
    edges: dict[tuple[tuple[int, ...], tuple[int, ...]], Fraction] = {}
    attempts = 0
    while len(edges) < n_rxns and attempts < 20 * max_reactions:
        attempts += 1
        i = rng.randrange(n)
        j = rng.randrange(n)
        l = rng.randrange(n)
        src = [0] * n
        src[i] += 1
        src[j] += 1
        tgt = list(src)
        tgt[l] += 1
        key = (tuple(src), tuple(tgt))
        if key not in edges:
            edges[key] = Fraction(rng.randint(1, 9), rng.randint(1, 9))
    entries = [(Complex(s), Complex(t), k, None) for (s, t), k in edges.items()]
    return MassActionSystem.from_reactions(species, entries)


def sample_pairwise_production_network(seed: int, n: int | None = None) -> ReactionNetwork:
    """Random network with distinct-reactant sources that passes
    `pairwise_production_check` (rejection sampling, deterministic in seed)."""
    rng = random.Random(f"pairwise:{seed}")
    n = n if n is not None else rng.choice([3, 4, 5])
    species = tuple(Species(i) for i in range(n))
    while True:
        rows: dict[tuple[tuple[int, ...], tuple[int, ...]], None] = {}
        for i, j in itertools.combinations(range(n), 2):
            k = rng.choice([s for s in range(n) if s not in (i, j)])
            src = [0] * n
            src[i] = src[j] = 1
            tgt = list(src)
            tgt[k] += 1
            rows[(tuple(src), tuple(tgt))] = None
        for _ in range(rng.randint(0, n)):
            i, j = rng.sample(range(n), 2)
            l = rng.randrange(n)
            src = [0] * n
            src[i] = src[j] = 1
            tgt = list(src)
            tgt[l] += 1
            if tuple(src) != tuple(tgt):
                rows[(tuple(src), tuple(tgt))] = None
        net = ReactionNetwork(
            species, tuple(Reaction(Complex(s), Complex(t)) for s, t in rows)
        )
        holds, _ = pairwise_production_check(net)
        if holds:
            return net


def sample_repeated_species_system(seed: int, n: int | None = None) -> MassActionSystem:
    """Random repeated-reactant system 2X_i -> 2X_i + X_j (j != i) whose
    production graph is strongly connected (cyclic backbone plus extras)."""
    rng = random.Random(f"repeated:{seed}")
    n = n if n is not None else rng.choice([3, 4, 5, 6])
    species = tuple(Species(i) for i in range(n))
    rows: dict[tuple[tuple[int, ...], tuple[int, ...]], Fraction] = {}

    def add(i, j):
        src = [0] * n
        src[i] = 2
        tgt = list(src)
        tgt[j] += 1
        key = (tuple(src), tuple(tgt))
        if key not in rows:
            rows[key] = Fraction(rng.randint(1, 9), rng.randint(1, 9))

    for i in range(n):
        add(i, (i + 1) % n)
    for _ in range(rng.randint(0, 2 * n)):
        i = rng.randrange(n)
        j = rng.choice([s for s in range(n) if s != i])
        add(i, j)
    entries = [(Complex(s), Complex(t), k, None) for (s, t), k in rows.items()]
    sys = MassActionSystem.from_reactions(species, entries)
    assert is_strongly_connected(production_graph(sys.network))
    return sys


def sample_enlarged_relative_network(seed: int) -> tuple[ReactionNetwork, ReactionNetwork]:
    """A strongly endotactic relative network plus an enlargement of it whose
    extra reactions keep every vertex inside the hull of the base's sources.
    Returns (base_relative, enlarged)."""
    rng = random.Random(f"enlarged:{seed}")
    base = relative_network(sample_repeated_species_system(seed)).network
    n = base.n_species
    slice_points = [p for p in itertools.product(range(4), repeat=n) if sum(p) == 3]
    edges = {(r.source.coeffs, r.target.coeffs) for r in base.reactions}
    extras = rng.randint(1, 4)
    added = 0
    while added < extras:
        s = rng.choice(slice_points)
        t = rng.choice(slice_points)
        if s == t or (s, t) in edges:
            continue
        edges.add((s, t))
        added += 1
    reactions = tuple(
        Reaction(Complex(s), Complex(t)) for s, t in sorted(edges)
    )
    enlarged = ReactionNetwork(base.species, reactions)
    return base, enlarged


def sample_cycle_network(seed: int, n_species: int | None = None, length: int | None = None) -> ReactionNetwork:
    """A single directed cycle through distinct random complexes: weakly
    reversible with one linkage class, and every vertex is a source."""
    rng = random.Random(f"cycle:{seed}")
    n = n_species if n_species is not None else rng.choice([2, 3, 4])
    m = length if length is not None else rng.randint(2, 6)
    species = tuple(Species(i) for i in range(n))
    complexes: list[tuple[int, ...]] = []
    seen = set()
    attempts = 0
    while len(complexes) < m and attempts < 200:
        attempts += 1
        c = tuple(rng.randint(0, 3) for _ in range(n))
        if c not in seen:
            seen.add(c)
            complexes.append(c)
    reactions = tuple(
        Reaction(Complex(complexes[i]), Complex(complexes[(i + 1) % len(complexes)]))
        for i in range(len(complexes))
    )
    return ReactionNetwork(species, reactions)
