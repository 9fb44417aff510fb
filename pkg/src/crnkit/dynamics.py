"""Mass-action systems and the transformations between them.

A mass-action system is a reaction network plus one rate per reaction
(exact rational constants, or bounded time-varying profiles resolved by the
simulator). This module builds the polynomial vector field of a system,
recognizes mass-action fields and realizes them back as networks, projects
homogeneous dynamics onto relative populations (both the plain and the
homogenized form), constructs the relative-population network of a
bimolecular autocatalytic system, decides dynamic equivalence exactly, and
searches for weakly reversible single-linkage realizations by splitting
reactions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import rational
from .network import (
    Complex,
    NetworkError,
    Reaction,
    ReactionNetwork,
    Species,
    bimolecular_pattern,
    is_bimolecular_autocatalytic,
    is_weakly_reversible,
    linkage_classes,
)
from .polynomials import Monomial, PolynomialField, SparsePolynomial


@dataclass(frozen=True)
class ConstantRate:
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", rational.frac(self.value))
        if self.value <= 0:
            raise NetworkError(f"rate must be positive, got {self.value}")


@dataclass(frozen=True)
class VariableRate:
    """A bounded time-varying rate: epsilon <= k(t) <= 1/epsilon for all t.

    The waveform itself (`profile` is "piecewise" or "sin") is materialized
    by the simulator from its seed; the system only pins the envelope.
    """

    epsilon: Fraction = Fraction(1, 2)
    profile: str = "piecewise"

    def __post_init__(self):
        object.__setattr__(self, "epsilon", rational.frac(self.epsilon))
        if not 0 < self.epsilon <= 1:
            raise NetworkError(f"epsilon must lie in (0, 1], got {self.epsilon}")
        if self.profile not in ("piecewise", "sin"):
            raise NetworkError(f"unknown rate profile {self.profile!r}")


RateSpec = ConstantRate | VariableRate


@dataclass(frozen=True)
class MassActionSystem:
    network: ReactionNetwork
    rates: tuple[RateSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "rates", tuple(self.rates))
        if len(self.rates) != len(self.network.reactions):
            raise NetworkError("need exactly one rate per reaction")

    @classmethod
    def from_reactions(
        cls,
        species: Sequence[Species],
        entries: Iterable[tuple[Complex, Complex, Fraction, str | None]],
    ) -> "MassActionSystem":
        """Build a system from (source, target, rate, label) tuples, merging
        parallel reactions by summing their rates."""
        merged: dict[tuple[Complex, Complex], tuple[Fraction, str | None]] = {}
        order: list[tuple[Complex, Complex]] = []
        for source, target, rate, label in entries:
            key = (source, target)
            if key in merged:
                old_rate, old_label = merged[key]
                if label and old_label and label != old_label:
                    label = f"{old_label}+{label}"
                merged[key] = (old_rate + rational.frac(rate), label or old_label)
            else:
                merged[key] = (rational.frac(rate), label)
                order.append(key)
        reactions = tuple(Reaction(s, t, merged[(s, t)][1]) for s, t in order)
        rates = tuple(ConstantRate(merged[key][0]) for key in order)
        return cls(ReactionNetwork(tuple(species), reactions), rates)

    @classmethod
    def with_unit_rates(cls, net: ReactionNetwork) -> "MassActionSystem":
        return cls(net, tuple(ConstantRate(Fraction(1)) for _ in net.reactions))

    @property
    def is_constant(self) -> bool:
        return all(isinstance(r, ConstantRate) for r in self.rates)

    def constant_rates(self) -> tuple[Fraction, ...]:
        if not self.is_constant:
            raise NetworkError("system has time-varying rates")
        return tuple(r.value for r in self.rates)

    def with_variable_rates(self, epsilon: Fraction, profile: str = "piecewise") -> "MassActionSystem":
        return MassActionSystem(
            self.network, tuple(VariableRate(epsilon, profile) for _ in self.rates)
        )

    def __str__(self) -> str:
        from .io import format_system

        return format_system(self)


# ---------------------------------------------------------------------------
# fields
# ---------------------------------------------------------------------------


def mass_action_field(sys: MassActionSystem) -> PolynomialField:
    """The polynomial field sum_r k_r x^{source_r} (target_r - source_r)."""
    rates = sys.constant_rates()
    n = sys.network.n_species
    per_species: list[list[tuple[tuple[int, ...], Fraction]]] = [[] for _ in range(n)]
    for r, k in zip(sys.network.reactions, rates):
        exps = r.source.coeffs
        for i, d in enumerate(r.vector):
            if d != 0:
                per_species[i].append((exps, k * d))
    return PolynomialField(tuple(SparsePolynomial.from_terms(n, terms) for terms in per_species))


def is_mass_action_field(field: PolynomialField) -> tuple[bool, tuple[int, Monomial] | None]:
    """A field is mass-action realizable iff x_i divides every negative
    monomial of component i. Returns (ok, first violating (i, monomial))."""
    for i, p in enumerate(field.components):
        for m in p.terms:
            if m.coefficient < 0 and m.exponents[i] < 1:
                return False, (i, m)
    return True, None


def realize_field(field: PolynomialField) -> MassActionSystem:
    """Canonical mass-action realization: each monomial c x^a of component i
    becomes a -> a + e_i at rate c (c > 0) or a -> a - e_i at rate -c (c < 0)."""
    ok, witness = is_mass_action_field(field)
    if not ok:
        i, m = witness
        raise NetworkError(
            f"component {i} has negative monomial {tuple(m.exponents)} not divisible by x_{i + 1}"
        )
    n = field.n_vars
    species = tuple(Species(i) for i in range(n))
    entries = []
    for i, p in enumerate(field.components):
        for m in p.terms:
            source = Complex(m.exponents)
            if m.coefficient > 0:
                entries.append((source, source.plus_unit(i), m.coefficient, None))
            else:
                target = list(m.exponents)
                target[i] -= 1
                entries.append((source, Complex(tuple(target)), -m.coefficient, None))
    return MassActionSystem.from_reactions(species, entries)


def homogeneous_degree(field: PolynomialField) -> int | None:
    """The common total degree of all monomials, or None (non-homogeneous or
    zero field; distinguish the latter with `field.is_zero()`)."""
    degrees: set[int] = set()
    for p in field.components:
        degrees |= p.total_degrees()
    if len(degrees) == 1:
        return degrees.pop()
    return None


def projectivize_field(
    field: PolynomialField, d: int | None = None, homogenized: bool = True
) -> PolynomialField:
    """Field of the relative populations x/sum(x) after time rescaling.

    Plain form: f_i - x_i * sum_j f_j. Homogenized form: f_i * sum_r x_r -
    x_i * sum_j f_j, whose components are homogeneous of degree d + 1. The
    two agree on the simplex sum(x) = 1.
    """
    degree = homogeneous_degree(field)
    if degree is None or degree < 1:
        raise NetworkError("projectivization requires a homogeneous field of degree >= 1")
    if d is not None and d != degree:
        raise NetworkError(f"field is homogeneous of degree {degree}, not {d}")
    n = field.n_vars
    total = field.component_sum()
    sum_x = SparsePolynomial.from_terms(
        n, [(tuple(int(i == j) for j in range(n)), 1) for i in range(n)]
    )
    comps = []
    for i, f_i in enumerate(field.components):
        drain = total.scale_by_variable(i)
        if homogenized:
            comps.append(f_i * sum_x - drain)
        else:
            comps.append(f_i - drain)
    return PolynomialField(tuple(comps))


# ---------------------------------------------------------------------------
# relative-population networks
# ---------------------------------------------------------------------------


def relative_network(sys: MassActionSystem) -> MassActionSystem:
    """Reaction network generating the relative-population dynamics of a
    bimolecular autocatalytic system: each reaction X_i + X_j -> X_i + X_j + X_l
    at rate k contributes X_p + X_i + X_j -> X_i + X_j + X_l at rate k for
    every species p != l. Parallel duplicates merge by summing rates; rate
    labels are inherited."""
    if not is_bimolecular_autocatalytic(sys.network):
        raise NetworkError("relative_network requires a bimolecular autocatalytic system")
    rates = sys.constant_rates()
    n = sys.network.n_species
    entries = []
    for r, k in zip(sys.network.reactions, rates):
        _, _, l = bimolecular_pattern(r)
        for p in range(n):
            if p == l:
                continue
            source = r.source.plus_unit(p)
            if source == r.target:  # defensive; p != l already rules this out
                continue
            entries.append((source, r.target, k, r.label))
    return MassActionSystem.from_reactions(sys.network.species, entries)


# ---------------------------------------------------------------------------
# dynamic equivalence and reaction splitting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EquivalenceReport:
    equivalent: bool
    residuals: tuple[tuple[Complex, tuple[Fraction, ...]], ...]  # failing vertices only

    def to_json(self) -> dict:
        return {
            "equivalent": self.equivalent,
            "residuals": [
                {"vertex": list(c.coeffs), "residual": [str(x) for x in vec]}
                for c, vec in self.residuals
            ],
        }


def dynamically_equivalent(a: MassActionSystem, b: MassActionSystem) -> EquivalenceReport:
    """Exact per-vertex test: the systems generate the same field iff, at
    every vertex s0 of either network, the rate-weighted sums of outgoing
    reaction vectors agree."""
    if [s.name for s in a.network.species] != [s.name for s in b.network.species]:
        raise NetworkError("systems are over different species lists")
    rates_a = a.constant_rates()
    rates_b = b.constant_rates()
    n = a.network.n_species

    def outgoing(sys, rates):
        sums: dict[Complex, list[Fraction]] = {}
        for r, k in zip(sys.network.reactions, rates):
            acc = sums.setdefault(r.source, [Fraction(0)] * n)
            for i, d in enumerate(r.vector):
                acc[i] += k * d
        return sums

    out_a = outgoing(a, rates_a)
    out_b = outgoing(b, rates_b)
    vertices = sorted(set(a.network.complexes) | set(b.network.complexes))
    failing = []
    zero = [Fraction(0)] * n
    for v in vertices:
        va = out_a.get(v, zero)
        vb = out_b.get(v, zero)
        residual = tuple(x - y for x, y in zip(va, vb))
        if any(x != 0 for x in residual):
            failing.append((v, residual))
    return EquivalenceReport(not failing, tuple(failing))


def split_reaction(
    sys: MassActionSystem,
    reaction: Reaction,
    v1: Sequence[int],
    v2: Sequence[int],
    k1: Fraction,
    k2: Fraction,
) -> MassActionSystem:
    """Replace `reaction` (rate k) by source -> source+v1 (k1) and
    source -> source+v2 (k2). Requires k*(target-source) = k1*v1 + k2*v2
    exactly with k1, k2 > 0 and valid target complexes; the result is
    dynamically equivalent to the input by construction (asserted)."""
    k1, k2 = rational.frac(k1), rational.frac(k2)
    if k1 <= 0 or k2 <= 0:
        raise NetworkError("split rates must be positive")
    try:
        idx = sys.network.reactions.index(reaction)
    except ValueError:
        raise NetworkError("reaction not in system") from None
    k = sys.constant_rates()[idx]
    v1 = tuple(int(x) for x in v1)
    v2 = tuple(int(x) for x in v2)
    expected = tuple(k * d for d in reaction.vector)
    got = tuple(k1 * a + k2 * b for a, b in zip(v1, v2))
    if expected != got:
        raise NetworkError(f"split does not preserve the field: k*(t-s)={expected}, k1*v1+k2*v2={got}")
    t1 = reaction.source.shifted(v1)  # Complex() rejects negative entries
    t2 = reaction.source.shifted(v2)
    if t1 == reaction.source or t2 == reaction.source:
        raise NetworkError("split part collapses onto the source")
    entries = []
    for i, (r, rate) in enumerate(zip(sys.network.reactions, sys.constant_rates())):
        if i == idx:
            entries.append((r.source, t1, k1, r.label))
            entries.append((r.source, t2, k2, r.label))
        else:
            entries.append((r.source, r.target, rate, r.label))
    result = MassActionSystem.from_reactions(sys.network.species, entries)
    report = dynamically_equivalent(result, sys)
    assert report.equivalent, "split produced a non-equivalent system"
    return result


# ---------------------------------------------------------------------------
# weakly reversible realization by splitting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SplitStep:
    source: Complex
    original_target: Complex
    rate: Fraction
    target1: Complex
    rate1: Fraction
    target2: Complex
    rate2: Fraction

    def to_json(self) -> dict:
        return {
            "source": list(self.source.coeffs),
            "original_target": list(self.original_target.coeffs),
            "rate": str(self.rate),
            "parts": [
                {"target": list(self.target1.coeffs), "rate": str(self.rate1)},
                {"target": list(self.target2.coeffs), "rate": str(self.rate2)},
            ],
        }


@dataclass(frozen=True)
class WrRealization:
    system: MassActionSystem
    splits: tuple[SplitStep, ...]
    nodes_explored: int

    def to_json(self) -> dict:
        from .io import system_to_json

        return {
            "system": system_to_json(self.system),
            "splits": [s.to_json() for s in self.splits],
            "nodes_explored": self.nodes_explored,
        }


def _is_wr_single_linkage(net: ReactionNetwork) -> bool:
    return bool(net.reactions) and is_weakly_reversible(net) and len(linkage_classes(net)) == 1


def _hull_lattice_complexes(complexes: Sequence[Complex]) -> list[Complex]:
    """Integer points of conv(complexes), as complexes."""
    pts = [c.coeffs for c in complexes]
    n = len(pts[0])
    lo = [min(p[i] for p in pts) for i in range(n)]
    hi = [max(p[i] for p in pts) for i in range(n)]
    sums = {sum(p) for p in pts}
    lo_sum, hi_sum = min(sums), max(sums)
    out = []
    for cand in itertools.product(*(range(lo[i], hi[i] + 1) for i in range(n))):
        if not lo_sum <= sum(cand) <= hi_sum:
            continue
        if rational.point_in_hull(pts, cand):
            out.append(Complex(cand))
    return out


def _solve_two_rates(a, b, c) -> tuple[Fraction, Fraction] | None:
    """Positive (k1, k2) with k1*a + k2*b = c for integer vectors a, b and a
    rational vector c, or None. Direct 2x2 solve plus full verification."""
    n = len(a)
    d1 = next((d for d in range(n) if a[d] != 0), None)
    if d1 is None:
        return None
    d2 = next((d for d in range(n) if a[d1] * b[d] - a[d] * b[d1] != 0), None)
    if d2 is None:
        # b is a multiple of a; c must be too
        if any(c[d] * a[d1] != c[d1] * a[d] for d in range(n)):
            return None
        beta = Fraction(b[d1], a[d1])
        gamma = Fraction(c[d1], a[d1])
        if beta > 0:
            if gamma <= 0:
                return None
            return (gamma / 2, gamma / (2 * beta))
        k2 = (abs(gamma) + 1) / abs(beta)
        k1 = gamma - beta * k2
        return (k1, k2) if k1 > 0 and k2 > 0 else None
    det = a[d1] * b[d2] - a[d2] * b[d1]
    k1 = Fraction(c[d1] * b[d2] - c[d2] * b[d1], det)
    k2 = Fraction(a[d1] * c[d2] - a[d2] * c[d1], det)
    if k1 <= 0 or k2 <= 0:
        return None
    for d in range(n):
        if k1 * a[d] + k2 * b[d] != c[d]:
            return None
    return k1, k2


_UNIT_SPLIT_CACHE: dict[tuple, tuple[Fraction, Fraction] | None] = {}


def _unit_split(s: Complex, t: Complex, t1: Complex, t2: Complex) -> tuple[Fraction, Fraction] | None:
    """Cached positive solution of k1*(t1-s) + k2*(t2-s) = (t-s); solutions
    for rate k are this scaled by k."""
    key = (s.coeffs, t.coeffs, t1.coeffs, t2.coeffs)
    if key in _UNIT_SPLIT_CACHE:
        return _UNIT_SPLIT_CACHE[key]
    a = tuple(x - y for x, y in zip(t1.coeffs, s.coeffs))
    b = tuple(x - y for x, y in zip(t2.coeffs, s.coeffs))
    c = tuple(x - y for x, y in zip(t.coeffs, s.coeffs))
    result = _solve_two_rates(a, b, c)
    if len(_UNIT_SPLIT_CACHE) > 200000:
        _UNIT_SPLIT_CACHE.clear()
    _UNIT_SPLIT_CACHE[key] = result
    return result


class _NodeBudget(Exception):
    pass


def wr_realize_detailed(
    sys: MassActionSystem, max_splits: int | None = None, node_limit: int = 20000
) -> WrRealization | None:
    """Search for a dynamically equivalent weakly reversible single-linkage
    system obtained by splitting reactions into at most two parts each.

    Goal-directed depth-first search: while some source complex lacks an
    incoming edge, branch over splits (of any reaction) with one part aimed
    at the first such complex, preferring second targets that are themselves
    goals, then existing complexes, then lattice points of the complex hull.
    Returns None on budget exhaustion; that is not a proof of nonexistence.
    """
    entries0 = tuple(
        (r.source, r.target, k, r.label)
        for r, k in zip(sys.network.reactions, sys.constant_rates())
    )
    species = sys.network.species
    if max_splits is None:
        max_splits = 2 * len(entries0)

    def build(entries):
        return MassActionSystem.from_reactions(species, entries)

    if _is_wr_single_linkage(sys.network):
        return WrRealization(sys, (), 0)
    if not entries0:
        return None

    lattice = _hull_lattice_complexes(list(sys.network.complexes))
    visited: set[frozenset] = set()
    state = {"nodes": 0}

    def canonical(entries):
        return frozenset((s.coeffs, t.coeffs, rate) for s, t, rate, _ in entries)

    def goal_complexes(entries):
        sources = {s for s, _, _, _ in entries}
        targets = {t for _, t, _, _ in entries}
        return sorted(sources - targets)

    def splits_for(entries, t1, goal_set, existing):
        moves = []
        for ri, (s, t, k, _) in enumerate(entries):
            if t1 == s or t1 == t:
                continue
            for t2 in lattice:
                if t2 == s or t2 == t1:
                    continue
                unit = _unit_split(s, t, t1, t2)
                if unit is None:
                    continue
                group = 0 if t2 in goal_set else (1 if t2 in existing else 2)
                moves.append((group, ri, t2, (k * unit[0], k * unit[1])))
        moves.sort(key=lambda m: (m[0], m[1], m[2]))
        return moves

    def fallback_splits(entries, existing):
        moves = []
        for ri, (s, t, k, _) in enumerate(entries):
            for t1, t2 in itertools.combinations(existing, 2):
                if s in (t1, t2):
                    continue
                unit = _unit_split(s, t, t1, t2)
                if unit is not None:
                    moves.append((1, ri, t1, t2, (k * unit[0], k * unit[1])))
        moves.sort(key=lambda m: (m[1], m[2], m[3]))
        return moves

    def apply_split(entries, ri, t1, t2, k1, k2):
        s, t, k, label = entries[ri]
        new = list(entries[:ri]) + list(entries[ri + 1 :])
        new.append((s, t1, k1, label))
        new.append((s, t2, k2, label))
        merged: dict[tuple[Complex, Complex], tuple[Fraction, str | None]] = {}
        order = []
        for src, tgt, rate, lab in new:
            key = (src, tgt)
            if key in merged:
                merged[key] = (merged[key][0] + rate, merged[key][1] or lab)
            else:
                merged[key] = (rate, lab)
                order.append(key)
        step = SplitStep(s, t, k, t1, k1, t2, k2)
        return tuple((src, tgt) + merged[(src, tgt)] for src, tgt in order), step

    def dfs(entries, splits_used, history):
        state["nodes"] += 1
        if state["nodes"] > node_limit:
            raise _NodeBudget()
        net = build(entries).network
        if _is_wr_single_linkage(net):
            return entries, history
        if splits_used >= max_splits:
            return None
        existing = sorted({s for s, _, _, _ in entries} | {t for _, t, _, _ in entries})
        goals = goal_complexes(entries)
        if goals:
            goal_set = set(goals)
            moves = [
                (ri, t1, t2, kk)
                for t1 in goals[:1]
                for _, ri, t2, kk in splits_for(entries, t1, goal_set, set(existing))
            ]
        else:
            moves = [(ri, t1, t2, kk) for _, ri, t1, t2, kk in fallback_splits(entries, existing)]
        for ri, t1, t2, (k1, k2) in moves:
            child, step = apply_split(entries, ri, t1, t2, k1, k2)
            key = canonical(child)
            if key in visited:
                continue
            visited.add(key)
            found = dfs(child, splits_used + 1, history + (step,))
            if found is not None:
                return found
        return None

    try:
        found = dfs(entries0, 0, ())
    except _NodeBudget:
        return None
    if found is None:
        return None
    entries, history = found
    result = build(entries)
    report = dynamically_equivalent(result, sys)
    assert report.equivalent and _is_wr_single_linkage(result.network)
    return WrRealization(result, history, state["nodes"])


def wr_realize(
    sys: MassActionSystem, max_splits: int | None = None, node_limit: int = 20000
) -> MassActionSystem | None:
    """See :func:`wr_realize_detailed`; returns just the realized system."""
    found = wr_realize_detailed(sys, max_splits=max_splits, node_limit=node_limit)
    return found.system if found is not None else None
