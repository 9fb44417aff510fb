import random
from fractions import Fraction

import pytest

from crnkit import families
from crnkit.dynamics import (
    ConstantRate,
    MassActionSystem,
    VariableRate,
    dynamically_equivalent,
    homogeneous_degree,
    is_mass_action_field,
    mass_action_field,
    projectivize_field,
    realize_field,
    relative_network,
    split_reaction,
    wr_realize,
    wr_realize_detailed,
)
from crnkit.io import parse_system
from crnkit.network import NetworkError, is_weakly_reversible, linkage_classes
from crnkit.polynomials import PolynomialField, SparsePolynomial


def poly(n, terms):
    return SparsePolynomial.from_terms(n, terms)


def unit(net):
    return MassActionSystem.with_unit_rates(net)


def test_mass_action_field_hypercycle():
    f = mass_action_field(unit(families.hypercycle(3)))
    assert f.components[0] == poly(3, [((1, 0, 1), 1)])  # x1*x3
    assert f.components[1] == poly(3, [((1, 1, 0), 1)])  # x1*x2
    assert f.components[2] == poly(3, [((0, 1, 1), 1)])  # x2*x3
    single = parse_system("2X1 -> 3X1 ; k=7/2")
    assert mass_action_field(single).components[0] == poly(1, [((2,), Fraction(7, 2))])
    empty = parse_system("")
    with pytest.raises(Exception):
        mass_action_field(empty)  # no species at all -> no components


def test_mass_action_field_empty_network_with_species():
    from crnkit.network import ReactionNetwork

    net = ReactionNetwork.from_coeffs(["A", "B"], [])
    f = mass_action_field(MassActionSystem(net, ()))
    assert f.is_zero()


def test_variable_rates_rejected_by_field():
    sys = unit(families.hypercycle(3)).with_variable_rates(Fraction(1, 2))
    with pytest.raises(NetworkError):
        mass_action_field(sys)


def test_is_mass_action_field():
    bad = PolynomialField((poly(2, [((0, 1), -1)]), poly(2, [])))
    ok, witness = is_mass_action_field(bad)
    assert not ok and witness[0] == 0 and witness[1].exponents == (0, 1)
    f = mass_action_field(unit(families.hypercycle(3)))
    tilde = projectivize_field(f, homogenized=True)
    assert is_mass_action_field(tilde) == (True, None)
    zero = PolynomialField((poly(1, []),))
    assert is_mass_action_field(zero) == (True, None)


def test_realize_field_round_trip():
    f = mass_action_field(unit(families.hypercycle(3)))
    realized = realize_field(f)
    assert mass_action_field(realized) == f
    # x1^2 - x1 realizes as growth plus decay
    g = PolynomialField((poly(1, [((2,), 1), ((1,), -1)]),))
    sys = realize_field(g)
    rows = {(r.source.coeffs, r.target.coeffs) for r in sys.network.reactions}
    assert rows == {((2,), (3,)), ((1,), (0,))}
    assert mass_action_field(sys) == g


def test_realize_field_round_trip_randomized():
    rng = random.Random(13)
    for _ in range(40):
        n = rng.randint(1, 3)
        comps = []
        for i in range(n):
            terms = []
            for _ in range(rng.randint(0, 4)):
                exps = [rng.randint(0, 2) for _ in range(n)]
                coeff = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
                if coeff < 0:
                    exps[i] = max(exps[i], 1)  # keep it mass-action
                terms.append((tuple(exps), coeff))
            comps.append(poly(n, terms))
        f = PolynomialField(tuple(comps))
        assert mass_action_field(realize_field(f)) == f


def test_homogeneous_degree():
    f = mass_action_field(unit(families.hypercycle(3)))
    assert homogeneous_degree(f) == 2
    mixed = PolynomialField((poly(1, [((1,), 1), ((2,), 1)]),))
    assert homogeneous_degree(mixed) is None
    zero = PolynomialField((poly(2, []), poly(2, [])))
    assert homogeneous_degree(zero) is None and zero.is_zero()
    for seed in range(10):
        sys = families.sample_bimolecular_system(seed)
        assert homogeneous_degree(mass_action_field(sys)) == 2


def test_projectivize_field_golden():
    # single production reaction: f = (0, 0, x1*x2)
    f = PolynomialField((poly(3, []), poly(3, []), poly(3, [((1, 1, 0), 1)])))
    tilde = projectivize_field(f, d=2, homogenized=True)
    assert tilde.components[0] == poly(3, [((2, 1, 0), -1)])
    assert tilde.components[1] == poly(3, [((1, 2, 0), -1)])
    assert tilde.components[2] == poly(3, [((2, 1, 0), 1), ((1, 2, 0), 1)])
    with pytest.raises(NetworkError):
        projectivize_field(f, d=3)
    with pytest.raises(NetworkError):
        projectivize_field(PolynomialField((poly(1, [((1,), 1), ((2,), 1)]),)))


def test_projectivized_field_vanishes_at_symmetric_point():
    f = mass_action_field(unit(families.hypercycle(3)))
    tilde = projectivize_field(f, homogenized=False)
    third = Fraction(1, 3)
    assert tilde.evaluate((third, third, third)) == (0, 0, 0)


def test_projectivize_sum_identities():
    for seed in (0, 4, 9):
        sys = families.sample_bimolecular_system(seed)
        f = mass_action_field(sys)
        n = f.n_vars
        sum_x = poly(n, [(tuple(int(i == j) for j in range(n)), 1) for i in range(n)])
        one = poly(n, [((0,) * n, 1)])
        # homogenized form: component sum is identically zero
        assert projectivize_field(f, homogenized=True).component_sum().is_zero()
        # plain form: component sum factors as (1 - sum x) * sum f
        plain_sum = projectivize_field(f, homogenized=False).component_sum()
        assert plain_sum == (one - sum_x) * f.component_sum()


def test_relative_network_goldens():
    single = parse_system("X1 + X2 -> X1 + X2 + X3 ; k=1")
    rel = relative_network(single)
    rows = {(r.source.coeffs, r.target.coeffs) for r in rel.network.reactions}
    assert rows == {((2, 1, 0), (1, 1, 1)), ((1, 2, 0), (1, 1, 1))}

    # embed the doubling reaction in three species to get both companion rows
    rep3 = parse_system("2X1 -> 3X1 ; k=1\nX2 + X3 -> X2 + X3 + X1 ; k=1")
    rel3 = relative_network(rep3)
    rows = {(r.source.coeffs, r.target.coeffs) for r in rel3.network.reactions}
    assert ((2, 1, 0), (3, 0, 0)) in rows and ((2, 0, 1), (3, 0, 0)) in rows

    prod = parse_system("2X1 -> 2X1 + X2 ; k=1\nX2 + X3 -> X2 + X3 + X1 ; k=1")
    rel_prod = relative_network(prod)
    rows = {(r.source.coeffs, r.target.coeffs) for r in rel_prod.network.reactions}
    assert ((3, 0, 0), (2, 1, 0)) in rows and ((2, 0, 1), (2, 1, 0)) in rows


def test_relative_network_requires_bimolecular():
    with pytest.raises(NetworkError):
        relative_network(parse_system("X1 -> 2X1"))


def test_relative_network_preserves_labels_and_rates():
    base = parse_system("2X1 -> 3X1 ; k=5/3 ; a\n2X1 -> 2X1 + X2 ; k=2 ; b")
    rel = relative_network(base)
    for r, k in zip(rel.network.reactions, rel.rates):
        assert r.label in ("a", "b")
        assert k.value in (Fraction(5, 3), Fraction(2))


def test_central_identity_on_families_and_random_systems():
    nets = [families.hypercycle(n) for n in (3, 4)] + [
        families.rep_recomb(3),
        families.recomb(3),
        families.recomb(4),
    ]
    systems = [unit(net) for net in nets] + [families.sample_bimolecular_system(s) for s in range(30)]
    for sys in systems:
        lhs = mass_action_field(relative_network(sys))
        rhs = projectivize_field(mass_action_field(sys), d=2, homogenized=True)
        assert lhs == rhs


def test_dynamically_equivalent_golden_split_pair():
    a = parse_system("X1 + 2X2 -> X1 + X2 + X3 ; k=3/2")
    b = parse_system("X1 + 2X2 -> 2X1 + X2 ; k=3/2\nX1 + 2X2 -> 2X2 + X3 ; k=3/2")
    # same species universe required: re-parse over three species each
    report = dynamically_equivalent(a, b)
    assert report.equivalent and report.residuals == ()


def test_dynamically_equivalent_detects_rate_mismatch():
    a = parse_system("X1 -> X2 ; k=1")
    b = parse_system("X1 -> X2 ; k=2")
    report = dynamically_equivalent(a, b)
    assert not report.equivalent
    assert report.residuals[0][0].coeffs == (1, 0)
    assert report.residuals[0][1] == (Fraction(1), Fraction(-1))
    identical = dynamically_equivalent(a, a)
    assert identical.equivalent


def test_dynamically_equivalent_agrees_with_field_equality():
    pairs = []
    base = unit(families.recomb(4))
    rel = relative_network(base)
    pairs.append((rel, rel))
    found = wr_realize_detailed(rel)
    pairs.append((rel, found.system))
    a = parse_system("X1 + 2X2 -> X1 + X2 + X3 ; k=1")
    b = parse_system("X1 + 2X2 -> 2X1 + X2 ; k=1\nX1 + 2X2 -> 2X2 + X3 ; k=2")
    pairs.append((a, b))
    for x, y in pairs:
        report = dynamically_equivalent(x, y)
        assert report.equivalent == (mass_action_field(x) == mass_action_field(y))


def test_dynamically_equivalent_species_mismatch():
    a = parse_system("X1 -> X2")
    b = parse_system("A -> B")
    with pytest.raises(NetworkError):
        dynamically_equivalent(a, b)


def test_split_reaction_golden():
    sys = parse_system(
        "X1 + 2X2 -> X1 + X2 + X3 ; k=4\nX4 + X1 -> X4 + X1 + X2 ; k=1"
    )
    r = sys.network.reactions[0]
    out = split_reaction(sys, r, (1, -1, 0, 0), (-1, 0, 1, 0), Fraction(4), Fraction(4))
    rows = {(x.source.coeffs, x.target.coeffs) for x in out.network.reactions}
    assert ((1, 2, 0, 0), (2, 1, 0, 0)) in rows
    assert ((1, 2, 0, 0), (0, 2, 1, 0)) in rows
    assert dynamically_equivalent(out, sys).equivalent


def test_split_reaction_validation():
    sys = parse_system("X1 + 2X2 -> X1 + X2 + X3 ; k=1")
    r = sys.network.reactions[0]
    with pytest.raises(NetworkError):
        split_reaction(sys, r, (1, -1, 0), (-1, 0, 1), Fraction(1), Fraction(2))  # wrong identity
    with pytest.raises(NetworkError):
        split_reaction(sys, r, (0, -3, 0), (0, 1, 1), Fraction(1), Fraction(1))  # negative complex
    with pytest.raises(NetworkError):
        split_reaction(sys, r, (1, -1, 0), (-1, 0, 1), Fraction(-1), Fraction(1))


def test_wr_realize_fixed_point_on_wr_single_linkage():
    cyc = parse_system("X1 -> X2\nX2 -> X1")
    found = wr_realize_detailed(cyc)
    assert found is not None and found.splits == ()
    assert found.system is cyc


def test_wr_realize_none_for_pure_growth():
    grow = parse_system("X1 -> 2X1")
    assert wr_realize(grow) is None


def test_wr_realize_recomb4():
    rel = relative_network(unit(families.recomb(4)))
    found = wr_realize_detailed(rel)
    assert found is not None
    net = found.system.network
    assert is_weakly_reversible(net)
    assert len(linkage_classes(net)) == 1
    assert dynamically_equivalent(found.system, rel).equivalent
    assert mass_action_field(found.system) == mass_action_field(rel)
    # every recorded split checks out arithmetically
    for step in found.splits:
        lhs = tuple(step.rate * (t - s) for s, t in zip(step.source, step.original_target))
        rhs = tuple(
            step.rate1 * (a - s) + step.rate2 * (b - s)
            for s, a, b in zip(step.source, step.target1, step.target2)
        )
        assert lhs == rhs
