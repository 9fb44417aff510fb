import random
from fractions import Fraction

import pytest

from crnkit.polynomials import PolynomialField, SparsePolynomial


def poly(n, terms):
    return SparsePolynomial.from_terms(n, terms)


def test_canonical_form_merges_and_sorts_grlex():
    p = poly(2, [((1, 0), 1), ((0, 2), 3), ((1, 0), -1), ((2, 0), 2), ((0, 0), 5)])
    # the x1 terms cancel; degree-2 terms come first, x1^2 before x2^2
    assert p.terms[0].exponents == (2, 0)
    assert p.terms[1].exponents == (0, 2)
    assert p.terms[2].exponents == (0, 0)
    assert len(p.terms) == 3


def test_zero_and_equality():
    a = poly(2, [((1, 1), Fraction(1, 2))])
    b = poly(2, [((1, 1), Fraction(1, 2))])
    assert a == b
    assert (a - b).is_zero()
    assert poly(2, []).is_zero()


def test_arithmetic_agrees_with_evaluation():
    rng = random.Random(5)
    for _ in range(30):
        n = rng.randint(1, 3)

        def random_poly():
            return poly(
                n,
                [
                    (tuple(rng.randint(0, 2) for _ in range(n)), Fraction(rng.randint(-3, 3)))
                    for _ in range(rng.randint(0, 4))
                ],
            )

        a, b = random_poly(), random_poly()
        point = [Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(n)]
        assert (a + b).evaluate(point) == a.evaluate(point) + b.evaluate(point)
        assert (a - b).evaluate(point) == a.evaluate(point) - b.evaluate(point)
        assert (a * b).evaluate(point) == a.evaluate(point) * b.evaluate(point)
        assert (a * Fraction(3, 7)).evaluate(point) == a.evaluate(point) * Fraction(3, 7)


def test_scale_by_variable_and_substitute():
    p = poly(2, [((1, 0), 2), ((0, 1), 1)])  # 2x1 + x2
    assert p.scale_by_variable(0) == poly(2, [((2, 0), 2), ((1, 1), 1)])
    # substitute x2 = 1 - x1 into 2x1 + x2 gives x1 + 1
    repl = poly(2, [((0, 0), 1), ((1, 0), -1)])
    assert p.substitute(1, repl) == poly(2, [((1, 0), 1), ((0, 0), 1)])


def test_format():
    p = poly(2, [((2, 0), 1), ((1, 1), -2), ((0, 0), Fraction(1, 2))])
    assert p.format() == "x1^2 - 2*x1*x2 + 1/2"
    assert poly(1, []).format() == "0"


def test_field_sum_and_text():
    f = PolynomialField((poly(2, [((1, 1), 1)]), poly(2, [((1, 1), -1)])))
    assert f.component_sum().is_zero()
    assert "dx1/dt = x1*x2" in f.format()


def test_field_compile_matches_exact_evaluation():
    rng = random.Random(9)
    comps = tuple(
        poly(
            3,
            [
                (tuple(rng.randint(0, 2) for _ in range(3)), Fraction(rng.randint(-4, 4)))
                for _ in range(4)
            ],
        )
        for _ in range(3)
    )
    f = PolynomialField(comps)
    ev = f.compile()
    point = [0.3, 1.7, 0.9]
    exact = [float(p.evaluate([Fraction(3, 10), Fraction(17, 10), Fraction(9, 10)])) for p in comps]
    got = ev(point)
    assert max(abs(a - b) for a, b in zip(exact, got)) < 1e-12


def test_field_json_round_trip():
    f = PolynomialField((poly(2, [((1, 0), Fraction(2, 3))]), poly(2, [((0, 2), -1)])))
    assert PolynomialField.from_json(f.to_json()) == f


def test_invalid_inputs():
    with pytest.raises(ValueError):
        poly(2, [((1,), 1)])
    with pytest.raises(ValueError):
        poly(1, [((-1,), 1)])
    with pytest.raises(ValueError):
        PolynomialField(())
