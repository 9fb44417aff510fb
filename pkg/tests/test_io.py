from fractions import Fraction

import pytest

from crnkit import families
from crnkit.dynamics import ConstantRate, MassActionSystem
from crnkit.io import (
    ParseError,
    format_network,
    format_system,
    network_to_json,
    parse_network,
    parse_system,
    system_from_json,
    system_to_json,
)


def test_parse_simple_reaction():
    net = parse_network("X1 + X2 -> X1 + X2 + X3 ; k=1")
    assert [s.name for s in net.species] == ["X1", "X2", "X3"]
    assert len(net.reactions) == 1
    assert net.reactions[0].source.coeffs == (1, 1, 0)
    assert net.reactions[0].target.coeffs == (1, 1, 1)


def test_parse_coefficients_and_zero_complex():
    sys = parse_system("2X1 -> 3X1 ; k=5/2 ; fast\nX1 -> 0")
    assert sys.network.reactions[0].source.coeffs == (2,)
    assert sys.network.reactions[0].target.coeffs == (3,)
    assert sys.rates[0] == ConstantRate(Fraction(5, 2))
    assert sys.network.reactions[0].label == "fast"
    assert sys.network.reactions[1].target.coeffs == (0,)
    assert sys.rates[1] == ConstantRate(Fraction(1))


def test_parse_decimal_rate_and_repeated_species():
    sys = parse_system("X1 + X1 -> 2X1 + X2 ; k=1.5")
    assert sys.network.reactions[0].source.coeffs == (2, 0)
    assert sys.rates[0].value == Fraction(3, 2)


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as err:
        parse_network("X1 + -> X2")
    assert err.value.line == 1
    with pytest.raises(ParseError):
        parse_network("X1 -> X1")  # source equals target
    with pytest.raises(ParseError):
        parse_network("X1 -> X2 ; k=-1")
    with pytest.raises(ParseError):
        parse_network("X1 -> X2 ; k=0")
    with pytest.raises(ParseError):
        parse_network("0X1 -> X2")
    with pytest.raises(ParseError):
        parse_network("X1 -> X2\nX1 -> X2")  # duplicate edge
    with pytest.raises(ParseError):
        parse_network("X1 <- X2")


def test_comments_and_blank_lines():
    net = parse_network("# header\n\nX1 -> X2  # trailing\n")
    assert len(net.reactions) == 1


def test_round_trip_is_identity_on_canonical_form():
    for maker, n in ((families.hypercycle, 3), (families.rep_recomb, 4), (families.recomb, 3)):
        sys = MassActionSystem.with_unit_rates(maker(n))
        text = format_system(sys)
        assert format_system(parse_system(text)) == text


def test_json_round_trip():
    sys = parse_system("2X1 + X2 -> 3X1 ; k=7/3 ; k1\nX2 -> X1 ; k=2")
    data = system_to_json(sys)
    again = system_from_json(data)
    assert format_system(again) == format_system(sys)
    assert data["reactions"][0]["rate"] == "7/3"
    assert data["reactions"][0]["label"] == "k1"


def test_network_to_json_shape():
    net = parse_network("A + B -> 2B")
    data = network_to_json(net)
    assert data["species"] == ["A", "B"]
    assert data["reactions"][0]["source"] == [1, 1]
    assert data["reactions"][0]["target"] == [0, 2]


def test_format_network_empty():
    net = parse_network("")
    assert format_network(net) == ""
