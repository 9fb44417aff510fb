"""Reading and writing reaction networks.

Text format, one reaction per line::

    complex "->" complex [";" "k=" positive-decimal-or-rational] [";" label]

where a complex is ``INT? species ("+" INT? species)*`` and a bare ``0``
denotes the zero complex. ``#`` starts a comment. Species are collected in
first-appearance order. The JSON form mirrors the data model:
``{"species": [...], "reactions": [{"source": [...], "target": [...],
"rate": "...", "label": "..."}]}``.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Sequence

from .network import Complex, NetworkError, Reaction, ReactionNetwork, Species


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>->|[+;=]))")


def _tokenize(text: str, line_no: int):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            col = pos + len(text[pos:]) - len(text[pos:].lstrip()) + 1
            raise ParseError(f"unexpected character {text[pos:].lstrip()[0]!r}", line_no, col)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind) + 1))
        pos = m.end()
    tokens.append(("end", "", len(text) + 1))
    return tokens


class _LineParser:
    def __init__(self, text: str, line_no: int):
        self.tokens = _tokenize(text, line_no)
        self.line_no = line_no
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None, value=None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind}, found {tok[1]!r}", self.line_no, tok[2])
        if value is not None and tok[1] != value:
            raise ParseError(f"expected {value!r}, found {tok[1]!r}", self.line_no, tok[2])
        self.i += 1
        return tok

    def parse_complex(self, species_order: dict[str, int]) -> dict[int, int]:
        kind, value, col = self.peek()
        if kind == "int" and value == "0":
            nxt = self.tokens[self.i + 1]
            if nxt[0] not in ("name",):
                self.take()
                return {}
        counts: dict[int, int] = {}
        while True:
            coeff = 1
            kind, value, col = self.peek()
            if kind == "int":
                coeff = int(value)
                self.take()
                if coeff <= 0:
                    raise ParseError("stoichiometric coefficient must be positive", self.line_no, col)
            kind, value, col = self.peek()
            if kind != "name":
                raise ParseError(f"expected a species name, found {value!r}", self.line_no, col)
            self.take()
            if value not in species_order:
                species_order[value] = len(species_order)
            idx = species_order[value]
            counts[idx] = counts.get(idx, 0) + coeff
            kind, value, col = self.peek()
            if kind == "op" and value == "+":
                self.take()
                continue
            return counts

def _split_clauses(line: str) -> list[str]:
    return [part.strip() for part in line.split(";")]


def _parse_rate_text(text: str, line_no: int, col: int) -> Fraction:
    try:
        rate = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"invalid rate {text!r}", line_no, col) from None
    if rate <= 0:
        raise ParseError(f"rate must be positive, got {text!r}", line_no, col)
    return rate


def parse_system(text: str):
    """Parse reaction-language text into a :class:`~crnkit.dynamics.MassActionSystem`.

    Reactions without a ``k=`` clause get unit rate. Raises :class:`ParseError`
    with line/column on malformed input.
    """
    from .dynamics import ConstantRate, MassActionSystem

    species_order: dict[str, int] = {}
    raw: list[tuple[dict[int, int], dict[int, int], Fraction, str | None, int]] = []
    for line_no, full_line in enumerate(text.splitlines(), start=1):
        line = full_line.split("#", 1)[0]
        if not line.strip():
            continue
        clauses = _split_clauses(line)
        parser = _LineParser(clauses[0], line_no)
        source = parser.parse_complex(species_order)
        parser.take("op", "->")
        target = parser.parse_complex(species_order)
        parser.take("end")
        rate = Fraction(1)
        label: str | None = None
        for clause in clauses[1:]:
            if not clause:
                raise ParseError("empty clause after ';'", line_no, len(clauses[0]) + 1)
            if "=" in clause:
                key, _, value = clause.partition("=")
                if key.strip() != "k":
                    raise ParseError(f"unknown clause {clause!r}", line_no, 1)
                rate = _parse_rate_text(value.strip(), line_no, 1)
            else:
                if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_.]*", clause):
                    raise ParseError(f"invalid label {clause!r}", line_no, 1)
                label = clause
        raw.append((source, target, rate, label, line_no))

    n = len(species_order)
    names = [None] * n
    for name, idx in species_order.items():
        names[idx] = name
    species = tuple(Species(i, name) for i, name in enumerate(names))
    reactions = []
    rates = []
    for source, target, rate, label, line_no in raw:
        src = Complex(tuple(source.get(i, 0) for i in range(n)))
        tgt = Complex(tuple(target.get(i, 0) for i in range(n)))
        try:
            reactions.append(Reaction(src, tgt, label))
        except NetworkError as exc:
            raise ParseError(str(exc), line_no, 1) from None
        rates.append(ConstantRate(rate))
    try:
        network = ReactionNetwork(species, tuple(reactions))
    except NetworkError as exc:
        raise ParseError(str(exc), len(text.splitlines()), 1) from None
    return MassActionSystem(network, tuple(rates))


def parse_network(text: str) -> ReactionNetwork:
    """Parse reaction-language text, dropping rate information."""
    return parse_system(text).network


def format_network(net: ReactionNetwork) -> str:
    """Canonical text form; `parse_network(format_network(net))` round-trips."""
    lines = []
    for r in net.reactions:
        line = r.format(net.species)
        if r.label:
            line += f" ; {r.label}"
        lines.append(line)
    return "\n".join(lines) + ("\n" if lines else "")


def format_system(sys) -> str:
    """Canonical text form including `k=` clauses for constant rates."""
    from .dynamics import ConstantRate

    lines = []
    for r, rate in zip(sys.network.reactions, sys.rates):
        line = r.format(sys.network.species)
        if isinstance(rate, ConstantRate):
            line += f" ; k={rate.value}"
        else:
            line += f" ; k=1  # variable rate (epsilon={rate.epsilon}, profile={rate.profile})"
        if r.label:
            line += f" ; {r.label}"
        lines.append(line)
    return "\n".join(lines) + ("\n" if lines else "")


def network_to_json(net: ReactionNetwork, rates: Sequence[Fraction] | None = None) -> dict:
    reactions = []
    for i, r in enumerate(net.reactions):
        entry = {
            "source": list(r.source.coeffs),
            "target": list(r.target.coeffs),
            "rate": str(rates[i]) if rates is not None else "1",
            "label": r.label,
        }
        reactions.append(entry)
    return {"species": [s.name for s in net.species], "reactions": reactions}


def system_to_json(sys) -> dict:
    from .dynamics import ConstantRate

    rates = []
    for rate in sys.rates:
        if isinstance(rate, ConstantRate):
            rates.append(rate.value)
        else:
            rates.append(Fraction(1))
    return network_to_json(sys.network, rates)


def system_from_json(data: dict):
    from .dynamics import ConstantRate, MassActionSystem

    names = data["species"]
    species = tuple(Species(i, name) for i, name in enumerate(names))
    reactions = []
    rates = []
    for entry in data["reactions"]:
        reactions.append(
            Reaction(Complex(tuple(entry["source"])), Complex(tuple(entry["target"])), entry.get("label"))
        )
        rates.append(ConstantRate(Fraction(entry.get("rate", "1"))))
    return MassActionSystem(ReactionNetwork(species, tuple(reactions)), tuple(rates))


def network_from_json(data: dict) -> ReactionNetwork:
    return system_from_json(data).network


def load_system(path):
    """Read a system from a .crn (text) or .json file."""
    with open(path, "r", encoding="utf-8") as fh:
        content = fh.read()
    stripped = content.lstrip()
    if stripped.startswith("{"):
        return system_from_json(json.loads(content))
    return parse_system(content)
