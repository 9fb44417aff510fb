"""Sparse multivariate polynomials with rational coefficients.

Canonical form: terms sorted in graded lexicographic order (highest total
degree first), like terms merged, no zero coefficients. Equality of
canonical forms is exact polynomial equality, which is what the dynamic
equivalence and projectivization identities are tested against.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .rational import frac


class Monomial(NamedTuple):
    coefficient: Fraction
    exponents: tuple[int, ...]


def _grlex_key(exps: tuple[int, ...]):
    return (sum(exps), exps)


@dataclass(frozen=True)
class SparsePolynomial:
    n_vars: int
    terms: tuple[Monomial, ...]  # canonical: grlex-descending, merged, no zeros

    @classmethod
    def from_terms(cls, n_vars: int, terms: Iterable[tuple[Sequence[int], Fraction | int]]) -> "SparsePolynomial":
        acc: dict[tuple[int, ...], Fraction] = {}
        for exps, coeff in terms:
            exps = tuple(int(e) for e in exps)
            if len(exps) != n_vars:
                raise ValueError(f"exponent vector {exps} has wrong length for {n_vars} variables")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            coeff = frac(coeff)
            if coeff == 0:
                continue
            acc[exps] = acc.get(exps, Fraction(0)) + coeff
        canon = tuple(
            Monomial(c, e)
            for e, c in sorted(acc.items(), key=lambda item: _grlex_key(item[0]), reverse=True)
            if c != 0
        )
        return cls(n_vars, canon)

    @classmethod
    def zero(cls, n_vars: int) -> "SparsePolynomial":
        return cls(n_vars, ())

    @classmethod
    def variable(cls, n_vars: int, index: int) -> "SparsePolynomial":
        exps = tuple(int(i == index) for i in range(n_vars))
        return cls.from_terms(n_vars, [(exps, 1)])

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "SparsePolynomial") -> "SparsePolynomial":
        if self.n_vars != other.n_vars:
            raise ValueError("variable-count mismatch")
        return SparsePolynomial.from_terms(
            self.n_vars, [(m.exponents, m.coefficient) for m in self.terms + other.terms]
        )

    def __neg__(self) -> "SparsePolynomial":
        return SparsePolynomial(self.n_vars, tuple(Monomial(-m.coefficient, m.exponents) for m in self.terms))

    def __sub__(self, other: "SparsePolynomial") -> "SparsePolynomial":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, SparsePolynomial):
            if self.n_vars != other.n_vars:
                raise ValueError("variable-count mismatch")
            terms = []
            for a in self.terms:
                for b in other.terms:
                    terms.append(
                        (
                            tuple(x + y for x, y in zip(a.exponents, b.exponents)),
                            a.coefficient * b.coefficient,
                        )
                    )
            return SparsePolynomial.from_terms(self.n_vars, terms)
        c = frac(other)
        return SparsePolynomial.from_terms(self.n_vars, [(m.exponents, c * m.coefficient) for m in self.terms])

    __rmul__ = __mul__

    def scale_by_variable(self, index: int, power: int = 1) -> "SparsePolynomial":
        terms = []
        for m in self.terms:
            exps = list(m.exponents)
            exps[index] += power
            terms.append((tuple(exps), m.coefficient))
        return SparsePolynomial.from_terms(self.n_vars, terms)

    def total_degrees(self) -> set[int]:
        return {sum(m.exponents) for m in self.terms}

    def evaluate(self, point: Sequence) -> Fraction:
        """Exact evaluation at a rational point."""
        if len(point) != self.n_vars:
            raise ValueError("point dimension mismatch")
        pt = [frac(x) for x in point]
        total = Fraction(0)
        for coeff, exps in self.terms:
            val = coeff
            for x, e in zip(pt, exps):
                if e:
                    val *= x**e
            total += val
        return total

    def evaluate_float(self, point: Sequence[float]) -> float:
        total = 0.0
        for coeff, exps in self.terms:
            val = float(coeff)
            for x, e in zip(point, exps):
                if e:
                    val *= float(x) ** e
            total += val
        return total

    def substitute(self, index: int, replacement: "SparsePolynomial") -> "SparsePolynomial":
        """Substitute a polynomial for variable `index` (exact expansion)."""
        result = SparsePolynomial.zero(self.n_vars)
        for coeff, exps in self.terms:
            reduced = list(exps)
            power = reduced[index]
            reduced[index] = 0
            term = SparsePolynomial.from_terms(self.n_vars, [(tuple(reduced), coeff)])
            for _ in range(power):
                term = term * replacement
            result = result + term
        return result

    def format(self, names: Sequence[str] | None = None) -> str:
        if not self.terms:
            return "0"
        if names is None:
            names = [f"x{i + 1}" for i in range(self.n_vars)]
        parts = []
        for k, (coeff, exps) in enumerate(self.terms):
            factors = []
            for name, e in zip(names, exps):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            mag = abs(coeff)
            body = "*".join(factors)
            if not factors:
                body = str(mag)
            elif mag != 1:
                body = f"{mag}*{body}"
            if k == 0:
                parts.append(body if coeff > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if coeff > 0 else f"- {body}")
        return " ".join(parts)


@dataclass(frozen=True)
class PolynomialField:
    """A polynomial vector field: one component polynomial per species."""

    components: tuple[SparsePolynomial, ...]

    def __post_init__(self):
        if not self.components:
            raise ValueError("a field needs at least one component")
        n = self.components[0].n_vars
        if any(p.n_vars != n for p in self.components):
            raise ValueError("all components must share the variable count")

    @property
    def n_vars(self) -> int:
        return self.components[0].n_vars

    def __len__(self) -> int:
        return len(self.components)

    def __getitem__(self, i: int) -> SparsePolynomial:
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.components)

    def component_sum(self) -> SparsePolynomial:
        total = SparsePolynomial.zero(self.n_vars)
        for p in self.components:
            total = total + p
        return total

    def evaluate(self, point: Sequence) -> tuple[Fraction, ...]:
        return tuple(p.evaluate(point) for p in self.components)

    def compile(self):
        """Build a vectorized float evaluator `f(x: ndarray) -> ndarray`."""
        import numpy as np

        rows = []
        for i, p in enumerate(self.components):
            for coeff, exps in p.terms:
                rows.append((i, float(coeff), exps))
        if not rows:
            n_comp = len(self.components)

            def zero_eval(x):
                return np.zeros(n_comp)

            return zero_eval
        comp_idx = np.array([r[0] for r in rows], dtype=int)
        coeffs = np.array([r[1] for r in rows], dtype=float)
        expmat = np.array([r[2] for r in rows], dtype=float)
        n_comp = len(self.components)

        def evaluate(x):
            x = np.asarray(x, dtype=float)
            monos = np.prod(np.power(x[None, :], expmat), axis=1)
            out = np.zeros(n_comp)
            np.add.at(out, comp_idx, coeffs * monos)
            return out

        return evaluate

    def format(self, names: Sequence[str] | None = None) -> str:
        if names is None:
            names = [f"x{i + 1}" for i in range(self.n_vars)]
        lines = []
        for name, p in zip(names, self.components):
            lines.append(f"d{name}/dt = {p.format(names)}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "n_vars": self.n_vars,
            "components": [
                [{"coefficient": str(m.coefficient), "exponents": list(m.exponents)} for m in p.terms]
                for p in self.components
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "PolynomialField":
        n = data["n_vars"]
        comps = []
        for terms in data["components"]:
            comps.append(
                SparsePolynomial.from_terms(
                    n, [(tuple(t["exponents"]), Fraction(t["coefficient"])) for t in terms]
                )
            )
        return cls(tuple(comps))
