"""Polynomials with natural-number coefficients in a fixed number of variables."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping

Exponent = tuple[int, ...]


@dataclass(frozen=True, slots=True)
class Poly:
    """Element of ``N[x_0, ..., x_{n-1}]``.

    ``terms`` is sorted by exponent vector and never holds a zero coefficient.
    """

    variables: int
    terms: tuple[tuple[Exponent, int], ...] = ()

    def __post_init__(self):
        seen = None
        for exp, coeff in self.terms:
            if len(exp) != self.variables:
                raise ValueError(f"exponent {exp} does not have {self.variables} entries")
            if coeff <= 0 or any(e < 0 for e in exp):
                raise ValueError("coefficients must be positive and exponents natural")
            if seen is not None and exp <= seen:
                raise ValueError("terms must be strictly sorted by exponent")
            seen = exp

    @classmethod
    def from_dict(cls, variables: int, terms: Mapping[Exponent, int]) -> "Poly":
        return cls(variables, tuple(sorted((tuple(e), c) for e, c in terms.items() if c)))

    @classmethod
    def zero(cls, variables: int) -> "Poly":
        return cls(variables)

    @classmethod
    def one(cls, variables: int) -> "Poly":
        return cls(variables, (((0,) * variables, 1),))

    @classmethod
    def constant(cls, variables: int, c: int) -> "Poly":
        return cls.from_dict(variables, {(0,) * variables: c})

    @classmethod
    def var(cls, variables: int, i: int) -> "Poly":
        exp = tuple(int(j == i) for j in range(variables))
        return cls(variables, ((exp, 1),))

    def as_dict(self) -> dict[Exponent, int]:
        return dict(self.terms)

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        acc: dict[Exponent, int] = defaultdict(int)
        for e, c in self.terms + other.terms:
            acc[e] += c
        return Poly.from_dict(self.variables, acc)

    def __mul__(self, other: "Poly") -> "Poly":
        self._check(other)
        acc: dict[Exponent, int] = defaultdict(int)
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                acc[tuple(a + b for a, b in zip(e1, e2))] += c1 * c2
        return Poly.from_dict(self.variables, acc)

    def _check(self, other: "Poly"):
        if not isinstance(other, Poly) or other.variables != self.variables:
            raise ValueError("polynomials over different variable sets")

    def evaluate(self, values: Iterable, add, mul, zero, one):
        """Evaluate in an arbitrary commutative semiring given by its operations."""
        values = list(values)
        total = zero
        for exp, coeff in self.terms:
            mono = one
            for v, e in zip(values, exp):
                for _ in range(e):
                    mono = mul(mono, v)
            for _ in range(coeff):
                total = add(total, mono)
        return total

    def degree(self) -> int:
        return max((sum(e) for e, _ in self.terms), default=0)

    def __str__(self):
        if not self.terms:
            return "0"
        names = ["x"] if self.variables == 1 else [f"x{i + 1}" for i in range(self.variables)]
        parts = []
        for exp, coeff in self.terms:
            factors = []
            for name, e in zip(names, exp):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            mono = "*".join(factors)
            if not mono:
                parts.append(str(coeff))
            elif coeff == 1:
                parts.append(mono)
            else:
                parts.append(f"{coeff}*{mono}")
        return " + ".join(parts)
