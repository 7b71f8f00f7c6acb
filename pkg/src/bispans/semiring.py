"""Commutative semiring contexts and the evaluation of spans and bispans.

A span ``X <-f- Z -g-> Y`` acts on vectors by restriction along ``f`` followed
by summation over the fibers of ``g``.  A bispan ``S <-s- E -p-> B -t-> T``
additionally multiplies over the fibers of ``p`` in between.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

from .bispancat import Bispan, bispan_compose
from .errors import IndexMismatch, SemiringOverflow
from .poly import Poly
from .spancat import Span

UINT64_MAX = 2**64 - 1


class _Infinity:
    """Additive unit of the tropical semiring; absorbs under ``+``."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


class Semiring:
    """A commutative semiring: ``add``, ``mul``, ``zero``, ``one``.

    Subclasses provide ``elements()`` when the carrier is finite, and
    ``sample(rng)`` for randomized axiom and functoriality checks.
    """

    name = "semiring"
    zero: Any
    one: Any

    def add(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def elements(self) -> list | None:
        return None

    def _key(self) -> tuple:
        return (type(self).__name__,)

    def __eq__(self, other):
        return isinstance(other, Semiring) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def sample(self, rng: random.Random):
        raise NotImplementedError

    def contains(self, a) -> bool:
        return True

    def sum(self, xs: Iterable):
        total = self.zero
        for x in xs:
            total = self.add(total, x)
        return total

    def prod(self, xs: Iterable):
        total = self.one
        for x in xs:
            total = self.mul(total, x)
        return total


class Naturals(Semiring):
    """Natural numbers below ``2**bits`` with checked arithmetic."""

    name = "naturals"
    zero = 0
    one = 1

    def __init__(self, bits: int = 64, sample_max: int = 1000):
        self.bits = bits
        self.max = 2**bits - 1
        self.sample_max = sample_max

    def _key(self):
        return ("naturals", self.bits)

    def add(self, a, b):
        r = a + b
        if r > self.max:
            raise SemiringOverflow(f"{a} + {b} exceeds the {self.bits}-bit carrier")
        return r

    def mul(self, a, b):
        r = a * b
        if r > self.max:
            raise SemiringOverflow(f"{a} * {b} exceeds the {self.bits}-bit carrier")
        return r

    def sample(self, rng):
        return rng.randint(0, self.sample_max)

    def contains(self, a):
        return isinstance(a, int) and not isinstance(a, bool) and 0 <= a <= self.max


class Boolean(Semiring):
    name = "boolean"
    zero = False
    one = True

    def add(self, a, b):
        return a or b

    def mul(self, a, b):
        return a and b

    def elements(self):
        return [False, True]

    def sample(self, rng):
        return rng.random() < 0.5

    def contains(self, a):
        return isinstance(a, bool)


class Tropical(Semiring):
    """``(min, +)`` on the naturals extended by the sentinel :data:`INF`."""

    name = "tropical"
    zero = INF
    one = 0

    def __init__(self, sample_max: int = 100):
        self.sample_max = sample_max

    def add(self, a, b):
        if a is INF:
            return b
        if b is INF:
            return a
        return min(a, b)

    def mul(self, a, b):
        if a is INF or b is INF:
            return INF
        return a + b

    def sample(self, rng):
        return INF if rng.random() < 0.15 else rng.randint(0, self.sample_max)

    def contains(self, a):
        return a is INF or (isinstance(a, int) and not isinstance(a, bool) and a >= 0)


class Polynomials(Semiring):
    """``N[x_1..x_n]``; evaluating a bispan here performs polynomial substitution."""

    name = "polynomial"

    def __init__(self, variables: int, sample_degree: int = 2, sample_terms: int = 3):
        self.variables = variables
        self.zero = Poly.zero(variables)
        self.one = Poly.one(variables)
        self.sample_degree = sample_degree
        self.sample_terms = sample_terms

    def _key(self):
        return ("polynomial", self.variables)

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def sample(self, rng):
        terms = {}
        for _ in range(rng.randint(0, self.sample_terms)):
            exp = [0] * self.variables
            for _ in range(rng.randint(0, self.sample_degree)):
                if self.variables:
                    exp[rng.randrange(self.variables)] += 1
            terms[tuple(exp)] = terms.get(tuple(exp), 0) + rng.randint(1, 2)
        return Poly.from_dict(self.variables, terms)

    def contains(self, a):
        return isinstance(a, Poly) and a.variables == self.variables


@dataclass(frozen=True)
class FiniteSemiring(Semiring):
    """A semiring on ``{0..size-1}`` given by explicit operation tables."""

    size: int
    add_table: tuple[tuple[int, ...], ...]
    mul_table: tuple[tuple[int, ...], ...]
    zero: int
    one: int
    name: str = field(default="finite", compare=False)

    def __post_init__(self):
        for label, table in (("add", self.add_table), ("mul", self.mul_table)):
            if len(table) != self.size or any(len(row) != self.size for row in table):
                raise ValueError(f"{label} table must be {self.size}x{self.size}")
            if any(not 0 <= v < self.size for row in table for v in row):
                raise ValueError(f"{label} table has entries outside the carrier")
        if self.size and not (0 <= self.zero < self.size and 0 <= self.one < self.size):
            raise ValueError("zero and one must be carrier elements")

    def add(self, a, b):
        return self.add_table[a][b]

    def mul(self, a, b):
        return self.mul_table[a][b]

    def elements(self):
        return list(range(self.size))

    def sample(self, rng):
        return rng.randrange(self.size)

    def contains(self, a):
        return isinstance(a, int) and not isinstance(a, bool) and 0 <= a < self.size

    @classmethod
    def from_ops(cls, size: int, add: Callable[[int, int], int], mul: Callable[[int, int], int],
                 zero: int, one: int, name: str = "finite") -> "FiniteSemiring":
        rows = range(size)
        return cls(size, tuple(tuple(add(a, b) for b in rows) for a in rows),
                   tuple(tuple(mul(a, b) for b in rows) for a in rows), zero, one, name)

    def relabel(self, perm: Sequence[int]) -> "FiniteSemiring":
        """Transport the structure along the bijection ``a ↦ perm[a]``."""
        inv = [0] * self.size
        for a, b in enumerate(perm):
            inv[b] = a
        return FiniteSemiring.from_ops(
            self.size,
            lambda a, b: perm[self.add_table[inv[a]][inv[b]]],
            lambda a, b: perm[self.mul_table[inv[a]][inv[b]]],
            perm[self.zero], perm[self.one], self.name)


def integers_mod(n: int) -> FiniteSemiring:
    return FiniteSemiring.from_ops(n, lambda a, b: (a + b) % n, lambda a, b: (a * b) % n,
                                   0, 1 % n, f"Z/{n}")


def truncated_naturals(cap: int) -> FiniteSemiring:
    """``{0..cap}`` with addition and multiplication saturating at ``cap``."""
    return FiniteSemiring.from_ops(cap + 1, lambda a, b: min(a + b, cap),
                                   lambda a, b: min(a * b, cap), 0, 1, f"N<={cap}")


def chain_lattice(n: int) -> FiniteSemiring:
    """The distributive lattice ``0 < 1 < ... < n-1`` with ``(max, min)``."""
    return FiniteSemiring.from_ops(n, max, min, 0, n - 1, f"chain{n}")


def truncated_tropical(cap: int) -> FiniteSemiring:
    """``(min, +)`` on ``{0..cap}`` where ``cap`` plays the role of infinity."""
    return FiniteSemiring.from_ops(cap + 1, min, lambda a, b: min(a + b, cap), cap, 0,
                                   f"trop<={cap}")


def random_finite_semiring(rng: random.Random, max_size: int = 5) -> FiniteSemiring:
    """A randomly chosen finite commutative semiring with randomly permuted carrier."""
    family = rng.choice(["mod", "truncated", "chain", "tropical"])
    if family == "mod":
        base = integers_mod(rng.randint(2, max_size))
    elif family == "truncated":
        base = truncated_naturals(rng.randint(1, max_size - 1))
    elif family == "chain":
        base = chain_lattice(rng.randint(2, max_size))
    else:
        base = truncated_tropical(rng.randint(1, max_size - 1))
    perm = list(range(base.size))
    rng.shuffle(perm)
    return base.relabel(perm)


BUILTINS = {
    "naturals": Naturals,
    "boolean": Boolean,
    "tropical": Tropical,
}


def builtin(name: str, variables: int | None = None) -> Semiring:
    if name == "polynomial":
        return Polynomials(variables or 1)
    try:
        return BUILTINS[name]()
    except KeyError:
        raise ValueError(f"unknown builtin semiring {name!r}") from None


@dataclass(frozen=True)
class Vector:
    """An element of ``R^S``: one carrier element per index of ``S``."""

    over: Semiring
    entries: tuple

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))

    def __len__(self):
        return len(self.entries)


AXIOMS = ("add_assoc", "add_comm", "add_unit", "mul_assoc", "mul_comm", "mul_unit",
          "distributivity", "zero_absorbing")


@dataclass
class AxiomReport:
    semiring: str
    checked: int
    failures: dict[str, tuple] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self):
        return self.ok


def _axiom_failures(R: Semiring, triples: Iterable[tuple]) -> tuple[int, dict]:
    add, mul, zero, one = R.add, R.mul, R.zero, R.one
    failures: dict[str, tuple] = {}
    count = 0

    def record(name, witness):
        failures.setdefault(name, witness)

    for a, b, c in triples:
        count += 1
        if add(add(a, b), c) != add(a, add(b, c)):
            record("add_assoc", (a, b, c))
        if add(a, b) != add(b, a):
            record("add_comm", (a, b))
        if add(a, zero) != a:
            record("add_unit", (a,))
        if mul(mul(a, b), c) != mul(a, mul(b, c)):
            record("mul_assoc", (a, b, c))
        if mul(a, b) != mul(b, a):
            record("mul_comm", (a, b))
        if mul(a, one) != a:
            record("mul_unit", (a,))
        if mul(a, add(b, c)) != add(mul(a, b), mul(a, c)):
            record("distributivity", (a, b, c))
        if mul(a, zero) != zero:
            record("zero_absorbing", (a,))
    return count, failures


def semiring_check_axioms(R: Semiring, budget: int = 8, seed: int = 0) -> AxiomReport:
    """Check the commutative-semiring laws.

    Finite carriers: every triple drawn from the first ``budget`` elements.
    Otherwise: ``budget**3`` triples sampled with ``seed``.  The report keeps
    the first counterexample found per axiom.
    """
    elems = R.elements()
    if elems is not None:
        pool = elems[:budget]
        triples = itertools.product(pool, repeat=3)
    else:
        rng = random.Random(seed)
        triples = [tuple(R.sample(rng) for _ in range(3)) for _ in range(budget**3)]
    count, failures = _axiom_failures(R, triples)
    return AxiomReport(R.name, count, failures)


def _entries(v) -> tuple:
    return v.entries if isinstance(v, Vector) else tuple(v)


def eval_span(sp: Span, M: Semiring, psi) -> Vector:
    """``(g_⊕ f^* psi)_t = Σ_{z ∈ g⁻¹(t)} psi_{f(z)}``, using only the additive monoid of ``M``."""
    entries = _entries(psi)
    if len(entries) != sp.src.size:
        raise IndexMismatch(f"vector has {len(entries)} entries, span source has {sp.src.size}")
    out = [M.zero] * sp.tgt.size
    for x, y in zip(sp.left.map, sp.right.map):
        out[y] = M.add(out[y], entries[x])
    return Vector(M, out)


def eval_bispan(b: Bispan, R: Semiring, psi) -> Vector:
    """``result_t = Σ_{b ∈ t⁻¹(t)} Π_{e ∈ p⁻¹(b)} psi_{s(e)}``."""
    entries = _entries(psi)
    if len(entries) != b.src.size:
        raise IndexMismatch(f"vector has {len(entries)} entries, bispan source has {b.src.size}")
    prods = [R.one] * b.p.cod.size
    for sv, bv in zip(b.s.map, b.p.map):
        prods[bv] = R.mul(prods[bv], entries[sv])
    out = [R.zero] * b.tgt.size
    for bv, tv in enumerate(b.t.map):
        out[tv] = R.add(out[tv], prods[bv])
    return Vector(R, out)


@dataclass
class FunctorialityReport:
    semiring: str
    checked: int = 0
    counterexamples: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def __bool__(self):
        return self.ok


def functoriality_check(pairs: Iterable[tuple[Bispan, Bispan]], R: Semiring,
                        inputs: Callable[[int, random.Random], Iterable] | None = None,
                        seed: int = 0, trials: int = 1,
                        max_counterexamples: int = 10) -> FunctorialityReport:
    """Compare ``eval(g∘f)`` with ``eval(g)∘eval(f)`` on each pair ``(g, f)``.

    ``inputs(n, rng)`` yields the vectors of length ``n`` to try; by default
    ``trials`` vectors are sampled from ``R``.  Overflow propagates with the
    offending instance attached as ``exc.instance``.
    """
    rng = random.Random(seed)
    if inputs is None:
        def inputs(n, rng):
            return [tuple(R.sample(rng) for _ in range(n)) for _ in range(trials)]

    report = FunctorialityReport(R.name)
    for g, f in pairs:
        gf = bispan_compose(g, f)
        for psi in inputs(f.src.size, rng):
            try:
                lhs = eval_bispan(gf, R, psi).entries
                rhs = eval_bispan(g, R, eval_bispan(f, R, psi)).entries
            except SemiringOverflow as exc:
                exc.instance = {"g": g, "f": f, "psi": psi}
                raise
            report.checked += 1
            if lhs != rhs and len(report.counterexamples) < max_counterexamples:
                report.counterexamples.append(
                    {"g": g, "f": f, "psi": tuple(psi), "composite": lhs, "stepwise": rhs})
    return report
