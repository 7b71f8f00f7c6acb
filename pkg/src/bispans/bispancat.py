"""Bispans ``S <-s- E -p-> B -t-> T`` of finite sets.

Composition runs a generic engine over a *backend* that supplies composition,
pullbacks and dependent products (the data of a bispan triple).  The finite
set backend below gives ``Bispan(F)``; :mod:`bispans.arrfib` plugs in the
arrow-category backend.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from math import comb, factorial
from typing import Any, NamedTuple, Protocol

from . import finset
from .errors import BoundaryMismatch, ResourceLimit
from .finset import FinFun, FinSet, compose_fun, identity
from .poly import Poly
from .spancat import inclusions

DEFAULT_ENUM_LIMIT = 100_000


class Backend(Protocol):
    def compose(self, g: Any, f: Any) -> Any: ...

    def pullback(self, f: Any, g: Any) -> Any:
        """Return an object with ``apex``, ``to_left`` and ``to_right``."""

    def dependent_product(self, pi: Any, q: Any) -> Any:
        """Return an object with ``total``, ``proj``, ``counit_square`` and ``counit``."""


class Diagram(NamedTuple):
    """A bispan in an arbitrary backend: ``src <-s- E -p-> B -t-> tgt``."""

    s: Any
    p: Any
    t: Any


def compose_diagrams(backend: Backend, second: Diagram, first: Diagram) -> Diagram:
    """Compose ``first = (s, p, t)`` with ``second = (u, q, v)`` through the distributivity diagram.

    With ``B ×_T F`` the pullback of ``t`` and ``u`` and ``π`` its projection to
    ``F``, put ``D = q_*π``, ``X = D ×_C F`` with counit ``ε: X → B ×_T F``,
    ``Y = E ×_B (B ×_T F)`` and ``G = X ×_{B ×_T F} Y``.  The composite is
    ``S <- G -> D -> U``.
    """
    s, p, t = first
    u, q, v = second
    comp = backend.compose
    bf = backend.pullback(t, u)
    dp = backend.dependent_product(bf.to_right, q)
    y = backend.pullback(p, bf.to_left)
    g = backend.pullback(dp.counit, y.to_right)
    return Diagram(
        comp(s, comp(y.to_left, g.to_right)),
        comp(dp.counit_square.to_left, g.to_left),
        comp(v, dp.proj),
    )


class FinSetBackend:
    """``(F, F, F)``: every map is forward and multiplicative."""

    compose = staticmethod(compose_fun)
    pullback = staticmethod(finset.pullback)
    dependent_product = staticmethod(finset.dependent_product)


FINSET = FinSetBackend()


@dataclass(frozen=True, slots=True)
class Bispan:
    s: FinFun
    p: FinFun
    t: FinFun

    def __post_init__(self):
        if self.s.dom.size != self.p.dom.size:
            raise BoundaryMismatch("s and p must share their domain E")
        if self.p.cod.size != self.t.dom.size:
            raise BoundaryMismatch("p must land in the domain of t")

    @property
    def src(self) -> FinSet:
        return self.s.cod

    @property
    def tgt(self) -> FinSet:
        return self.t.cod

    @classmethod
    def of(cls, src: int, tgt: int, s, p, t) -> "Bispan":
        e, b = FinSet(len(s)), FinSet(len(t))
        return cls(FinFun(e, FinSet(src), tuple(s)), FinFun(e, b, tuple(p)),
                   FinFun(b, FinSet(tgt), tuple(t)))

    def diagram(self) -> Diagram:
        return Diagram(self.s, self.p, self.t)


@dataclass(frozen=True, slots=True)
class BispanClass:
    """Isomorphism class of a bispan with fixed boundary.

    ``signature`` is the sorted multiset, over ``b ∈ B``, of
    ``(t(b), sorted s-values of the p-fiber over b)``.
    """

    src: FinSet
    tgt: FinSet
    signature: tuple[tuple[int, tuple[int, ...]], ...]
    aut_count: int


def bispan_compose(second: Bispan, first: Bispan) -> Bispan:
    if first.tgt.size != second.src.size:
        raise BoundaryMismatch(
            f"cannot compose bispans: target of first has size {first.tgt.size}, "
            f"source of second has size {second.src.size}")
    return Bispan(*compose_diagrams(FINSET, second.diagram(), first.diagram()))


def bispan_id(s: FinSet | int) -> Bispan:
    i = identity(s)
    return Bispan(i, i, i)


def _fiber_signatures(b: Bispan) -> list[tuple[int, tuple[int, ...]]]:
    fibers: list[list[int]] = [[] for _ in range(b.p.cod.size)]
    smap = b.s.map
    for e, bb in enumerate(b.p.map):
        fibers[bb].append(smap[e])
    return [(b.t.map[i], tuple(sorted(f))) for i, f in enumerate(fibers)]


def _aut_count(sigs) -> int:
    aut = 1
    for m in Counter(sigs).values():
        aut *= factorial(m)
    for _, fiber in sigs:
        for m in Counter(fiber).values():
            aut *= factorial(m)
    return aut


def bispan_canon(b: Bispan) -> BispanClass:
    sigs = _fiber_signatures(b)
    return BispanClass(b.src, b.tgt, tuple(sorted(sigs)), _aut_count(sigs))


def bispan_from_class(c: BispanClass) -> Bispan:
    s, p, t = [], [], []
    for i, (tv, fiber) in enumerate(c.signature):
        t.append(tv)
        for sv in fiber:
            s.append(sv)
            p.append(i)
    return Bispan.of(c.src.size, c.tgt.size, s, p, t)


def monomials(n: int, max_degree: int) -> list[tuple[int, ...]]:
    """Sorted s-value multisets (monomials in ``n`` variables) of degree at most ``max_degree``."""
    out = []
    for k in range(max_degree + 1):
        out.extend(itertools.combinations_with_replacement(range(n), k))
    return out


def bispan_hom_enum(src: FinSet | int, tgt: FinSet | int, max_b: int, max_fiber: int,
                    limit: int = DEFAULT_ENUM_LIMIT) -> list[BispanClass]:
    """Every class with ``|B| <= max_b`` and p-fibers of size at most ``max_fiber``.

    Ordered by ``|B|``, then by signature.
    """
    src = FinSet(src) if isinstance(src, int) else src
    tgt = FinSet(tgt) if isinstance(tgt, int) else tgt
    slots = [(tv, m) for tv in range(tgt.size) for m in monomials(src.size, max_fiber)]
    total = sum(comb(len(slots) + k - 1, k) if slots else int(k == 0)
                for k in range(max_b + 1))
    if total > limit:
        raise ResourceLimit(f"{total} bispan classes exceed the limit {limit}")
    out = []
    for k in range(max_b + 1):
        for sig in itertools.combinations_with_replacement(slots, k):
            out.append(BispanClass(src, tgt, sig, _aut_count(sig)))
    return out


def poly_encode(b: Bispan) -> tuple[Poly, ...]:
    """One polynomial in ``|S|`` variables per target element."""
    n = b.src.size
    acc: list[Counter] = [Counter() for _ in range(b.tgt.size)]
    for tv, fiber in _fiber_signatures(b):
        exp = [0] * n
        for sv in fiber:
            exp[sv] += 1
        acc[tv][tuple(exp)] += 1
    return tuple(Poly.from_dict(n, c) for c in acc)


def poly_decode(ps, src: FinSet | int) -> Bispan:
    n = src.size if isinstance(src, FinSet) else src
    s, p, t = [], [], []
    for tv, poly in enumerate(ps):
        if poly.variables != n:
            raise ValueError(f"polynomial over {poly.variables} variables, expected {n}")
        for exp, coeff in poly.terms:
            for _ in range(coeff):
                bb = len(t)
                t.append(tv)
                for i, e in enumerate(exp):
                    s.extend([i] * e)
                    p.extend([bb] * e)
    return Bispan.of(n, len(ps), s, p, t)


def backward(f: FinFun) -> Bispan:
    """``cod(f) <-f- dom(f) = dom(f) = dom(f)``: restriction along ``f``."""
    i = identity(f.dom)
    return Bispan(f, i, i)


def multiplicative(f: FinFun) -> Bispan:
    """``dom(f) = dom(f) -f-> cod(f) = cod(f)``: multiplication along the fibers of ``f``."""
    return Bispan(identity(f.dom), f, identity(f.cod))


def additive(f: FinFun) -> Bispan:
    """``dom(f) = dom(f) = dom(f) -f-> cod(f)``: summation along the fibers of ``f``."""
    i = identity(f.dom)
    return Bispan(i, i, f)


def bispan_sum(a: Bispan, b: Bispan) -> Bispan:
    """Disjoint union ``a ⊔ b : S ⊔ S' ⇒ T ⊔ T'`` (the product of morphisms)."""
    ns, nt, nb = a.src.size, a.tgt.size, a.t.dom.size
    return Bispan.of(
        ns + b.src.size, nt + b.tgt.size,
        a.s.map + tuple(ns + v for v in b.s.map),
        a.p.map + tuple(nb + v for v in b.p.map),
        a.t.map + tuple(nt + v for v in b.t.map),
    )


def bispan_product(s: FinSet | int, t: FinSet | int) -> tuple[FinSet, Bispan, Bispan]:
    """``s ⊔ t`` with its projections, the backward bispans along the inclusions."""
    u, i_s, i_t = inclusions(s, t)
    return u, backward(i_s), backward(i_t)


def bispan_pair(a: Bispan, b: Bispan) -> Bispan:
    """The map ``U ⇒ S ⊔ T`` induced by ``a: U ⇒ S`` and ``b: U ⇒ T``."""
    if a.src.size != b.src.size:
        raise BoundaryMismatch("paired bispans must share their source")
    nb, nt = a.t.dom.size, a.tgt.size
    return Bispan.of(a.src.size, nt + b.tgt.size,
                     a.s.map + b.s.map,
                     a.p.map + tuple(nb + v for v in b.p.map),
                     a.t.map + tuple(nt + v for v in b.t.map))


def bispan_is_invertible(b: Bispan) -> bool:
    return b.s.is_bijective() and b.p.is_bijective() and b.t.is_bijective()


def bispan_inverse(b: Bispan) -> Bispan:
    """Inverse of a bispan whose three maps are bijections."""
    if not bispan_is_invertible(b):
        raise BoundaryMismatch("bispan is not invertible")
    whole = compose_fun(b.t, compose_fun(b.p, b.s.inverse()))
    return backward(whole)


def bispans(src: int, tgt: int, e: int, b: int):
    """All bispans with the given sizes (not up to iso), lexicographic in ``(s, p, t)``."""
    for s in finset.funs(e, src):
        for p in finset.funs(e, b):
            for t in finset.funs(b, tgt):
                yield Bispan(s, p, t)
