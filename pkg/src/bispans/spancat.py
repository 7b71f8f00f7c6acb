"""Spans of finite sets ``X <- Z -> Y`` at the truncated level.

Composition is by pullback, ``span_compose(second, first)`` meaning "first,
then second".  Isomorphism classes are computed from the multiset of leg
pairs: an apex element carries no data besides its two leg values, so that
multiset is a complete invariant.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from math import comb, factorial

from .errors import BoundaryMismatch, ResourceLimit
from .finset import FinFun, FinSet, compose_fun, identity, pullback

DEFAULT_ENUM_LIMIT = 100_000


@dataclass(frozen=True, slots=True)
class Span:
    left: FinFun
    right: FinFun

    def __post_init__(self):
        if self.left.dom.size != self.right.dom.size:
            raise BoundaryMismatch("span legs must share their domain")

    @property
    def src(self) -> FinSet:
        return self.left.cod

    @property
    def tgt(self) -> FinSet:
        return self.right.cod

    @property
    def apex(self) -> FinSet:
        return self.left.dom

    @classmethod
    def of(cls, src: int, tgt: int, left, right) -> "Span":
        z = FinSet(len(left))
        return cls(FinFun(z, FinSet(src), tuple(left)), FinFun(z, FinSet(tgt), tuple(right)))


@dataclass(frozen=True, slots=True)
class SpanClass:
    src: FinSet
    tgt: FinSet
    signature: tuple[tuple[int, int], ...]
    aut_count: int

    @property
    def apex_size(self) -> int:
        return len(self.signature)


def span_id(x: FinSet | int) -> Span:
    i = identity(x)
    return Span(i, i)


def span_compose(second: Span, first: Span) -> Span:
    if first.tgt.size != second.src.size:
        raise BoundaryMismatch(
            f"cannot compose spans: target of first has size {first.tgt.size}, "
            f"source of second has size {second.src.size}")
    pb = pullback(first.right, second.left)
    return Span(compose_fun(first.left, pb.to_left), compose_fun(second.right, pb.to_right))


def span_canon(s: Span) -> SpanClass:
    counts = Counter(zip(s.left.map, s.right.map))
    aut = 1
    for m in counts.values():
        aut *= factorial(m)
    return SpanClass(s.src, s.tgt, tuple(sorted(zip(s.left.map, s.right.map))), aut)


def span_from_class(c: SpanClass) -> Span:
    """The representative whose apex is ordered like the signature."""
    return Span.of(c.src.size, c.tgt.size,
                   [x for x, _ in c.signature], [y for _, y in c.signature])


def span_hom_enum(src: FinSet | int, tgt: FinSet | int, max_apex: int,
                  limit: int = DEFAULT_ENUM_LIMIT) -> list[SpanClass]:
    """Every class ``src <- Z -> tgt`` with ``|Z| <= max_apex``, by apex size then signature."""
    src = FinSet(src) if isinstance(src, int) else src
    tgt = FinSet(tgt) if isinstance(tgt, int) else tgt
    cells = [(x, y) for x in range(src.size) for y in range(tgt.size)]
    total = sum(comb(len(cells) + k - 1, k) if cells else int(k == 0)
                for k in range(max_apex + 1))
    if total > limit:
        raise ResourceLimit(f"{total} span classes exceed the limit {limit}")
    out = []
    for k in range(max_apex + 1):
        for sig in itertools.combinations_with_replacement(cells, k):
            counts = Counter(sig)
            aut = 1
            for m in counts.values():
                aut *= factorial(m)
            out.append(SpanClass(src, tgt, sig, aut))
    return out


def span_tensor(a: Span, b: Span) -> Span:
    """Cartesian product of spans; the pair ``(i, j)`` has index ``i * |second| + j``."""
    nb_z, nb_x, nb_y = b.apex.size, b.src.size, b.tgt.size
    left, right = [], []
    for i in range(a.apex.size):
        for j in range(nb_z):
            left.append(a.left.map[i] * nb_x + b.left.map[j])
            right.append(a.right.map[i] * nb_y + b.right.map[j])
    return Span.of(a.src.size * nb_x, a.tgt.size * nb_y, left, right)


def inclusions(s: FinSet | int, t: FinSet | int) -> tuple[FinSet, FinFun, FinFun]:
    """The disjoint union ``s ⊔ t`` with its two summand inclusions."""
    s = s.size if isinstance(s, FinSet) else s
    t = t.size if isinstance(t, FinSet) else t
    u = FinSet(s + t)
    return (u, FinFun(FinSet(s), u, tuple(range(s))),
            FinFun(FinSet(t), u, tuple(range(s, s + t))))


def span_product(s: FinSet | int, t: FinSet | int) -> tuple[FinSet, Span, Span]:
    """``s ⊔ t`` with its projections, the backward spans along the inclusions."""
    u, i_s, i_t = inclusions(s, t)
    return u, Span(i_s, identity(i_s.dom)), Span(i_t, identity(i_t.dom))


def span_pair(a: Span, b: Span) -> Span:
    """The map into a product induced by ``a: U -> S`` and ``b: U -> T``."""
    if a.src.size != b.src.size:
        raise BoundaryMismatch("paired spans must share their source")
    ns = a.tgt.size
    return Span.of(a.src.size, ns + b.tgt.size,
                   a.left.map + b.left.map,
                   a.right.map + tuple(ns + y for y in b.right.map))


def span_factorize(s: Span) -> tuple[Span, Span]:
    """Split ``X <- Z -> Y`` into the backward part ``X <- Z = Z`` and forward part ``Z = Z -> Y``."""
    z = identity(s.apex)
    return Span(s.left, z), Span(z, s.right)


def span_is_invertible(s: Span) -> bool:
    return s.left.is_bijective() and s.right.is_bijective()


def span_inverse(s: Span) -> Span:
    if not span_is_invertible(s):
        raise BoundaryMismatch("span legs are not both bijections")
    return Span(s.right, s.left)


def spans(src: int, tgt: int, apex: int):
    """All spans with the given boundary and apex size (not up to iso)."""
    z, x, y = FinSet(apex), FinSet(src), FinSet(tgt)
    lefts = list(itertools.product(range(src), repeat=apex))
    rights = list(itertools.product(range(tgt), repeat=apex))
    for left in lefts:
        lf = FinFun(z, x, left)
        for right in rights:
            yield Span(lf, FinFun(z, y, right))
