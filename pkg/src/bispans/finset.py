"""Finite sets, functions between them, pullbacks and dependent products.

Elements of a finite set of size ``n`` are the indices ``0..n-1``.  Every
constructed set (pullback apex, dependent-product total) is ordered
lexicographically so that downstream canonical forms are bit-exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .errors import DomainMismatch, NotPullback


@dataclass(frozen=True, slots=True)
class FinSet:
    size: int

    def __post_init__(self):
        if not isinstance(self.size, int) or self.size < 0:
            raise ValueError(f"finite set size must be a natural number, got {self.size!r}")

    def __iter__(self):
        return iter(range(self.size))

    def __len__(self):
        return self.size


@dataclass(frozen=True, slots=True)
class FinFun:
    dom: FinSet
    cod: FinSet
    map: tuple[int, ...]

    def __post_init__(self):
        if not isinstance(self.map, tuple):
            object.__setattr__(self, "map", tuple(self.map))
        if len(self.map) != self.dom.size:
            raise DomainMismatch(
                f"map has length {len(self.map)} but domain has size {self.dom.size}")
        if self.map and (min(self.map) < 0 or max(self.map) >= self.cod.size):
            bad = next(v for v in self.map if not 0 <= v < self.cod.size)
            raise DomainMismatch(f"value {bad} outside codomain of size {self.cod.size}")

    @classmethod
    def of(cls, values: Sequence[int], cod: int) -> "FinFun":
        return cls(FinSet(len(values)), FinSet(cod), tuple(values))

    def __call__(self, i: int) -> int:
        return self.map[i]

    def fibers(self) -> list[list[int]]:
        """Preimages of every codomain element, each listed in increasing order."""
        out: list[list[int]] = [[] for _ in range(self.cod.size)]
        for i, v in enumerate(self.map):
            out[v].append(i)
        return out

    def fiber(self, y: int) -> list[int]:
        return [i for i, v in enumerate(self.map) if v == y]

    def is_injective(self) -> bool:
        return len(set(self.map)) == len(self.map)

    def is_bijective(self) -> bool:
        return self.dom.size == self.cod.size and self.is_injective()

    def inverse(self) -> "FinFun":
        if not self.is_bijective():
            raise DomainMismatch("function is not a bijection")
        inv = [0] * self.cod.size
        for i, v in enumerate(self.map):
            inv[v] = i
        return FinFun(self.cod, self.dom, tuple(inv))


def identity(s: FinSet | int) -> FinFun:
    if isinstance(s, int):
        s = FinSet(s)
    return FinFun(s, s, tuple(range(s.size)))


def constant(dom: int, cod: int = 1, value: int = 0) -> FinFun:
    return FinFun(FinSet(dom), FinSet(cod), (value,) * dom)


def compose_fun(g: FinFun, f: FinFun) -> FinFun:
    """Return ``g ∘ f``."""
    if f.cod.size != g.dom.size:
        raise DomainMismatch(
            f"cannot compose: codomain of f has size {f.cod.size}, domain of g has size {g.dom.size}")
    gm = g.map
    return FinFun(f.dom, g.cod, tuple(gm[i] for i in f.map))


def funs(dom: int, cod: int):
    """All functions ``dom -> cod`` in lexicographic order of their value tables."""
    d, c = FinSet(dom), FinSet(cod)
    for values in itertools.product(range(cod), repeat=dom):
        yield FinFun(d, c, values)


@dataclass(frozen=True, slots=True)
class PullbackSquare:
    """The canonical pullback ``A ×_C B`` of a cospan ``f: A → C ← B :g``.

    ``pairs[k] = (a, b)`` is the k-th apex element; ``to_left``/``to_right``
    are the coordinate projections.
    """

    apex: FinSet
    to_left: FinFun
    to_right: FinFun
    pairs: tuple[tuple[int, int], ...]

    def index(self) -> dict[tuple[int, int], int]:
        return {p: k for k, p in enumerate(self.pairs)}


def pullback(f: FinFun, g: FinFun) -> PullbackSquare:
    if f.cod.size != g.cod.size:
        raise DomainMismatch(
            f"pullback needs a cospan: codomains have sizes {f.cod.size} and {g.cod.size}")
    gfib = g.fibers()
    pairs = tuple((a, b) for a, c in enumerate(f.map) for b in gfib[c])
    apex = FinSet(len(pairs))
    return PullbackSquare(
        apex,
        FinFun(apex, f.dom, tuple(a for a, _ in pairs)),
        FinFun(apex, g.dom, tuple(b for _, b in pairs)),
        pairs,
    )


@dataclass(frozen=True, slots=True)
class DepProduct:
    """Dependent product ``q_*(pi)`` of ``pi: K → F`` along ``q: F → C``.

    ``sections[d][j]`` is the element of ``K`` chosen by the section ``d`` over
    the j-th element (in increasing order) of the fiber ``q⁻¹(proj(d))``.
    ``counit_square`` is ``D ×_C F``; ``counit`` sends ``(d, x)`` to the value
    of section ``d`` at ``x``.
    """

    base: FinFun
    pi: FinFun
    total: FinSet
    proj: FinFun
    sections: tuple[tuple[int, ...], ...]
    counit_square: PullbackSquare
    counit: FinFun

    def section(self, d: int) -> dict[int, int]:
        fiber = self.base.fiber(self.proj.map[d])
        return dict(zip(fiber, self.sections[d]))


def dependent_product(pi: FinFun, q: FinFun) -> DepProduct:
    if pi.cod.size != q.dom.size:
        raise DomainMismatch(
            f"dependent product: pi lands in a set of size {pi.cod.size}, q starts at size {q.dom.size}")
    pifib = pi.fibers()
    proj: list[int] = []
    sections: list[tuple[int, ...]] = []
    for c, fiber in enumerate(q.fibers()):
        # empty q-fiber yields the single empty section
        for choice in itertools.product(*(pifib[x] for x in fiber)):
            proj.append(c)
            sections.append(choice)
    total = FinSet(len(proj))
    projf = FinFun(total, q.cod, tuple(proj))
    square = pullback(projf, q)
    qfib = q.fibers()
    position = {}
    for fiber in qfib:
        for j, x in enumerate(fiber):
            position[x] = j
    counit = FinFun(square.apex, pi.dom,
                    tuple(sections[d][position[x]] for d, x in square.pairs))
    return DepProduct(q, pi, total, projf, tuple(sections), square, counit)


def is_pullback_square(top: FinFun, left: FinFun, right: FinFun, bottom: FinFun) -> bool:
    """Test whether the commuting square ``right∘top = bottom∘left`` is a pullback.

    Layout::

        P --top--> B
        |          |
       left      right
        v          v
        A -bottom-> C
    """
    if (top.dom.size != left.dom.size or top.cod.size != right.dom.size
            or left.cod.size != bottom.dom.size or right.cod.size != bottom.cod.size):
        return False
    if compose_fun(right, top).map != compose_fun(bottom, left).map:
        return False
    canonical = pullback(bottom, right)
    induced = set(zip(left.map, top.map))
    return len(induced) == top.dom.size == canonical.apex.size


@dataclass(frozen=True)
class MateResult:
    """Outcome of :func:`mate_check`; truthy iff the comparison is a bijection."""

    ok: bool
    comparison: FinFun
    lhs: FinFun
    rhs: FinFun

    def __bool__(self):
        return self.ok


def mate_check(f: FinFun, f_prime: FinFun, xi: FinFun, eta: FinFun, l: FinFun) -> MateResult:
    """Build the Beck-Chevalley comparison ``eta^* f_* l -> f'_* xi^* l``.

    The square is::

        x' --f'--> y'
        |          |
        xi        eta
        v          v
        x  --f-->  y

    and ``l: K → x`` is an object of the slice over ``x``.  ``lhs`` and ``rhs``
    are the two objects over ``y'``; the result records whether the canonical
    comparison between them is a bijection over ``y'``.
    """
    if not is_pullback_square(f_prime, xi, eta, f):
        raise NotPullback("square (f, f', xi, eta) is not a pullback")
    if l.cod.size != f.dom.size:
        raise DomainMismatch("slice object must land in the domain of f")

    pushed = dependent_product(l, f)
    lhs_sq = pullback(eta, pushed.proj)          # pairs (y', d)
    restricted = pullback(xi, l)                 # pairs (x', k)
    pushed_r = dependent_product(restricted.to_left, f_prime)
    restricted_idx = restricted.index()
    section_idx = {}
    for d, (yp, sec) in enumerate(zip(pushed_r.proj.map, pushed_r.sections)):
        section_idx[(yp, sec)] = d

    fprime_fibers = f_prime.fibers()
    comparison = []
    for yp, d in lhs_sq.pairs:
        phi = pushed.section(d)
        psi = tuple(restricted_idx[(xp, phi[xi.map[xp]])] for xp in fprime_fibers[yp])
        comparison.append(section_idx[(yp, psi)])
    comp = FinFun(lhs_sq.apex, pushed_r.total, tuple(comparison))
    over = compose_fun(pushed_r.proj, comp).map == lhs_sq.to_left.map
    return MateResult(over and comp.is_bijective(), comp, lhs_sq.to_left, pushed_r.proj)
