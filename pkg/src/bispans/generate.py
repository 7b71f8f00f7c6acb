"""Exhaustive and seeded-random instance generators for the property suites."""

from __future__ import annotations

import itertools
import random

from . import finset
from .arrfib import ArMor, ArObj, armor_from_class, ar_canon
from .bispancat import Bispan, bispan_canon, bispan_from_class
from .finset import FinFun, FinSet
from .spancat import Span, span_canon, span_from_class


def random_fun(rng: random.Random, dom: int, cod: int) -> FinFun:
    if dom and not cod:
        raise ValueError("no functions from a nonempty set to the empty set")
    return FinFun(FinSet(dom), FinSet(cod), tuple(rng.randrange(cod) for _ in range(dom)))


def _size(rng, max_size, lo=0):
    return rng.randint(lo, max_size)


def random_span(rng: random.Random, src: int, tgt: int, max_size: int) -> Span:
    z = _size(rng, max_size) if src and tgt else 0
    return Span(random_fun(rng, z, src), random_fun(rng, z, tgt))


def random_bispan(rng: random.Random, src: int, tgt: int, max_size: int) -> Bispan:
    b = _size(rng, max_size) if tgt else 0
    e = _size(rng, max_size) if (src and b) else 0
    return Bispan(random_fun(rng, e, src), random_fun(rng, e, b), random_fun(rng, b, tgt))


def all_spans(max_size: int, boundary: tuple[int, int] | None = None):
    """Every span with all three sets of size at most ``max_size``."""
    pairs = [boundary] if boundary else itertools.product(range(max_size + 1), repeat=2)
    for x, y in pairs:
        for z in range(max_size + 1):
            for left in finset.funs(z, x):
                for right in finset.funs(z, y):
                    yield Span(left, right)


def all_bispans(max_size: int, src: int, tgt: int):
    """Every bispan ``src ⇒ tgt`` with ``|E|, |B| <= max_size``."""
    for e in range(max_size + 1):
        for b in range(max_size + 1):
            yield from _bispans_sized(src, tgt, e, b)


def _bispans_sized(src, tgt, e, b):
    for s in finset.funs(e, src):
        for p in finset.funs(e, b):
            for t in finset.funs(b, tgt):
                yield Bispan(s, p, t)


def span_class_reps(max_size: int, src: int, tgt: int) -> list[Span]:
    seen = {}
    for sp in all_spans(max_size, (src, tgt)):
        seen.setdefault(span_canon(sp), sp)
    return [span_from_class(c) for c in seen]


def bispan_class_reps(max_size: int, src: int, tgt: int) -> list[Bispan]:
    seen = {}
    for b in all_bispans(max_size, src, tgt):
        seen.setdefault(bispan_canon(b), b)
    return [bispan_from_class(c) for c in seen]


def all_arobjs(max_size: int):
    for s in range(max_size + 1):
        for x in range(max_size + 1):
            for f in finset.funs(x, s):
                yield ArObj(f)


def all_armors(src: ArObj, tgt: ArObj, max_size: int):
    """Every normal-form morphism ``src -> tgt`` with ``T, X', Y`` of size at most ``max_size``."""
    s_size, sp_size = src.base.size, tgt.base.size
    src_fibers = src.arrow.fibers()
    for t_size in range(max_size + 1):
        for f in finset.funs(t_size, s_size):
            for g in finset.funs(t_size, sp_size):
                bottom = Span(f, g)
                for xp in range(max_size + 1):
                    for fwd in finset.funs(xp, tgt.top.size):
                        mid = ArObj(finset.compose_fun(tgt.arrow, fwd))
                        y = finset.pullback(g, mid.arrow)
                        if y.apex.size > max_size:
                            continue
                        choices = [src_fibers[f.map[t]] for t, _ in y.pairs]
                        for back in itertools.product(*choices):
                            yield ArMor(src, tgt, bottom, mid, FinFun(y.apex, src.top, back), fwd)


def armor_class_reps(src: ArObj, tgt: ArObj, max_size: int) -> list[ArMor]:
    seen = {}
    for m in all_armors(src, tgt, max_size):
        seen.setdefault(ar_canon(m), m)
    return [armor_from_class(c) for c in seen]


def random_arobj(rng: random.Random, max_size: int, base: int | None = None) -> ArObj:
    s = _size(rng, max_size) if base is None else base
    x = _size(rng, max_size) if s else 0
    return ArObj(random_fun(rng, x, s))


def random_armor(rng: random.Random, src: ArObj, max_size: int,
                 tgt: ArObj | None = None) -> ArMor:
    """A random valid morphism out of ``src``; ``Y`` is kept at size at most ``max_size``."""
    if tgt is None:
        tgt = random_arobj(rng, max_size)
    s_size, sp_size = src.base.size, tgt.base.size
    src_fibers = src.arrow.fibers()
    while True:
        # T may only hit base points with nonempty X-fibers when Y sees them
        t_size = _size(rng, max_size) if (s_size and sp_size) else 0
        f = random_fun(rng, t_size, s_size)
        g = random_fun(rng, t_size, sp_size)
        xp = _size(rng, max_size) if tgt.top.size else 0
        fwd = random_fun(rng, xp, tgt.top.size)
        mid = ArObj(finset.compose_fun(tgt.arrow, fwd))
        y = finset.pullback(g, mid.arrow)
        if y.apex.size > max_size:
            continue
        choices = [src_fibers[f.map[t]] for t, _ in y.pairs]
        if any(not c for c in choices):
            continue
        back = tuple(rng.choice(c) for c in choices)
        return ArMor(src, tgt, Span(f, g), mid, FinFun(y.apex, src.top, back), fwd)


def random_w_map(rng: random.Random, max_size: int, src_base: int | None = None) -> ArMor:
    """A random morphism whose top row consists of bijections."""
    while True:
        s = _size(rng, max_size) if src_base is None else src_base
        sp = _size(rng, max_size)
        t = _size(rng, max_size) if (s and sp) else 0
        f = random_fun(rng, t, s)
        g = random_fun(rng, t, sp)
        fib = g.fibers()
        # X' may only sit over points of S' with exactly one preimage under g
        allowed = [u for u in range(sp) if len(fib[u]) == 1]
        xp = _size(rng, max_size) if allowed else 0
        mid = ArObj(FinFun(FinSet(xp), FinSet(sp), tuple(rng.choice(allowed) for _ in range(xp))))
        y = finset.pullback(g, mid.arrow)
        return w_map_from(f, g, mid, _perm(rng, y.apex.size), _perm(rng, xp))


def _perm(rng, n):
    p = list(range(n))
    rng.shuffle(p)
    return tuple(p)


def w_map_from(f: FinFun, g: FinFun, mid: ArObj, back_perm, fwd_perm) -> ArMor:
    """Assemble the W-map with bottom ``(f, g)``, middle ``mid`` and the given top bijections."""
    y = finset.pullback(g, mid.arrow)
    n = y.apex.size
    src_arrow = [0] * n
    for k, (t, _) in enumerate(y.pairs):
        src_arrow[back_perm[k]] = f.map[t]
    src = ArObj(FinFun(FinSet(n), f.cod, tuple(src_arrow)))
    xp = mid.top.size
    tgt_arrow = [0] * xp
    for x in range(xp):
        tgt_arrow[fwd_perm[x]] = mid.arrow.map[x]
    tgt = ArObj(FinFun(FinSet(xp), mid.base, tuple(tgt_arrow)))
    return ArMor(src, tgt, Span(f, g), mid, FinFun(y.apex, FinSet(n), tuple(back_perm)),
                 FinFun(FinSet(xp), FinSet(xp), tuple(fwd_perm)))


def all_w_maps(max_size: int, permute: bool = True):
    """Every W-map with bottom sets and ``X'`` of size at most ``max_size``.

    With ``permute`` the top bijections range over all permutations,
    otherwise they are identities.
    """
    for s in range(max_size + 1):
        for sp in range(max_size + 1):
            for t in range(max_size + 1):
                for f in finset.funs(t, s):
                    for g in finset.funs(t, sp):
                        fib = g.fibers()
                        allowed = [u for u in range(sp) if len(fib[u]) == 1]
                        for xp in range(max_size + 1):
                            for mid_map in itertools.product(allowed, repeat=xp):
                                mid = ArObj(FinFun(FinSet(xp), FinSet(sp), mid_map))
                                n = finset.pullback(g, mid.arrow).apex.size
                                backs = itertools.permutations(range(n)) if permute else [tuple(range(n))]
                                for bp in backs:
                                    fwds = itertools.permutations(range(xp)) if permute else [tuple(range(xp))]
                                    for fp in fwds:
                                        yield w_map_from(f, g, mid, bp, fp)
