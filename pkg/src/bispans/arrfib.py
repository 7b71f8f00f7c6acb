"""Morphisms of ``Bispan_{pb,teq}(Ar(F))`` and evaluation at the source.

An object is a function ``X -> S``.  A morphism from ``X -> S`` to
``X'' -> S'`` is stored in normal form as

* a span ``S <-f- T -g-> S'`` (``bottom``),
* an object ``X' -> S'`` (``mid``),
* ``back: Y -> X`` lying over ``f``, where ``Y = T ×_{S'} X'`` is rebuilt on
  demand from ``g`` and ``mid``,
* ``fwd: X' -> X''`` lying over the identity of ``S'``.

Fiberwise this is a family of spans
``Π_{t ∈ g⁻¹(s')} X_{f(t)} <- X'_{s'} -> X''_{s'}``.  ``ev0`` forgets the
bottom row and returns the bispan ``X <- Y -> X' -> X''``.

Composition runs :func:`bispans.bispancat.compose_diagrams` over the arrow
category backend: pullbacks are computed componentwise and dependent
products of target-equivalence maps are computed on the source component.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

from . import finset
from .bispancat import Bispan, Diagram, compose_diagrams
from .errors import BoundaryMismatch, InvalidMorphism, NotInW, ResourceLimit, ShapeMismatch
from .finset import FinFun, FinSet, PullbackSquare, compose_fun, identity, is_pullback_square
from .spancat import Span, span_id

CANON_PERMUTATION_LIMIT = 1_000_000


@dataclass(frozen=True, slots=True)
class ArObj:
    arrow: FinFun

    @property
    def top(self) -> FinSet:
        return self.arrow.dom

    @property
    def base(self) -> FinSet:
        return self.arrow.cod

    @classmethod
    def of(cls, values, base: int) -> "ArObj":
        return cls(FinFun.of(tuple(values), base))


@dataclass(frozen=True, slots=True)
class ArSq:
    """A commutative square, i.e. a morphism ``dom -> cod`` of ``Ar(F)``."""

    dom: ArObj
    cod: ArObj
    top: FinFun
    bottom: FinFun

    def commutes(self) -> bool:
        return (compose_fun(self.cod.arrow, self.top).map
                == compose_fun(self.bottom, self.dom.arrow).map)

    def is_pullback(self) -> bool:
        return is_pullback_square(self.top, self.dom.arrow, self.cod.arrow, self.bottom)

    def is_target_equivalence(self) -> bool:
        return self.bottom.is_bijective()


@dataclass(frozen=True, slots=True)
class ArPullback:
    apex: ArObj
    to_left: ArSq
    to_right: ArSq
    top: PullbackSquare
    bottom: PullbackSquare


@dataclass(frozen=True, slots=True)
class ArDepProduct:
    total: ArObj
    proj: ArSq
    counit_square: ArPullback
    counit: ArSq
    top: finset.DepProduct


class ArrowBackend:
    """``(Ar(F), pullback squares, target equivalences)``."""

    @staticmethod
    def compose(g: ArSq, f: ArSq) -> ArSq:
        return ArSq(f.dom, g.cod, compose_fun(g.top, f.top), compose_fun(g.bottom, f.bottom))

    @staticmethod
    def pullback(f: ArSq, g: ArSq) -> ArPullback:
        top = finset.pullback(f.top, g.top)
        bottom = finset.pullback(f.bottom, g.bottom)
        index = bottom.index()
        a, b = f.dom.arrow.map, g.dom.arrow.map
        arrow = FinFun(top.apex, bottom.apex, tuple(index[(a[i], b[j])] for i, j in top.pairs))
        apex = ArObj(arrow)
        return ArPullback(apex,
                          ArSq(apex, f.dom, top.to_left, bottom.to_left),
                          ArSq(apex, g.dom, top.to_right, bottom.to_right),
                          top, bottom)

    @classmethod
    def dependent_product(cls, pi: ArSq, q: ArSq) -> ArDepProduct:
        """Right adjoint to pullback along ``q``, restricted to target equivalences.

        Over an arrow ``F0 -> F1`` the target-equivalence slice is the slice of
        ``F`` over ``F0``, so the product is formed on the source component and
        the target is kept as ``C1``.
        """
        if not pi.is_target_equivalence():
            raise InvalidMorphism("dependent product needs a target-equivalence square")
        if not q.is_pullback():
            raise InvalidMorphism("dependent product needs a pullback square to push along")
        c = q.cod
        top = finset.dependent_product(pi.top, q.top)
        total = ArObj(compose_fun(c.arrow, top.proj))
        proj = ArSq(total, c, top.proj, identity(c.base))
        square = cls.pullback(proj, q)
        counit = ArSq(square.apex, pi.dom, top.counit,
                      compose_fun(pi.bottom.inverse(), square.to_right.bottom))
        return ArDepProduct(total, proj, square, counit, top)


ARROWS = ArrowBackend()


@dataclass(frozen=True)
class ArMor:
    src: ArObj
    tgt: ArObj
    bottom: Span
    mid: ArObj
    back: FinFun
    fwd: FinFun

    @cached_property
    def y(self) -> PullbackSquare:
        """``Y = T ×_{S'} X'`` with pairs ``(t, x')``."""
        return finset.pullback(self.bottom.right, self.mid.arrow)


@dataclass
class Validation:
    ok: bool
    diagnostics: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.ok


def _check_armor(m: ArMor) -> list[str]:
    d = []
    f, g = m.bottom.left, m.bottom.right
    if f.cod.size != m.src.base.size:
        d.append(f"bottom span: left leg lands in size {f.cod.size}, source base has size {m.src.base.size}")
    if g.cod.size != m.tgt.base.size:
        d.append(f"bottom span: right leg lands in size {g.cod.size}, target base has size {m.tgt.base.size}")
    if m.mid.base.size != m.tgt.base.size:
        d.append("middle object must lie over the target base")
    if d:
        return d
    y = m.y
    if m.back.dom.size != y.apex.size or m.back.cod.size != m.src.top.size:
        d.append(f"left square: back must map Y (size {y.apex.size}) to X (size {m.src.top.size})")
    elif compose_fun(m.src.arrow, m.back).map != compose_fun(f, y.to_left).map:
        bad = next(k for k, (t, _) in enumerate(y.pairs)
                   if m.src.arrow.map[m.back.map[k]] != f.map[t])
        d.append(f"left square does not commute at Y element {bad} = {y.pairs[bad]}")
    if m.fwd.dom.size != m.mid.top.size or m.fwd.cod.size != m.tgt.top.size:
        d.append("right triangle: fwd must map X' to X''")
    elif compose_fun(m.tgt.arrow, m.fwd).map != m.mid.arrow.map:
        bad = next(i for i in range(m.fwd.dom.size)
                   if m.tgt.arrow.map[m.fwd.map[i]] != m.mid.arrow.map[i])
        d.append(f"right triangle does not commute over the target base at X' element {bad}")
    return d


def _check_diagram(d: Diagram) -> list[str]:
    out = []
    s, p, t = d
    for name, sq in (("s", s), ("p", p), ("t", t)):
        if not sq.commutes():
            out.append(f"square {name} does not commute")
    if s.dom != p.dom:
        out.append("s and p must share their source arrow")
    if p.cod != t.dom:
        out.append("p must land in the source of t")
    if not out:
        if not p.is_pullback():
            out.append("square p (the forward square) is not a pullback")
        if not t.is_target_equivalence():
            out.append("square t does not have an invertible bottom map")
    return out


def ar_validate(m: ArMor | Diagram) -> Validation:
    """Check the invariants of a normal-form morphism or of a raw bispan of arrows."""
    diags = _check_diagram(m) if isinstance(m, Diagram) else _check_armor(m)
    return Validation(not diags, diags)


def _require_valid(m: ArMor):
    v = ar_validate(m)
    if not v:
        raise InvalidMorphism("; ".join(v.diagnostics))


def to_diagram(m: ArMor) -> Diagram:
    """The raw bispan of arrows ``src <- (Y -> T) -> mid -> tgt``."""
    y = m.y
    e = ArObj(y.to_left)
    s_base = FinSet(m.tgt.base.size)
    return Diagram(
        ArSq(e, m.src, m.back, m.bottom.left),
        ArSq(e, m.mid, y.to_right, m.bottom.right),
        ArSq(m.mid, m.tgt, m.fwd, identity(s_base)),
    )


def from_diagram(d: Diagram) -> ArMor:
    """Normalize a raw bispan of arrows, absorbing the invertible bottom of ``t``."""
    v = ar_validate(d)
    if not v:
        raise InvalidMorphism("; ".join(v.diagnostics))
    s, p, t = d
    e, mid0 = p.dom, p.cod
    g = compose_fun(t.bottom, p.bottom)
    mid = ArObj(compose_fun(t.bottom, mid0.arrow))
    y = finset.pullback(g, mid.arrow)
    where = {(e.arrow.map[k], p.top.map[k]): k for k in range(e.top.size)}
    try:
        back = tuple(s.top.map[where[pair]] for pair in y.pairs)
    except KeyError as exc:
        raise InvalidMorphism("forward square is not a pullback") from exc
    return ArMor(s.cod, t.cod, Span(s.bottom, g), mid,
                 FinFun(y.apex, s.cod.top, back), t.top)


def ar_compose(second: ArMor, first: ArMor) -> ArMor:
    if first.tgt != second.src:
        raise BoundaryMismatch("target of first morphism differs from source of second")
    _require_valid(first)
    _require_valid(second)
    return from_diagram(compose_diagrams(ARROWS, to_diagram(second), to_diagram(first)))


def ar_forward(src: ArObj, tgt: ArObj, top: FinFun) -> ArMor:
    """The morphism over the identity span given by a map of arrows over the identity of the base."""
    if src.base != tgt.base:
        raise BoundaryMismatch("forward map must stay over the same base")
    y = finset.pullback(identity(src.base), src.arrow)
    m = ArMor(src, tgt, span_id(src.base), src, y.to_right, top)
    _require_valid(m)
    return m


def ar_identity(obj: ArObj) -> ArMor:
    return ar_forward(obj, obj, identity(obj.top))


def ev0(m: ArMor) -> Bispan:
    _require_valid(m)
    return Bispan(m.back, m.y.to_right, m.fwd)


# -- canonical classes -------------------------------------------------------

@dataclass(frozen=True, slots=True)
class ArMorClass:
    """Iso class of a morphism with ``src`` and ``tgt`` fixed pointwise.

    ``signature[s']`` describes the fiber over ``s'``: the sorted ``f``-labels of
    ``g⁻¹(s')`` and the sorted columns ``(fwd(x'), back(t_1, x'), ...)`` for
    ``x' ∈ mid⁻¹(s')`` under the row order minimizing the description.
    """

    src: ArObj
    tgt: ArObj
    signature: tuple
    aut_count: int


def _block_orderings(rows: list[int], labels: list[int]):
    """Orderings of ``rows`` sorted by label, permuting freely inside equal-label blocks."""
    blocks = [list(grp) for _, grp in itertools.groupby(sorted(rows, key=lambda r: labels[r]),
                                                       key=lambda r: labels[r])]
    for combo in itertools.product(*(itertools.permutations(b) for b in blocks)):
        yield [r for block in combo for r in block]


def ar_canon(m: ArMor) -> ArMorClass:
    _require_valid(m)
    f = m.bottom.left.map
    y_index = m.y.index()
    rows_by_base = m.bottom.right.fibers()
    cols_by_base = m.mid.arrow.fibers()
    signature = []
    aut = 1
    for sp in range(m.tgt.base.size):
        rows, cols = rows_by_base[sp], cols_by_base[sp]
        label_blocks = {}
        for r in rows:
            label_blocks[f[r]] = label_blocks.get(f[r], 0) + 1
        work = math.prod(math.factorial(k) for k in label_blocks.values())
        if not cols:
            signature.append((tuple(sorted(f[r] for r in rows)), ()))
            aut *= work
            continue
        if work > CANON_PERMUTATION_LIMIT:
            raise ResourceLimit(f"canonicalization would try {work} row orderings")
        best = None
        hits = 0
        for order in _block_orderings(rows, f):
            columns = tuple(sorted(
                (m.fwd.map[x],) + tuple(m.back.map[y_index[(t, x)]] for t in order)
                for x in cols))
            if best is None or columns < best:
                best, hits = columns, 1
            elif columns == best:
                hits += 1
        row_labels = tuple(sorted(f[r] for r in rows))
        signature.append((row_labels, best))
        aut *= hits
        for k in _multiplicities(best):
            aut *= math.factorial(k)
    return ArMorClass(m.src, m.tgt, tuple(signature), aut)


def _multiplicities(items) -> list[int]:
    return [len(list(grp)) for _, grp in itertools.groupby(items)]


def armor_from_class(c: ArMorClass) -> ArMor:
    f, g, mid, fwd = [], [], [], []
    back_at: dict[tuple[int, int], int] = {}
    for sp, (row_labels, columns) in enumerate(c.signature):
        t0 = len(f)
        f.extend(row_labels)
        g.extend([sp] * len(row_labels))
        for col in columns:
            x = len(mid)
            mid.append(sp)
            fwd.append(col[0])
            for i, v in enumerate(col[1:]):
                back_at[(t0 + i, x)] = v
    bottom = Span.of(c.src.base.size, c.tgt.base.size, f, g)
    mid_obj = ArObj.of(mid, c.tgt.base.size)
    y = finset.pullback(bottom.right, mid_obj.arrow)
    back = FinFun(y.apex, c.src.top, tuple(back_at[p] for p in y.pairs))
    return ArMor(c.src, c.tgt, bottom, mid_obj, back, FinFun.of(fwd, c.tgt.top.size))


def ar_equivalent(a: ArMor, b: ArMor) -> bool:
    ca, cb = ar_canon(a), ar_canon(b)
    return (ca.src, ca.tgt, ca.signature) == (cb.src, cb.tgt, cb.signature)


# -- the classes W and S -------------------------------------------------------

class MorClass(str, enum.Enum):
    IN_S = "inS"
    IN_W = "inW"
    COCART_OVER_BACKWARD = "cocartOverBackward"
    GENERIC = "generic"


def is_in_w(m: ArMor) -> bool:
    """Top row ``X <- Y -> X' -> X''`` consists of bijections, i.e. ``ev0(m)`` is invertible."""
    _require_valid(m)
    return m.back.is_bijective() and m.y.to_right.is_bijective() and m.fwd.is_bijective()


def is_in_s(m: ArMor) -> bool:
    """In ``W`` with a bijective forward leg below: iso to a backward map with identity top row."""
    return is_in_w(m) and m.bottom.right.is_bijective()


def is_cocartesian_lift(m: ArMor) -> bool:
    """Backward bottom, invertible ``fwd``, and a pullback left square ``Y -> X`` over ``f``."""
    _require_valid(m)
    if not (m.bottom.right.is_bijective() and m.fwd.is_bijective()):
        return False
    y = m.y
    return is_pullback_square(m.back, y.to_left, m.src.arrow, m.bottom.left)


def is_literal_s(m: ArMor) -> bool:
    """On-the-nose shape: bottom forward leg and top row are identities."""
    g = m.bottom.right
    if g.map != tuple(range(g.dom.size)) or g.dom.size != g.cod.size:
        return False
    y = m.y
    same = (m.src.top.size == m.mid.top.size == m.tgt.top.size
            and y.to_right.map == tuple(range(y.apex.size)))
    return (same and m.back.map == tuple(range(m.back.dom.size))
            and m.fwd.map == tuple(range(m.fwd.dom.size)))


def classify_map(m: ArMor) -> MorClass:
    if is_in_s(m):
        return MorClass.IN_S
    if is_in_w(m):
        return MorClass.IN_W
    if is_cocartesian_lift(m):
        return MorClass.COCART_OVER_BACKWARD
    return MorClass.GENERIC


def classify_details(m: ArMor) -> dict[str, Any]:
    return {
        "tag": classify_map(m).value,
        "inS": is_in_s(m),
        "inS_literal": is_literal_s(m),
        "inW": is_in_w(m),
        "cocartOverBackward": is_cocartesian_lift(m),
    }


def cocart_lift(backward: Span, at: ArObj) -> ArMor:
    """The cocartesian lift of ``S <-f- T = T`` starting at ``X -> S``: ``Y = X ×_S T``."""
    f, right = backward.left, backward.right
    if right.dom.size != right.cod.size or right.map != tuple(range(right.dom.size)):
        raise ShapeMismatch("cocartesian lifts exist here only over spans S <- T = T")
    if f.cod.size != at.base.size:
        raise BoundaryMismatch("the backward span must start at the base of the object")
    yc = finset.pullback(at.arrow, f)
    mid = ArObj(yc.to_right)
    y = finset.pullback(right, mid.arrow)
    back = compose_fun(yc.to_left, y.to_right)
    return ArMor(at, mid, backward, mid, back, identity(mid.top))


def backward_generator(obj: ArObj, over: FinFun) -> ArMor:
    """The backward map from ``X -a-> S`` to ``X -b-> T'`` with identity top, where ``over∘b = a``.

    ``over: T' -> S``; the arrow ``b`` is recovered as the unique lift, so
    ``over`` must be injective on the image of ``obj.arrow``.
    """
    lift = []
    for x in range(obj.top.size):
        candidates = [u for u in range(over.dom.size) if over.map[u] == obj.arrow.map[x]]
        if len(candidates) != 1:
            raise ShapeMismatch("no unique lift of the arrow through the bottom map")
        lift.append(candidates[0])
    return backward_generator_along(obj, FinFun(obj.top, over.dom, tuple(lift)), over)


def backward_generator_along(obj: ArObj, b: FinFun, over: FinFun) -> ArMor:
    """Backward map of shape ``(X -a-> S) <- (X -b-> T')`` with identity top, ``over∘b = a``."""
    if compose_fun(over, b).map != obj.arrow.map:
        raise ShapeMismatch("over ∘ b must equal the arrow of the object")
    tgt = ArObj(b)
    y = finset.pullback(identity(over.dom), b)
    m = ArMor(obj, tgt, Span(over, identity(over.dom)), tgt, y.to_right, identity(obj.top))
    _require_valid(m)
    return m


def top_identity_map(obj: ArObj, g: FinFun) -> ArMor:
    """The map ``(X -a-> T) -> (X -g∘a-> S)`` with identity top over ``g``.

    Valid only when the square ``(id_X, g)`` is a pullback; otherwise
    :class:`InvalidMorphism` carries the diagnostic.
    """
    if g.dom.size != obj.base.size:
        raise BoundaryMismatch("g must start at the base of the object")
    top = identity(obj.top)
    tgt = ArObj(compose_fun(g, obj.arrow))
    square = ArSq(obj, tgt, top, g)
    return from_diagram(Diagram(ArSq(obj, obj, top, identity(obj.base)), square,
                                ArSq(tgt, tgt, top, identity(tgt.base))))


@dataclass
class WCertificate:
    """Evidence that any functor inverting ``S`` inverts ``m``.

    ``decomposition`` composes (first to last) to ``m`` up to class.  When the
    last factor ``h`` is not itself in ``S``, ``partner`` is an ``S``-map with
    ``partner ∘ h`` in ``S``, so ``h`` is inverted by two-out-of-three.
    """

    morphism: ArMor
    decomposition: list[ArMor]
    partner: ArMor | None = None
    partner_composite: ArMor | None = None
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def verified(self) -> bool:
        return bool(self.checks) and all(self.checks.values())


def w_factor_through_s(m: ArMor) -> WCertificate:
    if not is_in_w(m):
        raise NotInW("morphism does not have a top row of bijections")
    if is_in_s(m):
        return WCertificate(m, [m], checks={"m in S": True})

    y = m.y
    beta_inv = m.back.inverse()
    a = compose_fun(y.to_left, beta_inv)  # X -> T
    t_set = m.bottom.apex
    first = backward_generator_along(m.src, a, m.bottom.left)
    via = first.tgt
    h = ArMor(via, m.tgt, Span(identity(t_set), m.bottom.right), m.mid, m.back, m.fwd)
    _require_valid(h)
    partner = backward_generator_along(m.tgt, identity(m.tgt.top), m.tgt.arrow)
    composite = ar_compose(partner, h)
    recomposed = ar_compose(h, first)
    checks = {
        "first factor in S": is_in_s(first),
        "second factor in W": is_in_w(h),
        "factors recompose to m": ar_equivalent(recomposed, m),
        "partner in S": is_in_s(partner),
        "partner after second factor in S": is_in_s(composite),
    }
    return WCertificate(m, [first, h], partner, composite, checks)
