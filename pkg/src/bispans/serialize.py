"""Canonical JSON wire format for every core value.

Documents are objects carrying a ``kind`` tag; sizes are integers and maps are
arrays of indices.  :func:`dumps` emits sorted keys with no whitespace, so equal
values always serialize to identical bytes.
"""

from __future__ import annotations

import json
from typing import Any

from . import finset
from .arrfib import ArMor, ArMorClass, ArObj, ArSq, Diagram, ar_validate, from_diagram
from .bispancat import Bispan, BispanClass
from .errors import SchemaViolation
from .finset import FinFun, FinSet
from .poly import Poly
from .semiring import (INF, Boolean, FiniteSemiring, Naturals, Polynomials, Semiring, Tropical,
                       Vector)
from .spancat import Span, SpanClass

KINDS = ("finfun", "span", "bispan", "armor", "arobj", "semiring", "vector", "poly",
         "span-class", "bispan-class", "armor-class")


def dumps(value: Any) -> str:
    return json.dumps(to_json(value), sort_keys=True, separators=(",", ":"))


def loads(text: str, expect: str | None = None) -> Any:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"invalid JSON: {exc.msg}", "") from None
    return from_json(doc, expect)


# -- encoding ------------------------------------------------------------------

def _obj(o: ArObj) -> dict:
    return {"X": o.top.size, "S": o.base.size, "arrow": list(o.arrow.map)}


def _sq(q: ArSq) -> dict:
    return {"dom": _obj(q.dom), "cod": _obj(q.cod), "top": list(q.top.map),
            "bottom": list(q.bottom.map)}


def _semiring(R: Semiring) -> dict:
    if isinstance(R, FiniteSemiring):
        return {"kind": "semiring", "table": {
            "size": R.size, "add": [list(r) for r in R.add_table],
            "mul": [list(r) for r in R.mul_table], "zero": R.zero, "one": R.one}}
    if isinstance(R, Polynomials):
        return {"kind": "semiring", "builtin": "polynomial", "variables": R.variables}
    return {"kind": "semiring", "builtin": R.name}


def _poly(p: Poly) -> dict:
    return {"variables": p.variables, "terms": [[list(e), c] for e, c in p.terms]}


def _entry(R: Semiring, v) -> Any:
    if isinstance(R, Polynomials):
        return _poly(v)
    if v is INF:
        return "inf"
    return v


def to_json(value: Any) -> dict:
    if isinstance(value, FinFun):
        return {"kind": "finfun", "dom": value.dom.size, "cod": value.cod.size,
                "map": list(value.map)}
    if isinstance(value, Span):
        return {"kind": "span", "X": value.src.size, "Y": value.tgt.size, "Z": value.apex.size,
                "left": list(value.left.map), "right": list(value.right.map)}
    if isinstance(value, Bispan):
        return {"kind": "bispan", "S": value.src.size, "E": value.s.dom.size,
                "B": value.t.dom.size, "T": value.tgt.size, "s": list(value.s.map),
                "p": list(value.p.map), "t": list(value.t.map)}
    if isinstance(value, ArObj):
        return {"kind": "arobj", **_obj(value)}
    if isinstance(value, ArMor):
        return {"kind": "armor", "src": _obj(value.src), "tgt": _obj(value.tgt),
                "bottom": {"T": value.bottom.apex.size, "f": list(value.bottom.left.map),
                           "g": list(value.bottom.right.map)},
                "mid": _obj(value.mid), "back": list(value.back.map), "fwd": list(value.fwd.map)}
    if isinstance(value, Semiring):
        return _semiring(value)
    if isinstance(value, Vector):
        return {"kind": "vector", "semiring": _semiring(value.over),
                "entries": [_entry(value.over, v) for v in value.entries]}
    if isinstance(value, Poly):
        return {"kind": "poly", **_poly(value)}
    if isinstance(value, SpanClass):
        return {"kind": "span-class", "src": value.src.size, "tgt": value.tgt.size,
                "signature": [list(p) for p in value.signature], "autCount": value.aut_count}
    if isinstance(value, BispanClass):
        return {"kind": "bispan-class", "src": value.src.size, "tgt": value.tgt.size,
                "signature": [[t, list(f)] for t, f in value.signature],
                "autCount": value.aut_count}
    if isinstance(value, ArMorClass):
        return {"kind": "armor-class", "src": _obj(value.src), "tgt": _obj(value.tgt),
                "signature": [[list(rows), [list(c) for c in cols]]
                              for rows, cols in value.signature],
                "autCount": value.aut_count}
    raise TypeError(f"cannot serialize {type(value).__name__}")


# -- decoding ------------------------------------------------------------------

class _Reader:
    """Typed field access that reports failures as JSON pointers."""

    def __init__(self, doc: Any, path: str = ""):
        self.doc = doc
        self.path = path

    def fail(self, message: str, sub: str | None = None):
        raise SchemaViolation(message, self.path + ("" if sub is None else f"/{sub}"))

    def obj(self) -> dict:
        if not isinstance(self.doc, dict):
            self.fail("expected an object")
        return self.doc

    def child(self, key: str) -> "_Reader":
        d = self.obj()
        if key not in d:
            self.fail(f"missing field {key!r}", key)
        return _Reader(d[key], f"{self.path}/{key}")

    def child_at(self, i: int) -> "_Reader":
        return _Reader(self.doc[i], f"{self.path}/{i}")

    def has(self, key: str) -> bool:
        return key in self.obj()

    def nat(self, key: str) -> int:
        r = self.child(key)
        if not isinstance(r.doc, int) or isinstance(r.doc, bool) or r.doc < 0:
            r.fail("expected a natural number")
        return r.doc

    def indices(self, key: str, length: int, bound: int) -> tuple[int, ...]:
        return self.child(key).index_list(length, bound)

    def index_list(self, length: int, bound: int) -> tuple[int, ...]:
        r = self
        if not isinstance(r.doc, list):
            r.fail("expected an array of indices")
        if len(r.doc) != length:
            r.fail(f"expected {length} entries, got {len(r.doc)}")
        for i, v in enumerate(r.doc):
            if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < bound:
                r.fail(f"index must lie in 0..{bound - 1}", str(i))
        return tuple(r.doc)

    def fun(self, key: str, dom: int, cod: int) -> FinFun:
        return FinFun(FinSet(dom), FinSet(cod), self.indices(key, dom, cod))


def _read_obj(r: _Reader) -> ArObj:
    x, s = r.nat("X"), r.nat("S")
    return ArObj(r.fun("arrow", x, s))


def _read_sq(r: _Reader) -> ArSq:
    dom, cod = _read_obj(r.child("dom")), _read_obj(r.child("cod"))
    return ArSq(dom, cod, r.fun("top", dom.top.size, cod.top.size),
                r.fun("bottom", dom.base.size, cod.base.size))


def _read_armor(r: _Reader) -> ArMor:
    if r.has("raw"):
        raw = r.child("raw")
        d = Diagram(_read_sq(raw.child("s")), _read_sq(raw.child("p")), _read_sq(raw.child("t")))
        v = ar_validate(d)
        if not v:
            raw.fail("; ".join(v.diagnostics))
        return from_diagram(d)
    src, tgt, mid = (_read_obj(r.child(k)) for k in ("src", "tgt", "mid"))
    b = r.child("bottom")
    t = b.nat("T")
    bottom = Span(b.fun("f", t, src.base.size), b.fun("g", t, tgt.base.size))
    if mid.base.size != tgt.base.size:
        r.child("mid").fail("middle object must lie over the target base")
    fwd = r.fun("fwd", mid.top.size, tgt.top.size)
    y = finset.pullback(bottom.right, mid.arrow)
    if r.has("Y"):
        # explicit listing of Y: reorder back into the canonical pullback order
        yr = r.child("Y")
        if not isinstance(yr.doc, list) or len(yr.doc) != y.apex.size:
            yr.fail(f"expected the {y.apex.size} pairs of T x_S' X'")
        listed = []
        for i, pair in enumerate(yr.doc):
            if not (isinstance(pair, list) and len(pair) == 2 and tuple(pair) in y.index()):
                yr.fail("not an element of T x_S' X'", str(i))
            listed.append(tuple(pair))
        if len(set(listed)) != len(listed):
            yr.fail("pairs must be distinct")
        given = r.indices("back", y.apex.size, src.top.size)
        at = dict(zip(listed, given))
        back = tuple(at[p] for p in y.pairs)
    else:
        back = r.indices("back", y.apex.size, src.top.size)
    return ArMor(src, tgt, bottom, mid, FinFun(y.apex, src.top, back), fwd)


def _read_poly(r: _Reader) -> Poly:
    n = r.nat("variables")
    tr = r.child("terms")
    if not isinstance(tr.doc, list):
        tr.fail("expected an array of [exponents, coefficient] pairs")
    terms = []
    for i, item in enumerate(tr.doc):
        ok = (isinstance(item, list) and len(item) == 2 and isinstance(item[0], list)
              and len(item[0]) == n and all(isinstance(e, int) and e >= 0 for e in item[0])
              and isinstance(item[1], int) and item[1] > 0)
        if not ok:
            tr.fail("malformed term", str(i))
        terms.append((tuple(item[0]), item[1]))
    if [e for e, _ in terms] != sorted({e for e, _ in terms}):
        tr.fail("terms must be strictly sorted by exponent")
    return Poly(n, tuple(terms))


def _read_semiring(r: _Reader) -> Semiring:
    if r.has("table"):
        tr = r.child("table")
        n = tr.nat("size")
        tables = []
        for key in ("add", "mul"):
            t = tr.child(key)
            if not (isinstance(t.doc, list) and len(t.doc) == n):
                t.fail(f"expected a {n}x{n} table")
            for i in range(n):
                t.child_at(i).index_list(n, n)
            tables.append(tuple(tuple(row) for row in t.doc))
        zero, one = tr.nat("zero"), tr.nat("one")
        if n and (zero >= n or one >= n):
            tr.fail("zero and one must be carrier elements")
        return FiniteSemiring(n, tables[0], tables[1], zero, one)
    name = r.child("builtin")
    if name.doc == "naturals":
        return Naturals()
    if name.doc == "boolean":
        return Boolean()
    if name.doc == "tropical":
        return Tropical()
    if name.doc == "polynomial":
        return Polynomials(r.nat("variables"))
    name.fail(f"unknown builtin semiring {name.doc!r}")


def _read_entry(R: Semiring, r: _Reader):
    v = r.doc
    if isinstance(R, Polynomials):
        p = _read_poly(r)
        if p.variables != R.variables:
            r.fail("polynomial over the wrong number of variables")
        return p
    if isinstance(R, Tropical) and v == "inf":
        return INF
    if not R.contains(v):
        r.fail(f"not an element of the {R.name} semiring")
    return v


def _read_vector(r: _Reader) -> Vector:
    R = _read_semiring(r.child("semiring"))
    er = r.child("entries")
    if not isinstance(er.doc, list):
        er.fail("expected an array")
    return Vector(R, tuple(_read_entry(R, er.child_at(i)) for i in range(len(er.doc))))


def _infer_kind(d: dict) -> str | None:
    keys = set(d)
    if {"S", "E", "B", "T", "s", "p", "t"} <= keys:
        return "bispan"
    if {"left", "right"} <= keys:
        return "span"
    if {"src", "tgt", "bottom"} <= keys or "raw" in keys:
        return "armor"
    if {"dom", "cod", "map"} <= keys:
        return "finfun"
    if {"X", "S", "arrow"} <= keys:
        return "arobj"
    if "entries" in keys:
        return "vector"
    if "table" in keys or "builtin" in keys:
        return "semiring"
    if {"variables", "terms"} <= keys:
        return "poly"
    return None


def from_json(doc: Any, expect: str | None = None) -> Any:
    r = _Reader(doc)
    d = r.obj()
    kind = d.get("kind") or _infer_kind(d)
    if kind is None:
        r.fail("cannot determine the document kind")
    if kind not in KINDS:
        r.fail(f"unknown kind {kind!r}", "kind")
    if expect is not None and kind != expect:
        r.fail(f"expected a {expect} document, got {kind}", "kind")
    if kind == "finfun":
        return r.fun("map", r.nat("dom"), r.nat("cod"))
    if kind == "span":
        x, y, z = r.nat("X"), r.nat("Y"), r.nat("Z")
        return Span(r.fun("left", z, x), r.fun("right", z, y))
    if kind == "bispan":
        s, e, b, t = (r.nat(k) for k in ("S", "E", "B", "T"))
        return Bispan(r.fun("s", e, s), r.fun("p", e, b), r.fun("t", b, t))
    if kind == "arobj":
        return _read_obj(r)
    if kind == "armor":
        return _read_armor(r)
    if kind == "semiring":
        return _read_semiring(r)
    if kind == "vector":
        return _read_vector(r)
    if kind == "poly":
        return _read_poly(r)
    if kind in ("span-class", "bispan-class", "armor-class"):
        return _read_class(r, kind)
    raise AssertionError(kind)


def _read_class(r: _Reader, kind: str):
    sr = r.child("signature")
    try:
        if kind == "span-class":
            sig = tuple(tuple(int(v) for v in p) for p in sr.doc)
            return SpanClass(FinSet(r.nat("src")), FinSet(r.nat("tgt")), sig, r.nat("autCount"))
        if kind == "bispan-class":
            sig = tuple((int(t), tuple(int(v) for v in f)) for t, f in sr.doc)
            return BispanClass(FinSet(r.nat("src")), FinSet(r.nat("tgt")), sig, r.nat("autCount"))
        src, tgt = _read_obj(r.child("src")), _read_obj(r.child("tgt"))
        sig = tuple((tuple(int(v) for v in rows), tuple(tuple(int(v) for v in c) for c in cols))
                    for rows, cols in sr.doc)
        return ArMorClass(src, tgt, sig, r.nat("autCount"))
    except SchemaViolation:
        raise
    except (TypeError, ValueError):
        sr.fail("malformed signature")
