import json
import random

import pytest

from bispans import serialize
from bispans.arrfib import ar_canon, to_diagram
from bispans.bispancat import Bispan, bispan_canon
from bispans.errors import SchemaViolation
from bispans.generate import random_armor, random_arobj, random_bispan, random_fun, random_span
from bispans.semiring import INF, Tropical, Vector, integers_mod
from bispans.spancat import span_canon


def test_bispan_example_is_canonicalized_once():
    text = '{"S":1,"E":2,"B":1,"T":1,"s":[0,0],"p":[0,0],"t":[0]}'
    b = serialize.loads(text)
    assert b == Bispan.of(1, 1, [0, 0], [0, 0], [0])
    canonical = serialize.dumps(b)
    assert canonical == '{"B":1,"E":2,"S":1,"T":1,"kind":"bispan","p":[0,0],"s":[0,0],"t":[0]}'
    assert serialize.dumps(serialize.loads(canonical)) == canonical


def test_armor_without_y_listing_and_with_reordered_y():
    rng = random.Random(0)
    for _ in range(100):
        m = random_armor(rng, random_arobj(rng, 3), 3)
        doc = serialize.to_json(m)
        assert serialize.from_json(doc) == m
        pairs = [list(p) for p in m.y.pairs]
        order = list(range(len(pairs)))
        rng.shuffle(order)
        listed = dict(doc, Y=[pairs[k] for k in order], back=[m.back.map[k] for k in order])
        assert serialize.from_json(listed) == m


def test_raw_armor_is_normalized():
    rng = random.Random(1)
    for _ in range(50):
        m = random_armor(rng, random_arobj(rng, 3), 3)
        s, p, t = to_diagram(m)
        sq = lambda q: {"dom": {"X": q.dom.top.size, "S": q.dom.base.size, "arrow": list(q.dom.arrow.map)},
                        "cod": {"X": q.cod.top.size, "S": q.cod.base.size, "arrow": list(q.cod.arrow.map)},
                        "top": list(q.top.map), "bottom": list(q.bottom.map)}
        doc = {"kind": "armor", "raw": {"s": sq(s), "p": sq(p), "t": sq(t)}}
        assert serialize.from_json(doc) == m


def test_vector_over_table_keeps_table():
    R = integers_mod(3)
    v = Vector(R, (2, 0, 1))
    back = serialize.loads(serialize.dumps(v))
    assert back == v and back.over.add_table == R.add_table


def test_tropical_infinity():
    v = Vector(Tropical(), (INF, 0, 4))
    text = serialize.dumps(v)
    assert '"inf"' in text and serialize.loads(text).entries[0] is INF


def test_round_trips_are_byte_stable():
    rng = random.Random(2)
    for _ in range(200):
        values = [random_fun(rng, 3, 2), random_span(rng, 2, 3, 3), random_bispan(rng, 3, 2, 3),
                  random_arobj(rng, 3)]
        values += [span_canon(values[1]), bispan_canon(values[2])]
        m = random_armor(rng, values[3], 3)
        values += [m, ar_canon(m)]
        for v in values:
            text = serialize.dumps(v)
            assert serialize.loads(text) == v
            assert serialize.dumps(serialize.loads(text)) == text


@pytest.mark.parametrize("text,path", [
    ('{"kind":"span","X":1,"Y":1,"Z":1,"left":[3],"right":[0]}', "/left/0"),
    ('{"kind":"bispan","S":1,"E":1,"B":1,"T":1,"s":[0],"p":[0]}', "/t"),
    ('{"kind":"finfun","dom":2,"cod":1,"map":[0]}', "/map"),
    ('{"kind":"vector","semiring":{"builtin":"boolean"},"entries":[1]}', "/entries/0"),
    ('{"kind":"semiring","table":{"size":2,"add":[[0,1],[1,2]],"mul":[[0,0],[0,1]],"zero":0,"one":1}}',
     "/table/add/1/1"),
    ('{"kind":"bogus"}', "/kind"),
    ('[1,2]', ""),
])
def test_schema_violations_carry_json_pointers(text, path):
    with pytest.raises(SchemaViolation) as info:
        serialize.loads(text)
    assert info.value.path == path


def test_invalid_json():
    with pytest.raises(SchemaViolation):
        serialize.loads("{not json")


def test_expected_kind():
    with pytest.raises(SchemaViolation):
        serialize.loads(json.dumps({"kind": "finfun", "dom": 0, "cod": 0, "map": []}), expect="span")
