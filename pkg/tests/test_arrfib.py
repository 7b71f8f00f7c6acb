import itertools
import random

import pytest

from bispans import arrfib
from bispans.arrfib import (ArMor, ArObj, ArSq, MorClass, ar_canon, ar_compose, ar_equivalent, ar_forward,
                            ar_identity, ar_validate, armor_from_class, backward_generator,
                            backward_generator_along, classify_map, cocart_lift, ev0, from_diagram,
                            is_in_s, is_in_w, to_diagram, top_identity_map, w_factor_through_s)
from bispans.bispancat import Diagram, bispan_canon, bispan_compose, bispan_id, bispan_is_invertible
from bispans.errors import BoundaryMismatch, InvalidMorphism, NotInW, ResourceLimit, ShapeMismatch
from bispans.finset import FinFun, identity, pullback
from bispans.generate import (all_armors, all_arobjs, random_armor, random_arobj, random_w_map)
from bispans.spancat import Span

from oracles import armor_aut_count, armor_isos


def obj(values, base):
    return ArObj.of(values, base)


def backward_span(f):
    return Span(f, identity(f.dom))


class TestValidate:
    def test_identity_is_valid(self):
        assert ar_validate(ar_identity(obj([0, 1, 1], 2)))

    def test_raw_non_pullback_square_is_reported(self):
        a = obj([0, 1], 2)
        g = FinFun.of([0, 0], 1)
        b = ArObj(FinFun.of([0, 0], 1))
        d = Diagram(ArSq(a, a, identity(2), identity(2)), ArSq(a, b, identity(2), g),
                    ArSq(b, b, identity(2), identity(1)))
        v = ar_validate(d)
        assert not v and any("not a pullback" in msg for msg in v.diagnostics)
        with pytest.raises(InvalidMorphism):
            from_diagram(d)

    def test_left_square_must_commute(self):
        m = ar_identity(obj([0, 1], 2))
        broken = ArMor(m.src, m.tgt, m.bottom, m.mid, FinFun.of([1, 0], 2), m.fwd)
        v = ar_validate(broken)
        assert not v and "left square" in v.diagnostics[0]

    def test_cocartesian_lift_is_valid(self):
        assert ar_validate(cocart_lift(backward_span(FinFun.of([0, 0], 1)), obj([0, 0], 1)))

    def test_normal_form_round_trips_through_raw_form(self):
        rng = random.Random(4)
        for _ in range(200):
            m = random_armor(rng, random_arobj(rng, 3), 3)
            assert from_diagram(to_diagram(m)) == m


class TestCompose:
    def test_identity_laws(self):
        rng = random.Random(1)
        for _ in range(200):
            m = random_armor(rng, random_arobj(rng, 3), 3)
            assert ar_equivalent(ar_compose(ar_identity(m.tgt), m), m)
            assert ar_equivalent(ar_compose(m, ar_identity(m.src)), m)

    def test_boundary_mismatch(self):
        with pytest.raises(BoundaryMismatch):
            ar_compose(ar_identity(obj([0], 1)), ar_identity(obj([0, 0], 1)))

    def test_lifts_compose_to_the_lift_of_the_composite(self):
        rng = random.Random(2)
        for _ in range(200):
            o = random_arobj(rng, 3)
            f1 = FinFun.of([rng.randrange(o.base.size) for _ in range(rng.randint(0, 3))], o.base.size) \
                if o.base.size else FinFun.of([], 0)
            f2 = FinFun.of([rng.randrange(f1.dom.size) for _ in range(rng.randint(0, 3))], f1.dom.size) \
                if f1.dom.size else FinFun.of([], 0)
            first = cocart_lift(backward_span(f1), o)
            second = cocart_lift(backward_span(f2), first.tgt)
            whole = cocart_lift(backward_span(FinFun(f2.dom, o.base, tuple(f1.map[v] for v in f2.map))), o)
            # targets agree up to the canonical bijection (X ×_S T) ×_T T' = X ×_S T'
            step1, step2 = pullback(o.arrow, f1), pullback(first.tgt.arrow, f2)
            direct = pullback(o.arrow, whole.bottom.left).index()
            sigma = FinFun(step2.apex, whole.tgt.top,
                           tuple(direct[(step1.pairs[k][0], t)] for k, t in step2.pairs))
            composite = ar_compose(ar_forward(second.tgt, whole.tgt, sigma),
                                   ar_compose(second, first))
            assert ar_equivalent(composite, whole)

    def test_ev0_functorial_on_small_objects(self):
        objects = list(all_arobjs(1))
        for a, b, c in itertools.product(objects, repeat=3):
            for first in all_armors(a, b, 1):
                for second in all_armors(b, c, 1):
                    lhs = bispan_canon(ev0(ar_compose(second, first)))
                    assert lhs == bispan_canon(bispan_compose(ev0(second), ev0(first)))


class TestEv0:
    def test_identity(self):
        o = obj([0, 1, 1], 2)
        assert bispan_canon(ev0(ar_identity(o))) == bispan_canon(bispan_id(3))

    def test_w_map_goes_to_an_equivalence(self):
        rng = random.Random(8)
        for _ in range(100):
            assert bispan_is_invertible(ev0(random_w_map(rng, 3)))

    def test_lift_has_the_cocartesian_shape(self):
        o, f = obj([0, 0, 1], 2), FinFun.of([0, 1, 1], 2)
        b = ev0(cocart_lift(backward_span(f), o))
        n = pullback(o.arrow, f).apex.size
        assert (b.s.dom.size, b.t.dom.size, b.tgt.size) == (n, n, n)
        assert b.p.map == tuple(range(n)) and b.t.map == tuple(range(n))
        assert b.s.map == pullback(o.arrow, f).to_left.map


class TestClassify:
    def test_backward_generator_is_in_s(self):
        o = obj([0, 1, 1], 2)
        m = backward_generator_along(o, FinFun.of([0, 1, 2], 3), FinFun.of([0, 1, 1], 2))
        assert is_in_s(m) and is_in_w(m) and classify_map(m) is MorClass.IN_S

    def test_backward_generator_requires_unique_lift(self):
        with pytest.raises(ShapeMismatch):
            backward_generator(obj([0], 1), FinFun.of([0, 0], 1))
        m = backward_generator(obj([0, 1], 2), FinFun.of([1, 0], 2))
        assert is_in_s(m)

    def test_top_identity_map_over_pullback_is_in_w(self):
        m = top_identity_map(obj([0], 3), FinFun.of([0, 1, 1], 2))
        assert is_in_w(m) and not is_in_s(m)
        assert classify_map(m) is MorClass.IN_W

    def test_top_identity_map_needs_a_pullback(self):
        with pytest.raises(InvalidMorphism):
            top_identity_map(obj([0, 1], 2), FinFun.of([0, 0], 1))

    def test_random_maps_are_mostly_generic(self):
        rng = random.Random(12)
        tags = {classify_map(random_armor(rng, random_arobj(rng, 3), 3)) for _ in range(200)}
        assert MorClass.GENERIC in tags


class TestLift:
    def test_over_identity(self):
        o = obj([0, 1, 1], 2)
        assert ar_equivalent(cocart_lift(Span(identity(2), identity(2)), o), ar_identity(o))

    def test_constant_base_doubles(self):
        m = cocart_lift(backward_span(FinFun.of([0, 0], 1)), obj([0, 0], 1))
        assert m.y.apex.size == 4

    def test_needs_identity_right_leg(self):
        with pytest.raises(ShapeMismatch):
            cocart_lift(Span(FinFun.of([0, 0], 1), FinFun.of([1, 0], 2)), obj([0], 1))


class TestFactorThroughS:
    def test_s_map_gives_singleton(self):
        m = backward_generator(obj([0, 1], 2), identity(2))
        cert = w_factor_through_s(m)
        assert cert.verified and cert.decomposition == [m]

    def test_top_identity_shape(self):
        a = FinFun.of([0, 0], 3)
        m = top_identity_map(ArObj(a), FinFun.of([0, 1, 1], 2))
        cert = w_factor_through_s(m)
        assert cert.verified and len(cert.decomposition) == 2
        # partner ∘ second factor is the backward map T <-a- X = X
        composite = cert.partner_composite
        assert is_in_s(composite)
        assert sorted(composite.bottom.left.map) == sorted(a.map)
        assert composite.bottom.right.is_bijective()

    def test_random_w_maps(self):
        rng = random.Random(21)
        for _ in range(300):
            assert w_factor_through_s(random_w_map(rng, 3)).verified

    def test_rejects_non_w(self):
        with pytest.raises(NotInW):
            w_factor_through_s(cocart_lift(backward_span(FinFun.of([0, 0], 1)), obj([0, 0], 1)))


class TestCanon:
    def test_aut_count_and_iso_against_bijection_search(self):
        rng = random.Random(6)
        for _ in range(60):
            src, tgt = random_arobj(rng, 2), random_arobj(rng, 2)
            ms = list(itertools.islice(all_armors(src, tgt, 2), 400))
            for m in ms:
                assert ar_canon(m).aut_count == armor_aut_count(m)
            for a, b in itertools.islice(itertools.combinations(ms, 2), 300):
                assert ar_equivalent(a, b) == bool(armor_isos(a, b))

    def test_from_class(self):
        rng = random.Random(10)
        for _ in range(300):
            m = random_armor(rng, random_arobj(rng, 3), 3)
            c = ar_canon(m)
            assert ar_canon(armor_from_class(c)) == c

    def test_resource_limit(self, monkeypatch):
        monkeypatch.setattr(arrfib, "CANON_PERMUTATION_LIMIT", 5)
        src = obj([0] * 3, 1)
        tgt = obj([0], 1)
        m = ArMor(src, tgt, Span(FinFun.of([0] * 3, 1), FinFun.of([0] * 3, 1)), tgt,
                  FinFun.of([0, 1, 2], 3), identity(1))
        with pytest.raises(ResourceLimit):
            ar_canon(m)
