import itertools

import pytest

from bispans import finset
from bispans.errors import DomainMismatch, NotPullback
from bispans.finset import FinFun, FinSet, compose_fun, dependent_product, identity, mate_check, pullback

from oracles import dependent_product_fiber_sizes


def fun(values, cod):
    return FinFun.of(values, cod)


class TestCompose:
    def test_identity_on_codomain(self):
        assert compose_fun(identity(3), fun([0, 2], 3)).map == (0, 2)

    def test_involution_squares_to_identity(self):
        swap = fun([1, 0], 2)
        assert compose_fun(swap, swap).map == (0, 1)

    def test_table_lookup(self):
        assert compose_fun(fun([1, 1], 2), fun([0, 0, 1], 2)).map == (1, 1, 1)

    def test_mismatch(self):
        with pytest.raises(DomainMismatch):
            compose_fun(fun([0], 1), fun([0, 1], 2))


def test_finfun_rejects_out_of_range():
    with pytest.raises(DomainMismatch):
        fun([0, 3], 2)
    with pytest.raises(DomainMismatch):
        FinFun(FinSet(2), FinSet(2), (0,))


class TestPullback:
    def test_along_identity(self):
        g = fun([1, 0, 1], 2)
        pb = pullback(identity(2), g)
        assert pb.apex.size == 3
        assert pb.to_right.is_bijective()
        assert pb.to_right.map == (1, 0, 2)

    def test_constant_maps_give_product(self):
        assert pullback(fun([0, 0], 1), fun([0, 0, 0], 1)).apex.size == 6

    def test_single_pair(self):
        pb = pullback(fun([0, 1], 2), fun([0], 2))
        assert pb.apex.size == 1 and pb.pairs == ((0, 0),)

    def test_pairs_are_exactly_the_agreeing_pairs_in_order(self):
        for f in finset.funs(3, 2):
            for g in finset.funs(2, 2):
                expected = [(a, b) for a in range(3) for b in range(2) if f(a) == g(b)]
                assert list(pullback(f, g).pairs) == expected

    def test_requires_cospan(self):
        with pytest.raises(DomainMismatch):
            pullback(fun([0], 1), fun([0], 2))


class TestDependentProduct:
    def test_identity_pi_has_one_section_per_fiber(self):
        q = fun([0, 0, 1], 3)
        dp = dependent_product(identity(3), q)
        assert dp.total.size == 3
        assert sorted(dp.proj.map) == [0, 1, 2]

    def test_fiber_product_count(self):
        pi = fun([0, 0, 1, 1, 1], 2)
        dp = dependent_product(pi, fun([0, 0], 1))
        assert dp.total.size == 6

    def test_along_identity(self):
        dp = dependent_product(fun([0, 1, 1], 2), identity(2))
        assert [len(f) for f in dp.proj.fibers()] == [1, 2]

    def test_matches_fiber_size_oracle_and_counit(self):
        for k, f, c in itertools.product(range(4), range(3), range(3)):
            for pi in finset.funs(k, f):
                for q in finset.funs(f, c):
                    dp = dependent_product(pi, q)
                    assert [len(x) for x in dp.proj.fibers()] == dependent_product_fiber_sizes(pi, q)
                    # sections are distinct and choose within pi-fibers
                    assert len(set(zip(dp.proj.map, dp.sections))) == dp.total.size
                    for d in range(dp.total.size):
                        for x, e in dp.section(d).items():
                            assert pi(e) == x
                    for k2, (d, x) in enumerate(dp.counit_square.pairs):
                        assert dp.counit(k2) == dp.section(d)[x]


class TestMate:
    def test_identity_eta(self):
        f = fun([0, 1, 1], 2)
        pb = pullback(f, identity(2))
        r = mate_check(f, pb.to_right, pb.to_left, identity(2), fun([0, 1, 2, 2], 3))
        assert r.ok
        assert sorted(r.comparison.map) == list(range(r.comparison.dom.size))

    def test_cardinality_six(self):
        f, eta = fun([0, 0], 1), identity(1)
        pb = pullback(f, eta)
        l = fun([0, 0, 1, 1, 1], 2)
        r = mate_check(f, pb.to_right, pb.to_left, eta, l)
        assert r.ok and r.lhs.dom.size == 6 and r.rhs.dom.size == 6

    def test_exhaustive_sets_at_most_two(self):
        for x, y, yp in itertools.product(range(3), repeat=3):
            for f in finset.funs(x, y):
                for eta in finset.funs(yp, y):
                    pb = pullback(f, eta)
                    for k in range(3):
                        for l in finset.funs(k, x):
                            assert mate_check(f, pb.to_right, pb.to_left, eta, l)

    def test_rejects_non_pullback(self):
        f = fun([0, 0], 1)
        with pytest.raises(NotPullback):
            mate_check(f, fun([0], 1), fun([0], 2), identity(1), identity(2))
