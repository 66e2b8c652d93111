#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""类型语言的测试"""

from pytest import raises

from src.errors import SortMismatch
from src.syntax import Location
from src.type_language import (
    COMPUTATION, CONVERGENCE_TYPE, OMEGA_C, OMEGA_D, OMEGA_S, OMEGA_T, RESULT, STORE, VALUE, Arrow,
    CompType, Meet, Omega, Product, Record, ResultType, StoreType, ValueType, comp_arrow, dom_sigma,
    is_top, jmax, meet, normalize, product, record, reify, sort_of, store_without, subtype, top,
    type_equiv, value_arrow,
)

L0 = Location(0)
L1 = Location(1)

WD, WS, WC, WT = Omega(VALUE), Omega(STORE), Omega(RESULT), Omega(COMPUTATION)
CONV = Arrow(WS, Product(WD, WS))
DELTA = Arrow(WD, CONV)


class TestSorts:

    def test_omegas(self):
        assert [sort_of(Omega(s)) for s in 'DSCT'] == ['D', 'S', 'C', 'T']
        assert top(VALUE) == OMEGA_D
        assert top(RESULT) == OMEGA_C

    def test_composite(self):
        assert sort_of(DELTA) == VALUE
        assert sort_of(CONV) == COMPUTATION
        assert sort_of(Record(L0, WD)) == STORE
        assert sort_of(Product(WD, WS)) == RESULT

    def test_meet_of_different_sorts(self):
        with raises(SortMismatch):
            sort_of(Meet(WD, WS))

    def test_ill_sorted_arrow(self):
        with raises(SortMismatch):
            sort_of(Arrow(WD, Product(WD, WS)))
        with raises(SortMismatch):
            normalize(Arrow(WS, WT))

    def test_ill_sorted_record_and_product(self):
        with raises(SortMismatch):
            sort_of(Record(L0, WS))
        with raises(SortMismatch):
            sort_of(Product(WS, WD))

    def test_unknown_omega(self):
        with raises(SortMismatch):
            sort_of(Omega('Q'))


class TestNormalize:

    def test_omegas_are_tops(self):
        assert normalize(WD) == OMEGA_D
        assert normalize(WS) == OMEGA_S
        assert normalize(WC) == OMEGA_C
        assert normalize(WT) == OMEGA_T
        assert OMEGA_C.top

    def test_convergence_type(self):
        assert normalize(CONV) == CONVERGENCE_TYPE

    def test_arrow_into_top_is_top(self):
        assert normalize(Arrow(WD, WT)) == OMEGA_D
        assert normalize(Arrow(WS, WC)) == OMEGA_T
        assert is_top(Arrow(DELTA, WT))

    def test_meet_idempotent(self):
        assert normalize(Meet(DELTA, DELTA)) == normalize(DELTA)

    def test_meet_commutative(self):
        a = Meet(Record(L1, DELTA), Record(L0, WD))
        b = Meet(Record(L0, WD), Record(L1, DELTA))
        assert normalize(a) == normalize(b)
        assert [loc for loc, _ in normalize(a).entries] == [L0, L1]

    def test_meet_with_top(self):
        assert normalize(Meet(WS, Record(L0, WD))) == record(L0, WD)
        assert normalize(Meet(WC, Product(WD, WS))) == product(WD, WS)

    def test_records_at_same_location_merge(self):
        merged = normalize(Meet(Record(L0, WD), Record(L0, DELTA)))
        assert merged == StoreType(((L0, normalize(DELTA)),))

    def test_products_merge_componentwise(self):
        merged = normalize(Meet(Product(DELTA, WS), Product(WD, Record(L0, WD))))
        assert merged == ResultType(normalize(DELTA), record(L0, WD))

    def test_same_source_arrows_merge(self):
        t1 = Arrow(Record(L0, WD), Product(WD, WS))
        t2 = Arrow(Record(L0, WD), Product(WD, Record(L1, WD)))
        merged = normalize(Meet(t1, t2))
        assert isinstance(merged, CompType)
        assert len(merged.arrows) == 1
        assert type_equiv(merged, Arrow(Record(L0, WD), Product(WD, Record(L1, WD))))

    def test_reify_round_trip(self):
        for raw in (DELTA, CONV, Meet(Record(L0, DELTA), Record(L1, WD)), Product(DELTA, WS), WC):
            canonical = normalize(raw)
            assert normalize(reify(canonical)) == canonical

    def test_meet_function(self):
        assert meet(WS, Record(L0, WD), Record(L1, WD)) == normalize(Meet(Record(L0, WD), Record(L1, WD)))
        with raises(SortMismatch):
            meet(WD, WS)

    def test_constructors(self):
        assert value_arrow(WD, CONV) == normalize(DELTA)
        assert comp_arrow(WS, Product(WD, WS)) == CONVERGENCE_TYPE
        assert isinstance(value_arrow(WD, CONV), ValueType)


class TestSubtype:

    def test_everything_below_top(self):
        assert subtype(DELTA, WD)
        assert subtype(Record(L0, WD), WS)
        assert subtype(Product(WD, WS), WC)
        assert subtype(CONV, WT)

    def test_top_not_below_proper_types(self):
        assert not subtype(WD, DELTA)
        assert not subtype(WS, Record(L0, WD))
        assert not subtype(WC, Product(WD, WS))
        assert not subtype(WT, CONV)

    def test_product_strictly_below_result_top(self):
        assert subtype(Product(WD, WS), WC)
        assert not type_equiv(Product(WD, WS), WC)

    def test_meet_elimination(self):
        both = Meet(Record(L0, WD), Record(L1, WD))
        assert subtype(both, Record(L0, WD))
        assert subtype(both, Record(L1, WD))
        assert not subtype(Record(L0, WD), both)

    def test_arrow_contravariant_in_source(self):
        assert subtype(Arrow(WD, CONV), Arrow(DELTA, CONV))
        assert not subtype(Arrow(DELTA, CONV), Arrow(WD, CONV))

    def test_arrow_covariant_in_target(self):
        strong = Arrow(WS, Product(DELTA, WS))
        assert subtype(strong, CONV)
        assert not subtype(CONV, strong)
        assert subtype(Arrow(WD, strong), Arrow(WD, CONV))

    def test_store_arrow_contravariant(self):
        assert subtype(CONV, Arrow(Record(L0, WD), Product(WD, WS)))
        assert not subtype(Arrow(Record(L0, WD), Product(WD, WS)), CONV)

    def test_arrow_distributes_over_meet(self):
        t1 = Arrow(WS, Product(DELTA, WS))
        t2 = Arrow(WS, Product(WD, Record(L0, WD)))
        split = Meet(Arrow(WD, t1), Arrow(WD, t2))
        joined = Arrow(WD, Meet(t1, t2))
        assert type_equiv(split, joined)

    def test_meet_is_greatest_lower_bound(self):
        a, b = Record(L0, DELTA), Record(L1, WD)
        both = meet(a, b)
        assert subtype(both, a) and subtype(both, b)
        lower = Meet(Record(L0, DELTA), Meet(Record(L1, DELTA), Record(Location(2), WD)))
        assert subtype(lower, both)

    def test_product_covariant(self):
        assert subtype(Product(DELTA, Record(L0, WD)), Product(WD, WS))
        assert not subtype(Product(WD, WS), Product(DELTA, WS))

    def test_reflexive(self):
        for t in (DELTA, CONV, Record(L0, DELTA), Product(DELTA, Record(L1, WD))):
            assert subtype(t, t)

    def test_different_sorts(self):
        with raises(SortMismatch):
            subtype(WD, WS)


class TestStoreTypeHelpers:

    def test_dom(self):
        assert dom_sigma(WS) == frozenset()
        assert dom_sigma(Meet(Record(L0, WD), Meet(Record(L1, WD), Record(L0, DELTA)))) == {L0, L1}

    def test_dom_requires_store_type(self):
        with raises(SortMismatch):
            dom_sigma(WD)

    def test_lookup_and_without(self):
        sigma = meet(Record(L0, DELTA), Record(L1, WD))
        assert sigma.lookup(L0) == normalize(DELTA)
        assert sigma.lookup(Location(5)) is None
        assert store_without(sigma, L0) == record(L1, WD)

    def test_jmax(self):
        strong = Arrow(WS, Product(DELTA, WS))
        arrows = normalize(Meet(Arrow(WD, CONV), Arrow(DELTA, strong))).arrows
        assert len(arrows) == 2
        assert len(jmax(arrows, DELTA)) == 2
        assert jmax(arrows, WD) == [(OMEGA_D, CONVERGENCE_TYPE)]

    def test_redundant_arrow_dropped(self):
        weaker = Arrow(DELTA, Arrow(Record(L0, WD), Product(WD, WS)))
        assert normalize(Meet(Arrow(WD, CONV), weaker)) == normalize(Arrow(WD, CONV))
