#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""推导检查的测试"""

from pytest import raises

from src.derivation import (
    CONTEXT_MISMATCH, EMPTY_CONTEXT, SHAPE_MISMATCH, SIDE_CONDITION_FAILS, SUBTYPE_FAILS, Context,
    Derivation, Judgment, arrow_parts, check_derivation, product_parts, record_parts, require_valid,
    same_subject, subject_free_vars, subject_sort, subst_subject,
)
from src.errors import DerivationInputError
from src.exemplars import IDENTITY_TYPE, reader, sequencing_derivation, set_get_derivation
from src.operational import Configuration
from src.store import EMP, Lkp, Upd
from src.syntax import Get, Lam, Location, Set, Unit, Var, identity
from src.type_assignment import (
    conf_node, get_node, lam_node, lkp_node, omega_node, set_node, unit_node, upd_a_node,
    upd_b_node, var_node,
)
from src.type_language import (
    CONVERGENCE_TYPE, OMEGA_D, OMEGA_S, Arrow, Meet, Omega, Product, Record, StoreType, VALUE,
    normalize, type_equiv,
)

L0 = Location(0)
L1 = Location(1)


def identity_derivation(context=EMPTY_CONTEXT):
    """Γ ⊢ λx.unit x : ωD → ωS → ωD × ωS"""
    inner = context.extend('x', OMEGA_D)
    body = unit_node(inner, var_node(inner, 'x'), OMEGA_S)
    return lam_node(context, 'x', body)


class TestContext:

    def test_extend_and_lookup(self):
        context = EMPTY_CONTEXT.extend('x', OMEGA_D).extend('y', IDENTITY_TYPE)
        assert context.lookup('y') == IDENTITY_TYPE
        assert context.lookup('z') is None
        assert context.names() == {'x', 'y'}
        assert len(context) == 2

    def test_duplicate_rejected(self):
        with raises(DerivationInputError):
            EMPTY_CONTEXT.extend('x', OMEGA_D).extend('x', OMEGA_D)

    def test_restrict(self):
        context = EMPTY_CONTEXT.extend('x', OMEGA_D).extend('y', IDENTITY_TYPE)
        assert context.restrict({'y'}) == Context((('y', IDENTITY_TYPE),))

    def test_same_as_up_to_equivalence(self):
        a = Context((('x', Meet(IDENTITY_TYPE, IDENTITY_TYPE)),))
        b = Context((('x', normalize(IDENTITY_TYPE)),))
        assert a.same_as(b)
        assert not a.same_as(EMPTY_CONTEXT)

    def test_duplicates_invalid(self):
        assert not Context((('x', OMEGA_D), ('x', OMEGA_D))).is_valid()


class TestSubjects:

    def test_sorts(self):
        assert subject_sort(identity()) == 'D'
        assert subject_sort(Unit(identity())) == 'T'
        assert subject_sort(EMP) == 'S'
        assert subject_sort(Lkp(L0, Upd(L0, identity(), EMP))) == 'D'
        assert subject_sort(Configuration(Unit(identity()), EMP)) == 'C'

    def test_unknown_subject(self):
        with raises(DerivationInputError):
            subject_sort(42)

    def test_same_subject_up_to_alpha(self):
        assert same_subject(identity(), Lam('y', Unit(Var('y'))))
        assert not same_subject(identity(), Unit(identity()))
        assert same_subject(Upd(L0, identity(), EMP), Upd(L0, Lam('z', Unit(Var('z'))), EMP))

    def test_free_vars_and_substitution(self):
        config = Configuration(Unit(Var('x')), Upd(L0, Var('y'), EMP))
        assert subject_free_vars(config) == {'x', 'y'}
        closed = subst_subject(config, {'x': identity(), 'y': identity()})
        assert subject_free_vars(closed) == frozenset()


class TestTypeShapes:

    def test_arrow_parts(self):
        assert arrow_parts(CONVERGENCE_TYPE) == (OMEGA_S, normalize(Product(Omega(VALUE), OMEGA_S)))
        assert arrow_parts(OMEGA_D) is None

    def test_record_parts(self):
        assert record_parts(Record(L0, OMEGA_D)) == (L0, OMEGA_D)
        assert record_parts(Meet(Record(L0, OMEGA_D), Record(L1, OMEGA_D))) is None

    def test_product_parts(self):
        assert product_parts(Product(IDENTITY_TYPE, OMEGA_S)) == (normalize(IDENTITY_TYPE), OMEGA_S)
        assert product_parts(Omega('C')) is None


class TestCheckAccepts:

    def test_identity(self):
        derivation = identity_derivation()
        assert check_derivation(derivation).ok
        assert type_equiv(derivation.assigned, IDENTITY_TYPE)
        assert derivation.size() == 3

    def test_omega_for_any_subject(self):
        assert check_derivation(omega_node(EMPTY_CONTEXT, Unit(Var('free')))).ok

    def test_exemplar_derivations(self):
        assert check_derivation(sequencing_derivation()).ok
        assert check_derivation(set_get_derivation()).ok
        assert type_equiv(set_get_derivation().assigned, CONVERGENCE_TYPE)

    def test_store_rules(self):
        store = Upd(L1, reader(), Upd(L0, identity(), EMP))
        inner = upd_a_node(EMPTY_CONTEXT, store.rest, identity_derivation())
        outer = upd_b_node(EMPTY_CONTEXT, store, inner)
        assert check_derivation(outer).ok
        assert normalize(outer.assigned) == normalize(Record(L0, IDENTITY_TYPE))

    def test_lookup_rule(self):
        store = Upd(L0, identity(), EMP)
        typed = upd_a_node(EMPTY_CONTEXT, store, identity_derivation())
        lookup = lkp_node(EMPTY_CONTEXT, Lkp(L0, store), typed)
        assert check_derivation(lookup).ok
        assert type_equiv(lookup.assigned, IDENTITY_TYPE)

    def test_configuration_rule(self):
        read = Get(L0, 'x', Unit(Var('x')))
        inner = EMPTY_CONTEXT.extend('x', IDENTITY_TYPE)
        computation = get_node(EMPTY_CONTEXT, L0, 'x', unit_node(inner, var_node(inner, 'x'), OMEGA_S))
        store = Upd(L0, identity(), EMP)
        typed_store = upd_a_node(EMPTY_CONTEXT, store, identity_derivation())
        derivation = conf_node(computation, typed_store)
        assert derivation.subject == Configuration(read, store)
        assert check_derivation(derivation).ok


class TestCheckRejects:

    def test_unbound_variable(self):
        derivation = Derivation('var', Judgment(EMPTY_CONTEXT, Var('x'), OMEGA_D))
        result = check_derivation(derivation)
        assert not result.ok
        assert result.reason == CONTEXT_MISMATCH
        assert result.path_text() == 'root'

    def test_reports_failing_path(self):
        inner = EMPTY_CONTEXT.extend('x', OMEGA_D)
        wrong = var_node(inner, 'x', IDENTITY_TYPE)
        body = unit_node(inner, wrong, OMEGA_S)
        derivation = lam_node(EMPTY_CONTEXT, 'x', body)
        result = check_derivation(derivation)
        assert not result.ok
        assert result.path == (0, 0)
        assert result.path_text() == '0.0'
        assert result.reason == SHAPE_MISMATCH

    def test_subsumption_must_go_up(self):
        derivation = Derivation('sub', Judgment(EMPTY_CONTEXT, identity(), IDENTITY_TYPE),
                                (omega_node(EMPTY_CONTEXT, identity()),))
        assert check_derivation(derivation).reason == SUBTYPE_FAILS

    def test_omega_only_for_top(self):
        derivation = Derivation('omega', Judgment(EMPTY_CONTEXT, identity(), IDENTITY_TYPE))
        assert check_derivation(derivation).reason == SHAPE_MISMATCH

    def test_set_side_condition(self):
        value = identity_derivation()
        sigma = Record(L0, OMEGA_D)
        inner = EMPTY_CONTEXT.extend('y', IDENTITY_TYPE)
        read = get_node(EMPTY_CONTEXT, L0, 'y', unit_node(inner, var_node(inner, 'y'), sigma))
        derivation = set_node(EMPTY_CONTEXT, L0, value, read, sigma)
        assert check_derivation(derivation).reason == SIDE_CONDITION_FAILS

    def test_update_side_condition(self):
        store = Upd(L0, identity(), Upd(L0, reader(), EMP))
        inner = upd_a_node(EMPTY_CONTEXT, store.rest, omega_node(EMPTY_CONTEXT, reader()))
        derivation = upd_b_node(EMPTY_CONTEXT, store, inner)
        assert check_derivation(derivation).reason == SIDE_CONDITION_FAILS

    def test_wrong_sort(self):
        derivation = Derivation('omega', Judgment(EMPTY_CONTEXT, identity(), StoreType()))
        assert check_derivation(derivation).reason == SHAPE_MISMATCH

    def test_unknown_rule(self):
        derivation = Derivation('magic', Judgment(EMPTY_CONTEXT, identity(), OMEGA_D))
        assert not check_derivation(derivation).ok

    def test_premise_count(self):
        derivation = Derivation('lam', Judgment(EMPTY_CONTEXT, identity(), IDENTITY_TYPE))
        assert check_derivation(derivation).reason == SHAPE_MISMATCH

    def test_premise_subject_must_match(self):
        derivation = identity_derivation()
        tampered = Derivation('sub', Judgment(EMPTY_CONTEXT, reader(), OMEGA_D), (derivation,))
        assert check_derivation(tampered).reason == SHAPE_MISMATCH

    def test_set_body_type(self):
        value = identity_derivation()
        body = unit_node(EMPTY_CONTEXT, omega_node(EMPTY_CONTEXT, identity()), OMEGA_S)
        derivation = set_node(EMPTY_CONTEXT, L0, value, body, OMEGA_S)
        assert derivation.subject == Set(L0, identity(), Unit(identity()))
        assert check_derivation(derivation).reason == SHAPE_MISMATCH

    def test_require_valid(self):
        bad = Derivation('var', Judgment(EMPTY_CONTEXT, Var('x'), OMEGA_D))
        with raises(DerivationInputError) as info:
            require_valid(bad)
        assert not info.value.check_result.ok
        assert require_valid(identity_derivation()) == identity_derivation()

    def test_lambda_context_must_grow_by_one(self):
        body = unit_node(EMPTY_CONTEXT, omega_node(EMPTY_CONTEXT, identity()), OMEGA_S)
        derivation = Derivation('lam', Judgment(EMPTY_CONTEXT, Lam('x', body.subject),
                                                Arrow(Omega(VALUE), body.assigned)), (body,))
        assert check_derivation(derivation).reason == CONTEXT_MISMATCH

    def test_lambda_binder_must_not_capture(self):
        inner = EMPTY_CONTEXT.extend('y', OMEGA_D)
        body = unit_node(inner, var_node(inner, 'y'), OMEGA_S)
        derivation = Derivation('lam', Judgment(EMPTY_CONTEXT, Lam('x', Unit(Var('y'))),
                                                Arrow(OMEGA_D, body.assigned)), (body,))
        result = check_derivation(derivation)
        assert not result.ok
        assert result.reason == CONTEXT_MISMATCH

    def test_get_binder_must_not_capture(self):
        inner = EMPTY_CONTEXT.extend('y', OMEGA_D)
        body = unit_node(inner, var_node(inner, 'y'), OMEGA_S)
        assigned = Arrow(Meet(Record(L0, OMEGA_D), OMEGA_S), Product(OMEGA_D, OMEGA_S))
        derivation = Derivation('get', Judgment(EMPTY_CONTEXT, Get(L0, 'x', Unit(Var('y'))), assigned), (body,))
        assert check_derivation(derivation).reason == CONTEXT_MISMATCH

    def test_renamed_binder_accepted(self):
        inner = EMPTY_CONTEXT.extend('y', OMEGA_D)
        body = unit_node(inner, var_node(inner, 'y'), OMEGA_S)
        derivation = Derivation('lam', Judgment(EMPTY_CONTEXT, identity(), Arrow(OMEGA_D, body.assigned)), (body,))
        assert check_derivation(derivation).ok
