#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""推导构造的测试：代换与展开、存储定型、类型保持与展开、证书和搜索"""

from pytest import raises

from src.derivation import EMPTY_CONTEXT, check_derivation
from src.errors import (
    DecompositionMismatch, DerivationInputError, NotAStepError, StoreTypingError,
)
from src.exemplars import IDENTITY_TYPE, exemplars, reader, sequencing_derivation
from src.operational import Blocked, Configuration, FuelExhausted, run, same_configuration
from src.store import EMP, Upd
from src.syntax import Bind, Get, Lam, Location, Set, Unit, Var, alpha_eq, identity, omega_c
from src.type_assignment import (
    CertificationFailure, certify_convergence, conf_parts, expand_derivation, expand_step,
    lam_node, preserve_step, restrict_store, retype_store, search_typing, search_value,
    seed_derivation, structural_family, subst_derivation, type_store, unit_node, value_at,
    var_node, weaken, weaken_context,
)
from src.type_language import (
    CONVERGENCE_TYPE, OMEGA_D, OMEGA_S, Arrow, Meet, Omega, Product, Record, VALUE, normalize,
    record, subtype, type_equiv,
)

L0 = Location(0)
L1 = Location(1)

READ = Get(L0, 'y', Unit(Var('y')))
SET_GET = Set(L0, identity(), READ)


def identity_derivation(context=EMPTY_CONTEXT):
    inner = context.extend('x', OMEGA_D)
    return lam_node(context, 'x', unit_node(inner, var_node(inner, 'x'), OMEGA_S))


def returning_x(delta=IDENTITY_TYPE):
    """x:δ ⊢ unit x : ωS → δ × ωS"""
    context = EMPTY_CONTEXT.extend('x', delta)
    return unit_node(context, var_node(context, 'x'), OMEGA_S)


class TestWeaken:

    def test_to_supertype(self):
        derivation = weaken(identity_derivation(), OMEGA_D)
        assert derivation.rule == 'omega'
        assert check_derivation(weaken(returning_x(), CONVERGENCE_TYPE)).ok

    def test_equivalent_type_kept(self):
        derivation = identity_derivation()
        assert weaken(derivation, IDENTITY_TYPE) is derivation

    def test_context_weakening(self):
        context = EMPTY_CONTEXT.extend('x', OMEGA_D).extend('z', IDENTITY_TYPE)
        moved = weaken_context(identity_derivation(), context)
        assert moved.context == context
        assert check_derivation(moved).ok
        assert alpha_eq(moved.subject, identity())


class TestSubstitution:

    def test_substitutes_value(self):
        result = subst_derivation(returning_x(), identity_derivation())
        assert result.subject == Unit(identity())
        assert result.context == EMPTY_CONTEXT
        assert check_derivation(result).ok
        assert type_equiv(result.assigned, returning_x().assigned)

    def test_value_type_must_fit(self):
        with raises(DerivationInputError):
            subst_derivation(returning_x(), weaken(identity_derivation(), OMEGA_D))

    def test_under_binder(self):
        context = EMPTY_CONTEXT.extend('f', IDENTITY_TYPE)
        inner = context.extend('x', IDENTITY_TYPE)
        body = unit_node(inner, var_node(inner, 'f'), OMEGA_S)
        function = lam_node(context, 'x', body)
        result = subst_derivation(function, identity_derivation())
        assert check_derivation(result).ok
        assert alpha_eq(result.subject, Lam('x', Unit(identity())))


class TestExpansion:

    def test_recovers_value_type(self):
        derivation = subst_derivation(returning_x(), identity_derivation())
        expansion = expand_derivation(derivation, Unit(Var('x')), 'x', identity())
        assert type_equiv(expansion.value_type, IDENTITY_TYPE)
        assert check_derivation(expansion.value_derivation).ok
        assert check_derivation(expansion.body_derivation).ok
        assert expansion.body_derivation.subject == Unit(Var('x'))
        assert subtype(expansion.body_derivation.assigned, derivation.assigned)

    def test_absent_variable_gets_top(self):
        derivation = unit_node(EMPTY_CONTEXT, identity_derivation(), OMEGA_S)
        expansion = expand_derivation(derivation, Unit(identity()), 'x', reader())
        assert expansion.value_type == OMEGA_D

    def test_mismatched_template(self):
        derivation = unit_node(EMPTY_CONTEXT, identity_derivation(), OMEGA_S)
        with raises(DecompositionMismatch):
            expand_derivation(derivation, Unit(Var('y')), 'x', reader())


class TestStoreTyping:

    def test_default_target(self):
        store = Upd(L1, reader(), Upd(L0, identity(), EMP))
        sigma, derivation = type_store(EMPTY_CONTEXT, store)
        assert sigma == normalize(Meet(Record(L0, Omega(VALUE)), Record(L1, Omega(VALUE))))
        assert check_derivation(derivation).ok

    def test_searched_value(self):
        store = Upd(L0, identity(), EMP)
        sigma, derivation = type_store(EMPTY_CONTEXT, store, Record(L0, IDENTITY_TYPE))
        assert sigma == record(L0, IDENTITY_TYPE)
        assert check_derivation(derivation).ok

    def test_location_outside_domain(self):
        with raises(StoreTypingError):
            type_store(EMPTY_CONTEXT, Upd(L0, identity(), EMP), Record(L1, Omega(VALUE)))

    def test_value_at(self):
        store = Upd(L0, identity(), EMP)
        _, derivation = type_store(EMPTY_CONTEXT, store, Record(L0, IDENTITY_TYPE))
        value = value_at(derivation, L0, IDENTITY_TYPE)
        assert alpha_eq(value.subject, identity())
        assert check_derivation(value).ok

    def test_retype_equal_store(self):
        store = Upd(L0, identity(), EMP)
        _, derivation = type_store(EMPTY_CONTEXT, store, Record(L0, IDENTITY_TYPE))
        other = Upd(L0, identity(), Upd(L0, reader(), EMP))
        moved = retype_store(derivation, other)
        assert moved.subject == other
        assert check_derivation(moved).ok
        assert type_equiv(moved.assigned, Record(L0, IDENTITY_TYPE))

    def test_retype_unequal_store(self):
        _, derivation = type_store(EMPTY_CONTEXT, Upd(L0, identity(), EMP))
        with raises(StoreTypingError):
            retype_store(derivation, Upd(L0, reader(), EMP))

    def test_restrict(self):
        store = Upd(L1, reader(), Upd(L0, identity(), EMP))
        _, derivation = type_store(EMPTY_CONTEXT, store)
        rest_type, rest = restrict_store(derivation, L1)
        assert rest_type == record(L0, Omega(VALUE))
        assert rest.subject == store.rest
        assert check_derivation(rest).ok


class TestSequencing:

    def test_derived_rule(self):
        derivation = sequencing_derivation()
        assert derivation.rule == 'bind'
        assert check_derivation(derivation).ok
        assert subtype(derivation.assigned, CONVERGENCE_TYPE)


class TestPreservation:

    def certified_trace(self, program):
        certificate = certify_convergence(program)
        assert certificate.ok
        return certificate.configuration_derivation, list(certificate.trace)

    def test_replays_every_step(self):
        derivation, trace = self.certified_trace(SET_GET)
        for following in trace[1:]:
            reduct = preserve_step(derivation, following)
            assert same_configuration(reduct.subject, following)
            assert check_derivation(reduct).ok
            assert type_equiv(reduct.assigned, derivation.assigned)
            derivation = reduct

    def test_beta_step(self):
        program = Bind(Unit(identity()), Lam('f', Unit(Var('f'))))
        derivation, trace = self.certified_trace(program)
        reduct = preserve_step(derivation)
        assert same_configuration(reduct.subject, trace[1])
        assert check_derivation(reduct).ok

    def test_rejects_wrong_reduct(self):
        derivation, trace = self.certified_trace(SET_GET)
        with raises(NotAStepError):
            preserve_step(derivation, trace[0])

    def test_requires_configuration(self):
        with raises(DerivationInputError):
            preserve_step(identity_derivation())

    def test_result_has_no_successor(self):
        derivation = seed_derivation(Configuration(Unit(identity()), EMP))
        with raises(NotAStepError):
            preserve_step(derivation)


class TestExpansionStep:

    def test_expands_back_to_source(self):
        for exemplar in exemplars():
            trace = exemplar.expected_trace
            derivation = seed_derivation(trace[-1])
            for source in reversed(trace[:-1]):
                derivation = expand_step(derivation, source)
                assert same_configuration(derivation.subject, source)
                assert check_derivation(derivation).ok

    def test_rejects_unrelated_source(self):
        trace = exemplars()[0].expected_trace
        derivation = seed_derivation(trace[-1])
        with raises(NotAStepError):
            expand_step(derivation, trace[0])

    def test_configuration_parts(self):
        trace = exemplars()[1].expected_trace
        derivation = expand_step(seed_derivation(trace[-1]), trace[-2])
        computation, store = conf_parts(derivation)
        assert alpha_eq(computation.subject, trace[-2].computation)
        assert check_derivation(computation).ok
        assert check_derivation(store).ok
        assert structural_family(derivation)


class TestCertificates:

    def test_converging_program(self):
        certificate = certify_convergence(SET_GET)
        assert certificate.ok
        assert certificate.outcome.steps == 2
        assert certificate.derivation.context == EMPTY_CONTEXT
        assert type_equiv(certificate.derivation.assigned, CONVERGENCE_TYPE)
        assert check_derivation(certificate.derivation).ok

    def test_exemplars_certified(self):
        for exemplar in exemplars():
            certificate = certify_convergence(exemplar.configuration.computation)
            assert certificate.ok
            assert len(certificate.trace) == len(exemplar.expected_trace)

    def test_blocked_program(self):
        failure = certify_convergence(READ)
        assert isinstance(failure, CertificationFailure)
        assert not failure.ok
        assert isinstance(failure.outcome, Blocked)

    def test_diverging_program(self):
        failure = certify_convergence(omega_c(), fuel=30)
        assert not failure.ok
        assert isinstance(failure.outcome, FuelExhausted)


class TestSearch:

    def test_finds_set_get(self):
        derivation = search_typing(EMPTY_CONTEXT, SET_GET, CONVERGENCE_TYPE)
        assert derivation is not None
        assert check_derivation(derivation).ok
        assert type_equiv(derivation.assigned, CONVERGENCE_TYPE)

    def test_open_term_in_context(self):
        context = EMPTY_CONTEXT.extend('x', OMEGA_D)
        derivation = search_typing(context, Unit(Var('x')), CONVERGENCE_TYPE)
        assert derivation is not None
        assert check_derivation(derivation).ok

    def test_omega_not_typable(self):
        assert search_typing(EMPTY_CONTEXT, omega_c(), CONVERGENCE_TYPE) is None

    def test_blocked_get_not_typable(self):
        assert search_typing(EMPTY_CONTEXT, READ, CONVERGENCE_TYPE) is None

    def test_get_with_store_requirement(self):
        tau = Arrow(Record(L0, IDENTITY_TYPE), Product(IDENTITY_TYPE, Omega('S')))
        derivation = search_typing(EMPTY_CONTEXT, READ, tau)
        assert derivation is not None
        assert check_derivation(derivation).ok

    def test_top_always_found(self):
        derivation = search_typing(EMPTY_CONTEXT, omega_c(), Omega('T'))
        assert derivation.rule == 'omega'

    def test_search_value(self):
        derivation = search_value(EMPTY_CONTEXT, identity(), IDENTITY_TYPE, 6)
        assert check_derivation(derivation).ok
        assert search_value(EMPTY_CONTEXT, Lam('x', omega_c()), IDENTITY_TYPE, 6) is None

    def test_trace_matches_run(self):
        certificate = certify_convergence(SET_GET)
        _, trace = run(Configuration(SET_GET, EMP))
        assert certificate.trace == tuple(trace)
