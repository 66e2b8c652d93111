#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""操作语义的测试"""

from pytest import raises

from src.errors import OpenTermError
from src.exemplars import exemplars, overriding, reader, sequencing
from src.operational import (
    Blocked, Configuration, Converged, FuelExhausted, Halted, Next, converges, eval_big,
    is_blocked, redex_kind, run, same_configuration, step,
)
from src.store import EMP, Upd
from src.syntax import Bind, Get, Lam, Location, Set, Unit, Var, identity, omega_c

L0 = Location(0)
L1 = Location(1)

READ = Get(L0, 'x', Unit(Var('x')))


class TestStep:

    def test_result_halts(self):
        outcome = step(Configuration(Unit(identity()), EMP))
        assert outcome == Halted(identity(), EMP)

    def test_beta(self):
        c = Configuration(Bind(Unit(identity()), Lam('f', Unit(Var('f')))), EMP)
        assert redex_kind(c) == 'beta'
        assert step(c) == Next(Configuration(Unit(identity()), EMP))

    def test_set_extends_store_outermost(self):
        store = Upd(L1, reader(), EMP)
        c = Configuration(Set(L0, identity(), READ), store)
        assert redex_kind(c) == 'set'
        assert step(c) == Next(Configuration(READ, Upd(L0, identity(), store)))

    def test_get_reads_latest_write(self):
        store = Upd(L0, identity(), Upd(L0, reader(), EMP))
        c = Configuration(READ, store)
        assert redex_kind(c) == 'get'
        assert step(c) == Next(Configuration(Unit(identity()), store))

    def test_bind_context(self):
        c = Configuration(Bind(Set(L0, identity(), Unit(identity())), identity()), EMP)
        assert redex_kind(c) == 'bind-context'
        outcome = step(c)
        assert outcome == Next(Configuration(Bind(Unit(identity()), identity()), Upd(L0, identity(), EMP)))

    def test_blocked_get(self):
        c = Configuration(READ, EMP)
        assert is_blocked(c)
        assert redex_kind(c) is None
        assert isinstance(step(c), Blocked)

    def test_blocked_under_bind(self):
        c = Configuration(Bind(READ, identity()), Upd(L1, identity(), EMP))
        assert is_blocked(c)
        assert step(c) == Blocked(c)

    def test_open_configuration_rejected(self):
        with raises(OpenTermError) as info:
            step(Configuration(Unit(Var('x')), EMP))
        assert info.value.free_names == {'x'}


class TestRun:

    def test_exemplar_traces(self):
        for exemplar in exemplars():
            outcome, trace = run(exemplar.configuration)
            assert isinstance(outcome, Converged)
            assert outcome.steps == len(exemplar.expected_trace) - 1
            assert tuple(trace) == exemplar.expected_trace

    def test_overriding_result(self):
        outcome, _ = run(overriding().configuration)
        assert outcome.value == identity()
        assert outcome.store == Upd(L0, identity(), Upd(L0, reader(), EMP))

    def test_sequencing_result(self):
        outcome, _ = run(sequencing().configuration)
        assert outcome.value == identity()
        assert outcome.store == Upd(L0, identity(), EMP)
        assert outcome.index == 3

    def test_blocked_outcome(self):
        outcome, trace = run(Configuration(READ, EMP))
        assert outcome == Blocked(Configuration(READ, EMP), 0)
        assert trace == [Configuration(READ, EMP)]

    def test_blocked_after_steps(self):
        program = Set(L1, identity(), READ)
        outcome, trace = run(Configuration(program, EMP))
        assert isinstance(outcome, Blocked)
        assert outcome.steps == 1
        assert len(trace) == 2

    def test_omega_exhausts_fuel(self):
        outcome, trace = run(Configuration(omega_c(), EMP), 5)
        assert isinstance(outcome, FuelExhausted)
        assert outcome.steps == 5
        assert len(trace) == 6
        assert all(c.computation == omega_c() for c in trace)

    def test_zero_fuel(self):
        outcome, trace = run(Configuration(Set(L0, identity(), READ), EMP), 0)
        assert isinstance(outcome, FuelExhausted)
        assert outcome.steps == 0
        assert len(trace) == 1

    def test_zero_fuel_still_sees_result(self):
        outcome, _ = run(Configuration(Unit(identity()), EMP), 0)
        assert isinstance(outcome, Converged)
        assert outcome.steps == 0

    def test_converges(self):
        assert converges(Set(L0, identity(), READ))[0] is True
        assert converges(READ)[0] is False
        assert converges(omega_c(), 20)[0] is None


class TestBigStep:

    def test_agrees_with_small_step_on_exemplars(self):
        for exemplar in exemplars():
            small, _ = run(exemplar.configuration)
            big = eval_big(exemplar.configuration)
            assert isinstance(big, Converged)
            assert big.value == small.value
            assert big.store == small.store
            assert big.index == small.steps

    def test_unit_has_index_zero(self):
        big = eval_big(Configuration(Unit(identity()), EMP))
        assert big == Converged(identity(), EMP, 0, 0)

    def test_blocked_reports_stuck_get(self):
        c = Configuration(Bind(READ, identity()), EMP)
        big = eval_big(c)
        assert isinstance(big, Blocked)
        assert big.configuration == Configuration(READ, EMP)

    def test_omega_runs_out(self):
        big = eval_big(Configuration(omega_c(), EMP), 50)
        assert isinstance(big, FuelExhausted)
        assert big.steps == 50

    def test_open_rejected(self):
        with raises(OpenTermError):
            eval_big(Configuration(READ, Upd(L0, Var('y'), EMP)))


GROWING = Lam('x', Bind(Bind(Unit(Var('x')), Var('x')), Lam('y', Unit(Var('y')))))


def nested(depth):
    """深度为 depth 的左嵌套 (unit id >>= id) >>= id ..."""
    m = Unit(identity())
    for _ in range(depth):
        m = Bind(m, identity())
    return m


def bind_depth(m):
    depth = 0
    while isinstance(m, Bind):
        depth += 1
        m = m.comp
    return depth


class TestDeepNesting:

    def test_big_step_on_deep_term(self):
        outcome = eval_big(Configuration(nested(3000), EMP), 10000)
        assert isinstance(outcome, Converged)
        assert outcome.value == identity()
        assert outcome.index == 3000
        assert outcome.steps == 3000

    def test_small_step_on_deep_term(self):
        c = Configuration(nested(3000), EMP)
        assert redex_kind(c) == 'bind-context'
        assert not is_blocked(c)
        outcome, trace = run(c, 10)
        assert isinstance(outcome, FuelExhausted)
        assert outcome.steps == 10
        assert bind_depth(outcome.configuration.computation) == 2990
        assert len(trace) == 11

    def test_growing_term_small_steps(self):
        c = Configuration(Bind(Unit(GROWING), GROWING), EMP)
        for _ in range(2100):
            outcome = step(c)
            assert isinstance(outcome, Next)
            c = outcome.configuration
        assert bind_depth(c.computation) == 2101

    def test_growing_term_big_step(self):
        c = Configuration(Bind(Unit(GROWING), GROWING), EMP)
        outcome = eval_big(c, 5000)
        assert isinstance(outcome, FuelExhausted)
        assert outcome.steps == 5000


class TestSameConfiguration:

    def test_alpha_equivalent(self):
        a = Configuration(Get(L0, 'x', Unit(Var('x'))), Upd(L0, identity(), EMP))
        b = Configuration(Get(L0, 'y', Unit(Var('y'))), Upd(L0, Lam('z', Unit(Var('z'))), EMP))
        assert same_configuration(a, b)

    def test_different_store(self):
        a = Configuration(READ, Upd(L0, identity(), EMP))
        b = Configuration(READ, Upd(L0, reader(), EMP))
        assert not same_configuration(a, b)
