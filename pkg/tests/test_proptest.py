#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""性质测试运行器的测试"""

from pytest import raises

from src.exemplars import exemplars
from src.log_manager import LogManager
from src.proptest import SUITES, PropertyTestRunner, SuiteReport, small_big_agree
from src.realizability import Budget

SMALL = Budget(max_samples=5, fuel=100, max_term_size=5)


def make_runner(scale=0.02, seed=0):
    return PropertyTestRunner(seed=seed, scale=scale, budget=SMALL)


class TestSuiteReport:

    def test_passed(self):
        report = SuiteReport('golden', cases=3)
        assert report.passed
        report.failures = 1
        assert not report.passed

    def test_to_dict(self):
        data = SuiteReport('golden', cases=2, messages=['x']).to_dict()
        assert data == {'suite': 'golden', 'cases': 2, 'failures': 0, 'skipped': 0, 'messages': ['x']}


class TestRunner:

    def test_unknown_suite(self):
        with raises(ValueError):
            make_runner().run(('no-such-suite',))

    def test_scale_must_be_positive(self):
        with raises(ValueError):
            PropertyTestRunner(scale=0)

    def test_counts_scale(self):
        runner = make_runner(scale=0.02)
        assert runner.count('big-small') == 20
        assert make_runner(scale=0.0001).count('certificates') == 1
        assert PropertyTestRunner().count('subtyping-random') == 5000

    def test_seeded_per_suite(self):
        a, b = make_runner(seed=3), make_runner(seed=3)
        assert a.rng('big-small').random() == b.rng('big-small').random()
        assert a.rng('big-small').random() != a.rng('subtyping').random()

    def test_suite_names(self):
        assert len(SUITES) == 8
        assert 'golden' in SUITES


class TestSuites:

    def test_golden(self):
        log_manager = LogManager()
        runner = PropertyTestRunner(budget=SMALL, log_manager=log_manager)
        [report] = runner.run(('golden',))
        assert report.passed, report.messages
        assert report.cases == 9
        assert log_manager.get_log_summary()['total_count'] == report.cases

    def test_big_small_agreement(self):
        [report] = make_runner().run(('big-small',))
        assert report.cases == 20
        assert report.passed, report.messages

    def test_agreement_on_exemplars(self):
        for exemplar in exemplars():
            assert small_big_agree(exemplar.configuration, 100) == (True, '')

    def test_reports_in_requested_order(self):
        reports = make_runner().run(('golden', 'big-small'))
        assert [report.name for report in reports] == ['golden', 'big-small']
