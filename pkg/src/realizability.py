#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
可实现性模块
在预算内检查闭值、闭存储、结果与闭计算是否属于类型的解释，
并据此对“代换后的项属于其类型的解释”做反例搜索
"""

import logging
import random
from dataclasses import dataclass, field
from itertools import islice
from typing import Dict, Iterator, Optional, Tuple

from src.derivation import require_valid, subject_free_vars, subst_subject
from src.errors import EmptyGenerator, OpenTermError, SortMismatch
from src.generators import closed_values, type_locations
from src.operational import Configuration, Converged, run
from src.store import EMP, Emp, Upd, dom_store, resolve_lookup, store_free_vars
from src.syntax import Bind, Location, Unit, free_vars, is_computation, is_value
from src.type_language import (
    COMPUTATION, OMEGA_D, RESULT, STORE, VALUE, CompType, ResultType, StoreType, ValueType,
    is_top, normalize, sort_of, type_key,
)

# 配置日志
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

YES, NO, UNKNOWN = 'yes', 'no', 'unknown'
MAX_EXTRA_LOCATIONS = 2


@dataclass(frozen=True)
class Budget:
    """采样数、每次运行的燃料与枚举值的大小上界"""
    max_samples: int = 50
    fuel: int = 500
    max_term_size: int = 8

    def __post_init__(self):
        if min(self.max_samples, self.fuel, self.max_term_size) <= 0:
            raise ValueError("预算的各项必须为正整数")

    def to_dict(self):
        return {'max_samples': self.max_samples, 'fuel': self.fuel, 'max_term_size': self.max_term_size}


@dataclass(frozen=True)
class Result:
    """收敛计算的结果 (V, t)"""
    value: object
    store: object


class _Bottom:
    """发散或阻塞的结果 ⊥C"""

    def __repr__(self):
        return 'BOTTOM'


BOTTOM = _Bottom()


@dataclass(frozen=True)
class Witness:
    """反例：量化的输入与观察到的结果"""
    inputs: Tuple = ()
    observed: object = None

    def to_dict(self):
        from src.printer import render_entity
        return {'inputs': [render_entity(item) for item in self.inputs],
                'observed': render_entity(self.observed)}


@dataclass(frozen=True)
class MembershipVerdict:
    kind: str
    exhaustive: bool = True
    witness: Optional[Witness] = None
    budget: Budget = field(default_factory=Budget)
    seed: int = 0

    @property
    def holds(self):
        return self.kind == YES

    def to_dict(self):
        return {
            'verdict': self.kind,
            'exhaustive': self.exhaustive,
            'witness': self.witness.to_dict() if self.witness else None,
            'budget': self.budget.to_dict(),
            'seed': self.seed,
        }


def entity_sort(entity) -> str:
    if is_value(entity):
        return VALUE
    if is_computation(entity):
        return COMPUTATION
    if isinstance(entity, (Emp, Upd)):
        return STORE
    if isinstance(entity, (Result, _Bottom, Configuration)):
        return RESULT
    raise SortMismatch(f"不能检查成员关系: {entity!r}")


def run_result(computation, store, fuel: int):
    """M(s)：收敛时为 (V, t)，阻塞或燃料耗尽时为 ⊥C"""
    outcome, _ = run(Configuration(computation, store), fuel)
    if isinstance(outcome, Converged):
        return Result(outcome.value, outcome.store)
    return BOTTOM


class _Membership:
    """一次检查共享的缓存与随机源"""

    def __init__(self, budget: Budget, seed: int):
        self.budget = budget
        self.seed = seed
        self.cache: Dict = {}

    def verdict(self, kind, exhaustive=True, witness=None):
        return MembershipVerdict(kind, exhaustive, witness, self.budget, self.seed)

    def check(self, entity, phi) -> MembershipVerdict:
        key = (entity, type_key(phi))
        if key not in self.cache:
            self.cache[key] = self._check(entity, phi)
        return self.cache[key]

    def _check(self, entity, phi):
        if is_top(phi):
            return self.verdict(YES)
        if isinstance(phi, ValueType):
            return self._conjunction(self._arrow_value(entity, source, target) for source, target in phi.arrows)
        if isinstance(phi, CompType):
            return self._conjunction(self._arrow_comp(entity, source, target) for source, target in phi.arrows)
        if isinstance(phi, StoreType):
            return self._conjunction(self._record(entity, loc, value_type) for loc, value_type in phi.entries)
        return self._product(entity, phi)

    def _conjunction(self, verdicts):
        exhaustive = True
        unknown = None
        for verdict in verdicts:
            if verdict.kind == NO:
                return verdict
            exhaustive = exhaustive and verdict.exhaustive
            if verdict.kind == UNKNOWN and unknown is None:
                unknown = verdict
        if unknown is not None:
            return self.verdict(UNKNOWN, False, unknown.witness)
        return self.verdict(YES, exhaustive)

    def _record(self, store, loc, value_type):
        if loc not in dom_store(store):
            return self.verdict(NO, True, Witness((store,), loc))
        inner = self.check(resolve_lookup(loc, store), value_type)
        if inner.kind == NO:
            return self.verdict(NO, inner.exhaustive, Witness((store,) + inner.witness.inputs, inner.witness.observed))
        return inner

    def _product(self, entity, phi: ResultType):
        if isinstance(entity, Configuration):
            entity = run_result(entity.computation, entity.store, self.budget.fuel)
        if entity is BOTTOM:
            return self.verdict(NO, True, Witness((), BOTTOM))
        return self._conjunction((self.check(entity.value, phi.value), self.check(entity.store, phi.store)))

    def _arrow_value(self, value, source, target):
        """V ∈ ⟦δ → τ⟧：对采样的 W ∈ ⟦δ⟧ 检查 unit W ⟫= V ∈ ⟦τ⟧"""
        unknown = None
        for argument in islice(gen_values(source, self.budget, self.seed, self), self.budget.max_samples):
            inner = self.check(Bind(Unit(argument), value), target)
            if inner.kind == NO:
                return self.verdict(NO, False, Witness((argument,) + inner.witness.inputs, inner.witness.observed))
            if inner.kind == UNKNOWN and unknown is None:
                unknown = inner
        if unknown is not None:
            return self.verdict(UNKNOWN, False, unknown.witness)
        return self.verdict(YES, False)

    def _arrow_comp(self, computation, source, target):
        """M ∈ ⟦σ → κ⟧：对采样的 s ∈ ⟦σ⟧ 检查 M(s) ∈ ⟦κ⟧"""
        try:
            stores = list(islice(gen_stores(source, self.budget, self.seed, self), self.budget.max_samples))
        except EmptyGenerator as e:
            logger.debug(f"存储生成器为空: {str(e)}")
            return self.verdict(UNKNOWN, False)
        unknown = None
        for store in stores:
            observed = run_result(computation, store, self.budget.fuel)
            inner = self.check(observed, target) if observed is not BOTTOM else self.verdict(
                NO, True, Witness((), BOTTOM))
            if inner.kind == NO:
                return self.verdict(NO, False, Witness((store,) + inner.witness.inputs, inner.witness.observed))
            if inner.kind == UNKNOWN and unknown is None:
                unknown = inner
        if unknown is not None:
            return self.verdict(UNKNOWN, False, unknown.witness)
        return self.verdict(YES, False)


def member(entity, phi, budget: Budget = None, seed: int = 0) -> MembershipVerdict:
    """
    在预算内检查 entity ∈ ⟦φ⟧

    箭头类型对采样的输入做量化，找不到反例时给出非穷尽的 yes；
    阻塞与燃料耗尽都视为 ⊥C。

    Args:
        entity: 闭值、闭存储项、结果/⊥C/格局或闭计算，种类须与 φ 一致
        phi: 类型
        budget: 预算
        seed: 随机种子

    Returns:
        MembershipVerdict

    Raises:
        SortMismatch: entity 与 φ 的种类不同
    """
    budget = budget or Budget()
    phi = normalize(phi)
    if not is_closed_entity(entity):
        raise OpenTermError(entity_free_vars(entity))
    if entity_sort(entity) != sort_of(phi):
        raise SortMismatch(f"成员检查的主语种类 {entity_sort(entity)} 与类型种类 {sort_of(phi)} 不同")
    verdict = _Membership(budget, seed).check(entity, phi)
    logger.debug(f"成员检查 {phi}: {verdict.kind}")
    return verdict


def _candidate_locations(t):
    return tuple(sorted(type_locations(t) | {Location(0)}))


def gen_values(delta, budget: Budget = None, seed: int = 0, checker: _Membership = None) -> Iterator:
    """
    按大小递增枚举闭值，只保留检查结果为 yes 的值

    Args:
        delta: 值类型
        budget: 预算
        seed: 随机种子

    Returns:
        生成器
    """
    budget = budget or Budget()
    delta = normalize(delta)
    checker = checker or _Membership(budget, seed)
    for value in closed_values(budget.max_term_size, _candidate_locations(delta)):
        if is_top(delta) or checker.check(value, delta).kind == YES:
            yield value


def _first_value(delta, budget, seed, checker):
    found = next(iter(gen_values(delta, budget, seed, checker)), None)
    if found is None:
        raise EmptyGenerator(delta)
    return found


def gen_stores(sigma, budget: Budget = None, seed: int = 0, checker: _Membership = None) -> Iterator:
    """
    生成属于 ⟦σ⟧ 的闭存储项

    第一个存储项为每个位置绑定最小的合格值；之后按种子随机选择合格值，
    并在 σ 之外至多添加两个无约束的位置。

    Raises:
        EmptyGenerator: 某个位置在预算内没有合格的值
    """
    budget = budget or Budget()
    sigma = normalize(sigma)
    checker = checker or _Membership(budget, seed)
    pools = {}
    for loc, value_type in sigma.entries:
        pools[loc] = list(islice(gen_values(value_type, budget, seed, checker), budget.max_samples))
        if not pools[loc]:
            raise EmptyGenerator(value_type)

    anything = list(islice(closed_values(budget.max_term_size, (Location(0),)), budget.max_samples))

    def build(choose, extra):
        store = EMP
        for loc, _ in sigma.entries:
            store = Upd(loc, choose(pools[loc]), store)
        for loc in extra:
            store = Upd(loc, choose(anything), store)
        return store

    yield build(lambda pool: pool[0], ())
    rng = random.Random(f"{seed}:{type_key(sigma)}")
    used = max((loc.index for loc, _ in sigma.entries), default=-1)
    spare = [Location(used + offset) for offset in range(1, MAX_EXTRA_LOCATIONS + 1)]
    while True:
        extra = spare[:rng.randint(0, MAX_EXTRA_LOCATIONS)]
        yield build(rng.choice, extra)


@dataclass(frozen=True)
class Counterexample:
    substitution: Tuple
    verdict: MembershipVerdict

    def to_dict(self):
        from src.printer import render_entity
        return {'substitution': {name: render_entity(value) for name, value in self.substitution},
                'verdict': self.verdict.to_dict()}


def falsify_comp_lemma(derivation, budget: Budget = None, seed: int = 0, validate: bool = True):
    """
    对 Γ ⊢ M : τ 采样 Vᵢ ∈ ⟦δᵢ⟧，检查 M[V₁/x₁]⋯[Vₙ/xₙ] ∈ ⟦τ⟧

    Args:
        derivation: 推导
        budget: 预算
        seed: 随机种子
        validate: 是否先检查推导

    Returns:
        第一个反例 Counterexample，找不到时为 None

    Raises:
        DerivationInputError: 推导未通过检查
        EmptyGenerator: 某个上下文类型在预算内没有闭值
    """
    if validate:
        require_valid(derivation)
    budget = budget or Budget()
    rng = random.Random(seed)
    pools = []
    for name, value_type in derivation.context.bindings:
        pool = list(islice(gen_values(value_type, budget, seed), budget.max_samples))
        if not pool:
            raise EmptyGenerator(value_type)
        pools.append((name, pool))
    rounds = budget.max_samples if pools else 1
    for index in range(rounds):
        if index == 0:
            chosen = tuple((name, pool[0]) for name, pool in pools)
        else:
            chosen = tuple((name, rng.choice(pool)) for name, pool in pools)
        instance = subst_subject(derivation.subject, dict(chosen))
        verdict = member(instance, derivation.assigned, budget, seed)
        if verdict.kind == NO:
            logger.info(f"找到反例: {chosen}")
            return Counterexample(chosen, verdict)
    return None


def entity_free_vars(entity):
    if isinstance(entity, _Bottom):
        return frozenset()
    if isinstance(entity, Result):
        return free_vars(entity.value) | store_free_vars(entity.store)
    return subject_free_vars(entity)


def is_closed_entity(entity) -> bool:
    return not entity_free_vars(entity)


if __name__ == "__main__":
    from src.syntax import identity, omega_c
    from src.type_language import CONVERGENCE_TYPE, value_arrow

    print(member(identity(), value_arrow(OMEGA_D, CONVERGENCE_TYPE)).to_dict())
    print(member(omega_c(), CONVERGENCE_TYPE).kind)
