#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
操作语义模块
负责格局、确定性的小步归约、阻塞格局判定、带步数下标的大步求值以及收敛判定
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

from src.errors import OpenTermError
from src.store import EMP, Upd, dom_store, resolve_lookup, store_alpha_eq, store_free_vars
from src.syntax import Bind, Get, Lam, Set, Unit, alpha_eq, free_vars, substitute

# 配置日志
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

DEFAULT_FUEL = 10000


@dataclass(frozen=True)
class Configuration:
    """格局 (M, s)"""
    computation: object
    store: object


# ---- 单步结果 ----

@dataclass(frozen=True)
class Next:
    configuration: Configuration


@dataclass(frozen=True)
class Halted:
    """(unit V, t) 已是结果"""
    value: object
    store: object


@dataclass(frozen=True)
class Blocked:
    configuration: Configuration
    steps: int = 0


# ---- 运行结果 ----

@dataclass(frozen=True)
class Converged:
    value: object
    store: object
    steps: int
    index: int


@dataclass(frozen=True)
class FuelExhausted:
    configuration: Configuration
    steps: int


StepOutcome = Union[Next, Halted, Blocked]
RunOutcome = Union[Converged, Blocked, FuelExhausted]


def configuration_free_vars(c: Configuration):
    return free_vars(c.computation) | store_free_vars(c.store)


def require_closed(c: Configuration):
    names = configuration_free_vars(c)
    if names:
        raise OpenTermError(names)


def step(c: Configuration) -> StepOutcome:
    """
    执行一步归约

    Args:
        c: 闭格局

    Returns:
        Next、Halted 或 Blocked

    Raises:
        OpenTermError: 格局不是闭的
    """
    require_closed(c)
    return _step(c.computation, c.store)


def _step(m, s) -> StepOutcome:
    # 沿 >>= 左脊下行，记下各层的函数，归约后再逐层包回
    top = m
    funcs = []
    while isinstance(m, Bind) and not (isinstance(m.comp, Unit) and isinstance(m.func, Lam)):
        funcs.append(m.func)
        m = m.comp
    if isinstance(m, Bind):
        # β_c
        outcome = Next(Configuration(substitute(m.func.body, m.func.var, m.comp.value), s))
    else:
        outcome = _redex(m, s)
    if not funcs:
        return outcome
    if not isinstance(outcome, Next):
        return Blocked(Configuration(top, s))
    reduct = outcome.configuration
    computation = reduct.computation
    for func in reversed(funcs):
        computation = Bind(computation, func)
    return Next(Configuration(computation, reduct.store))


def _redex(m, s) -> StepOutcome:
    if isinstance(m, Unit):
        return Halted(m.value, s)
    if isinstance(m, Get):
        if m.loc not in dom_store(s):
            return Blocked(Configuration(m, s))
        return Next(Configuration(substitute(m.body, m.var, resolve_lookup(m.loc, s)), s))
    if isinstance(m, Set):
        return Next(Configuration(m.body, Upd(m.loc, m.value, s)))
    raise TypeError(f"不是计算: {m!r}")


def redex_kind(c: Configuration) -> Optional[str]:
    """
    当前格局最外层所用的归约规则

    Returns:
        'beta'、'get'、'set'、'bind-context'，结果或阻塞格局返回 None
    """
    m, s = c.computation, c.store
    if isinstance(m, Bind):
        if isinstance(m.comp, Unit):
            return 'beta'
        inner = m.comp
        while isinstance(inner, Bind) and not isinstance(inner.comp, Unit):
            inner = inner.comp
        if isinstance(inner, Bind) or redex_kind(Configuration(inner, s)) is not None:
            return 'bind-context'
        return None
    if isinstance(m, Get):
        return 'get' if m.loc in dom_store(s) else None
    if isinstance(m, Set):
        return 'set'
    return None


def is_blocked(c: Configuration) -> bool:
    """(getℓ(λx.M), s) 且 ℓ ∉ dom(s)，或 (B ⟫= V, s) 且 (B, s) 阻塞"""
    m = c.computation
    while isinstance(m, Bind):
        m = m.comp
    return isinstance(m, Get) and m.loc not in dom_store(c.store)


def run(c: Configuration, fuel: int = DEFAULT_FUEL) -> Tuple[RunOutcome, List[Configuration]]:
    """
    反复执行小步归约直到得到结果、阻塞或燃料耗尽

    Args:
        c: 闭格局
        fuel: 最多执行的归约步数

    Returns:
        tuple: (运行结果, 经过的全部格局，含初始格局)
    """
    require_closed(c)
    trace = [c]
    current = c
    steps = 0
    while True:
        outcome = _step(current.computation, current.store)
        if isinstance(outcome, Halted):
            result = Converged(outcome.value, outcome.store, steps, steps)
            break
        if isinstance(outcome, Blocked):
            result = Blocked(current, steps)
            break
        if steps >= fuel:
            result = FuelExhausted(current, steps)
            break
        current = outcome.configuration
        steps += 1
        trace.append(current)
    logger.debug(f"小步运行结束: {type(result).__name__}，共 {steps} 步")
    return result, trace


class _OutOfFuel(Exception):
    pass


class _Stuck(Exception):
    def __init__(self, configuration):
        super().__init__()
        self.configuration = configuration


class _BigStepEvaluator:
    """大步求值器，每次使用 bind/get/set 规则消耗一单位燃料"""

    def __init__(self, fuel):
        self.fuel = fuel
        self.spent = 0

    def charge(self):
        if self.spent >= self.fuel:
            raise _OutOfFuel()
        self.spent += 1

    def evaluate(self, m, s):
        # 待执行的续体: (函数, 外层已累计的下标)
        pending = []
        index = 0
        while True:
            if isinstance(m, Unit):
                if not pending:
                    return m.value, s, index
                func, outer = pending.pop()
                self.charge()
                index = outer + index + 1
                m = substitute(func.body, func.var, m.value)
            elif isinstance(m, Get):
                if m.loc not in dom_store(s):
                    raise _Stuck(Configuration(m, s))
                self.charge()
                index += 1
                m = substitute(m.body, m.var, resolve_lookup(m.loc, s))
            elif isinstance(m, Set):
                self.charge()
                index += 1
                s = Upd(m.loc, m.value, s)
                m = m.body
            elif isinstance(m, Bind):
                pending.append((m.func, index))
                index = 0
                m = m.comp
            else:
                raise TypeError(f"不是计算: {m!r}")


def eval_big(c: Configuration, fuel: int = DEFAULT_FUEL) -> RunOutcome:
    """
    按收敛谓词的规则直接求值

    unit 的下标为 0，get/set 规则加 1，bind 规则为 n+m+1

    Args:
        c: 闭格局
        fuel: 可用的规则次数

    Returns:
        Converged、Blocked 或 FuelExhausted
    """
    require_closed(c)
    evaluator = _BigStepEvaluator(fuel)
    try:
        value, store, index = evaluator.evaluate(c.computation, c.store)
    except _Stuck as stuck:
        return Blocked(stuck.configuration, evaluator.spent)
    except _OutOfFuel:
        return FuelExhausted(c, evaluator.spent)
    return Converged(value, store, evaluator.spent, index)


def converges(m, fuel: int = DEFAULT_FUEL):
    """
    在空存储上运行 M

    Returns:
        tuple: (True/False/None, 运行结果)；燃料耗尽时为 None
    """
    outcome, _ = run(Configuration(m, EMP), fuel)
    if isinstance(outcome, Converged):
        return True, outcome
    if isinstance(outcome, Blocked):
        return False, outcome
    return None, outcome


def same_configuration(c1: Configuration, c2: Configuration) -> bool:
    return alpha_eq(c1.computation, c2.computation) and store_alpha_eq(c1.store, c2.store)


if __name__ == "__main__":
    from src.syntax import Location, Var, identity, omega_c

    loc = Location(0)
    program = Set(loc, identity(), Get(loc, 'x', Unit(Var('x'))))
    print(run(Configuration(program, EMP)))
    print(eval_big(Configuration(program, EMP)))
    print(run(Configuration(omega_c(), EMP), 5)[0])
