#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
范例模块
收录几段有代表性的程序、它们的归约轨迹以及手工搭建的推导，
供金标准测试和命令行演示使用
"""

import logging
from typing import NamedTuple, Tuple

from src.derivation import EMPTY_CONTEXT, Derivation, require_valid
from src.operational import Configuration
from src.store import EMP, Upd
from src.syntax import Bind, Get, Lam, Location, Set, Unit, Var, identity, omega_c
from src.type_assignment import (
    get_node, omega_node, search_value, seq_derivation, set_node, unit_node, var_node, weaken,
)
from src.type_language import CONVERGENCE_TYPE, OMEGA_S, Arrow, Meet, Omega, Record, VALUE

# 配置日志
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

L0 = Location(0)

# 恒等函数的一个类型：ωD → ωS → ωD × ωS
IDENTITY_TYPE = Arrow(Omega(VALUE), CONVERGENCE_TYPE)


class Exemplar(NamedTuple):
    """一段程序、它的初始格局以及期望的归约轨迹"""
    name: str
    configuration: Configuration
    expected_trace: Tuple[Configuration, ...]


def reader():
    """λx.get_l0(λy.unit y)：读出 l0 的函数，用作与恒等函数不同的值"""
    return Lam('x', Get(L0, 'y', Unit(Var('y'))))


def overriding() -> Exemplar:
    """
    set_l0(W).set_l0(V).get_l0(λx.unit x) 在空存储上三步得到 unit V，
    先写入的 W 被覆盖
    """
    v, w = identity(), reader()
    read = Get(L0, 'x', Unit(Var('x')))
    program = Set(L0, w, Set(L0, v, read))
    first = Upd(L0, w, EMP)
    second = Upd(L0, v, first)
    trace = (
        Configuration(program, EMP),
        Configuration(Set(L0, v, read), first),
        Configuration(read, second),
        Configuration(Unit(v), second),
    )
    return Exemplar('overriding', trace[0], trace)


def sequencing() -> Exemplar:
    """(set_l0(V).unit W) ; get_l0(λx.unit x)：W 被丢弃，x 绑定到写入的 V"""
    v, w = identity(), reader()
    tail = Get(L0, 'x', Unit(Var('x')))
    continuation = Lam('_', tail)
    program = Bind(Set(L0, v, Unit(w)), continuation)
    written = Upd(L0, v, EMP)
    trace = (
        Configuration(program, EMP),
        Configuration(Bind(Unit(w), continuation), written),
        Configuration(tail, written),
        Configuration(Unit(v), written),
    )
    return Exemplar('sequencing', trace[0], trace)


def exemplars():
    return (overriding(), sequencing())


def sequencing_derivation() -> Derivation:
    """
    用顺序组合的导出规则为 set_l0(V).unit W ; get_l0(λx.unit x) 搭建推导

    set 一侧得到 ωS → ωD × (⟨l0:δ⟩∧ωS)，get 一侧需要 ⟨l0:δ⟩∧ωS，
    组合后为 ωS → δ × ωS，其中 δ 是恒等函数的类型
    """
    v, w = identity(), reader()
    delta = IDENTITY_TYPE
    written = Meet(Record(L0, delta), OMEGA_S)

    value = search_value(EMPTY_CONTEXT, v, delta, 6)
    returned = unit_node(EMPTY_CONTEXT, omega_node(EMPTY_CONTEXT, w), written)
    first = set_node(EMPTY_CONTEXT, L0, value, returned, OMEGA_S)

    inner = EMPTY_CONTEXT.extend('x', delta)
    body = unit_node(inner, var_node(inner, 'x'), OMEGA_S)
    second = get_node(EMPTY_CONTEXT, L0, 'x', body)

    derivation = seq_derivation(first, second)
    require_valid(derivation, "顺序组合推导")
    return derivation


def set_get_derivation() -> Derivation:
    """
    set_l0(V).get_l0(λy.unit y) 的推导：先得到 ωS → δ × ωS，再放宽到 ωS → ωD × ωS
    """
    v = identity()
    delta = IDENTITY_TYPE
    value = search_value(EMPTY_CONTEXT, v, delta, 6)

    inner = EMPTY_CONTEXT.extend('y', delta)
    body = unit_node(inner, var_node(inner, 'y'), OMEGA_S)
    read = get_node(EMPTY_CONTEXT, L0, 'y', body)
    written = set_node(EMPTY_CONTEXT, L0, value, read, OMEGA_S)

    derivation = weaken(written, CONVERGENCE_TYPE)
    require_valid(derivation, "set/get 推导")
    return derivation


def diverging_lambda() -> Lam:
    """λx.Ω_c：与恒等函数一样属于 ⟦ωD⟧，但不属于 ⟦ωD → ωS → ωD × ωS⟧"""
    return Lam('x', omega_c())


if __name__ == "__main__":
    from src.printer import render_derivation, render_trace

    for exemplar in exemplars():
        print(exemplar.name)
        print(render_trace(exemplar.expected_trace))
    print(render_derivation(sequencing_derivation()))
