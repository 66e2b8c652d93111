#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
子类型公理搜索模块
在子类型公理、∧ 规则与单调性上做有界的目标导向证明搜索，用作判定过程的对照
"""

import logging
from functools import lru_cache
from itertools import combinations

from src.errors import SortMismatch
from src.type_language import (
    CANONICAL_TYPES, Arrow, Meet, Omega, Product, Record, reify, sort_of,
)

# 配置日志
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


def flatten(t) -> frozenset:
    """把类型展开为素类型的集合，ω 为空集"""
    if isinstance(t, CANONICAL_TYPES):
        t = reify(t)
    if isinstance(t, Omega):
        return frozenset()
    if isinstance(t, Meet):
        return flatten(t.left) | flatten(t.right)
    if isinstance(t, Arrow):
        return frozenset((('arr', flatten(t.source), flatten(t.target)),))
    if isinstance(t, Record):
        return frozenset((('rec', t.loc.index, flatten(t.value_type)),))
    if isinstance(t, Product):
        return frozenset((('prod', flatten(t.value_type), flatten(t.store_type)),))
    raise SortMismatch(f"不是类型表达式: {t!r}")


def _union(parts):
    result = frozenset()
    for part in parts:
        result |= part
    return result


@lru_cache(maxsize=None)
def _prove(gamma: frozenset, goal: frozenset, depth: int) -> bool:
    if depth <= 0:
        return False
    if goal <= gamma:
        return True
    if len(goal) > 1:
        return all(_prove(gamma, frozenset((prime,)), depth - 1) for prime in goal)
    (prime,) = tuple(goal)
    kind = prime[0]
    if kind == 'arr':
        _, source, target = prime
        if not target:
            return True
        arrows = [p for p in gamma if p[0] == 'arr']
        for size in range(1, len(arrows) + 1):
            for chosen in combinations(arrows, size):
                if not all(_prove(source, p[1], depth - 1) for p in chosen):
                    continue
                if _prove(_union(p[2] for p in chosen), target, depth - 1):
                    return True
        return False
    if kind == 'rec':
        _, index, value_type = prime
        fields = [p[2] for p in gamma if p[0] == 'rec' and p[1] == index]
        return bool(fields) and _prove(_union(fields), value_type, depth - 1)
    if kind == 'prod':
        _, value_type, store_type = prime
        products = [p for p in gamma if p[0] == 'prod']
        if not products:
            return False
        return (_prove(_union(p[1] for p in products), value_type, depth - 1)
                and _prove(_union(p[2] for p in products), store_type, depth - 1))
    raise SortMismatch(f"未知的素类型: {kind}")


def subtype_oracle(phi, psi, depth: int) -> bool:
    """
    有界搜索 φ ≤ ψ 的公理推导

    Args:
        phi: 类型
        psi: 同种类的类型
        depth: 推导高度上界

    Returns:
        bool: 在该高度内找到推导则为 True
    """
    if sort_of(phi) != sort_of(psi):
        raise SortMismatch("不能比较不同种类的类型")
    return _prove(flatten(phi), flatten(psi), depth)
