#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
生成器模块
按大小枚举或随机生成项、存储项与类型，供可实现性检查和性质测试使用
"""

import logging
import random
from functools import lru_cache
from itertools import chain, combinations
from typing import Iterator, Tuple

from src.store import EMP, Lkp, Upd, dom_store
from src.syntax import Bind, Get, Lam, Location, Set, Unit, Var, binder_name
from src.type_language import (
    COMPUTATION, RESULT, STORE, VALUE, Arrow, CompType, Product, Record, ResultType, StoreType,
    ValueType, meet, normalize, reify, top, type_key,
)

# 配置日志
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

DEFAULT_LOCATIONS = (Location(0), Location(1))


# ---- 项的枚举 ----

@lru_cache(maxsize=None)
def enumerate_values(size: int, scope: Tuple[str, ...] = (), locations=DEFAULT_LOCATIONS):
    """
    大小恰为 size、自由变量取自 scope 的全部值

    约束变量按绑定深度命名，因此结果中没有 α 等价的重复
    """
    if size <= 0:
        return ()
    if size == 1:
        return tuple(Var(name) for name in scope)
    name = binder_name(len(scope))
    return tuple(Lam(name, body) for body in enumerate_computations(size - 1, scope + (name,), locations))


@lru_cache(maxsize=None)
def enumerate_computations(size: int, scope: Tuple[str, ...] = (), locations=DEFAULT_LOCATIONS):
    """大小恰为 size、自由变量取自 scope 的全部计算"""
    if size <= 1:
        return ()
    found = [Unit(value) for value in enumerate_values(size - 1, scope, locations)]
    name = binder_name(len(scope))
    for loc in locations:
        found.extend(Get(loc, name, body)
                     for body in enumerate_computations(size - 1, scope + (name,), locations))
    for left in range(1, size - 1):
        right = size - 1 - left
        for loc in locations:
            found.extend(Set(loc, value, body)
                         for value in enumerate_values(left, scope, locations)
                         for body in enumerate_computations(right, scope, locations))
        found.extend(Bind(comp, func)
                     for comp in enumerate_computations(left, scope, locations)
                     for func in enumerate_values(right, scope, locations))
    return tuple(found)


def closed_values(max_size: int, locations=DEFAULT_LOCATIONS) -> Iterator:
    """按大小递增给出全部闭值"""
    return chain.from_iterable(enumerate_values(size, (), tuple(locations)) for size in range(1, max_size + 1))


def closed_computations(max_size: int, locations=DEFAULT_LOCATIONS) -> Iterator:
    return chain.from_iterable(enumerate_computations(size, (), tuple(locations))
                               for size in range(1, max_size + 1))


# ---- 随机项 ----

def random_value(rng: random.Random, size: int, locations=DEFAULT_LOCATIONS, scope: Tuple[str, ...] = ()):
    if scope and (size <= 1 or rng.random() < 0.3):
        return Var(rng.choice(scope))
    name = binder_name(len(scope))
    return Lam(name, random_computation(rng, max(size - 1, 1), locations, scope + (name,)))


def random_computation(rng: random.Random, size: int, locations=DEFAULT_LOCATIONS,
                       scope: Tuple[str, ...] = ()):
    """
    随机生成大小约为 size 的计算

    Args:
        rng: 随机数发生器
        size: 大小预算
        locations: 可用位置
        scope: 可用的自由变量
    """
    if size <= 2:
        return Unit(random_value(rng, 1, locations, scope))
    kinds = ['unit', 'bind', 'bind']
    if locations:
        kinds += ['get', 'set']
    kind = rng.choice(kinds)
    if kind == 'unit':
        return Unit(random_value(rng, size - 1, locations, scope))
    if kind == 'get':
        name = binder_name(len(scope))
        return Get(rng.choice(locations), name, random_computation(rng, size - 1, locations, scope + (name,)))
    split = rng.randint(1, size - 2)
    if kind == 'set':
        return Set(rng.choice(locations), random_value(rng, split, locations, scope),
                   random_computation(rng, size - 1 - split, locations, scope))
    return Bind(random_computation(rng, split, locations, scope),
                random_value(rng, size - 1 - split, locations, scope))


def random_store(rng: random.Random, locations=DEFAULT_LOCATIONS, value_size: int = 4):
    """随机闭存储项，每个位置至多更新两次"""
    store = EMP
    for loc in locations:
        for _ in range(rng.randint(0, 2)):
            store = Upd(loc, random_value(rng, value_size, locations), store)
    return store


# ---- 存储项的枚举 ----

def enumerate_store_terms(max_size: int, locations=DEFAULT_LOCATIONS, values=()) -> Tuple:
    """
    存储大小不超过 max_size 的全部存储项，槽位取自 values 或合式的查找项
    """
    return tuple(chain.from_iterable(_stores_of_size(size, tuple(locations), tuple(values))
                                     for size in range(1, max_size + 1)))


@lru_cache(maxsize=None)
def _stores_of_size(size, locations, values):
    if size == 1:
        return (EMP,)
    found = []
    for slot_size in range(1, size - 1):
        for slot in _slots_of_size(slot_size, locations, values):
            for rest in _stores_of_size(size - 1 - slot_size, locations, values):
                found.extend(Upd(loc, slot, rest) for loc in locations)
    return tuple(found)


@lru_cache(maxsize=None)
def _slots_of_size(size, locations, values):
    if size == 1:
        return values
    found = []
    for store in _stores_of_size(size - 1, locations, values):
        found.extend(Lkp(loc, store) for loc in locations if loc in dom_store(store))
    return tuple(found)


# ---- 类型 ----

@lru_cache(maxsize=None)
def enumerate_types(sort: str, depth: int, locations=DEFAULT_LOCATIONS) -> Tuple:
    """
    构造深度不超过 depth 的规范类型：每层取原子构造，再加入原子两两的交

    Returns:
        按 type_key 排序、去重后的规范形
    """
    if depth <= 0:
        return (top(sort),)
    smaller = depth - 1
    if sort == VALUE:
        atoms = [Arrow(d, t) for d in enumerate_types(VALUE, smaller, locations)
                 for t in enumerate_types(COMPUTATION, smaller, locations)]
    elif sort == STORE:
        atoms = [Record(loc, d) for loc in locations for d in enumerate_types(VALUE, smaller, locations)]
    elif sort == RESULT:
        atoms = [Product(d, s) for d in enumerate_types(VALUE, smaller, locations)
                 for s in enumerate_types(STORE, smaller, locations)]
    else:
        atoms = [Arrow(s, k) for s in enumerate_types(STORE, smaller, locations)
                 for k in enumerate_types(RESULT, smaller, locations)]
    canonical = {normalize(atom) for atom in atoms}
    found = set(canonical) | {top(sort)}
    found.update(meet(a, b) for a, b in combinations(sorted(canonical, key=type_key), 2))
    return tuple(sorted(found, key=type_key))


def random_type(rng: random.Random, sort: str, depth: int, locations=DEFAULT_LOCATIONS):
    """随机规范类型，每层至多两个合取项"""
    if depth <= 0 or rng.random() < 0.15:
        return top(sort)
    parts = []
    for _ in range(rng.randint(1, 2)):
        if sort == VALUE:
            parts.append(Arrow(random_type(rng, VALUE, depth - 1, locations),
                               random_type(rng, COMPUTATION, depth - 1, locations)))
        elif sort == STORE:
            parts.append(Record(rng.choice(locations), random_type(rng, VALUE, depth - 1, locations)))
        elif sort == RESULT:
            parts.append(Product(random_type(rng, VALUE, depth - 1, locations),
                                 random_type(rng, STORE, depth - 1, locations)))
        else:
            parts.append(Arrow(random_type(rng, STORE, depth - 1, locations),
                               random_type(rng, RESULT, depth - 1, locations)))
    return meet(*parts)


def random_supertype(rng: random.Random, t):
    """去掉规范形的一部分合取项，得到一个超类型"""
    t = normalize(t)
    if isinstance(t, (ValueType, CompType)):
        kept = tuple(arrow for arrow in t.arrows if rng.random() < 0.6)
        return normalize(reify(type(t)(kept)))
    if isinstance(t, StoreType):
        kept = tuple(entry for entry in t.entries if rng.random() < 0.6)
        return StoreType(kept)
    if isinstance(t, ResultType) and not t.top and rng.random() < 0.5:
        return ResultType(random_supertype(rng, t.value), random_supertype(rng, t.store))
    return t


def type_locations(t) -> frozenset:
    """类型中出现的全部位置"""
    t = normalize(t)
    if isinstance(t, (ValueType, CompType)):
        found = frozenset()
        for source, target in t.arrows:
            found |= type_locations(source) | type_locations(target)
        return found
    if isinstance(t, StoreType):
        found = frozenset(loc for loc, _ in t.entries)
        for _, value_type in t.entries:
            found |= type_locations(value_type)
        return found
    if t.top:
        return frozenset()
    return type_locations(t.value) | type_locations(t.store)


if __name__ == "__main__":
    print(list(closed_values(4, (Location(0),))))
    print(len(enumerate_store_terms(6, DEFAULT_LOCATIONS, (Var('a'), Var('b')))))
    print(len(enumerate_types(COMPUTATION, 3)))
