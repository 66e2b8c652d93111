#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
类型语言模块
负责四个互递归的类型种类 δ/σ/κ/τ、原始类型表达式、规范形、交、dom(σ) 以及子类型判定

原始类型是语法树，规范形是按等价关系整理后的表示：
  δ：箭头集合，空集为 ωD
  σ：位置到 δ 的有序映射，空映射为 ωS
  κ：ωC 或单个积类型 δ × σ
  τ：以积类型为目标的箭头集合，空集为 ωT
"""

import logging
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import FrozenSet, Optional, Tuple, Union

from src.errors import SortMismatch
from src.syntax import Location

# 配置日志
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

VALUE, STORE, RESULT, COMPUTATION = 'D', 'S', 'C', 'T'
SORTS = (VALUE, STORE, RESULT, COMPUTATION)


# ---- 原始类型 ----

@dataclass(frozen=True)
class Omega:
    sort: str


@dataclass(frozen=True)
class Arrow:
    """δ → τ 或 σ → κ"""
    source: object
    target: object


@dataclass(frozen=True)
class Meet:
    left: object
    right: object


@dataclass(frozen=True)
class Record:
    """⟨ℓ : δ⟩"""
    loc: Location
    value_type: object


@dataclass(frozen=True)
class Product:
    """δ × σ"""
    value_type: object
    store_type: object


RawType = Union[Omega, Arrow, Meet, Record, Product]


# ---- 规范形 ----

class _Rendered:
    def __str__(self):
        from src.printer import render_type
        return render_type(self)


@dataclass(frozen=True)
class ValueType(_Rendered):
    arrows: Tuple[Tuple['ValueType', 'CompType'], ...] = ()


@dataclass(frozen=True)
class StoreType(_Rendered):
    entries: Tuple[Tuple[Location, ValueType], ...] = ()

    def lookup(self, loc: Location) -> Optional[ValueType]:
        for entry_loc, value_type in self.entries:
            if entry_loc == loc:
                return value_type
        return None


@dataclass(frozen=True)
class ResultType(_Rendered):
    """value 与 store 同时为 None 时表示 ωC"""
    value: Optional[ValueType] = None
    store: Optional[StoreType] = None

    @property
    def top(self):
        return self.value is None


@dataclass(frozen=True)
class CompType(_Rendered):
    arrows: Tuple[Tuple[StoreType, ResultType], ...] = ()


CANONICAL_TYPES = (ValueType, StoreType, ResultType, CompType)

OMEGA_D = ValueType()
OMEGA_S = StoreType()
OMEGA_C = ResultType()
OMEGA_T = CompType()

_TOPS = {VALUE: OMEGA_D, STORE: OMEGA_S, RESULT: OMEGA_C, COMPUTATION: OMEGA_T}
_CANONICAL_SORT = {ValueType: VALUE, StoreType: STORE, ResultType: RESULT, CompType: COMPUTATION}


def top(sort: str):
    return _TOPS[sort]


def is_top(t) -> bool:
    t = normalize(t)
    return t == _TOPS[_CANONICAL_SORT[type(t)]]


def sort_of(t) -> str:
    """
    类型表达式的种类

    Raises:
        SortMismatch: 交的两边种类不同，或箭头、记录、积的组成部分种类不对
    """
    if isinstance(t, CANONICAL_TYPES):
        return _CANONICAL_SORT[type(t)]
    if isinstance(t, Omega):
        if t.sort not in SORTS:
            raise SortMismatch(f"未知的 ω 种类: {t.sort}")
        return t.sort
    if isinstance(t, Arrow):
        source, target = sort_of(t.source), sort_of(t.target)
        if source == VALUE and target == COMPUTATION:
            return VALUE
        if source == STORE and target == RESULT:
            return COMPUTATION
        raise SortMismatch(f"箭头两边的种类不匹配: {source} → {target}")
    if isinstance(t, Meet):
        left, right = sort_of(t.left), sort_of(t.right)
        if left != right:
            raise SortMismatch(f"交的两边种类不同: {left} ∧ {right}")
        return left
    if isinstance(t, Record):
        if sort_of(t.value_type) != VALUE:
            raise SortMismatch("记录类型的分量必须是值类型")
        return STORE
    if isinstance(t, Product):
        if sort_of(t.value_type) != VALUE or sort_of(t.store_type) != STORE:
            raise SortMismatch("积类型必须是值类型 × 存储类型")
        return RESULT
    raise SortMismatch(f"不是类型表达式: {t!r}")


# ---- 结构键与排序 ----

@lru_cache(maxsize=None)
def type_key(t):
    """规范形上的全序键"""
    if isinstance(t, ValueType):
        return ('D', tuple((type_key(s), type_key(k)) for s, k in t.arrows))
    if isinstance(t, CompType):
        return ('T', tuple((type_key(s), type_key(k)) for s, k in t.arrows))
    if isinstance(t, StoreType):
        return ('S', tuple((loc.index, type_key(d)) for loc, d in t.entries))
    if isinstance(t, ResultType):
        if t.top:
            return ('C',)
        return ('C', type_key(t.value), type_key(t.store))
    raise TypeError(f"不是规范类型: {t!r}")


# ---- 子类型判定 ----

@lru_cache(maxsize=None)
def _value_le(a: ValueType, b: ValueType) -> bool:
    for source, target in b.arrows:
        selected = [t for s, t in a.arrows if _value_le(source, s)]
        if not selected or not _comp_le(_meet_all(selected, OMEGA_T), target):
            return False
    return True


@lru_cache(maxsize=None)
def _comp_le(a: CompType, b: CompType) -> bool:
    for source, target in b.arrows:
        selected = [k for s, k in a.arrows if _store_le(source, s)]
        if not selected or not _result_le(_meet_all(selected, OMEGA_C), target):
            return False
    return True


@lru_cache(maxsize=None)
def _store_le(a: StoreType, b: StoreType) -> bool:
    entries = dict(a.entries)
    return all(loc in entries and _value_le(entries[loc], d) for loc, d in b.entries)


@lru_cache(maxsize=None)
def _result_le(a: ResultType, b: ResultType) -> bool:
    if b.top:
        return True
    if a.top:
        return False
    return _value_le(a.value, b.value) and _store_le(a.store, b.store)


_LE = {VALUE: _value_le, STORE: _store_le, RESULT: _result_le, COMPUTATION: _comp_le}


# ---- 交 ----

def _reduce_arrows(arrows, source_le, target_le, target_top):
    """
    整理箭头集合：丢弃目标为顶的箭头，合并同源箭头，
    按连续性把目标收紧为所有更大源的目标之交，再删去可由其余箭头推出的箭头
    """
    merged = {}
    for source, target in arrows:
        if target == target_top:
            continue
        merged[source] = _meet(merged[source], target) if source in merged else target
    saturated = {
        source: _meet_all([merged[other] for other in merged if source_le(source, other)], target_top)
        for source in merged
    }
    kept = sorted(saturated.items(), key=lambda arrow: (type_key(arrow[0]), type_key(arrow[1])))
    index = 0
    while index < len(kept):
        source, target = kept[index]
        rest = kept[:index] + kept[index + 1:]
        selected = [t for s, t in rest if source_le(source, s)]
        if selected and target_le(_meet_all(selected, target_top), target):
            kept = rest
        else:
            index += 1
    return tuple(kept)


@lru_cache(maxsize=None)
def _meet(a, b):
    if isinstance(a, ValueType) and isinstance(b, ValueType):
        return ValueType(_reduce_arrows(a.arrows + b.arrows, _value_le, _comp_le, OMEGA_T))
    if isinstance(a, CompType) and isinstance(b, CompType):
        return CompType(_reduce_arrows(a.arrows + b.arrows, _store_le, _result_le, OMEGA_C))
    if isinstance(a, StoreType) and isinstance(b, StoreType):
        entries = dict(a.entries)
        for loc, d in b.entries:
            entries[loc] = _meet(entries[loc], d) if loc in entries else d
        return StoreType(tuple(sorted(entries.items(), key=lambda entry: entry[0])))
    if isinstance(a, ResultType) and isinstance(b, ResultType):
        if a.top:
            return b
        if b.top:
            return a
        return ResultType(_meet(a.value, b.value), _meet(a.store, b.store))
    raise SortMismatch(f"不能对不同种类的类型取交: {type(a).__name__} ∧ {type(b).__name__}")


def _meet_all(types, unit):
    return reduce(_meet, types, unit)


def meet(*types):
    """
    规范形上的交（最大下界）

    Args:
        *types: 同一种类的类型，原始或规范形均可，至少一个

    Returns:
        规范形
    """
    canonical = [normalize(t) for t in types]
    return reduce(_meet, canonical[1:], canonical[0])


# ---- 规范化 ----

@lru_cache(maxsize=None)
def normalize(raw):
    """
    把原始类型整理为规范形；对规范形是恒等

    Raises:
        SortMismatch: 类型表达式种类不一致
    """
    if isinstance(raw, CANONICAL_TYPES):
        return raw
    sort = sort_of(raw)
    if isinstance(raw, Omega):
        return _TOPS[sort]
    if isinstance(raw, Arrow):
        source, target = normalize(raw.source), normalize(raw.target)
        if sort == VALUE:
            return ValueType(_reduce_arrows(((source, target),), _value_le, _comp_le, OMEGA_T))
        return CompType(_reduce_arrows(((source, target),), _store_le, _result_le, OMEGA_C))
    if isinstance(raw, Meet):
        return _meet(normalize(raw.left), normalize(raw.right))
    if isinstance(raw, Record):
        return StoreType(((raw.loc, normalize(raw.value_type)),))
    if isinstance(raw, Product):
        return ResultType(normalize(raw.value_type), normalize(raw.store_type))
    raise SortMismatch(f"不是类型表达式: {raw!r}")


def reify(t):
    """规范形转回原始类型表达式，交按从左到右结合"""
    t = normalize(t)
    if isinstance(t, ValueType):
        parts = [Arrow(reify(s), reify(k)) for s, k in t.arrows]
        return _fold_meet(parts, Omega(VALUE))
    if isinstance(t, CompType):
        parts = [Arrow(reify(s), reify(k)) for s, k in t.arrows]
        return _fold_meet(parts, Omega(COMPUTATION))
    if isinstance(t, StoreType):
        parts = [Record(loc, reify(d)) for loc, d in t.entries]
        return _fold_meet(parts, Omega(STORE))
    if t.top:
        return Omega(RESULT)
    return Product(reify(t.value), reify(t.store))


def _fold_meet(parts, omega):
    if not parts:
        return omega
    return reduce(Meet, parts[1:], parts[0])


def subtype(phi, psi) -> bool:
    """
    判定 φ ≤ ψ

    Args:
        phi: 类型（原始或规范形）
        psi: 同种类的类型

    Returns:
        bool

    Raises:
        SortMismatch: 两者种类不同
    """
    a, b = normalize(phi), normalize(psi)
    sort_a, sort_b = sort_of(a), sort_of(b)
    if sort_a != sort_b:
        raise SortMismatch(f"不能比较不同种类的类型: {sort_a} 与 {sort_b}")
    return _LE[sort_a](a, b)


def type_equiv(phi, psi) -> bool:
    return subtype(phi, psi) and subtype(psi, phi)


def dom_sigma(sigma) -> FrozenSet[Location]:
    """dom(ωS) = ∅，dom(⟨ℓ:δ⟩) = {ℓ}，dom(σ∧σ') = dom(σ) ∪ dom(σ')"""
    sigma = normalize(sigma)
    if not isinstance(sigma, StoreType):
        raise SortMismatch("dom 只对存储类型有定义")
    return frozenset(loc for loc, _ in sigma.entries)


def jmax(arrows, source):
    """arrows 中源类型不小于 source 的全部箭头"""
    source = normalize(source)
    return [(s, t) for s, t in arrows if subtype(source, s)]


# ---- 构造辅助 ----

def value_arrow(source, target) -> ValueType:
    return normalize(Arrow(source, target))


def comp_arrow(source, target) -> CompType:
    return normalize(Arrow(source, target))


def record(loc: Location, value_type) -> StoreType:
    return StoreType(((loc, normalize(value_type)),))


def product(value_type, store_type) -> ResultType:
    return ResultType(normalize(value_type), normalize(store_type))


def store_without(sigma: StoreType, loc: Location) -> StoreType:
    return StoreType(tuple((entry_loc, d) for entry_loc, d in normalize(sigma).entries if entry_loc != loc))


CONVERGENCE_TYPE = CompType(((OMEGA_S, ResultType(OMEGA_D, OMEGA_S)),))
"""ωS → ωD × ωS"""


if __name__ == "__main__":
    loc = Location(0)
    print(subtype(OMEGA_D, Arrow(Omega(VALUE), Omega(COMPUTATION))))
    print(subtype(OMEGA_S, Record(loc, Omega(VALUE))))
    print(normalize(Meet(Record(loc, Omega(VALUE)), Record(loc, Omega(VALUE)))))
