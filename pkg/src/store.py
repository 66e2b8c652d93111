#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
存储代数模块
负责存储项与查找项的表示、查找求值、删除、范式、外延等价以及可判定的相等
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import FrozenSet, Union

from src.errors import UndefinedLocation, WellFormednessError
from src.syntax import Location, Value, free_vars, alpha_eq, to_nameless

# 配置日志
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Emp:
    pass


@dataclass(frozen=True)
class Upd:
    """upd(ℓ, u, s)，u 为值或查找项"""
    loc: Location
    slot: Union[Value, 'Lkp']
    rest: 'StoreTerm'


@dataclass(frozen=True)
class Lkp:
    """lkp(ℓ, s)，构造时检查 ℓ ∈ dom(s)"""
    loc: Location
    store: 'StoreTerm'

    def __post_init__(self):
        if self.loc not in dom_store(self.store):
            raise WellFormednessError(f"lkp({self.loc}, ...) 不合式: {self.loc} 不在存储项的定义域中")


StoreTerm = Union[Emp, Upd]
LookupTerm = Union[Value, Lkp]

EMP = Emp()


def dom_store(s) -> FrozenSet[Location]:
    """dom(emp) = ∅，dom(upd(ℓ,u,s)) = {ℓ} ∪ dom(s)"""
    locations = set()
    while isinstance(s, Upd):
        locations.add(s.loc)
        s = s.rest
    return frozenset(locations)


def resolve_lookup(loc: Location, s) -> Value:
    """
    求 lkp(ℓ, s) 的值：最左最外的 ℓ 绑定，嵌套查找递归求值

    Args:
        loc: 位置
        s: 存储项

    Returns:
        值

    Raises:
        UndefinedLocation: ℓ 不在 dom(s) 中
    """
    while isinstance(s, Upd):
        if s.loc == loc:
            slot = s.slot
            if isinstance(slot, Lkp):
                loc, s = slot.loc, slot.store
                continue
            return slot
        s = s.rest
    raise UndefinedLocation(loc)


def resolve_slot(u) -> Value:
    """查找项求值，值原样返回"""
    if isinstance(u, Lkp):
        return resolve_lookup(u.loc, u.store)
    return u


def remove(s, loc: Location):
    """s∖ℓ：删除所有 ℓ 的更新，其余结构不变"""
    kept = []
    while isinstance(s, Upd):
        if s.loc != loc:
            kept.append((s.loc, s.slot))
        s = s.rest
    result = EMP
    for entry_loc, slot in reversed(kept):
        result = Upd(entry_loc, slot, result)
    return result


def from_entries(entries):
    """由 (位置, 值) 序列构造 upd 链，序列首项在最外层"""
    result = EMP
    for loc, value in reversed(list(entries)):
        result = Upd(loc, value, result)
    return result


def normal_form(s):
    """
    存储项范式：每个位置出现一次，查找全部求值，位置按下标升序

    Args:
        s: 存储项

    Returns:
        范式存储项
    """
    return from_entries((loc, resolve_lookup(loc, s)) for loc in sorted(dom_store(s)))


def ext_equiv(s, t) -> bool:
    """外延等价：定义域相同且每个位置上的值 α 等价"""
    domain = dom_store(s)
    if domain != dom_store(t):
        return False
    return all(alpha_eq(resolve_lookup(loc, s), resolve_lookup(loc, t)) for loc in domain)


def store_eq(s, t) -> bool:
    """⊢ s = t 的判定：比较两者的范式"""
    return ext_equiv(normal_form(s), normal_form(t))


def store_key(s):
    """存储项在 α 等价下的结构键"""
    if isinstance(s, Emp):
        return ('emp',)
    if isinstance(s, Upd):
        return ('upd', s.loc.index, slot_key(s.slot), store_key(s.rest))
    raise TypeError(f"不是存储项: {s!r}")


def slot_key(u):
    if isinstance(u, Lkp):
        return ('lkp', u.loc.index, store_key(u.store))
    return ('val', to_nameless(u))


def store_alpha_eq(s, t) -> bool:
    """存储项的结构相等，内嵌的值按 α 等价比较"""
    return store_key(s) == store_key(t)


def store_free_vars(s) -> FrozenSet[str]:
    names = set()
    while isinstance(s, Upd):
        if isinstance(s.slot, Lkp):
            names |= store_free_vars(s.slot.store)
        else:
            names |= free_vars(s.slot)
        s = s.rest
    return frozenset(names)


def is_closed_store(s) -> bool:
    return not store_free_vars(s)


def store_size(s) -> int:
    """存储代数中的大小，内嵌的值计为原子 1"""
    if isinstance(s, Emp):
        return 1
    return 1 + slot_size(s.slot) + store_size(s.rest)


def slot_size(u) -> int:
    if isinstance(u, Lkp):
        return 1 + store_size(u.store)
    return 1


def map_store_values(s, func):
    """对存储项中出现的每个值应用 func，结构保持"""
    if isinstance(s, Emp):
        return s
    slot = s.slot
    if isinstance(slot, Lkp):
        slot = Lkp(slot.loc, map_store_values(slot.store, func))
    else:
        slot = func(slot)
    return Upd(s.loc, slot, map_store_values(s.rest, func))


def restrict_ext(s, t, loc: Location) -> bool:
    """s ≃ t 时 s∖ℓ ≃ t∖ℓ；返回该蕴含在给定实例上是否成立"""
    return (not ext_equiv(s, t)) or ext_equiv(remove(s, loc), remove(t, loc))


# ---- 重写预言机 ----

def rewrite_oracle(s, t, depth: int, max_growth: int = 2) -> bool:
    """
    在存储与查找公理下做双向有界搜索，判断是否存在长度不超过 depth 的等式证明

    公理在每个子项位置上双向使用；增大项的方向只在项不超过较大输入加 max_growth 时使用。
    从两端各搜索一半深度，访问集按 α 等价去重。

    Args:
        s: 存储项
        t: 存储项
        depth: 证明长度上界
        max_growth: 允许的项增长

    Returns:
        bool: 找到证明则为 True
    """
    if store_alpha_eq(s, t):
        return True
    if depth <= 0:
        return False
    locations, values = _menus(s, t)
    limit = max(store_size(s), store_size(t)) + max_growth
    left = _ball(s, (depth + 1) // 2, limit, locations, values)
    right = _ball(t, depth // 2, limit, locations, values)
    found = not left.keys().isdisjoint(right.keys())
    logger.debug(f"重写搜索: 左侧 {len(left)} 项，右侧 {len(right)} 项，结果 {found}")
    return found


def _menus(s, t):
    locations = set()
    values = {}

    def collect(store):
        while isinstance(store, Upd):
            locations.add(store.loc)
            if isinstance(store.slot, Lkp):
                locations.add(store.slot.loc)
                collect(store.slot.store)
            else:
                values.setdefault(to_nameless(store.slot), store.slot)
            store = store.rest

    collect(s)
    collect(t)
    ordered_values = tuple(values[key] for key in sorted(values, key=repr))
    return tuple(sorted(locations)), ordered_values


@lru_cache(maxsize=4096)
def _ball(s, radius, limit, locations, values):
    frontier = {store_key(s): s}
    seen = dict(frontier)
    for _ in range(radius):
        following = {}
        for term in frontier.values():
            for rewritten in _store_rewrites(term, locations, values):
                if store_size(rewritten) > limit:
                    continue
                key = store_key(rewritten)
                if key not in seen:
                    seen[key] = rewritten
                    following[key] = rewritten
        if not following:
            break
        frontier = following
    return seen


def _store_rewrites(s, locations, values):
    """存储项 s 的一步重写，覆盖所有位置"""
    if isinstance(s, Upd):
        loc, slot, rest = s.loc, s.slot, s.rest
        # 覆盖: upd(ℓ,U,upd(ℓ,W,r)) = upd(ℓ,U,r)
        if isinstance(rest, Upd) and rest.loc == loc:
            yield Upd(loc, slot, rest.rest)
        for other in values:
            yield Upd(loc, slot, Upd(loc, other, rest))
        # 不同位置的更新交换
        if isinstance(rest, Upd) and rest.loc != loc:
            yield Upd(rest.loc, rest.slot, Upd(loc, slot, rest.rest))
        # 回写: upd(ℓ, lkp(ℓ, r), r) = r
        if isinstance(slot, Lkp) and slot.loc == loc and store_alpha_eq(slot.store, rest):
            yield rest
        for rewritten in _slot_rewrites(slot, locations, values):
            yield Upd(loc, rewritten, rest)
        for rewritten in _store_rewrites(rest, locations, values):
            yield Upd(loc, slot, rewritten)
    # 回写的反方向
    for loc in sorted(dom_store(s)):
        yield Upd(loc, Lkp(loc, s), s)


def _slot_rewrites(u, locations, values):
    if isinstance(u, Lkp):
        loc, inner = u.loc, u.store
        if isinstance(inner, Upd):
            # 命中: lkp(ℓ, upd(ℓ,u,r)) = u
            if inner.loc == loc:
                yield inner.slot
            # 跳过: lkp(ℓ, upd(ℓ',u,r)) = lkp(ℓ, r)
            else:
                yield Lkp(loc, inner.rest)
        for other_loc in locations:
            if other_loc != loc:
                for value in values:
                    yield Lkp(loc, Upd(other_loc, value, inner))
        for rewritten in _store_rewrites(inner, locations, values):
            yield Lkp(loc, rewritten)
    # 命中的反方向，以 emp 为底
    for loc in locations:
        yield Lkp(loc, Upd(loc, u, EMP))
