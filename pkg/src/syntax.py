#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
核心语法模块
负责 λimp 项的表示、自由变量、避免捕获的代换、α 等价以及语法糖的展开
"""

import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Tuple, Union

# 配置日志
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class Location:
    """抽象位置 ℓ，按下标全序"""
    index: int

    def __str__(self):
        return f"l{self.index}"


# ---- 值 ----

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Lam:
    var: str
    body: 'Computation'


# ---- 计算 ----

@dataclass(frozen=True)
class Unit:
    value: 'Value'


@dataclass(frozen=True)
class Bind:
    """M ⟫= V，V 处于函数位置"""
    comp: 'Computation'
    func: 'Value'


@dataclass(frozen=True)
class Get:
    loc: Location
    var: str
    body: 'Computation'


@dataclass(frozen=True)
class Set:
    loc: Location
    value: 'Value'
    body: 'Computation'


Value = Union[Var, Lam]
Computation = Union[Unit, Bind, Get, Set]
Term = Union[Var, Lam, Unit, Bind, Get, Set]

VALUE_TYPES = (Var, Lam)
COMPUTATION_TYPES = (Unit, Bind, Get, Set)


# ---- 语法糖 ----

@dataclass(frozen=True)
class Let:
    var: str
    bound: object
    body: object


@dataclass(frozen=True)
class App:
    """值对值的应用 V W"""
    fun: object
    arg: object


@dataclass(frozen=True)
class CompApp:
    """计算对计算的应用 M N"""
    fun: object
    arg: object


@dataclass(frozen=True)
class Seq:
    first: object
    second: object


def is_value(t):
    return isinstance(t, VALUE_TYPES)


def is_computation(t):
    return isinstance(t, COMPUTATION_TYPES)


def free_vars(t) -> FrozenSet[str]:
    """
    计算项的自由变量集合

    Args:
        t: 值或计算

    Returns:
        frozenset: 自由变量名
    """
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Lam):
        return free_vars(t.body) - {t.var}
    if isinstance(t, Unit):
        return free_vars(t.value)
    if isinstance(t, Bind):
        # >>= 左脊可能很深，逐层展开
        names = set()
        while isinstance(t, Bind):
            names |= free_vars(t.func)
            t = t.comp
        return frozenset(names) | free_vars(t)
    if isinstance(t, Get):
        return free_vars(t.body) - {t.var}
    if isinstance(t, Set):
        return free_vars(t.value) | free_vars(t.body)
    raise TypeError(f"不是 λimp 项: {t!r}")


def is_closed(t) -> bool:
    return not free_vars(t)


def term_size(t) -> int:
    """构造子个数，变量计 1"""
    if isinstance(t, Var):
        return 1
    if isinstance(t, Lam):
        return 1 + term_size(t.body)
    if isinstance(t, Unit):
        return 1 + term_size(t.value)
    if isinstance(t, Bind):
        return 1 + term_size(t.comp) + term_size(t.func)
    if isinstance(t, Get):
        return 1 + term_size(t.body)
    if isinstance(t, Set):
        return 1 + term_size(t.value) + term_size(t.body)
    raise TypeError(f"不是 λimp 项: {t!r}")


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    """在 base 后追加撇号直到不与 avoid 冲突"""
    avoid = set(avoid)
    name = base
    while name in avoid:
        name += "'"
    return name


def substitute_many(t, mapping: Dict[str, Value]):
    """
    同时代换，避免捕获

    Args:
        t: 值或计算
        mapping: 变量名到值的映射

    Returns:
        代换后的项
    """
    if not mapping:
        return t
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, Lam):
        var, body = _under_binder(t.var, t.body, mapping)
        return Lam(var, body)
    if isinstance(t, Unit):
        return Unit(substitute_many(t.value, mapping))
    if isinstance(t, Bind):
        return Bind(substitute_many(t.comp, mapping), substitute_many(t.func, mapping))
    if isinstance(t, Get):
        var, body = _under_binder(t.var, t.body, mapping)
        return Get(t.loc, var, body)
    if isinstance(t, Set):
        return Set(t.loc, substitute_many(t.value, mapping), substitute_many(t.body, mapping))
    raise TypeError(f"不是 λimp 项: {t!r}")


def _under_binder(var, body, mapping):
    body_fv = free_vars(body)
    inner = {k: v for k, v in mapping.items() if k != var and k in body_fv}
    if not inner:
        return var, body
    incoming = set()
    for value in inner.values():
        incoming |= free_vars(value)
    if var in incoming:
        renamed = fresh_name(var, incoming | body_fv | set(inner))
        inner[var] = Var(renamed)
        return renamed, substitute_many(body, inner)
    return var, substitute_many(body, inner)


def substitute(t, name: str, value: Value):
    """M[V/x]"""
    return substitute_many(t, {name: value})


def rename_free(t, renaming: Dict[str, str]):
    """同时改名自由变量"""
    return substitute_many(t, {old: Var(new) for old, new in renaming.items()})


def to_nameless(t, bound: Tuple[str, ...] = ()):
    """转换为 de Bruijn 形式的嵌套元组，约束变量以到绑定处的距离表示"""
    if isinstance(t, Var):
        for distance, name in enumerate(reversed(bound)):
            if name == t.name:
                return ('bound', distance)
        return ('free', t.name)
    if isinstance(t, Lam):
        return ('lam', to_nameless(t.body, bound + (t.var,)))
    if isinstance(t, Unit):
        return ('unit', to_nameless(t.value, bound))
    if isinstance(t, Bind):
        return ('bind', to_nameless(t.comp, bound), to_nameless(t.func, bound))
    if isinstance(t, Get):
        return ('get', t.loc.index, to_nameless(t.body, bound + (t.var,)))
    if isinstance(t, Set):
        return ('set', t.loc.index, to_nameless(t.value, bound), to_nameless(t.body, bound))
    raise TypeError(f"不是 λimp 项: {t!r}")


def alpha_eq(t1, t2) -> bool:
    """α 等价判定"""
    if t1 is t2:
        return True
    return to_nameless(t1) == to_nameless(t2)


def binder_name(depth: int) -> str:
    names = ('x', 'y', 'z', 'u', 'v', 'w')
    if depth < len(names):
        return names[depth]
    return f"x{depth}"


def canonical_rename(t):
    """按绑定深度重命名所有约束变量，自由变量保持不变"""
    avoid = free_vars(t)

    def pick(depth):
        return fresh_name(f"x{depth}", avoid)

    def walk(node, mapping, depth):
        if isinstance(node, Var):
            return mapping.get(node.name, node)
        if isinstance(node, Lam):
            name = pick(depth)
            return Lam(name, walk(node.body, {**mapping, node.var: Var(name)}, depth + 1))
        if isinstance(node, Unit):
            return Unit(walk(node.value, mapping, depth))
        if isinstance(node, Bind):
            return Bind(walk(node.comp, mapping, depth), walk(node.func, mapping, depth))
        if isinstance(node, Get):
            name = pick(depth)
            return Get(node.loc, name, walk(node.body, {**mapping, node.var: Var(name)}, depth + 1))
        if isinstance(node, Set):
            return Set(node.loc, walk(node.value, mapping, depth), walk(node.body, mapping, depth))
        raise TypeError(f"不是 λimp 项: {node!r}")

    return walk(t, {}, 0)


def desugar(t):
    """
    展开语法糖

    let x = M in N 展开为 M ⟫= λx.N；V W 展开为 unit W ⟫= V；
    M N 展开为 M ⟫= λz.(N ⟫= z)；M ; N 展开为 M ⟫= λ_.N

    Args:
        t: 可能含语法糖的项

    Returns:
        核心语法的项
    """
    if isinstance(t, Var):
        return t
    if isinstance(t, Lam):
        return Lam(t.var, desugar(t.body))
    if isinstance(t, Unit):
        return Unit(desugar(t.value))
    if isinstance(t, Bind):
        return Bind(desugar(t.comp), desugar(t.func))
    if isinstance(t, Get):
        return Get(t.loc, t.var, desugar(t.body))
    if isinstance(t, Set):
        return Set(t.loc, desugar(t.value), desugar(t.body))
    if isinstance(t, Let):
        return Bind(desugar(t.bound), Lam(t.var, desugar(t.body)))
    if isinstance(t, App):
        return Bind(Unit(desugar(t.arg)), desugar(t.fun))
    if isinstance(t, CompApp):
        fun = desugar(t.fun)
        arg = desugar(t.arg)
        z = fresh_name('z', free_vars(arg))
        return Bind(fun, Lam(z, Bind(arg, Var(z))))
    if isinstance(t, Seq):
        first = desugar(t.first)
        second = desugar(t.second)
        dummy = fresh_name('_', free_vars(second))
        return Bind(first, Lam(dummy, second))
    raise TypeError(f"不是 λimp 项: {t!r}")


def identity() -> Lam:
    """λx.unit x"""
    return Lam('x', Unit(Var('x')))


def omega_c() -> Bind:
    """Ω_c ≡ unit(λx.unit x ⟫= x) ⟫= (λx.unit x ⟫= x)，在任何存储下归约到自身"""
    half = Lam('x', Bind(Unit(Var('x')), Var('x')))
    return Bind(Unit(half), half)
