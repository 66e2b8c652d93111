#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
类型推导模块
负责类型上下文、判断、显式推导树，以及按类型指派系统的规则逐结点检查推导
"""

import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

from src.errors import DerivationInputError, LambdaImpError
from src.operational import Configuration, same_configuration
from src.store import Emp, Lkp, Upd, map_store_values, slot_key, store_alpha_eq, store_free_vars
from src.syntax import (
    Bind, Get, Lam, Set, Unit, Var, alpha_eq, free_vars, is_computation, is_value, substitute,
    substitute_many,
)
from src.type_language import (
    Arrow, CompType, Meet, Product, Record, ResultType, StoreType, ValueType, dom_sigma, is_top,
    meet, normalize, sort_of, subtype, type_equiv,
)

# 配置日志
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

RULES = ('omega', 'meet', 'sub', 'var', 'lam', 'unit', 'bind', 'get', 'set',
         'upd-a', 'upd-b', 'lkp', 'conf')

SHAPE_MISMATCH = 'ShapeMismatch'
SUBTYPE_FAILS = 'SubtypeFails'
SIDE_CONDITION_FAILS = 'SideConditionFails'
CONTEXT_MISMATCH = 'ContextMismatch'


@dataclass(frozen=True)
class Context:
    """类型上下文 Γ，变量名两两不同，保持声明顺序"""
    bindings: Tuple[Tuple[str, object], ...] = ()

    def names(self):
        return frozenset(name for name, _ in self.bindings)

    def lookup(self, name):
        for bound, value_type in self.bindings:
            if bound == name:
                return value_type
        return None

    def extend(self, name, value_type) -> 'Context':
        if name in self.names():
            raise DerivationInputError(f"上下文中已有变量 {name}")
        return Context(self.bindings + ((name, value_type),))

    def restrict(self, names) -> 'Context':
        return Context(tuple((name, t) for name, t in self.bindings if name in names))

    def is_valid(self):
        return len(self.names()) == len(self.bindings)

    def same_as(self, other: 'Context') -> bool:
        if self.names() != other.names():
            return False
        return all(type_equiv(t, other.lookup(name)) for name, t in self.bindings)

    def __len__(self):
        return len(self.bindings)


EMPTY_CONTEXT = Context()


@dataclass(frozen=True)
class Judgment:
    """Γ ⊢ 主语 : 类型，主语可以是值、计算、存储项、查找项或格局"""
    context: Context
    subject: object
    assigned: object


@dataclass(frozen=True)
class Derivation:
    rule: str
    conclusion: Judgment
    premises: Tuple['Derivation', ...] = ()

    @property
    def context(self):
        return self.conclusion.context

    @property
    def subject(self):
        return self.conclusion.subject

    @property
    def assigned(self):
        return self.conclusion.assigned

    def size(self):
        return 1 + sum(premise.size() for premise in self.premises)


class CheckResult(NamedTuple):
    ok: bool
    path: Tuple[int, ...] = ()
    reason: Optional[str] = None
    message: str = ''

    def path_text(self):
        return '.'.join(str(index) for index in self.path) if self.path else 'root'


OK = CheckResult(True)


# ---- 主语 ----

def subject_sort(subject) -> str:
    if is_value(subject) or isinstance(subject, Lkp):
        return 'D'
    if is_computation(subject):
        return 'T'
    if isinstance(subject, (Emp, Upd)):
        return 'S'
    if isinstance(subject, Configuration):
        return 'C'
    raise DerivationInputError(f"不是可定型的主语: {subject!r}")


def same_subject(a, b) -> bool:
    if (is_value(a) and is_value(b)) or (is_computation(a) and is_computation(b)):
        return alpha_eq(a, b)
    if isinstance(a, (Emp, Upd)) and isinstance(b, (Emp, Upd)):
        return store_alpha_eq(a, b)
    if isinstance(a, Lkp) and isinstance(b, Lkp):
        return slot_key(a) == slot_key(b)
    if isinstance(a, Configuration) and isinstance(b, Configuration):
        return same_configuration(a, b)
    return False


def subject_free_vars(subject):
    if isinstance(subject, (Emp, Upd)):
        return store_free_vars(subject)
    if isinstance(subject, Lkp):
        return store_free_vars(subject.store)
    if isinstance(subject, Configuration):
        return free_vars(subject.computation) | store_free_vars(subject.store)
    return free_vars(subject)


def subst_subject(subject, mapping):
    """对任意主语做同时代换"""
    if not mapping:
        return subject

    def on_value(value):
        return substitute_many(value, mapping)

    if isinstance(subject, (Emp, Upd)):
        return map_store_values(subject, on_value)
    if isinstance(subject, Lkp):
        return Lkp(subject.loc, map_store_values(subject.store, on_value))
    if isinstance(subject, Configuration):
        return Configuration(substitute_many(subject.computation, mapping),
                             map_store_values(subject.store, on_value))
    return substitute_many(subject, mapping)


# ---- 类型形状 ----

def arrow_parts(t):
    """单个箭头类型的 (源, 目标) 规范形；不是单个箭头时返回 None"""
    if isinstance(t, Arrow):
        return normalize(t.source), normalize(t.target)
    canonical = normalize(t)
    if isinstance(canonical, (ValueType, CompType)) and len(canonical.arrows) == 1:
        return canonical.arrows[0]
    return None


def product_parts(t):
    if isinstance(t, Product):
        return normalize(t.value_type), normalize(t.store_type)
    canonical = normalize(t)
    if isinstance(canonical, ResultType) and not canonical.top:
        return canonical.value, canonical.store
    return None


def record_parts(t):
    if isinstance(t, Record):
        return t.loc, normalize(t.value_type)
    canonical = normalize(t)
    if isinstance(canonical, StoreType) and len(canonical.entries) == 1:
        return canonical.entries[0]
    return None


# ---- 检查 ----

class _Reject(Exception):
    def __init__(self, reason, message):
        super().__init__(message)
        self.reason = reason
        self.message = message


def _require(condition, reason, message):
    if not condition:
        raise _Reject(reason, message)


def _premise_count(d: Derivation, count: int):
    _require(len(d.premises) == count, SHAPE_MISMATCH,
             f"规则 {d.rule} 需要 {count} 个前提，实际为 {len(d.premises)}")


def _same_context(d: Derivation, premise: Derivation):
    _require(premise.context.same_as(d.context), CONTEXT_MISMATCH, "前提与结论的上下文不同")


def _same_subject(premise: Derivation, expected, what):
    _require(same_subject(premise.subject, expected), SHAPE_MISMATCH, f"前提的主语不是{what}")


def _equiv(actual, expected, message):
    _require(type_equiv(actual, expected), SHAPE_MISMATCH, message)


def _binder_premise(d: Derivation, premise: Derivation, var: str, body):
    """λ 与 get 的前提：上下文恰好多出一个新变量，主语是改名后的体"""
    _require(premise.context.is_valid(), CONTEXT_MISMATCH, "前提上下文中变量重复")
    extra = premise.context.names() - d.context.names()
    _require(len(extra) == 1 and len(premise.context) == len(d.context) + 1, CONTEXT_MISMATCH,
             "前提上下文必须恰好扩展一个新变量")
    _require(premise.context.restrict(d.context.names()).same_as(d.context), CONTEXT_MISMATCH,
             "前提上下文与结论上下文的公共部分不一致")
    (name,) = tuple(extra)
    _require(name == var or name not in free_vars(body), CONTEXT_MISMATCH,
             f"新变量 {name} 在绑定体中自由出现，改名会捕获它")
    renamed = body if name == var else substitute(body, var, Var(name))
    _same_subject(premise, renamed, "绑定体")
    return name, premise.context.lookup(name)


def _check_node(d: Derivation):
    judgment = d.conclusion
    subject, assigned, context = judgment.subject, judgment.assigned, judgment.context
    _require(context.is_valid(), CONTEXT_MISMATCH, "上下文中变量重复")
    try:
        sort = sort_of(assigned)
    except LambdaImpError as e:
        raise _Reject(SHAPE_MISMATCH, str(e))
    _require(sort == subject_sort(subject), SHAPE_MISMATCH, f"类型种类 {sort} 与主语不符")
    rule = d.rule

    if rule == 'omega':
        _premise_count(d, 0)
        _require(is_top(assigned), SHAPE_MISMATCH, "ω 规则只能给出 ω 类型")
        return
    if rule == 'meet':
        _premise_count(d, 2)
        for premise in d.premises:
            _same_context(d, premise)
            _same_subject(premise, subject, "结论的主语")
        _equiv(assigned, meet(d.premises[0].assigned, d.premises[1].assigned), "结论不是两个前提类型的交")
        return
    if rule == 'sub':
        _premise_count(d, 1)
        premise = d.premises[0]
        _same_context(d, premise)
        _same_subject(premise, subject, "结论的主语")
        _require(subtype(premise.assigned, assigned), SUBTYPE_FAILS, "前提类型不是结论类型的子类型")
        return
    if rule == 'var':
        _premise_count(d, 0)
        _require(isinstance(subject, Var), SHAPE_MISMATCH, "var 规则的主语必须是变量")
        declared = context.lookup(subject.name)
        _require(declared is not None, CONTEXT_MISMATCH, f"变量 {subject.name} 不在上下文中")
        _equiv(assigned, declared, "变量的类型与上下文不一致")
        return
    if rule == 'lam':
        _premise_count(d, 1)
        _require(isinstance(subject, Lam), SHAPE_MISMATCH, "λ 规则的主语必须是抽象")
        premise = d.premises[0]
        _, delta = _binder_premise(d, premise, subject.var, subject.body)
        _equiv(assigned, Arrow(delta, premise.assigned), "结论不是 δ → τ")
        return
    if rule == 'unit':
        _premise_count(d, 1)
        _require(isinstance(subject, Unit), SHAPE_MISMATCH, "unit 规则的主语必须是 unit V")
        premise = d.premises[0]
        _same_context(d, premise)
        _same_subject(premise, subject.value, "返回的值")
        parts = arrow_parts(assigned)
        _require(parts is not None, SHAPE_MISMATCH, "unit 的类型必须是 σ → δ × σ")
        sigma, _ = parts
        _equiv(assigned, Arrow(sigma, Product(premise.assigned, sigma)), "unit 的类型必须是 σ → δ × σ")
        return
    if rule == 'bind':
        _premise_count(d, 2)
        _require(isinstance(subject, Bind), SHAPE_MISMATCH, "⟫= 规则的主语必须是 M ⟫= V")
        first, second = d.premises
        for premise in d.premises:
            _same_context(d, premise)
        _same_subject(first, subject.comp, "被绑定的计算")
        _same_subject(second, subject.func, "函数位置的值")
        computation = arrow_parts(first.assigned)
        _require(computation is not None, SHAPE_MISMATCH, "第一个前提必须是 σ → δ' × σ'")
        sigma, result = computation
        _require(not result.top, SHAPE_MISMATCH, "第一个前提的目标必须是积类型")
        function = arrow_parts(second.assigned)
        _require(function is not None, SHAPE_MISMATCH, "第二个前提必须是 δ' → σ' → κ")
        argument, continuation = function
        _equiv(argument, result.value, "函数的参数类型与 δ' 不一致")
        inner = arrow_parts(continuation)
        _require(inner is not None, SHAPE_MISMATCH, "第二个前提必须是 δ' → σ' → κ")
        store, kappa = inner
        _equiv(store, result.store, "函数的存储类型与 σ' 不一致")
        _require(not kappa.top, SHAPE_MISMATCH, "⟫= 的结果必须是积类型")
        _equiv(assigned, Arrow(sigma, kappa), "结论不是 σ → κ")
        return
    if rule == 'get':
        _premise_count(d, 1)
        _require(isinstance(subject, Get), SHAPE_MISMATCH, "get 规则的主语必须是 getℓ(λx.M)")
        premise = d.premises[0]
        _, delta = _binder_premise(d, premise, subject.var, subject.body)
        parts = arrow_parts(premise.assigned)
        _require(parts is not None, SHAPE_MISMATCH, "前提必须是 σ → κ")
        sigma, kappa = parts
        _equiv(assigned, Arrow(Meet(Record(subject.loc, delta), sigma), kappa), "结论不是 (⟨ℓ:δ⟩ ∧ σ) → κ")
        return
    if rule == 'set':
        _premise_count(d, 2)
        _require(isinstance(subject, Set), SHAPE_MISMATCH, "set 规则的主语必须是 setℓ(V).M")
        value, body = d.premises
        for premise in d.premises:
            _same_context(d, premise)
        _same_subject(value, subject.value, "写入的值")
        _same_subject(body, subject.body, "后续计算")
        parts = arrow_parts(assigned)
        _require(parts is not None, SHAPE_MISMATCH, "set 的类型必须是 σ → κ")
        sigma, kappa = parts
        _require(subject.loc not in dom_sigma(sigma), SIDE_CONDITION_FAILS, f"{subject.loc} ∈ dom(σ)")
        _equiv(body.assigned, Arrow(Meet(Record(subject.loc, value.assigned), sigma), kappa),
               "第二个前提不是 (⟨ℓ:δ⟩ ∧ σ) → κ")
        return
    if rule == 'upd-a':
        _premise_count(d, 1)
        _require(isinstance(subject, Upd), SHAPE_MISMATCH, "upd 规则的主语必须是 upd(ℓ, u, s)")
        premise = d.premises[0]
        _same_context(d, premise)
        _same_subject(premise, subject.slot, "写入的值")
        _equiv(assigned, Record(subject.loc, premise.assigned), "结论不是 ⟨ℓ : δ⟩")
        return
    if rule == 'upd-b':
        _premise_count(d, 1)
        _require(isinstance(subject, Upd), SHAPE_MISMATCH, "upd 规则的主语必须是 upd(ℓ, u, s)")
        premise = d.premises[0]
        _same_context(d, premise)
        _same_subject(premise, subject.rest, "其余存储")
        parts = record_parts(premise.assigned)
        _require(parts is not None, SHAPE_MISMATCH, "前提必须是单个记录类型 ⟨ℓ' : δ⟩")
        loc, delta = parts
        _require(loc != subject.loc, SIDE_CONDITION_FAILS, f"upd-b 要求 ℓ ≠ ℓ'，而两者都是 {loc}")
        _equiv(assigned, Record(loc, delta), "结论与前提的记录类型不同")
        return
    if rule == 'lkp':
        _premise_count(d, 1)
        _require(isinstance(subject, Lkp), SHAPE_MISMATCH, "lkp 规则的主语必须是 lkp(ℓ, s)")
        premise = d.premises[0]
        _same_context(d, premise)
        _same_subject(premise, subject.store, "被查找的存储")
        parts = record_parts(premise.assigned)
        _require(parts is not None and parts[0] == subject.loc, SHAPE_MISMATCH,
                 f"前提必须是 ⟨{subject.loc} : δ⟩")
        _equiv(assigned, parts[1], "结论与记录中的值类型不同")
        return
    if rule == 'conf':
        _premise_count(d, 2)
        _require(isinstance(subject, Configuration), SHAPE_MISMATCH, "conf 规则的主语必须是格局")
        computation, store = d.premises
        for premise in d.premises:
            _same_context(d, premise)
        _same_subject(computation, subject.computation, "格局中的计算")
        _same_subject(store, subject.store, "格局中的存储")
        parts = arrow_parts(computation.assigned)
        _require(parts is not None, SHAPE_MISMATCH, "第一个前提必须是 σ → κ")
        sigma, kappa = parts
        _equiv(store.assigned, sigma, "存储的类型与 σ 不一致")
        _equiv(assigned, kappa, "结论与 κ 不一致")
        return
    raise _Reject(SHAPE_MISMATCH, f"未知规则: {rule}")


def check_derivation(derivation: Derivation) -> CheckResult:
    """
    按先序逐结点检查推导

    Args:
        derivation: 推导树

    Returns:
        CheckResult: 通过时 ok 为 True，否则给出第一个失败结点的路径与原因
    """
    stack = [((), derivation)]
    while stack:
        path, node = stack.pop()
        try:
            _check_node(node)
        except _Reject as rejected:
            logger.debug(f"推导检查失败 {path}: {rejected.message}")
            return CheckResult(False, path, rejected.reason, rejected.message)
        except LambdaImpError as e:
            return CheckResult(False, path, SHAPE_MISMATCH, str(e))
        for index in reversed(range(len(node.premises))):
            stack.append((path + (index,), node.premises[index]))
    return OK


def require_valid(derivation: Derivation, what="输入推导"):
    """检查推导，不通过时抛出 DerivationInputError"""
    result = check_derivation(derivation)
    if not result.ok:
        raise DerivationInputError(
            f"{what}未通过检查，位置 {result.path_text()}: {result.reason}: {result.message}", result)
    return derivation
