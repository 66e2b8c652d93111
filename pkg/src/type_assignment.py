#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
类型指派模块
负责构造推导：代换与展开引理、沿归约步的类型保持与类型展开、收敛证书以及有界的类型搜索
"""

import logging
from dataclasses import dataclass
from functools import reduce
from typing import List, NamedTuple, Optional

from src.derivation import (
    EMPTY_CONTEXT, Context, Derivation, Judgment, arrow_parts, check_derivation, record_parts,
    require_valid, same_subject, subject_sort, subst_subject,
)
from src.errors import (
    DecompositionMismatch, DerivationInputError, InternalDerivationError, NotAStepError,
    StoreTypingError, UndefinedLocation,
)
from src.operational import (
    DEFAULT_FUEL, Configuration, Converged, Next, redex_kind, run, same_configuration, step,
)
from src.store import EMP, Lkp, Upd, dom_store, resolve_lookup, store_eq
from src.syntax import Bind, Get, Lam, Set, Unit, Var, free_vars, fresh_name, substitute
from src.type_language import (
    CONVERGENCE_TYPE, OMEGA_D, OMEGA_S, Arrow, Meet, Product, Record, StoreType, dom_sigma, is_top,
    meet, normalize, store_without, subtype, top, type_equiv,
)

# 配置日志
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

DEFAULT_SEARCH_DEPTH = 6


# ---- 结点构造 ----

def omega_node(context: Context, subject) -> Derivation:
    return Derivation('omega', Judgment(context, subject, top(subject_sort(subject))))


def var_node(context: Context, name: str, value_type=None) -> Derivation:
    if value_type is None:
        value_type = context.lookup(name)
    return Derivation('var', Judgment(context, Var(name), value_type))


def meet_node(first: Derivation, second: Derivation) -> Derivation:
    assigned = meet(first.assigned, second.assigned)
    return Derivation('meet', Judgment(first.context, first.subject, assigned), (first, second))


def lam_node(context: Context, var: str, premise: Derivation) -> Derivation:
    assigned = Arrow(premise.context.lookup(var), premise.assigned)
    return Derivation('lam', Judgment(context, Lam(var, premise.subject), assigned), (premise,))


def unit_node(context: Context, value: Derivation, sigma) -> Derivation:
    assigned = Arrow(sigma, Product(value.assigned, sigma))
    return Derivation('unit', Judgment(context, Unit(value.subject), assigned), (value,))


def bind_node(computation: Derivation, function: Derivation) -> Derivation:
    sigma, _ = arrow_parts(computation.assigned)
    _, continuation = arrow_parts(function.assigned)
    _, kappa = arrow_parts(continuation)
    subject = Bind(computation.subject, function.subject)
    return Derivation('bind', Judgment(computation.context, subject, Arrow(sigma, kappa)),
                      (computation, function))


def get_node(context: Context, loc, var: str, premise: Derivation) -> Derivation:
    delta = premise.context.lookup(var)
    sigma, kappa = arrow_parts(premise.assigned)
    assigned = Arrow(Meet(Record(loc, delta), sigma), kappa)
    return Derivation('get', Judgment(context, Get(loc, var, premise.subject), assigned), (premise,))


def set_node(context: Context, loc, value: Derivation, body: Derivation, sigma) -> Derivation:
    _, kappa = arrow_parts(body.assigned)
    subject = Set(loc, value.subject, body.subject)
    return Derivation('set', Judgment(context, subject, Arrow(sigma, kappa)), (value, body))


def upd_a_node(context: Context, store: Upd, slot: Derivation) -> Derivation:
    return Derivation('upd-a', Judgment(context, store, Record(store.loc, slot.assigned)), (slot,))


def upd_b_node(context: Context, store: Upd, rest: Derivation) -> Derivation:
    loc, delta = record_parts(rest.assigned)
    return Derivation('upd-b', Judgment(context, store, Record(loc, delta)), (rest,))


def lkp_node(context: Context, lookup: Lkp, store: Derivation) -> Derivation:
    _, delta = record_parts(store.assigned)
    return Derivation('lkp', Judgment(context, lookup, delta), (store,))


def conf_node(computation: Derivation, store: Derivation) -> Derivation:
    assigned = computation.assigned
    kappa = assigned.target if isinstance(assigned, Arrow) else arrow_parts(assigned)[1]
    subject = Configuration(computation.subject, store.subject)
    return Derivation('conf', Judgment(computation.context, subject, kappa), (computation, store))


def weaken(derivation: Derivation, target) -> Derivation:
    """
    用 ≤ 规则把推导的结论放宽到 target

    Raises:
        InternalDerivationError: 结论类型不是 target 的子类型
    """
    if is_top(target):
        return omega_node(derivation.context, derivation.subject)
    if type_equiv(derivation.assigned, target):
        return derivation
    if not subtype(derivation.assigned, target):
        raise InternalDerivationError(f"{normalize(derivation.assigned)} 不是 {normalize(target)} 的子类型")
    return Derivation('sub', Judgment(derivation.context, derivation.subject, target), (derivation,))


def assemble(context: Context, subject, derivations, target) -> Derivation:
    """把同一主语的若干推导用 ∧ 合并，再放宽到 target；target 为 ω 时给出 ω 结点"""
    if is_top(target):
        return omega_node(context, subject)
    if not derivations:
        raise InternalDerivationError(f"没有推导可以给出非平凡类型 {normalize(target)}")
    return weaken(reduce(meet_node, derivations), target)


# ---- 生成引理 ----

def structural_family(derivation: Derivation) -> List[Derivation]:
    """
    生成引理的可执行形式：穿过 ω、∧、≤ 结点，收集以结构规则结尾的子推导

    这些子推导的类型之交不大于原推导的类型。
    """
    if derivation.rule == 'omega':
        return []
    if derivation.rule == 'meet':
        return structural_family(derivation.premises[0]) + structural_family(derivation.premises[1])
    if derivation.rule == 'sub':
        return structural_family(derivation.premises[0])
    return [derivation]


def computation_members(derivation: Derivation, sigma):
    """计算推导中源类型不小于 sigma、目标非平凡的结构子推导，附带 (源, 目标)"""
    members = []
    for member in structural_family(derivation):
        parts = arrow_parts(member.assigned)
        if parts is None:
            continue
        source, target = parts
        if is_top(target) or not subtype(sigma, source):
            continue
        members.append((member, source, target))
    return members


def conf_parts(derivation: Derivation):
    """
    从格局推导 Γ ⊢ (M, s) : κ 中取出 Γ ⊢ M : σ → κ 与 Γ ⊢ s : σ

    Args:
        derivation: κ 非平凡的格局推导

    Returns:
        tuple: (计算推导, 存储推导)
    """
    computations, stores, sources = [], [], []
    for member in structural_family(derivation):
        computation, store = member.premises
        source, target = arrow_parts(computation.assigned)
        if is_top(target):
            continue
        computations.append(computation)
        stores.append(store)
        sources.append(source)
    if not computations:
        raise InternalDerivationError("格局推导没有非平凡的 conf 结点")
    sigma = meet(*sources)
    computation = weaken(reduce(meet_node, computations), Arrow(sigma, derivation.assigned))
    store = weaken(reduce(meet_node, stores), sigma)
    return computation, store


# ---- 上下文搬运 ----

def _term_mapping(env):
    return {name: Var(target) if isinstance(target, str) else target.subject for name, target in env.items()}


def _transport(derivation: Derivation, context: Context, env) -> Derivation:
    """
    把推导搬到新上下文：env 把旧上下文中的变量改名（字符串）或代换为值（值的推导）；
    不在 env 中的变量保持原名。约束变量按需改名以避开新上下文。
    """
    rule = derivation.rule
    subject = derivation.subject
    premises = derivation.premises
    assigned = derivation.assigned

    if rule == 'omega':
        return omega_node(context, subst_subject(subject, _term_mapping(env)))
    if rule in ('meet', 'sub'):
        moved = tuple(_transport(premise, context, env) for premise in premises)
        return Derivation(rule, Judgment(context, moved[0].subject, assigned), moved)
    if rule == 'var':
        target = env.get(subject.name, subject.name)
        if isinstance(target, str):
            if context.lookup(target) is None:
                raise InternalDerivationError(f"变量 {target} 不在目标上下文中")
            return Derivation('var', Judgment(context, Var(target), assigned))
        return weaken(_transport(target, context, {}), assigned)
    if rule in ('lam', 'get'):
        premise = premises[0]
        (binder,) = tuple(premise.context.names() - derivation.context.names())
        name = binder if binder not in context.names() else fresh_name(binder, context.names())
        inner = _transport(premise, context.extend(name, premise.context.lookup(binder)), {**env, binder: name})
        if rule == 'lam':
            moved = Lam(name, inner.subject)
        else:
            moved = Get(subject.loc, name, inner.subject)
        return Derivation(rule, Judgment(context, moved, assigned), (inner,))

    moved = tuple(_transport(premise, context, env) for premise in premises)
    if rule == 'unit':
        new_subject = Unit(moved[0].subject)
    elif rule == 'bind':
        new_subject = Bind(moved[0].subject, moved[1].subject)
    elif rule == 'set':
        new_subject = Set(subject.loc, moved[0].subject, moved[1].subject)
    elif rule == 'upd-a':
        new_subject = Upd(subject.loc, moved[0].subject, subst_subject(subject.rest, _term_mapping(env)))
    elif rule == 'upd-b':
        new_subject = Upd(subject.loc, subst_subject(subject.slot, _term_mapping(env)), moved[0].subject)
    elif rule == 'lkp':
        new_subject = Lkp(subject.loc, moved[0].subject)
    elif rule == 'conf':
        new_subject = Configuration(moved[0].subject, moved[1].subject)
    else:
        raise InternalDerivationError(f"未知规则: {rule}")
    return Derivation(rule, Judgment(context, new_subject, assigned), moved)


def weaken_context(derivation: Derivation, context: Context) -> Derivation:
    """把推导搬到更大的上下文"""
    return _transport(derivation, context, {})


# ---- 代换与展开 ----

def subst_derivation(body: Derivation, value: Derivation, name: Optional[str] = None,
                     validate: bool = True) -> Derivation:
    """
    由 Γ, x:δ ⊢ M : τ 与 Γ ⊢ V : δ 构造 Γ ⊢ M[V/x] : τ

    Args:
        body: M 的推导
        value: V 的推导
        name: 被代换的变量，缺省时取 body 上下文中多出的那个变量
        validate: 是否先检查两个输入推导

    Returns:
        Derivation: M[V/x] 的推导

    Raises:
        DerivationInputError: 输入推导不合法或上下文不匹配
    """
    if validate:
        require_valid(body, "M 的推导")
        require_valid(value, "V 的推导")
    gamma = value.context
    if name is None:
        extra = body.context.names() - gamma.names()
        if len(extra) != 1:
            raise DerivationInputError("无法确定被代换的变量: 两个上下文必须恰好相差一个变量")
        (name,) = tuple(extra)
    declared = body.context.lookup(name)
    if declared is None or name in gamma.names():
        raise DerivationInputError(f"变量 {name} 必须只出现在 M 的上下文中")
    if not body.context.restrict(gamma.names()).same_as(gamma):
        raise DerivationInputError("M 的上下文去掉 x 之后必须与 V 的上下文相同")
    if not subtype(value.assigned, declared):
        raise DerivationInputError(f"V 的类型不是 {normalize(declared)} 的子类型")
    return _transport(body, gamma, {name: weaken(value, declared)})


class Expansion(NamedTuple):
    value_type: object
    value_derivation: Derivation
    body_derivation: Derivation


_TEMPLATE_SHAPES = {
    'var': Var, 'lam': Lam, 'unit': Unit, 'bind': Bind, 'get': Get, 'set': Set,
    'upd-a': Upd, 'upd-b': Upd, 'lkp': Lkp, 'conf': Configuration,
}


def _template_children(rule, template):
    """(前提下标, 子模板, 该子模板内新绑定的模板变量)"""
    if rule == 'lam':
        return [(0, template.body, template.var)]
    if rule == 'get':
        return [(0, template.body, template.var)]
    if rule == 'unit':
        return [(0, template.value, None)]
    if rule == 'bind':
        return [(0, template.comp, None), (1, template.func, None)]
    if rule == 'set':
        return [(0, template.value, None), (1, template.body, None)]
    if rule == 'upd-a':
        return [(0, template.slot, None)]
    if rule == 'upd-b':
        return [(0, template.rest, None)]
    if rule == 'lkp':
        return [(0, template.store, None)]
    if rule == 'conf':
        return [(0, template.computation, None), (1, template.store, None)]
    return []


def _is_hole(template, name, bound):
    return isinstance(template, Var) and template.name == name and name not in bound


def _collect_holes(derivation, template, name, bound, found):
    if _is_hole(template, name, bound):
        found.append(derivation)
        return
    rule = derivation.rule
    if rule == 'omega':
        return
    if rule in ('meet', 'sub'):
        for premise in derivation.premises:
            _collect_holes(premise, template, name, bound, found)
        return
    if not isinstance(template, _TEMPLATE_SHAPES.get(rule, ())):
        raise DecompositionMismatch(f"规则 {rule} 与模板 {type(template).__name__} 的结构不符")
    for index, child, binder in _template_children(rule, template):
        inner = bound | {binder} if binder else bound
        _collect_holes(derivation.premises[index], child, name, inner, found)


def _fill_template(derivation, template, context, renaming, name, delta):
    """沿模板重建推导，x 的出现处换成 var 结点再放宽到原来的类型"""
    if _is_hole(template, name, renaming):
        return weaken(var_node(context, name, delta), derivation.assigned)
    rule = derivation.rule
    mapping = {old: Var(new) for old, new in renaming.items()}
    if rule == 'omega':
        return omega_node(context, subst_subject(template, mapping))
    if rule in ('meet', 'sub'):
        built = tuple(_fill_template(p, template, context, renaming, name, delta) for p in derivation.premises)
        return Derivation(rule, Judgment(context, built[0].subject, derivation.assigned), built)
    if rule == 'var':
        return Derivation('var', Judgment(context, Var(renaming.get(template.name, template.name)),
                                          derivation.assigned))
    if rule in ('lam', 'get'):
        premise = derivation.premises[0]
        (binder,) = tuple(premise.context.names() - derivation.context.names())
        fresh = fresh_name(template.var, context.names())
        inner = _fill_template(premise, template.body, context.extend(fresh, premise.context.lookup(binder)),
                               {**renaming, template.var: fresh}, name, delta)
        subject = Lam(fresh, inner.subject) if rule == 'lam' else Get(template.loc, fresh, inner.subject)
        return Derivation(rule, Judgment(context, subject, derivation.assigned), (inner,))
    children = _template_children(rule, template)
    built = tuple(_fill_template(derivation.premises[index], child, context, renaming, name, delta)
                  for index, child, _ in children)
    if rule == 'unit':
        subject = Unit(built[0].subject)
    elif rule == 'bind':
        subject = Bind(built[0].subject, built[1].subject)
    elif rule == 'set':
        subject = Set(template.loc, built[0].subject, built[1].subject)
    elif rule == 'upd-a':
        subject = Upd(template.loc, built[0].subject, subst_subject(template.rest, mapping))
    elif rule == 'upd-b':
        subject = Upd(template.loc, subst_subject(template.slot, mapping), built[0].subject)
    elif rule == 'lkp':
        subject = Lkp(template.loc, built[0].subject)
    else:
        subject = Configuration(built[0].subject, built[1].subject)
    return Derivation(rule, Judgment(context, subject, derivation.assigned), built)


def expand_derivation(derivation: Derivation, template, name: str, value,
                      validate: bool = True) -> Expansion:
    """
    由 Γ ⊢ M[V/x] : τ 构造 δ、Γ ⊢ V : δ 与 Γ, x:δ ⊢ M : τ

    δ 是推导在 x 各出现处给 V 的类型之交；x 不出现时为 ωD。

    Args:
        derivation: M[V/x] 的推导
        template: M
        name: x
        value: V

    Returns:
        Expansion

    Raises:
        DecompositionMismatch: M[V/x] 与推导的主语不 α 等价
    """
    if validate:
        require_valid(derivation)
    gamma = derivation.context
    if name in gamma.names():
        raise DerivationInputError(f"变量 {name} 已在上下文中")
    if not same_subject(subst_subject(template, {name: value}), derivation.subject):
        raise DecompositionMismatch("M[V/x] 与推导的主语不 α 等价")

    holes = []
    _collect_holes(derivation, template, name, frozenset(), holes)
    strengthened = [_transport(hole, gamma, {}) for hole in holes]
    delta = meet(*[d.assigned for d in strengthened]) if strengthened else OMEGA_D
    value_derivation = assemble(gamma, value, strengthened, delta)
    body = _fill_template(derivation, template, gamma.extend(name, delta), {}, name, delta)
    logger.debug(f"展开 {name}: {len(holes)} 处出现")
    return Expansion(delta, value_derivation, body)


# ---- 存储定型 ----

def value_at(store_derivation: Derivation, loc, delta) -> Derivation:
    """
    由 Γ ⊢ s : σ 且 σ ≤ ⟨ℓ:δ⟩ 取出 Γ ⊢ V : δ，其中 V 是 lkp(ℓ, s) 的值
    """
    context = store_derivation.context
    value = resolve_lookup(loc, store_derivation.subject)
    pieces = []
    for member in structural_family(store_derivation):
        parts = record_parts(member.assigned)
        if parts is None or parts[0] != loc:
            continue
        premise = member.premises[0]
        if member.rule == 'upd-a':
            pieces.append(_lookup_value(premise, parts[1]) if isinstance(member.subject.slot, Lkp) else premise)
        else:
            pieces.append(value_at(premise, loc, parts[1]))
    return assemble(context, value, pieces, delta)


def _lookup_value(lookup_derivation: Derivation, delta) -> Derivation:
    lookup = lookup_derivation.subject
    pieces = []
    for member in structural_family(lookup_derivation):
        loc, inner = record_parts(member.premises[0].assigned)
        pieces.append(value_at(member.premises[0], loc, inner))
    return assemble(lookup_derivation.context, resolve_lookup(lookup.loc, lookup.store), pieces, delta)


def store_record(context: Context, store, loc, value: Derivation) -> Derivation:
    """
    由 Γ ⊢ V : δ（V 为 lkp(ℓ, s) 的值）构造 Γ ⊢ s : ⟨ℓ:δ⟩

    Raises:
        UndefinedLocation: ℓ ∉ dom(s)
    """
    if not isinstance(store, Upd):
        raise UndefinedLocation(loc)
    if store.loc != loc:
        return upd_b_node(context, store, store_record(context, store.rest, loc, value))
    slot = store.slot
    if isinstance(slot, Lkp):
        inner = store_record(context, slot.store, slot.loc, value)
        return upd_a_node(context, store, lkp_node(context, slot, inner))
    return upd_a_node(context, store, value)


def type_store(context: Context, store, target=None, value_derivations=None,
               depth: int = DEFAULT_SEARCH_DEPTH):
    """
    为存储项构造 ∧ᵢ⟨ℓᵢ:δᵢ⟩ 的推导

    Args:
        context: Γ
        store: 存储项
        target: 目标存储类型，缺省时每个位置取 ωD
        value_derivations: 位置到值推导的映射，缺省时按目标类型搜索
        depth: 搜索值推导时的深度

    Returns:
        tuple: (规范存储类型, 推导)

    Raises:
        StoreTypingError: 目标类型要求的位置不在定义域中，或找不到值的推导
    """
    if target is None:
        target = StoreType(tuple((loc, OMEGA_D) for loc in sorted(dom_store(store))))
    target = normalize(target)
    if is_top(target):
        return target, omega_node(context, store)
    value_derivations = value_derivations or {}
    domain = dom_store(store)
    pieces = []
    for loc, delta in target.entries:
        if loc not in domain:
            raise StoreTypingError(f"{loc} 不在存储项的定义域中")
        found = value_derivations.get(loc)
        if found is None:
            found = search_value(context, resolve_lookup(loc, store), delta, depth)
        if found is None or not subtype(found.assigned, delta):
            raise StoreTypingError(f"找不到 {loc} 处的值具有类型 {delta} 的推导")
        pieces.append(store_record(context, store, loc, weaken(found, delta)))
    return target, assemble(context, store, pieces, target)


def retype_store(store_derivation: Derivation, other) -> Derivation:
    """由 Γ ⊢ s : σ 与 ⊢ s = t 构造 Γ ⊢ t : σ"""
    if not store_eq(store_derivation.subject, other):
        raise StoreTypingError("两个存储项不相等")
    sigma = normalize(store_derivation.assigned)
    found = {loc: value_at(store_derivation, loc, delta) for loc, delta in sigma.entries}
    return type_store(store_derivation.context, other, sigma, found)[1]


def restrict_store(store_derivation: Derivation, loc):
    """由 Γ ⊢ upd(ℓ, V, s) : σ 构造 Γ ⊢ s : σ∖ℓ"""
    updated = store_derivation.subject
    rest_type = store_without(normalize(store_derivation.assigned), loc)
    pieces = [member.premises[0] for member in structural_family(store_derivation) if member.rule == 'upd-b']
    return rest_type, assemble(store_derivation.context, updated.rest, pieces, rest_type)


def seq_derivation(first: Derivation, second: Derivation) -> Derivation:
    """
    顺序组合的导出规则：由 Γ ⊢ M : σ → δ×σ' 与 Γ ⊢ N : σ' → κ 得 Γ ⊢ M ; N : σ → κ
    """
    context = first.context
    _, result = arrow_parts(first.assigned)
    dummy = fresh_name('_', context.names() | free_vars(second.subject))
    inner = weaken_context(second, context.extend(dummy, result.value))
    return bind_node(first, lam_node(context, dummy, inner))


# ---- 类型保持 ----

def _reduct(source: Configuration) -> Configuration:
    outcome = step(source)
    if not isinstance(outcome, Next):
        raise NotAStepError("格局没有后继")
    return outcome.configuration


def preserve_step(derivation: Derivation, reduct: Optional[Configuration] = None,
                  validate: bool = True) -> Derivation:
    """
    由 Γ ⊢ (M, s) : κ 与 (M, s) → (N, t) 构造 Γ ⊢ (N, t) : κ

    Raises:
        DerivationInputError: 输入推导不合法
        NotAStepError: reduct 不是 (M, s) 的后继
    """
    if validate:
        require_valid(derivation)
    source = derivation.subject
    if not isinstance(source, Configuration):
        raise DerivationInputError("类型保持需要格局的推导")
    following = _reduct(source)
    if reduct is not None and not same_configuration(following, reduct):
        raise NotAStepError("给出的格局不是一步归约的结果")
    return _preserve(derivation, source)


def _preserve(derivation: Derivation, source: Configuration) -> Derivation:
    context = derivation.context
    following = _reduct(source)
    if is_top(derivation.assigned):
        return omega_node(context, following)
    computation, store = conf_parts(derivation)
    sigma, _ = arrow_parts(computation.assigned)
    pieces = [_preserve_member(member, weaken(store, source_type), source)
              for member, source_type, _ in computation_members(computation, sigma)]
    return assemble(context, following, pieces, derivation.assigned)


def _preserve_member(member: Derivation, store: Derivation, source: Configuration) -> Derivation:
    context = member.context
    kind = redex_kind(source)
    m, s = source.computation, source.store

    if kind == 'beta':
        unit_part, function_part = member.premises
        sigma, result = arrow_parts(unit_part.assigned)
        values = [unit.premises[0] for unit, _, _ in computation_members(unit_part, sigma)]
        value = assemble(context, m.comp.value, values, result.value)
        _, continuation = arrow_parts(function_part.assigned)
        bodies = []
        for lam in structural_family(function_part):
            parts = arrow_parts(lam.assigned)
            if parts is None or is_top(parts[1]) or not subtype(result.value, parts[0]):
                continue
            bodies.append(subst_derivation(lam.premises[0], weaken(value, parts[0]), validate=False))
        reduct = substitute(m.func.body, m.func.var, m.comp.value)
        return conf_node(assemble(context, reduct, bodies, continuation), weaken(store, result.store))

    if kind == 'get':
        premise = member.premises[0]
        (binder,) = tuple(premise.context.names() - context.names())
        delta = premise.context.lookup(binder)
        value = value_at(store, m.loc, delta)
        body = subst_derivation(premise, value, name=binder, validate=False)
        sigma, _ = arrow_parts(premise.assigned)
        return conf_node(body, weaken(store, sigma))

    if kind == 'set':
        value, body = member.premises
        sigma, _ = arrow_parts(member.assigned)
        updated = Upd(m.loc, m.value, s)
        pieces = [upd_a_node(context, updated, value)]
        for loc, delta in normalize(sigma).entries:
            pieces.append(upd_b_node(context, updated, weaken(store, Record(loc, delta))))
        target = Meet(Record(m.loc, value.assigned), sigma)
        return conf_node(body, assemble(context, updated, pieces, target))

    if kind == 'bind-context':
        first, function = member.premises
        inner = _preserve(conf_node(first, store), Configuration(m.comp, s))
        computation, inner_store = conf_parts(inner)
        return conf_node(bind_node(computation, function), inner_store)

    raise NotAStepError("格局没有后继")


# ---- 类型展开 ----

def _fresh_binder(context: Context, var: str, body):
    if var not in context.names():
        return var, body
    renamed = fresh_name(var, context.names() | free_vars(body))
    return renamed, substitute(body, var, Var(renamed))


def expand_step(derivation: Derivation, source: Configuration, validate: bool = True) -> Derivation:
    """
    由 Γ ⊢ (N, t) : κ 与 (M, s) → (N, t) 构造 Γ ⊢ (M, s) : κ

    Raises:
        DerivationInputError: 输入推导不合法
        NotAStepError: 推导的主语不是 source 的后继
    """
    if validate:
        require_valid(derivation)
    if not same_configuration(_reduct(source), derivation.subject):
        raise NotAStepError("推导的主语不是给出格局的后继")
    return _expand(derivation, source)


def _expand(derivation: Derivation, source: Configuration) -> Derivation:
    context = derivation.context
    kappa = derivation.assigned
    if is_top(kappa):
        return omega_node(context, source)
    computation, store = conf_parts(derivation)
    sigma, _ = arrow_parts(computation.assigned)
    kind = redex_kind(source)
    m, s = source.computation, source.store

    if kind == 'beta':
        var, body = _fresh_binder(context, m.func.var, m.func.body)
        expansion = expand_derivation(computation, body, var, m.comp.value, validate=False)
        function = lam_node(context, var, expansion.body_derivation)
        returned = unit_node(context, expansion.value_derivation, sigma)
        return conf_node(bind_node(returned, function), store)

    if kind == 'get':
        var, body = _fresh_binder(context, m.var, m.body)
        value = resolve_lookup(m.loc, s)
        expansion = expand_derivation(computation, body, var, value, validate=False)
        reader = get_node(context, m.loc, var, expansion.body_derivation)
        record_derivation = store_record(context, s, m.loc, expansion.value_derivation)
        return conf_node(reader, meet_node(record_derivation, store))

    if kind == 'set':
        sigma = normalize(sigma)
        delta = sigma.lookup(m.loc)
        if delta is None:
            delta = OMEGA_D
            value = omega_node(context, m.value)
        else:
            value = value_at(store, m.loc, delta)
        rest_type, rest = restrict_store(store, m.loc)
        body = weaken(computation, Arrow(Meet(Record(m.loc, delta), rest_type), kappa))
        return conf_node(set_node(context, m.loc, value, body, rest_type), rest)

    if kind == 'bind-context':
        inner_source = Configuration(m.comp, s)
        pieces = []
        for member, source_type, _ in computation_members(computation, sigma):
            first, function = member.premises
            inner = _expand(conf_node(first, weaken(store, source_type)), inner_source)
            expanded, inner_store = conf_parts(inner)
            pieces.append(conf_node(bind_node(expanded, function), inner_store))
        return assemble(context, source, pieces, kappa)

    raise NotAStepError("格局没有后继")


# ---- 收敛证书 ----

@dataclass(frozen=True)
class Certificate:
    term: object
    trace: tuple
    outcome: Converged
    configuration_derivation: Derivation
    derivation: Derivation

    ok = True


@dataclass(frozen=True)
class CertificationFailure:
    outcome: object

    ok = False


def seed_derivation(result: Configuration) -> Derivation:
    """⊢ (unit V, t) : ωD × ωS"""
    value = omega_node(EMPTY_CONTEXT, result.computation.value)
    returned = unit_node(EMPTY_CONTEXT, value, OMEGA_S)
    return conf_node(returned, omega_node(EMPTY_CONTEXT, result.store))


def certify_convergence(term, fuel: int = DEFAULT_FUEL):
    """
    在空存储上运行 M；收敛时从结果的 ω 定型出发沿轨迹逐步展开，得到 ⊢ M : ωS → ωD × ωS

    Args:
        term: 闭计算
        fuel: 小步燃料

    Returns:
        Certificate 或 CertificationFailure
    """
    outcome, trace = run(Configuration(term, EMP), fuel)
    if not isinstance(outcome, Converged):
        logger.info(f"无法生成证书: {type(outcome).__name__}")
        return CertificationFailure(outcome)
    derivation = seed_derivation(trace[-1])
    for source in reversed(trace[:-1]):
        derivation = _expand(derivation, source)
    computation, _ = conf_parts(derivation)
    certificate = weaken(computation, CONVERGENCE_TYPE)
    result = check_derivation(certificate)
    if not result.ok:
        raise InternalDerivationError(f"证书推导未通过检查: {result.path_text()}: {result.message}")
    logger.info(f"生成收敛证书: {outcome.steps} 步，推导 {certificate.size()} 个结点")
    return Certificate(term, tuple(trace), outcome, derivation, certificate)


# ---- 有界搜索 ----

def synth_value(context: Context, value, depth: int) -> Derivation:
    """为值找一个类型：变量取上下文中的类型，抽象尝试 ωD → ωS → κ，否则 ωD"""
    if isinstance(value, Var):
        if context.lookup(value.name) is None:
            return omega_node(context, value)
        return var_node(context, value.name)
    if depth > 0:
        var, body = _fresh_binder(context, value.var, value.body)
        found = synth_comp(context.extend(var, OMEGA_D), body, OMEGA_S, depth - 1)
        if found is not None:
            return lam_node(context, var, found)
    return omega_node(context, value)


def _synth_continuation(context: Context, function, delta, sigma, depth: int) -> Optional[Derivation]:
    if isinstance(function, Lam):
        var, body = _fresh_binder(context, function.var, function.body)
        found = synth_comp(context.extend(var, delta), body, sigma, depth)
        return None if found is None else lam_node(context, var, found)
    declared = context.lookup(function.name)
    if declared is None:
        return None
    targets = [target for source, target in normalize(declared).arrows if subtype(delta, source)]
    if not targets:
        return None
    results = [kappa for source, kappa in meet(*targets).arrows if subtype(sigma, source)]
    if not results:
        return None
    return weaken(var_node(context, function.name), Arrow(delta, Arrow(sigma, meet(*results))))


def synth_comp(context: Context, term, sigma, depth: int) -> Optional[Derivation]:
    """
    按生成引理自顶向下为计算构造 Γ ⊢ M : σ → κ，κ 由推导决定

    Returns:
        推导，深度用尽或无法定型时为 None
    """
    if depth <= 0:
        return None
    sigma = normalize(sigma)
    if isinstance(term, Unit):
        return unit_node(context, synth_value(context, term.value, depth - 1), sigma)
    if isinstance(term, Get):
        delta = sigma.lookup(term.loc)
        if delta is None:
            return None
        var, body = _fresh_binder(context, term.var, term.body)
        found = synth_comp(context.extend(var, delta), body, sigma, depth - 1)
        return None if found is None else get_node(context, term.loc, var, found)
    if isinstance(term, Set):
        value = synth_value(context, term.value, depth - 1)
        rest = store_without(sigma, term.loc)
        found = synth_comp(context, term.body, meet(Record(term.loc, value.assigned), rest), depth - 1)
        if found is None:
            return None
        _, kappa = arrow_parts(found.assigned)
        return weaken(set_node(context, term.loc, value, found, rest), Arrow(sigma, kappa))
    if isinstance(term, Bind):
        first = synth_comp(context, term.comp, sigma, depth - 1)
        if first is None:
            return None
        _, result = arrow_parts(first.assigned)
        function = _synth_continuation(context, term.func, result.value, result.store, depth - 1)
        return None if function is None else bind_node(first, function)
    return None


def search_value(context: Context, value, delta, depth: int) -> Optional[Derivation]:
    """按目标值类型搜索 Γ ⊢ V : δ"""
    delta = normalize(delta)
    if is_top(delta):
        return omega_node(context, value)
    if isinstance(value, Var):
        declared = context.lookup(value.name)
        if declared is None or not subtype(declared, delta):
            return None
        return weaken(var_node(context, value.name), delta)
    var, body = _fresh_binder(context, value.var, value.body)
    pieces = []
    for source, target in delta.arrows:
        found = search_typing(context.extend(var, source), body, target, depth - 1)
        if found is None:
            return None
        pieces.append(lam_node(context, var, found))
    return assemble(context, value, pieces, delta)


def search_typing(context: Context, term, tau, depth: int = DEFAULT_SEARCH_DEPTH) -> Optional[Derivation]:
    """
    有界搜索 Γ ⊢ M : τ

    Returns:
        找到的推导；在该深度内找不到时为 None
    """
    tau = normalize(tau)
    if is_top(tau):
        return omega_node(context, term)
    pieces = []
    for sigma, kappa in tau.arrows:
        found = synth_comp(context, term, sigma, depth)
        if found is None:
            return None
        _, result = arrow_parts(found.assigned)
        if not subtype(result, kappa):
            return None
        pieces.append(weaken(found, Arrow(sigma, kappa)))
    return assemble(context, term, pieces, tau)
