#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
输出模块
把项、存储项、类型、格局、轨迹与推导渲染为可再解析的文本，或导出为 JSON 结构
"""

import logging

from src.operational import Configuration
from src.store import Emp, Lkp, Upd
from src.syntax import Bind, Get, Lam, Location, Set, Unit, Var, is_computation, is_value
from src.type_language import (
    CANONICAL_TYPES, COMPUTATION, RESULT, STORE, VALUE, Arrow, Meet, Omega, Product, Record, reify,
)

# 配置日志
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

_ASCII = {
    'lambda': '\\', 'bind': '>>=', 'meet': '/\\', 'product': 'x', 'arrow': '->', 'turnstile': '|-',
    'loc': 'l', 'bottom': 'bottom',
    VALUE: 'wD', STORE: 'wS', RESULT: 'wC', COMPUTATION: 'wT',
}

_UNICODE = {
    'lambda': 'λ', 'bind': '⟫=', 'meet': '∧', 'product': '×', 'arrow': '→', 'turnstile': '⊢',
    'loc': 'ℓ', 'bottom': '⊥C',
    VALUE: 'ωD', STORE: 'ωS', RESULT: 'ωC', COMPUTATION: 'ωT',
}


def _symbols(unicode):
    return _UNICODE if unicode else _ASCII


def render_location(loc: Location, unicode: bool = False) -> str:
    return f"{_symbols(unicode)['loc']}{loc.index}"


# ---- 项 ----

def render(t, unicode: bool = False) -> str:
    """
    渲染值或计算

    λ 体与 set 的后续向右延伸到底；出现在 >>= 右侧或 unit 参数处的抽象加括号，
    出现在 >>= 左侧的 set 加括号
    """
    sym = _symbols(unicode)
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Lam):
        return f"{sym['lambda']}{t.var}. {render(t.body, unicode)}"
    if isinstance(t, Unit):
        return f"unit {_atom(t.value, unicode)}"
    if isinstance(t, Bind):
        funcs = []
        while isinstance(t, Bind):
            funcs.append(t.func)
            t = t.comp
        left = render(t, unicode)
        if isinstance(t, Set):
            left = f"({left})"
        return left + ''.join(f" {sym['bind']} {_atom(func, unicode)}" for func in reversed(funcs))
    if isinstance(t, Get):
        return f"get[{render_location(t.loc, unicode)}]({sym['lambda']}{t.var}. {render(t.body, unicode)})"
    if isinstance(t, Set):
        return f"set[{render_location(t.loc, unicode)}]({render(t.value, unicode)}). {render(t.body, unicode)}"
    raise TypeError(f"不是 λimp 项: {t!r}")


def _atom(value, unicode):
    text = render(value, unicode)
    return text if isinstance(value, Var) else f"({text})"


def render_store(s, unicode: bool = False) -> str:
    if isinstance(s, Emp):
        return 'emp'
    if isinstance(s, Upd):
        return f"upd({render_location(s.loc, unicode)}, {render_slot(s.slot, unicode)}, {render_store(s.rest, unicode)})"
    raise TypeError(f"不是存储项: {s!r}")


def render_slot(u, unicode: bool = False) -> str:
    if isinstance(u, Lkp):
        return f"lkp({render_location(u.loc, unicode)}, {render_store(u.store, unicode)})"
    return render(u, unicode)


def render_configuration(c: Configuration, unicode: bool = False) -> str:
    return f"({render(c.computation, unicode)}, {render_store(c.store, unicode)})"


# ---- 类型 ----

def render_type(t, unicode: bool = False) -> str:
    """渲染原始类型或规范形；规范形先转回原始类型"""
    if isinstance(t, CANONICAL_TYPES):
        t = reify(t)
    sym = _symbols(unicode)
    if isinstance(t, Omega):
        return sym[t.sort]
    if isinstance(t, Arrow):
        return f"{_operand(t.source, unicode, (Arrow, Product))} {sym['arrow']} {render_type(t.target, unicode)}"
    if isinstance(t, Product):
        left = _operand(t.value_type, unicode, (Arrow, Product))
        right = _operand(t.store_type, unicode, (Arrow, Product))
        return f"{left} {sym['product']} {right}"
    if isinstance(t, Meet):
        left = _operand(t.left, unicode, (Arrow, Product))
        right = _operand(t.right, unicode, (Arrow, Product, Meet))
        return f"{left} {sym['meet']} {right}"
    if isinstance(t, Record):
        return f"<{render_location(t.loc, unicode)} : {render_type(t.value_type, unicode)}>"
    raise TypeError(f"不是类型: {t!r}")


def _operand(t, unicode, wrapped):
    if isinstance(t, CANONICAL_TYPES):
        t = reify(t)
    text = render_type(t, unicode)
    return f"({text})" if isinstance(t, wrapped) else text


# ---- 主语、结果与轨迹 ----

def render_subject(subject, unicode: bool = False) -> str:
    if is_value(subject) or is_computation(subject):
        return render(subject, unicode)
    if isinstance(subject, (Emp, Upd)):
        return render_store(subject, unicode)
    if isinstance(subject, Lkp):
        return render_slot(subject, unicode)
    if isinstance(subject, Configuration):
        return render_configuration(subject, unicode)
    raise TypeError(f"不是可定型的主语: {subject!r}")


def render_entity(entity, unicode: bool = False) -> str:
    """渲染成员检查中出现的对象：项、存储项、结果、⊥C 或位置"""
    from src.realizability import BOTTOM, Result

    if entity is None:
        return ''
    if entity is BOTTOM:
        return _symbols(unicode)['bottom']
    if isinstance(entity, Result):
        return f"({render(entity.value, unicode)}, {render_store(entity.store, unicode)})"
    if isinstance(entity, Location):
        return render_location(entity, unicode)
    return render_subject(entity, unicode)


def trace_records(trace, unicode: bool = False):
    """轨迹的 JSON 结构：每一步一条记录"""
    return [
        {'step': index, 'computation': render(c.computation, unicode), 'store': render_store(c.store, unicode)}
        for index, c in enumerate(trace)
    ]


def render_trace(trace, unicode: bool = False) -> str:
    return '\n'.join(f"step {index}: {render_configuration(c, unicode)}" for index, c in enumerate(trace))


# ---- 推导 ----

def render_context(context, unicode: bool = False) -> str:
    return ', '.join(f"{name} : {render_type(t, unicode)}" for name, t in context.bindings)


def render_judgment(judgment, unicode: bool = False) -> str:
    sym = _symbols(unicode)
    context = render_context(judgment.context, unicode)
    prefix = f"{context} " if context else ''
    return (f"{prefix}{sym['turnstile']} {render_subject(judgment.subject, unicode)} : "
            f"{render_type(judgment.assigned, unicode)}")


def render_derivation(derivation, unicode: bool = False) -> str:
    """
    渲染为推导文件格式：每个结点占一行，前提缩进两格

    Args:
        derivation: 推导树
        unicode: 是否使用 Unicode 记号（Unicode 输出不可再解析）

    Returns:
        str: 多行文本
    """
    lines = []
    _render_node(derivation, 0, lines, unicode)
    return '\n'.join(lines)


def _render_node(node, depth, lines, unicode):
    indent = '  ' * depth
    head = f"{indent}({node.rule} {render_judgment(node.conclusion, unicode)}"
    if not node.premises:
        lines.append(head + ')')
        return
    lines.append(head)
    for premise in node.premises:
        _render_node(premise, depth + 1, lines, unicode)
    lines[-1] += ')'


def derivation_to_dict(derivation, unicode: bool = False):
    """推导的嵌套 JSON 结构"""
    return {
        'rule': derivation.rule,
        'context': [[name, render_type(t, unicode)] for name, t in derivation.context.bindings],
        'subject': render_subject(derivation.subject, unicode),
        'type': render_type(derivation.assigned, unicode),
        'premises': [derivation_to_dict(premise, unicode) for premise in derivation.premises],
    }


if __name__ == "__main__":
    from src.syntax import identity, omega_c
    from src.type_language import CONVERGENCE_TYPE

    print(render(omega_c()))
    print(render(identity(), unicode=True))
    print(render_type(CONVERGENCE_TYPE))
