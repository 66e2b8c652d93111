#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
具体语法模块
用 lambda_imp.lark 中的文法解析项、存储项、类型、格局、判断与推导文件，
并把 Lark 的语法树转换为工具包的数据类
"""

import functools
import logging
from dataclasses import dataclass

import lark
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken, VisitError

from src.derivation import RULES, Context, Derivation, Judgment
from src.errors import LambdaImpError, ParseError
from src.operational import Configuration
from src.store import EMP, Emp, Lkp, Upd
from src.syntax import (
    App, Bind, CompApp, Get, Lam, Let, Location, Seq, Set, Unit, Var, desugar, is_value,
)
from src.type_language import (
    COMPUTATION, RESULT, STORE, VALUE, Arrow, Meet, Omega, Product, Record,
)

# 配置日志
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

SORTS = ('term', 'store', 'type', 'derivation', 'configuration', 'judgment', 'context')


@dataclass(frozen=True)
class SourceSpan:
    begin: int
    end: int
    line: int
    column: int

    def __str__(self):
        return f"{self.line}:{self.column}"


@functools.cache
def _parser() -> lark.Lark:
    """文法只加载一次"""
    return lark.Lark.open('lambda_imp.lark', rel_to=__file__, parser='lalr',
                          start=[f"{sort}_start" for sort in SORTS])


def _location(token) -> Location:
    return Location(int(str(token)[1:]))


def _require_value(t, where):
    if not is_value(t):
        raise ParseError(f"{where}必须是值")
    return t


def _as_computation(t):
    return Unit(t) if is_value(t) else t


def _require_computation(t, where):
    if is_value(t):
        raise ParseError(f"{where}必须是计算")
    return t


@lark.v_args(inline=True)
class _Transformer(lark.Transformer):
    """把语法树转换为核心语法；语法糖在 term_start 处展开"""

    def term_start(self, term):
        return desugar(term)

    def store_start(self, store):
        return store

    def type_start(self, t):
        return t

    def derivation_start(self, derivation):
        return derivation

    def configuration_start(self, configuration):
        return configuration

    def judgment_start(self, judgment):
        return judgment

    def context_start(self, context):
        return context

    # ---- 项 ----

    def var(self, name):
        return Var(str(name))

    def lam(self, name, body):
        return Lam(str(name), _require_computation(body, "λ 的体"))

    def unit(self, value):
        return Unit(_require_value(value, "unit 的参数"))

    def bind(self, comp, func):
        return Bind(_require_computation(comp, ">>= 的左侧"), _require_value(func, ">>= 的右侧"))

    def get(self, loc, name, body):
        return Get(_location(loc), str(name), _require_computation(body, "get 的体"))

    def set(self, loc, value, body):
        return Set(_location(loc), _require_value(value, "set 写入的内容"), _require_computation(body, "set 的后续"))

    def let(self, name, bound, body):
        return Let(str(name), _require_computation(bound, "let 绑定的项"), _require_computation(body, "let 的体"))

    def seq(self, first, second):
        return Seq(_require_computation(first, "; 的左侧"), _require_computation(second, "; 的右侧"))

    def apply(self, fun, arg):
        if is_value(fun) and is_value(arg):
            return App(fun, arg)
        return CompApp(_as_computation(fun), _as_computation(arg))

    # ---- 存储项 ----

    def emp(self):
        return EMP

    def upd(self, loc, slot, rest):
        if not isinstance(slot, Lkp):
            slot = _require_value(desugar(slot), "存储中的槽位")
        return Upd(_location(loc), slot, rest)

    def lookup(self, loc, store):
        return Lkp(_location(loc), store)

    def configuration(self, computation, store):
        return Configuration(desugar(_require_computation(computation, "格局中的项")), store)

    # ---- 类型 ----

    def arrow(self, source, target):
        return Arrow(source, target)

    def product(self, value_type, store_type):
        return Product(value_type, store_type)

    def meet(self, left, right):
        return Meet(left, right)

    def record(self, loc, value_type):
        return Record(_location(loc), value_type)

    def omega_d(self):
        return Omega(VALUE)

    def omega_s(self):
        return Omega(STORE)

    def omega_c(self):
        return Omega(RESULT)

    def omega_t(self):
        return Omega(COMPUTATION)

    # ---- 推导 ----

    def binding(self, name, t):
        return str(name), t

    def context(self, *bindings):
        return Context(tuple(binding for binding in bindings if binding is not None))

    def judgment(self, context, subject, t):
        if not isinstance(subject, (Emp, Upd, Lkp, Configuration)):
            subject = desugar(subject)
        return Judgment(context, subject, t)

    def derivation(self, rule, judgment, *premises):
        rule = str(rule)
        if rule not in RULES:
            raise ParseError(f"未知规则: {rule}")
        return Derivation(rule, judgment, tuple(premises))


def _span(error: UnexpectedInput, text: str) -> SourceSpan:
    line = max(getattr(error, 'line', 0) or 0, 0)
    column = max(getattr(error, 'column', 0) or 0, 0)
    if isinstance(error, UnexpectedToken) and error.token.start_pos is not None:
        begin = error.token.start_pos
        end = error.token.end_pos if error.token.end_pos is not None else begin
    elif isinstance(error, UnexpectedCharacters):
        begin = error.pos_in_stream
        end = begin + 1
    else:
        begin = end = len(text)
    if isinstance(error, UnexpectedEOF) or not line:
        line = text.count('\n') + 1
        column = len(text) - text.rfind('\n')
    return SourceSpan(begin, max(begin, end), line, column)


def _expected(error: UnexpectedInput):
    expected = getattr(error, 'expected', None) or getattr(error, 'allowed', None) or ()
    return frozenset(str(name) for name in expected)


def parse(text: str, sort: str = 'term'):
    """
    解析具体语法

    Args:
        text: 输入文本
        sort: 'term'、'store'、'type'、'derivation'、'configuration'、'judgment' 或 'context'

    Returns:
        对应的数据类：项已展开语法糖，类型为原始类型表达式

    Raises:
        ParseError: 语法错误，附带位置与期望的记号
        WellFormednessError: lkp(ℓ, s) 中 ℓ ∉ dom(s)
    """
    if sort not in SORTS:
        raise ValueError(f"未知的语法种类: {sort}")
    try:
        tree = _parser().parse(text, start=f"{sort}_start")
        return _Transformer().transform(tree)
    except UnexpectedInput as e:
        span = _span(e, text)
        expected = _expected(e)
        logger.debug(f"解析失败 {span}: {sorted(expected)}")
        raise ParseError(f"语法错误，位置 {span}", span, expected) from None
    except VisitError as e:
        if isinstance(e.orig_exc, LambdaImpError):
            raise e.orig_exc from None
        raise


def parse_term(text: str):
    return parse(text, 'term')


def parse_store(text: str):
    return parse(text, 'store')


def parse_type(text: str):
    return parse(text, 'type')


def parse_derivation(text: str):
    return parse(text, 'derivation')


def parse_configuration(text: str):
    return parse(text, 'configuration')


def parse_context(text: str):
    """x : T, y : T' 形式的上下文；空串为空上下文"""
    return parse(text, 'context')


if __name__ == "__main__":
    print(parse_term("set[l0](\\x. unit x). get[l0](\\y. unit y)"))
    print(parse_type("wS -> wD x wS"))
    print(parse_store("upd(l0, \\x. unit x, emp)"))
