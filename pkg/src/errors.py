#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
异常定义模块
λimp 工具包中所有可预期错误的异常层次
"""


class LambdaImpError(Exception):
    """工具包异常基类"""


class OpenTermError(LambdaImpError):
    """求值入口处的项或存储项含自由变量"""

    def __init__(self, free_names):
        self.free_names = frozenset(free_names)
        names = ', '.join(sorted(self.free_names))
        super().__init__(f"项不是闭项，自由变量: {names}")


class UndefinedLocation(LambdaImpError):
    """在存储项的定义域之外读取位置"""

    def __init__(self, location):
        self.location = location
        super().__init__(f"位置 {location} 不在存储项的定义域中")


class WellFormednessError(LambdaImpError):
    """lkp(ℓ, s) 要求 ℓ ∈ dom(s)"""

    def __init__(self, message, span=None):
        self.span = span
        super().__init__(message)


class SortMismatch(LambdaImpError):
    """类型表达式的种类不一致，例如 δ ∧ σ"""


class ParseError(LambdaImpError):
    """具体语法解析失败"""

    def __init__(self, message, span=None, expected=()):
        self.span = span
        self.expected = frozenset(expected)
        super().__init__(message)


class DerivationInputError(LambdaImpError):
    """推导变换的输入推导未通过检查"""

    def __init__(self, message, check_result=None):
        self.check_result = check_result
        super().__init__(message)


class NotAStepError(LambdaImpError):
    """给出的两个格局之间不是一步归约"""


class DecompositionMismatch(LambdaImpError):
    """M[V/x] 与推导的主语不 α 等价，或模板与推导结构不符"""


class StoreTypingError(LambdaImpError):
    """无法按目标存储类型为存储项构造推导"""


class EmptyGenerator(LambdaImpError):
    """在预算内找不到某个值类型的居留值"""

    def __init__(self, value_type):
        self.value_type = value_type
        super().__init__(f"预算内没有类型 {value_type} 的闭值")


class InternalDerivationError(LambdaImpError):
    """推导构造过程中出现了不应成立的子类型或形状假设"""
