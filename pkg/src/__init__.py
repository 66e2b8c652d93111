#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
λimp 工具包
命令式 λ 演算的求值器、存储代数、交类型推导与可实现性检查
"""

__version__ = '1.0.0'
