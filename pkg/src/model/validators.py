# -*- coding: utf-8 -*-
"""配置字段校验小工具。

报错信息统一带上字段路径（例如 dynamics.params.sigma），方便定位配置问题。
"""
from __future__ import annotations

from typing import Any, List, Sequence

import numpy as np


def expect_type(value: Any, expected_type, name: str) -> Any:
    """确保值是指定类型，否则抛出带字段名的错误。"""
    if isinstance(value, bool) and expected_type in (int, float, (int, float)):
        raise ValueError(f"{name} must be a number, got bool")
    if not isinstance(value, expected_type):
        type_name = getattr(expected_type, "__name__", str(expected_type))
        raise ValueError(f"{name} must be of type {type_name}")
    return value


def expect_number(value: Any, name: str) -> float:
    expect_type(value, (int, float), name)
    number = float(value)
    if not np.isfinite(number):
        raise ValueError(f"{name} must be finite")
    return number


def expect_positive(value: Any, name: str) -> float:
    """确保数值大于 0。"""
    number = expect_number(value, name)
    if number <= 0:
        raise ValueError(f"{name} must be greater than 0")
    return number


def expect_range(value: Any, min_value: float, max_value: float, name: str) -> float:
    """确保数值落在 [min_value, max_value] 闭区间内。"""
    number = expect_number(value, name)
    if not (min_value <= number <= max_value):
        raise ValueError(f"{name} must be between {min_value} and {max_value}")
    return number


def expect_int(value: Any, name: str, minimum: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"{name} must be an integer")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}")
    return int(value)


def expect_vector(value: Any, length: int, name: str) -> np.ndarray:
    """数字列表；传入标量时广播成指定长度。"""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return np.full(length, expect_number(value, name))
    expect_type(value, list, name)
    if len(value) != length:
        raise ValueError(f"{name} must have length {length}, got {len(value)}")
    return np.array([expect_number(item, f"{name}[{i}]") for i, item in enumerate(value)])


def expect_matrix(value: Any, shape: Sequence[int], name: str) -> np.ndarray:
    expect_type(value, list, name)
    rows: List[np.ndarray] = []
    for i, row in enumerate(value):
        rows.append(expect_vector(row, shape[1], f"{name}[{i}]"))
    if len(rows) != shape[0]:
        raise ValueError(f"{name} must have {shape[0]} rows, got {len(rows)}")
    return np.vstack(rows)
