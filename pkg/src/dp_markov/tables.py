"""价值表、Q 表、确定性策略，以及 sup 度量。"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from src.settings import TIE_TOLERANCE


@dataclass(frozen=True)
class ValueTable:
    """J(I)，按信息状态编号存放，memory 记录窗口长度 L。"""

    values: np.ndarray
    memory: int

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.ndim != 1:
            raise ValueError(f"value table must be 1-D, got shape {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, size: int, memory: int) -> "ValueTable":
        return cls(np.zeros(size), memory)

    def within_bounds(self, bound_M: float, gamma: float, atol: float = 1e-12) -> bool:
        upper = bound_M / (1.0 - gamma)
        return bool(np.all(self.values >= -atol) and np.all(self.values <= upper + atol))


@dataclass(frozen=True)
class QTable:
    """Q(I, u)，形状 (信息状态数, 动作数)。"""

    values: np.ndarray
    memory: int

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.ndim != 2:
            raise ValueError(f"Q table must be 2-D, got shape {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, size: int, n_actions: int, memory: int) -> "QTable":
        return cls(np.zeros((size, n_actions)), memory)

    def min_over_actions(self) -> ValueTable:
        return ValueTable(self.values.min(axis=1), self.memory)

    def within_bounds(self, bound_M: float, gamma: float, atol: float = 1e-12) -> bool:
        upper = bound_M / (1.0 - gamma)
        return bool(np.all(self.values >= -atol) and np.all(self.values <= upper + atol))


@dataclass(frozen=True)
class Policy:
    """确定性平稳策略 π: I -> u，choice[i] 为动作编号。"""

    choice: np.ndarray
    memory: int
    label: str = "table"

    def __post_init__(self) -> None:
        choice = np.array(self.choice, dtype=np.int64)
        if choice.ndim != 1:
            raise ValueError(f"policy must be 1-D, got shape {choice.shape}")
        choice.setflags(write=False)
        object.__setattr__(self, "choice", choice)

    def act(self, info_index, uniform=None):
        """按信息状态编号取动作；uniform 参数为了和随机策略接口一致，这里不用。"""
        return self.choice[info_index]

    def validate(self, n_actions: int) -> None:
        if self.choice.size and (self.choice.min() < 0 or self.choice.max() >= n_actions):
            raise ValueError(f"policy actions must lie in [0, {n_actions})")

    @classmethod
    def constant(cls, size: int, action: int, memory: int) -> "Policy":
        return cls(np.full(size, int(action)), memory, label=f"constant_{action}")


Table = Union[ValueTable, QTable, np.ndarray]


def _array(table: Table) -> np.ndarray:
    if isinstance(table, (ValueTable, QTable)):
        return table.values
    return np.asarray(table, dtype=float)


def sup_metric(a: Table, b: Table) -> float:
    """d(A, B) = max |A - B|，两表形状必须一致。"""
    left = _array(a)
    right = _array(b)
    if left.shape != right.shape:
        raise ValueError(f"sup_metric shape mismatch: {left.shape} vs {right.shape}")
    if left.size == 0:
        return 0.0
    return float(np.max(np.abs(left - right)))


def argmin_lowest(values: np.ndarray, tie_tol: float = TIE_TOLERANCE) -> np.ndarray:
    """沿最后一维取 argmin；与最小值相差不超过 tie_tol 的都算平局，取编号最小的动作。"""
    minima = values.min(axis=-1, keepdims=True)
    return np.argmax(values <= minima + tie_tol, axis=-1)
