"""族接口定义：连续动态密度、离散模态转移矩阵 P(x)、期望奖励。

仅声明接口，具体实现由各族模块提供；名称到类的白名单映射见 registry.py。
"""
from __future__ import annotations

from typing import Protocol, Tuple

import numpy as np


class DynamicsFamily(Protocol):
    """连续状态转移族：给出某个 (x, s, u) 的网格行与出界质量。"""

    def row(self, grid, source_index: int, mode: int, payload: np.ndarray) -> Tuple[np.ndarray, float]:
        """返回 (各网格点概率, exit_mass)，两者之和为 1。"""
        raise NotImplementedError


class ChainFamily(Protocol):
    """离散模态链族：给出每个网格点上的 |S|×|S| 行随机矩阵。"""

    def matrices(self, grid, n_modes: int) -> np.ndarray:
        """返回形状 (网格点数, |S|, |S|) 的数组。"""
        raise NotImplementedError


class RewardFamily(Protocol):
    """期望奖励族：给出 R(x, u)。"""

    def values(self, grid, actions, bound: float) -> np.ndarray:
        """返回形状 (网格点数, |U|) 的数组。"""
        raise NotImplementedError
