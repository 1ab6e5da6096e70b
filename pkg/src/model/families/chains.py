"""离散模态链族：P(x) 随连续状态变化的行随机矩阵。"""
from __future__ import annotations

import numpy as np

from src.model.validators import expect_matrix, expect_vector


class ConstantChain:
    """P(x) ≡ P，与连续状态无关。"""

    def __init__(self, matrix: np.ndarray) -> None:
        self.matrix = np.asarray(matrix, dtype=float)

    @classmethod
    def from_params(cls, params: dict, n_modes: int) -> "ConstantChain":
        matrix = expect_matrix(params.get("matrix"), (n_modes, n_modes), "chain.params.matrix")
        return cls(matrix)

    def matrices(self, grid, n_modes: int) -> np.ndarray:
        return np.broadcast_to(self.matrix, (grid.n_points, n_modes, n_modes)).copy()


class IdentityChain:
    """模态永不切换。"""

    @classmethod
    def from_params(cls, params: dict, n_modes: int) -> "IdentityChain":
        return cls()

    def matrices(self, grid, n_modes: int) -> np.ndarray:
        return np.broadcast_to(np.eye(n_modes), (grid.n_points, n_modes, n_modes)).copy()


class IdenticalRowsChain:
    """每一行都等于同一个分布 mu：下一模态与当前模态无关。"""

    def __init__(self, mu: np.ndarray) -> None:
        self.mu = np.asarray(mu, dtype=float)

    @classmethod
    def from_params(cls, params: dict, n_modes: int) -> "IdenticalRowsChain":
        mu = expect_vector(params.get("mu"), n_modes, "chain.params.mu")
        return cls(mu)

    def matrices(self, grid, n_modes: int) -> np.ndarray:
        block = np.tile(self.mu, (n_modes, 1))
        return np.broadcast_to(block, (grid.n_points, n_modes, n_modes)).copy()


class BlendChain:
    """
    P(x) = (1 - λ(x)) * low + λ(x) * high，λ 为第一维坐标在区间内的归一化位置。
    low = I、high = 交换矩阵、X = [0, 1] 时即 P(x) = [[1-x, x], [x, 1-x]]。
    """

    def __init__(self, low: np.ndarray, high: np.ndarray) -> None:
        self.low = np.asarray(low, dtype=float)
        self.high = np.asarray(high, dtype=float)

    @classmethod
    def from_params(cls, params: dict, n_modes: int) -> "BlendChain":
        low = expect_matrix(params.get("low"), (n_modes, n_modes), "chain.params.low")
        high = expect_matrix(params.get("high"), (n_modes, n_modes), "chain.params.high")
        return cls(low, high)

    def matrices(self, grid, n_modes: int) -> np.ndarray:
        lo, hi = grid.bounds[0]
        lam = (grid.points[:, 0] - lo) / (hi - lo)
        lam = lam[:, None, None]
        return (1.0 - lam) * self.low[None, :, :] + lam * self.high[None, :, :]
