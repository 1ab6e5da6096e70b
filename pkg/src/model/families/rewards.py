"""期望奖励族 R(x, u)。奖励按代价理解，算子对动作取最小。"""
from __future__ import annotations

import numpy as np

from src.model.validators import expect_number, expect_type, expect_vector


class ConstantReward:
    def __init__(self, value: float) -> None:
        self.value = float(value)

    @classmethod
    def from_params(cls, params: dict, dim: int) -> "ConstantReward":
        return cls(expect_number(params.get("value", 0.0), "reward.params.value"))

    def values(self, grid, actions, bound: float) -> np.ndarray:
        return np.full((grid.n_points, actions.size), self.value)


class QuadraticReward:
    """
    R(x, u) = min(M, state_weight * ||x - target||^2 + action_weight * ||u||^2)。
    截断到 M 保证奖励落在 [0, M]。
    """

    def __init__(self, target: np.ndarray, state_weight: float, action_weight: float) -> None:
        self.target = np.asarray(target, dtype=float)
        self.state_weight = float(state_weight)
        self.action_weight = float(action_weight)

    @classmethod
    def from_params(cls, params: dict, dim: int) -> "QuadraticReward":
        target = expect_vector(params.get("target", 0.0), dim, "reward.params.target")
        state_weight = expect_number(params.get("state_weight", 1.0), "reward.params.state_weight")
        action_weight = expect_number(params.get("action_weight", 0.0), "reward.params.action_weight")
        if state_weight < 0 or action_weight < 0:
            raise ValueError("reward.params weights must be >= 0")
        return cls(target, state_weight, action_weight)

    def values(self, grid, actions, bound: float) -> np.ndarray:
        state_cost = self.state_weight * np.sum((grid.points - self.target) ** 2, axis=1)
        payloads = np.array([actions.payload(i, grid.dim) for i in range(actions.size)])
        action_cost = self.action_weight * np.sum(payloads ** 2, axis=1)
        return np.minimum(state_cost[:, None] + action_cost[None, :], bound)


class TableReward:
    """显式给出每个 (网格点, 动作) 的奖励，不做截断，越界由 validate_model 报告。"""

    def __init__(self, table: np.ndarray) -> None:
        self.table = np.asarray(table, dtype=float)

    @classmethod
    def from_params(cls, params: dict, dim: int) -> "TableReward":
        raw = expect_type(params.get("values"), list, "reward.params.values")
        return cls(np.array(raw, dtype=float))

    def values(self, grid, actions, bound: float) -> np.ndarray:
        expected = (grid.n_points, actions.size)
        if self.table.shape != expected:
            raise ValueError(f"reward.params.values must have shape {expected}, got {self.table.shape}")
        return self.table.copy()
