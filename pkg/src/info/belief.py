"""信念状态：隐藏模态的概率分布，以及开环递推 b(k+1) = P(x(k))^T b(k)。"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List

import numpy as np

from src.settings import NEGATIVE_CLAMP_ATOL, SIMPLEX_ATOL


@dataclass(frozen=True)
class Belief:
    """单纯形 Δ_|S| 上的一个点。"""

    weights: np.ndarray

    def __post_init__(self) -> None:
        weights = np.array(self.weights, dtype=float).reshape(-1)
        if weights.size == 0:
            raise ValueError("belief must have at least one mode")
        if not np.all(np.isfinite(weights)):
            raise ValueError("belief weights must be finite")
        if np.any(weights < -NEGATIVE_CLAMP_ATOL):
            raise ValueError(f"belief weights must be >= 0, got min {weights.min()}")
        total = float(weights.sum())
        if abs(total - 1.0) > SIMPLEX_ATOL:
            raise ValueError(f"belief weights must sum to 1, got {total!r}")
        weights = np.clip(weights, 0.0, None)
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)

    @property
    def size(self) -> int:
        return int(self.weights.shape[0])

    def to_list(self) -> List[float]:
        """转换为列表，便于 JSON 序列化。"""
        return [float(v) for v in self.weights]

    @classmethod
    def uniform(cls, n_modes: int) -> "Belief":
        return cls(np.full(n_modes, 1.0 / n_modes))

    @classmethod
    def vertex(cls, n_modes: int, mode: int) -> "Belief":
        weights = np.zeros(n_modes)
        weights[mode] = 1.0
        return cls(weights)


def project_to_simplex(weights: np.ndarray) -> np.ndarray:
    """
    把浮点误差造成的微小负值钳到 0 再归一化，最后一维是模态维。
    只用于修正舍入误差，不是一般意义的投影。
    """
    clipped = np.clip(weights, 0.0, None)
    totals = clipped.sum(axis=-1, keepdims=True)
    if np.any(totals <= 0.0):
        raise ValueError("cannot normalize a belief with zero total mass")
    return clipped / totals


def belief_update(b: Belief, x: int, chain) -> Belief:
    """b' = P(x)^T b。"""
    matrix = chain.matrix_at(x)
    if matrix.shape[0] != b.size:
        raise ValueError(f"belief has {b.size} modes, chain has {matrix.shape[0]}")
    return Belief(project_to_simplex(matrix.T @ b.weights))


def beta(info, b_minus_L: Belief, chain) -> Belief:
    """
    β(I, b)：从窗口最旧的观测 x(-L) 开始逐个做 belief_update，直到最新的 x(0)。
    等价于 P(x(0))^T ... P(x(-L))^T b。
    """
    current = b_minus_L
    for x in reversed(info.window):
        current = belief_update(current, x, chain)
    return current


def propagate(weights: np.ndarray, xs: Iterable[int], chain) -> np.ndarray:
    """按 xs 的顺序连续推进一个信念向量，返回每一步的结果（含起点）。"""
    current = np.asarray(weights, dtype=float)
    history = [current]
    for x in xs:
        current = project_to_simplex(chain.matrix_at(int(x)).T @ current)
        history.append(current)
    return np.vstack(history)
