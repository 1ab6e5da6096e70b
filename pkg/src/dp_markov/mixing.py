"""
模态边际 w: I -> Δ_|S|。

信息过程的转移密度 p_I(I'|I,u) = Σ_s [w(I)]_s p_x(x(1)|x(0), s, u)。
任何固定的 w 都让算子成为真正的压缩映射。内置构造：
    uniform     均匀分布
    stationary  常数链 P 的平稳分布
    prior       β(I, b0)，把先验 b0 沿窗口推进
    fixed       所有 I 共用同一个信念（时变算子 F^(k) 使用）
"""
import logging
from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np
from scipy import linalg

from src.info.belief import Belief, project_to_simplex
from src.info.info_state import InfoSpace, window_matrices
from src.settings import SIMPLEX_ATOL


@dataclass(frozen=True)
class MixingWeights:
    weights: np.ndarray
    space: InfoSpace
    label: str = "custom"

    def __post_init__(self) -> None:
        weights = np.array(self.weights, dtype=float)
        if weights.ndim != 2 or weights.shape[0] != self.space.size:
            raise ValueError(f"mixing weights must have shape ({self.space.size}, S), got {weights.shape}")
        if np.any(weights < 0) or np.any(np.abs(weights.sum(axis=1) - 1.0) > SIMPLEX_ATOL):
            raise ValueError("every mixing weight row must lie in the simplex")
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)

    @property
    def memory(self) -> int:
        return self.space.memory

    @property
    def n_modes(self) -> int:
        return int(self.weights.shape[1])


def uniform_weights(model, space: InfoSpace, belief: Optional[Belief] = None) -> MixingWeights:
    space.require(model.modes, "mixing weights")
    weights = np.full((space.size, model.modes), 1.0 / model.modes)
    return MixingWeights(weights, space, label="uniform")


def fixed_weights(model, space: InfoSpace, belief: Optional[Belief] = None) -> MixingWeights:
    if belief is None:
        raise ValueError("fixed mixing weights need a belief")
    if belief.size != model.modes:
        raise ValueError(f"belief has {belief.size} modes, model has {model.modes}")
    space.require(model.modes, "mixing weights")
    weights = np.broadcast_to(belief.weights, (space.size, model.modes)).copy()
    return MixingWeights(weights, space, label="fixed")


def stationary_distribution(matrix: np.ndarray) -> np.ndarray:
    """行随机矩阵 P 的平稳分布 μ（μ^T P = μ^T），取特征值最接近 1 的左特征向量。"""
    eigenvalues, left = linalg.eig(matrix, left=True, right=False)
    position = int(np.argmin(np.abs(eigenvalues - 1.0)))
    vector = np.real(left[:, position])
    vector = vector / vector.sum()
    return project_to_simplex(vector)


def stationary_weights(model, space: InfoSpace, belief: Optional[Belief] = None) -> MixingWeights:
    if not model.chain.is_constant():
        raise ValueError("stationary mixing weights need a constant chain P(x) = P")
    mu = stationary_distribution(model.chain.matrices[0])
    logging.getLogger(__name__).info("stationary mixing mu=%s", mu.tolist())
    return MixingWeights(np.broadcast_to(mu, (space.size, model.modes)).copy(), space, label="stationary")


def prior_weights(model, space: InfoSpace, belief: Optional[Belief] = None) -> MixingWeights:
    """w(I) = β(I, b0)，b0 缺省为模型的初始模态分布。"""
    prior = belief if belief is not None else model.initial_s
    matrices = window_matrices(model.chain.matrices, space)
    weights = project_to_simplex(np.einsum("iab,b->ia", matrices, prior.weights))
    return MixingWeights(weights, space, label="prior")


# 模态边际构造白名单
MIXING_BUILDERS: Dict[str, Callable[..., MixingWeights]] = {
    "uniform": uniform_weights,
    "stationary": stationary_weights,
    "prior": prior_weights,
    "fixed": fixed_weights,
}


def build_mixing(model, space: InfoSpace, family: str, belief: Optional[Belief] = None) -> MixingWeights:
    if family not in MIXING_BUILDERS:
        raise ValueError(f"mixing family must be one of {sorted(MIXING_BUILDERS)}, got {family!r}")
    return MIXING_BUILDERS[family](model, space, belief)
