"""
随信念轨迹变化的算子序列 F^(k)：

    (F^(k) Q)(I, u) = R(x(0), u) + γ Σ_x' [Σ_s b(k)_s p(x'|x(0), s, u)] min_u' Q(I', u')
    Q_{k+1} = F^(k) Q_k，Q_0 ≡ 0

一般不收敛；信念轨迹恒定时退化为普通的 Q 值迭代。
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np

from src.dp_markov.operators import InfoTransition
from src.dp_markov.tables import QTable
from src.info.belief import Belief
from src.info.info_state import InfoSpace


@dataclass(frozen=True, eq=False)
class BeliefTrajectory:
    """一次 episode 实现对应的信念序列 b(0), b(1), ...，source 记录 episode 与行为策略。"""

    beliefs: Sequence[Belief]
    source: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        beliefs = tuple(self.beliefs)
        if not beliefs:
            raise ValueError("belief trajectory must hold at least one belief")
        sizes = {b.size for b in beliefs}
        if len(sizes) != 1:
            raise ValueError(f"belief trajectory mixes mode counts {sorted(sizes)}")
        object.__setattr__(self, "beliefs", beliefs)

    def __len__(self) -> int:
        return len(self.beliefs)

    @property
    def n_modes(self) -> int:
        return self.beliefs[0].size

    def as_array(self) -> np.ndarray:
        return np.vstack([b.weights for b in self.beliefs])

    @classmethod
    def constant(cls, belief: Belief, length: int) -> "BeliefTrajectory":
        return cls([belief] * int(length), {"kind": "constant"})


def f_k_backup(model, b_k: Belief, Q: QTable) -> QTable:
    """与 bellman_F 相同，只是所有 I 的模态边际都换成固定的 b(k)。"""
    space = InfoSpace(model.n_points, Q.memory)
    transition = InfoTransition.from_belief(model, space, b_k)
    return QTable(transition.q_backup(Q.values.min(axis=1)), Q.memory)


def nonmarkov_iteration(model, traj: BeliefTrajectory, K: int, memory: int = 0) -> List[QTable]:
    """
    返回 [Q_0, Q_1, ..., Q_K]，Q_{k+1} = F^(k) Q_k。
    需要 traj 至少有 K 个信念 b(0)..b(K-1)。
    """
    if K < 0:
        raise ValueError(f"K must be >= 0, got {K!r}")
    if len(traj) < K:
        raise ValueError(f"belief trajectory has {len(traj)} beliefs, iteration count K={K} needs at least {K}")
    if traj.n_modes != model.modes:
        raise ValueError(f"belief trajectory has {traj.n_modes} modes, model has {model.modes}")

    space = InfoSpace(model.n_points, memory)
    space.require(model.n_actions * max(K + 1, 1), "non-Markov Q sequence")
    current = np.zeros((space.size, model.n_actions))
    sequence = [QTable(current, memory)]
    for k in range(K):
        transition = InfoTransition.from_belief(model, space, traj.beliefs[k])
        current = transition.q_backup(current.min(axis=1))
        sequence.append(QTable(current, memory))
    logging.getLogger(__name__).info(
        "non-markov iteration done K=%s memory=%s last_change=%s",
        K,
        memory,
        float(np.max(np.abs(sequence[-1].values - sequence[-2].values))) if K >= 1 else 0.0,
    )
    return sequence
