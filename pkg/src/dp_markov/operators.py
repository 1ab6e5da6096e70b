"""
马尔可夫假设下信息状态上的 Bellman 型算子 T、T_π、F。

所有算子都是同步（Jacobi）更新：输入表只读，输出新表。
出界结果对期望没有贡献，对应指示函数 𝕀_X。
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from src.dp_markov.mixing import MixingWeights
from src.dp_markov.tables import Policy, QTable, ValueTable
from src.info.belief import Belief
from src.info.info_state import InfoSpace, InfoState


class InfoTransition:
    """
    预先混合好的信息状态转移：
        rows[i, u, x'] = Σ_s [w(I_i)]_s * p(x' | x(0)_i, s, u)
        exit[i, u]     = Σ_s [w(I_i)]_s * exit_mass(x(0)_i, s, u)
    迭代过程中复用，避免每次扫描都重新混合。
    """

    def __init__(self, model, space: InfoSpace, weights: np.ndarray) -> None:
        space.require(model.n_actions * model.n_points, "mixed transition rows")
        self.model = model
        self.space = space
        self.gamma = model.gamma
        self.newest = space.newest()
        self.successors = space.successors()
        self.rewards = model.reward.values[self.newest]

        rows = np.zeros((space.size, model.n_actions, model.n_points))
        exit_mass = np.zeros((space.size, model.n_actions))
        # 逐模态累加，内存只占一份 (I, U, X)
        for s in range(model.modes):
            share = weights[:, s]
            rows += share[:, None, None] * model.kernel.probs[self.newest, s]
            exit_mass += share[:, None] * model.kernel.exit_mass[self.newest, s]
        self.rows = rows
        self.exit = exit_mass

    @classmethod
    def from_mixing(cls, model, w: MixingWeights) -> "InfoTransition":
        if w.n_modes != model.modes:
            raise ValueError(f"mixing weights have {w.n_modes} modes, model has {model.modes}")
        return cls(model, w.space, w.weights)

    @classmethod
    def from_belief(cls, model, space: InfoSpace, belief: Belief) -> "InfoTransition":
        """所有 I 共用一个信念的特例。"""
        if belief.size != model.modes:
            raise ValueError(f"belief has {belief.size} modes, model has {model.modes}")
        weights = np.broadcast_to(belief.weights, (space.size, model.modes))
        return cls(model, space, weights)

    def expected(self, values: np.ndarray) -> np.ndarray:
        """E[𝕀_X J(I')] 对每个 (I, u)，形状 (I, U)。"""
        if values.shape != (self.space.size,):
            raise ValueError(f"table has shape {values.shape}, info space needs ({self.space.size},)")
        return np.einsum("iuy,iy->iu", self.rows, values[self.successors])

    def q_backup(self, values: np.ndarray) -> np.ndarray:
        """R(x(0), u) + γ E[𝕀_X J(I')]。"""
        return self.rewards + self.gamma * self.expected(values)


@dataclass(frozen=True)
class SuccessorDistribution:
    """某个 (I, u) 的后继分布：每个网格点 x(1) 对应一个后继信息状态，另加出界概率。"""

    successors: Tuple[InfoState, ...]
    probs: np.ndarray
    exit: float

    @property
    def total(self) -> float:
        return float(self.probs.sum() + self.exit)

    def as_dict(self) -> dict:
        return {state.window: float(p) for state, p in zip(self.successors, self.probs) if p > 0.0}


def info_successor_distribution(model, w: MixingWeights, I: InfoState, u: int) -> SuccessorDistribution:
    space = w.space
    index = space.index_of(I)
    if not (0 <= int(u) < model.n_actions):
        raise ValueError(f"action {u} outside [0, {model.n_actions})")
    weights = w.weights[index]
    x0 = I.newest
    probs = np.einsum("s,sy->y", weights, model.kernel.probs[x0, :, u, :])
    exit_mass = float(np.dot(weights, model.kernel.exit_mass[x0, :, u]))
    successors = tuple(
        InfoState((x1,) + I.window[:-1], I.n_points) for x1 in range(model.n_points)
    )
    return SuccessorDistribution(successors=successors, probs=probs, exit=exit_mass)


def _check_memory(table, w: MixingWeights) -> None:
    if table.memory != w.memory:
        raise ValueError(f"table memory L={table.memory} does not match mixing weights L={w.memory}")


def bellman_T(model, w: MixingWeights, J: ValueTable) -> ValueTable:
    """(TJ)(I) = min_u { R(x(0), u) + γ Σ p(I'|I,u) J(I') }。"""
    _check_memory(J, w)
    q = InfoTransition.from_mixing(model, w).q_backup(J.values)
    return ValueTable(q.min(axis=1), J.memory)


def bellman_T_pi(model, w: MixingWeights, policy: Policy, J: ValueTable) -> ValueTable:
    """u 固定为 π(I)，不取最小。"""
    _check_memory(J, w)
    policy.validate(model.n_actions)
    q = InfoTransition.from_mixing(model, w).q_backup(J.values)
    return ValueTable(q[np.arange(q.shape[0]), policy.choice], J.memory)


def bellman_F(model, w: MixingWeights, Q: QTable) -> QTable:
    """(FQ)(I, u) = R(x(0), u) + γ Σ p(I'|I,u) min_u' Q(I', u')。"""
    _check_memory(Q, w)
    q = InfoTransition.from_mixing(model, w).q_backup(Q.values.min(axis=1))
    return QTable(q, Q.memory)


def policy_q_function(model, w: MixingWeights, policy: Policy, J_pi: ValueTable) -> QTable:
    """Q^π(I, u) = R(x(0), u) + γ E[𝕀_X J^π(I')]；满足 J^π(I) = Q^π(I, π(I))。"""
    _check_memory(J_pi, w)
    policy.validate(model.n_actions)
    q = InfoTransition.from_mixing(model, w).q_backup(J_pi.values)
    return QTable(q, J_pi.memory)


def apply_policy_sequence(model, w: MixingWeights, policies: Sequence[Policy], J0: ValueTable) -> List[ValueTable]:
    """
    依次计算 T_{π_k} J0, T_{π_{k-1}} T_{π_k} J0, ..., T_{π_0} ... T_{π_k} J0。
    返回列表的最后一个元素就是 T_{π_0}∘...∘T_{π_k} J0。
    """
    _check_memory(J0, w)
    transition = InfoTransition.from_mixing(model, w)
    rows = np.arange(w.space.size)
    current = J0.values
    history = []
    for policy in reversed(list(policies)):
        policy.validate(model.n_actions)
        current = transition.q_backup(current)[rows, policy.choice]
        history.append(ValueTable(current, J0.memory))
    return history
