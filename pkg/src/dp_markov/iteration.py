"""
值迭代、Q 值迭代、策略评估与贪心策略提取。

停止规则：d(J_{k+1}, J_k) <= tol * (1 - γ) / γ 时停止，
此时 d(J_{k+1}, J*) <= tol。γ = 0 时一步即收敛。
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np

from src.core.artifacts import write_csv, write_json
from src.dp_markov.mixing import MixingWeights
from src.dp_markov.operators import InfoTransition
from src.dp_markov.tables import Policy, QTable, ValueTable, argmin_lowest
from src.info.info_state import InfoSpace
from src.settings import DEFAULT_MAX_ITERS, DEFAULT_TOL, DUMP_FULL_TABLES, TIE_TOLERANCE


@dataclass
class IterationTrace:
    """残差序列 d(X_{k+1}, X_k)，k = 0, 1, ...。"""

    residuals: List[float] = field(default_factory=list)
    converged: bool = False
    label: str = ""

    @property
    def iterations(self) -> int:
        return len(self.residuals)

    @property
    def final_residual(self) -> Optional[float]:
        return self.residuals[-1] if self.residuals else None

    def to_rows(self) -> List[List[object]]:
        return [[k, value] for k, value in enumerate(self.residuals)]


def stopping_threshold(tol: float, gamma: float) -> float:
    if tol <= 0:
        raise ValueError(f"tol must be > 0, got {tol!r}")
    if gamma <= 0.0:
        return float("inf")
    return tol * (1.0 - gamma) / gamma


def iterate_to_fixed_point(
    step: Callable[[np.ndarray], np.ndarray],
    start: np.ndarray,
    gamma: float,
    tol: float,
    max_iters: int,
    label: str,
) -> Tuple[np.ndarray, IterationTrace]:
    """
    同步迭代 X_{k+1} = step(X_k)，直到残差满足停止规则或达到 max_iters。
    未收敛时返回最后一次迭代结果（压缩映射下它离不动点最近），converged=False。
    """
    logger = logging.getLogger(__name__)
    if max_iters < 1:
        raise ValueError(f"max_iters must be >= 1, got {max_iters!r}")
    threshold = stopping_threshold(tol, gamma)
    trace = IterationTrace(label=label)
    current = start
    logger.info("iteration start label=%s tol=%s threshold=%s max_iters=%s", label, tol, threshold, max_iters)
    for _ in range(max_iters):
        nxt = step(current)
        residual = float(np.max(np.abs(nxt - current))) if nxt.size else 0.0
        trace.residuals.append(residual)
        current = nxt
        if residual <= threshold:
            trace.converged = True
            break

    if trace.converged:
        logger.info(
            "iteration done label=%s iterations=%s residual=%s", label, trace.iterations, trace.final_residual
        )
    else:
        logger.warning(
            "iteration not converged label=%s iterations=%s residual=%s", label, trace.iterations, trace.final_residual
        )
    return current, trace


def value_iteration(
    model, w: MixingWeights, tol: float = DEFAULT_TOL, max_iters: int = DEFAULT_MAX_ITERS
) -> Tuple[ValueTable, IterationTrace]:
    """J_{k+1} = T J_k，J_0 ≡ 0。"""
    transition = InfoTransition.from_mixing(model, w)
    start = np.zeros(w.space.size)
    values, trace = iterate_to_fixed_point(
        lambda J: transition.q_backup(J).min(axis=1), start, model.gamma, tol, max_iters, "value_iteration"
    )
    return ValueTable(values, w.memory), trace


def q_value_iteration(
    model, w: MixingWeights, tol: float = DEFAULT_TOL, max_iters: int = DEFAULT_MAX_ITERS
) -> Tuple[QTable, IterationTrace]:
    """Q_{k+1} = F Q_k，Q_0 ≡ 0。"""
    transition = InfoTransition.from_mixing(model, w)
    start = np.zeros((w.space.size, model.n_actions))
    values, trace = iterate_to_fixed_point(
        lambda Q: transition.q_backup(Q.min(axis=1)), start, model.gamma, tol, max_iters, "q_value_iteration"
    )
    return QTable(values, w.memory), trace


def policy_evaluation(
    model, w: MixingWeights, policy: Policy, tol: float = DEFAULT_TOL, max_iters: int = DEFAULT_MAX_ITERS
) -> Tuple[ValueTable, IterationTrace]:
    """T_π 的不动点 J^π；从 0 出发迭代。"""
    policy.validate(model.n_actions)
    if policy.choice.shape != (w.space.size,):
        raise ValueError(f"policy covers {policy.choice.size} info states, space has {w.space.size}")
    transition = InfoTransition.from_mixing(model, w)
    rows = np.arange(w.space.size)
    start = np.zeros(w.space.size)
    values, trace = iterate_to_fixed_point(
        lambda J: transition.q_backup(J)[rows, policy.choice],
        start,
        model.gamma,
        tol,
        max_iters,
        f"policy_evaluation[{policy.label}]",
    )
    return ValueTable(values, w.memory), trace


def greedy_policy(
    model, w: Optional[MixingWeights], source: Union[ValueTable, QTable], tie_tol: float = TIE_TOLERANCE
) -> Policy:
    """
    QTable：直接逐行 argmin，不需要模型。
    ValueTable：先做一次单步备份得到 Q，再取 argmin。
    平局取最小动作编号。
    """
    if isinstance(source, QTable):
        return Policy(argmin_lowest(source.values, tie_tol), source.memory, label="greedy_q")
    if w is None:
        raise ValueError("greedy policy from a value table needs mixing weights")
    q = InfoTransition.from_mixing(model, w).q_backup(source.values)
    return Policy(argmin_lowest(q, tie_tol), source.memory, label="greedy_j")


def solver_result(
    table: Union[ValueTable, QTable],
    trace: IterationTrace,
    space: InfoSpace,
    policy: Optional[Policy] = None,
    include_table: bool = DUMP_FULL_TABLES,
) -> Dict[str, object]:
    payload: Dict[str, object] = {
        "iterations": trace.iterations,
        "converged": trace.converged,
        "residual_trace": list(trace.residuals),
        "table": {
            "shape": list(table.values.shape),
            "memory": table.memory,
            "n_points": space.n_points,
        },
        "policy": policy.choice.tolist() if policy is not None else None,
    }
    if include_table:
        payload["table"]["data"] = [float(v) for v in table.values.reshape(-1)]
        payload["table"]["index_legend"] = space.legend()
    return payload


def write_solver_result(path: str, payload: Dict[str, object]) -> str:
    return write_json(path, payload)


def write_residual_csv(path: str, trace: IterationTrace) -> str:
    return write_csv(path, ["k", "residual"], trace.to_rows())
