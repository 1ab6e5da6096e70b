"""
增广状态 Î = (x, b) 上的 Q 值迭代：Q̂_{k+1} = F̂ Q̂_k，Q̂_0 ≡ 0。

    (F̂Q)(x, b, u) = R(x, u) + γ Σ_x' [Σ_s b_s p(x'|x, s, u)] min_u' Q(x', b', u')
    b' = P(x)^T b

b' 一般不在格点上，用格点重心插值读取。插值权重是随机平均，F̂ 仍是 γ 压缩。
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.artifacts import write_json
from src.dp_belief.belief_grid import BeliefGrid
from src.dp_markov.iteration import IterationTrace, iterate_to_fixed_point
from src.info.belief import Belief, project_to_simplex
from src.settings import DEFAULT_BELIEF_RESOLUTION, DEFAULT_MAX_ITERS, DEFAULT_TOL, FALLBACK_BELIEF_RESOLUTION


def default_resolution(n_modes: int) -> int:
    return DEFAULT_BELIEF_RESOLUTION.get(int(n_modes), FALLBACK_BELIEF_RESOLUTION)


@dataclass(frozen=True, eq=False)
class AugQTable:
    """Q̂(x, b, u)，形状 (网格点数, 格点信念数, 动作数)。"""

    values: np.ndarray
    bgrid: BeliefGrid

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.ndim != 3 or values.shape[1] != self.bgrid.size:
            raise ValueError(f"augmented Q table must have shape (X, {self.bgrid.size}, U), got {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def resolution(self) -> int:
        return self.bgrid.resolution

    @classmethod
    def zeros(cls, n_points: int, bgrid: BeliefGrid, n_actions: int) -> "AugQTable":
        return cls(np.zeros((n_points, bgrid.size, n_actions)), bgrid)

    def min_over_actions(self) -> np.ndarray:
        return self.values.min(axis=2)

    def evaluate(self, xs: np.ndarray, beliefs: np.ndarray) -> np.ndarray:
        """
        批量读取 Q̂(x, b, ·)：xs 形状 (n,)，beliefs 形状 (n, S)，返回 (n, U)。
        """
        indices, weights = self.bgrid.interpolate_many(beliefs)
        picked = self.values[np.asarray(xs)[:, None], indices]
        return np.einsum("nv,nvu->nu", weights, picked)

    def value_at(self, x: int, b: Belief, u: int) -> float:
        return float(self.evaluate(np.array([int(x)]), b.weights[None, :])[0, int(u)])

    def within_bounds(self, bound_M: float, gamma: float, atol: float = 1e-12) -> bool:
        upper = bound_M / (1.0 - gamma)
        return bool(np.all(self.values >= -atol) and np.all(self.values <= upper + atol))


class AugTransition:
    """
    预计算 F̂ 用到的两部分：
        mixture[x, j, u, x'] = Σ_s b_j[s] p(x'|x, s, u)
        (succ_index, succ_weight)[x, j] = P(x)^T b_j 的格点插值
    """

    def __init__(self, model, bgrid: BeliefGrid) -> None:
        if bgrid.n_modes != model.modes:
            raise ValueError(f"belief grid has {bgrid.n_modes} modes, model has {model.modes}")
        self.model = model
        self.bgrid = bgrid
        self.gamma = model.gamma
        points = bgrid.points
        self.mixture = np.einsum("js,xsuy->xjuy", points, model.kernel.probs)
        successor_beliefs = project_to_simplex(np.einsum("xts,jt->xjs", model.chain.matrices, points))
        self.succ_index, self.succ_weight = bgrid.interpolate_many(successor_beliefs)
        self.rewards = model.reward.values[:, None, :]

    def backup(self, values: np.ndarray) -> np.ndarray:
        V = values.min(axis=2)  # (x', j')
        # 后继信念只依赖当前 (x, j)，与 x' 无关
        succ_values = np.einsum("xjv,yxjv->xjy", self.succ_weight, V[:, self.succ_index])
        return self.rewards + self.gamma * np.einsum("xjuy,xjy->xju", self.mixture, succ_values)


def f_hat_backup(model, bgrid: BeliefGrid, Qhat: AugQTable) -> AugQTable:
    if Qhat.bgrid.resolution != bgrid.resolution or Qhat.bgrid.n_modes != bgrid.n_modes:
        raise ValueError("augmented Q table was built on a different belief grid")
    return AugQTable(AugTransition(model, bgrid).backup(Qhat.values), bgrid)


def belief_q_iteration(
    model, bgrid: BeliefGrid, tol: float = DEFAULT_TOL, max_iters: int = DEFAULT_MAX_ITERS
) -> Tuple[AugQTable, IterationTrace]:
    transition = AugTransition(model, bgrid)
    start = np.zeros((model.n_points, bgrid.size, model.n_actions))
    logging.getLogger(__name__).info(
        "belief iteration start points=%s beliefs=%s actions=%s", model.n_points, bgrid.size, model.n_actions
    )
    values, trace = iterate_to_fixed_point(
        transition.backup, start, model.gamma, tol, max_iters, f"belief_q_iteration[m={bgrid.resolution}]"
    )
    return AugQTable(values, bgrid), trace


def q_lipschitz_in_belief(table: AugQTable) -> float:
    """
    Q̂ 关于 b 的经验 Lipschitz 常数（∞ 范数）：相邻格点（一个单位计数在两个分量间移动）
    之间的最大差值除以 1/m。
    """
    bgrid = table.bgrid
    if bgrid.n_modes == 1:
        return 0.0
    best = 0.0
    counts = np.asarray(bgrid.counts)
    for give in range(bgrid.n_modes):
        for take in range(bgrid.n_modes):
            if give == take:
                continue
            movable = counts[:, give] > 0
            moved = counts[movable].copy()
            moved[:, give] -= 1
            moved[:, take] += 1
            source = np.flatnonzero(movable)
            target = bgrid.lookup_counts(moved)
            diff = np.abs(table.values[:, source, :] - table.values[:, target, :])
            if diff.size:
                best = max(best, float(diff.max()))
    return best * bgrid.resolution


@dataclass(frozen=True)
class ResolutionStep:
    coarse: int
    fine: int
    change: float
    estimate: float

    def to_dict(self) -> Dict[str, object]:
        return {"coarse": self.coarse, "fine": self.fine, "change": self.change, "estimate": self.estimate}


def resolution_study(
    model, resolutions: Sequence[int], tol: float = DEFAULT_TOL, max_iters: int = DEFAULT_MAX_ITERS
) -> List[ResolutionStep]:
    """
    依次在各分辨率求 Q̂*，比较相邻两级：把细网格的解插值到粗网格格点上取最大差。
    estimate = γ / (1 - γ) * L_Q / m_coarse，其中 L_Q 为细网格解的经验 Lipschitz 常数。
    """
    ordered = sorted({int(m) for m in resolutions})
    if len(ordered) < 2:
        raise ValueError("resolution study needs at least two distinct resolutions")
    tables: List[AugQTable] = []
    for m in ordered:
        table, _ = belief_q_iteration(model, BeliefGrid(model.modes, m), tol, max_iters)
        tables.append(table)

    steps: List[ResolutionStep] = []
    for coarse, fine in zip(tables[:-1], tables[1:]):
        points = coarse.bgrid.points
        n_points = model.n_points
        xs = np.repeat(np.arange(n_points), points.shape[0])
        beliefs = np.tile(points, (n_points, 1))
        fine_on_coarse = fine.evaluate(xs, beliefs).reshape(coarse.values.shape)
        change = float(np.max(np.abs(fine_on_coarse - coarse.values)))
        estimate = model.gamma / (1.0 - model.gamma) * q_lipschitz_in_belief(fine) / coarse.resolution
        steps.append(ResolutionStep(coarse.resolution, fine.resolution, change, estimate))
        logging.getLogger(__name__).info(
            "resolution step coarse=%s fine=%s change=%s estimate=%s",
            coarse.resolution,
            fine.resolution,
            change,
            estimate,
        )
    return steps


def aug_table_dump(table: AugQTable, trace: Optional[IterationTrace] = None) -> Dict[str, object]:
    """JSON 头（形状、m、|S|）加扁平 float64 数组。"""
    payload: Dict[str, object] = {
        "shape": list(table.values.shape),
        "resolution": table.resolution,
        "n_modes": table.bgrid.n_modes,
        "belief_points": table.bgrid.points.tolist(),
        "data": [float(v) for v in table.values.reshape(-1)],
    }
    if trace is not None:
        payload["iterations"] = trace.iterations
        payload["converged"] = trace.converged
        payload["residual_trace"] = list(trace.residuals)
    return payload


def write_aug_table(path: str, table: AugQTable, trace: Optional[IterationTrace] = None) -> str:
    return write_json(path, aug_table_dump(table, trace))
