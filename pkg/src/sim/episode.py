"""
episode 仿真：按 x(k+1) ~ p(·|x(k), s(k), u(k))、s(k+1) ~ P(x(k))[s(k), ·] 交替采样，
x 离开 X 时停止（τ 为最后一个仍在 X 内的步）。

每个 episode 预先从自己的随机流取出全部均匀数：
    [0] x(0) 抽样，[1] s(0) 抽样，之后每步 4 个：[后继 x, 后继 s, 动作, 奖励噪声]
批量仿真按 episode 锁步推进，单个 episode 就是大小为 1 的批次，二者结果逐位一致。
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Union

import numpy as np

from src.core.rng import GENERATOR_NAME, STREAM_RULE, episode_stream
from src.info.belief import Belief
from src.info.info_state import InfoSpace, InfoState
from src.settings import TRUNCATION_EPS

# I0 取该值时，每个 episode 从模型的初始分布抽 x(0)，窗口用 x(0) 重复填满
DRAW_INITIAL = "initial"

UNIFORMS_PER_STEP = 4
_SUCCESSOR, _MODE, _ACTION, _NOISE = range(UNIFORMS_PER_STEP)

# int64 编号能容纳的最大信息空间
_MAX_INDEX_BITS = 62


class UniformRandomPolicy:
    """行为策略缺省值：每步均匀随机选动作。"""

    def __init__(self, n_actions: int, memory: int = 0) -> None:
        if n_actions < 1:
            raise ValueError("n_actions must be >= 1")
        self.n_actions = int(n_actions)
        self.memory = int(memory)
        self.label = "uniform_random"

    def act(self, info_index, uniform):
        actions = np.floor(np.asarray(uniform) * self.n_actions).astype(np.int64)
        return np.minimum(actions, self.n_actions - 1)


@dataclass(eq=False)
class EpisodeTrace:
    """
    一条轨迹：第 k 步记录 (x(k), s(k), u(k), r(k))，k = 0..τ（截断时到 max_steps-1）。
    τ = -1 表示 x(0) 不在 X 内，没有任何一步。
    """

    x: np.ndarray
    s: np.ndarray
    u: np.ndarray
    r: np.ndarray
    tau: int
    truncated: bool
    seed: int
    episode_index: int
    policy_label: str
    generator: str = GENERATOR_NAME
    meta: Dict[str, object] = field(default_factory=dict)

    def __len__(self) -> int:
        return int(self.x.shape[0])

    @property
    def steps(self) -> List[Dict[str, object]]:
        return [
            {"k": k, "x": int(self.x[k]), "s": int(self.s[k]), "u": int(self.u[k]), "r": float(self.r[k])}
            for k in range(len(self))
        ]


@dataclass(eq=False)
class EpisodeBatch:
    """锁步仿真的列式结果，未用到的位置 x/s/u 填 -1，r 填 0。"""

    x: np.ndarray
    s: np.ndarray
    u: np.ndarray
    r: np.ndarray
    length: np.ndarray
    tau: np.ndarray
    truncated: np.ndarray
    seed: int
    first_episode: int
    policy_label: str

    @property
    def n_episodes(self) -> int:
        return int(self.length.shape[0])

    def episode(self, position: int) -> EpisodeTrace:
        n = int(self.length[position])
        return EpisodeTrace(
            x=self.x[position, :n].copy(),
            s=self.s[position, :n].copy(),
            u=self.u[position, :n].copy(),
            r=self.r[position, :n].copy(),
            tau=int(self.tau[position]),
            truncated=bool(self.truncated[position]),
            seed=self.seed,
            episode_index=self.first_episode + position,
            policy_label=self.policy_label,
            meta={"stream_rule": STREAM_RULE},
        )

    def episodes(self) -> List[EpisodeTrace]:
        return [self.episode(i) for i in range(self.n_episodes)]


def default_horizon(gamma: float, bound_M: float, eps: float = TRUNCATION_EPS) -> int:
    """使 γ^h * M / (1 - γ) < eps 的最小 h（至少为 1）。"""
    if not (0.0 <= gamma < 1.0):
        raise ValueError(f"gamma must lie in [0, 1), got {gamma!r}")
    tail = bound_M / (1.0 - gamma)
    if tail < eps:
        return 1
    if gamma == 0.0:
        return 1
    horizon = math.ceil(math.log(eps / tail) / math.log(gamma))
    while gamma ** horizon * tail >= eps:
        horizon += 1
    while horizon > 1 and gamma ** (horizon - 1) * tail < eps:
        horizon -= 1
    return max(1, horizon)


def _categorical(cumulative: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    """逐行按累积分布取样：返回第一个 cumulative > u 的位置，都不满足时返回列数。"""
    return (cumulative <= uniforms[:, None]).sum(axis=1)


def _check_index_range(n_points: int, memory: int) -> InfoSpace:
    if (memory + 1) * math.log2(max(n_points, 2)) > _MAX_INDEX_BITS:
        raise ValueError(f"info index for {n_points} points and memory {memory} does not fit in int64")
    return InfoSpace(n_points, memory)


def simulate_batch(
    model,
    policy,
    I0: Union[InfoState, str, None],
    b0_or_s0: Union[Belief, int],
    max_steps: int,
    seed: int,
    n_episodes: int = 1,
    first_episode: int = 0,
    reward_noise: float = 0.0,
) -> EpisodeBatch:
    """
    policy 需提供 act(info_index, uniform) 和 memory。
    I0：固定起始窗口；DRAW_INITIAL 表示按模型初始分布抽 x(0)；None 表示 x(0) 不在 X 内（τ = -1）。
    b0_or_s0：Belief 时按它抽 s(0)，整数时直接作为 s(0)。
    reward_noise > 0 时奖励加 [-noise, noise] 的均匀噪声再裁剪到 [0, M]。
    """
    if max_steps < 1:
        raise ValueError(f"max_steps must be >= 1, got {max_steps!r}")
    if n_episodes < 1:
        raise ValueError(f"n_episodes must be >= 1, got {n_episodes!r}")
    memory = int(getattr(policy, "memory", 0))
    space = _check_index_range(model.n_points, memory)
    label = getattr(policy, "label", type(policy).__name__)

    uniforms = np.empty((n_episodes, 2 + UNIFORMS_PER_STEP * max_steps))
    for position in range(n_episodes):
        uniforms[position] = episode_stream(seed, first_episode + position).random(uniforms.shape[1])
    start_uniforms = uniforms[:, :2]
    step_uniforms = uniforms[:, 2:].reshape(n_episodes, max_steps, UNIFORMS_PER_STEP)

    x = np.full((n_episodes, max_steps), -1, dtype=np.int64)
    s = np.full((n_episodes, max_steps), -1, dtype=np.int64)
    u = np.full((n_episodes, max_steps), -1, dtype=np.int64)
    r = np.zeros((n_episodes, max_steps))
    length = np.zeros(n_episodes, dtype=np.int64)
    tau = np.full(n_episodes, -1, dtype=np.int64)
    truncated = np.zeros(n_episodes, dtype=bool)

    if I0 is None:
        return EpisodeBatch(x, s, u, r, length, tau, truncated, seed, first_episode, label)

    # 初始 x(0) 与信息状态编号
    if isinstance(I0, InfoState):
        if I0.memory_L != memory:
            raise ValueError(f"initial info state has L={I0.memory_L}, policy expects L={memory}")
        current_x = np.full(n_episodes, I0.newest, dtype=np.int64)
        info_index = np.full(n_episodes, space.index_of(I0), dtype=np.int64)
    elif I0 == DRAW_INITIAL:
        cumulative_x = np.cumsum(model.initial_x)
        current_x = np.minimum(_categorical(cumulative_x[None, :].repeat(n_episodes, 0), start_uniforms[:, 0]),
                               model.n_points - 1)
        repeat = sum(model.n_points ** power for power in range(memory + 1))
        info_index = current_x * repeat
    else:
        raise ValueError(f"I0 must be an InfoState, {DRAW_INITIAL!r} or None, got {I0!r}")

    # 初始模态
    if isinstance(b0_or_s0, Belief):
        if b0_or_s0.size != model.modes:
            raise ValueError(f"initial belief has {b0_or_s0.size} modes, model has {model.modes}")
        cumulative_s = np.cumsum(b0_or_s0.weights)
        current_s = np.minimum(
            _categorical(np.broadcast_to(cumulative_s, (n_episodes, model.modes)), start_uniforms[:, 1]),
            model.modes - 1,
        )
    else:
        if not (0 <= int(b0_or_s0) < model.modes):
            raise ValueError(f"initial mode {b0_or_s0} outside [0, {model.modes})")
        current_s = np.full(n_episodes, int(b0_or_s0), dtype=np.int64)

    probs = model.kernel.probs
    exit_mass = model.kernel.exit_mass
    chain_cumulative = np.cumsum(model.chain.matrices, axis=2)
    rewards = model.reward.values
    bound_M = model.reward.bound_M
    top = model.n_points ** memory

    alive = np.ones(n_episodes, dtype=bool)
    for k in range(max_steps):
        active = np.flatnonzero(alive)
        if active.size == 0:
            break
        ax = current_x[active]
        as_ = current_s[active]
        draws = step_uniforms[active, k]

        actions = np.asarray(policy.act(info_index[active], draws[:, _ACTION]), dtype=np.int64)
        reward = rewards[ax, actions]
        if reward_noise > 0.0:
            reward = np.clip(reward + reward_noise * (2.0 * draws[:, _NOISE] - 1.0), 0.0, bound_M)

        x[active, k] = ax
        s[active, k] = as_
        u[active, k] = actions
        r[active, k] = reward
        length[active] = k + 1
        tau[active] = k

        rows = probs[ax, as_, actions]
        picks = _categorical(np.cumsum(rows, axis=1), draws[:, _SUCCESSOR])
        # 无出界质量的行不允许因舍入误差判为出界
        no_exit = exit_mass[ax, as_, actions] <= 0.0
        picks = np.where(no_exit, np.minimum(picks, model.n_points - 1), picks)
        exited = picks >= model.n_points

        next_s = np.minimum(_categorical(chain_cumulative[ax, as_], draws[:, _MODE]), model.modes - 1)

        stay = active[~exited]
        alive[active[exited]] = False
        new_x = picks[~exited]
        current_x[stay] = new_x
        current_s[stay] = next_s[~exited]
        info_index[stay] = new_x * top + info_index[stay] // model.n_points

    truncated[alive] = True
    logging.getLogger(__name__).debug(
        "batch simulated seed=%s first=%s episodes=%s truncated=%s",
        seed,
        first_episode,
        n_episodes,
        int(truncated.sum()),
    )
    return EpisodeBatch(x, s, u, r, length, tau, truncated, seed, first_episode, label)


def simulate_episode(
    model,
    policy,
    I0: Union[InfoState, str, None],
    b0_or_s0: Union[Belief, int],
    max_steps: int,
    seed: int,
    episode_index: int = 0,
    reward_noise: float = 0.0,
) -> EpisodeTrace:
    batch = simulate_batch(model, policy, I0, b0_or_s0, max_steps, seed, 1, episode_index, reward_noise)
    return batch.episode(0)


def discounted_return(trace: EpisodeTrace, gamma: float, horizon: Optional[int] = None) -> float:
    """Σ_{i=0}^{min(τ, horizon)} γ^i r(i)，用 math.fsum 求和；τ = -1 时为 0。"""
    steps = len(trace)
    if horizon is not None:
        steps = min(steps, int(horizon) + 1)
    if steps <= 0:
        return 0.0
    discounts = gamma ** np.arange(steps)
    return math.fsum((discounts * trace.r[:steps]).tolist())
