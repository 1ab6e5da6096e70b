from dataclasses import dataclass
from typing import List

import numpy as np

from src.core.types import Violation
from src.info.belief import Belief
from src.model.grid import ActionSet, GridSpace
from src.model.kernel import TransitionKernel
from src.settings import STOCHASTIC_ATOL


@dataclass(frozen=True)
class ChainModel:
    """每个网格点 x 上的模态转移矩阵 P(x)，形状 (X, S, S)。"""

    matrices: np.ndarray

    def __post_init__(self) -> None:
        matrices = np.array(self.matrices, dtype=float)
        if matrices.ndim != 3 or matrices.shape[1] != matrices.shape[2]:
            raise ValueError(f"chain.matrices must have shape (X, S, S), got {matrices.shape}")
        matrices.setflags(write=False)
        object.__setattr__(self, "matrices", matrices)

    @property
    def n_points(self) -> int:
        return int(self.matrices.shape[0])

    @property
    def n_modes(self) -> int:
        return int(self.matrices.shape[1])

    def matrix_at(self, x: int) -> np.ndarray:
        if not (0 <= int(x) < self.n_points):
            raise IndexError(f"grid index {x} outside [0, {self.n_points})")
        return self.matrices[int(x)]

    def is_constant(self) -> bool:
        return bool(np.all(self.matrices == self.matrices[0]))


@dataclass(frozen=True)
class RewardModel:
    """期望奖励 R(x, u) 与上界 M。"""

    values: np.ndarray
    bound_M: float

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.ndim != 2:
            raise ValueError(f"reward.values must have shape (X, U), got {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "bound_M", float(self.bound_M))


@dataclass(frozen=True)
class MdpModel:
    """离散化的连续-离散耦合 MDP，构造后只读，可跨线程共享。"""

    grid: GridSpace
    modes: int
    actions: ActionSet
    kernel: TransitionKernel
    chain: ChainModel
    reward: RewardModel
    gamma: float
    initial_x: np.ndarray
    initial_s: Belief

    def __post_init__(self) -> None:
        initial_x = np.array(self.initial_x, dtype=float)
        initial_x.setflags(write=False)
        object.__setattr__(self, "initial_x", initial_x)
        object.__setattr__(self, "gamma", float(self.gamma))

    @property
    def n_points(self) -> int:
        return self.grid.n_points

    @property
    def n_actions(self) -> int:
        return self.actions.size

    @property
    def bound_M(self) -> float:
        return self.reward.bound_M

    def exit_free(self) -> bool:
        return not self.kernel.has_exit()


def transition_matrix_at(chain: ChainModel, x: int) -> np.ndarray:
    """返回 P(x)；x 不是合法网格编号时抛 IndexError。"""
    return chain.matrix_at(x)


def augmented_kernel(model: MdpModel) -> np.ndarray:
    """
    增广状态 z = (x, s) 上的联合转移：形状 (X*S, U, X*S + 1)，最后一列为出界。
    z 的编号为 x * S + s。下一步 x' 与 s' 在给定 (x, s, u) 时条件独立。
    """
    n_points = model.n_points
    n_modes = model.modes
    joint = np.zeros((n_points * n_modes, model.n_actions, n_points * n_modes + 1))
    for x in range(n_points):
        chain_rows = model.chain.matrices[x]
        for s in range(n_modes):
            z = x * n_modes + s
            for u in range(model.n_actions):
                succ = np.outer(model.kernel.probs[x, s, u], chain_rows[s]).reshape(-1)
                joint[z, u, :-1] = succ
                joint[z, u, -1] = model.kernel.exit_mass[x, s, u]
    return joint


def validate_model(model: MdpModel) -> List[Violation]:
    """
    检查所有类型不变量，返回违例列表（空列表表示合法）。
    每个组件最多报一条违例，位置取偏差最大的那一处。
    """
    violations: List[Violation] = []
    violations.extend(_check_grid(model.grid))
    violations.extend(_check_actions(model.actions))
    violations.extend(_check_kernel(model))
    violations.extend(_check_chain(model))
    violations.extend(_check_reward(model))
    violations.extend(_check_scalars(model))
    return violations


def _check_grid(grid: GridSpace) -> List[Violation]:
    found: List[Violation] = []
    for axis, values in enumerate(grid.axes):
        lo, hi = grid.bounds[axis]
        if np.any(np.diff(values) <= 0):
            found.append(Violation(f"grid.axes[{axis}]", "strictly_increasing", "increasing grid points", "non-increasing"))
        if values[0] < lo or values[-1] > hi:
            found.append(Violation(f"grid.axes[{axis}]", "points_in_X", f"[{lo}, {hi}]", f"[{values[0]}, {values[-1]}]"))
    if not grid.cell_volume > 0:
        found.append(Violation("grid.cell_volume", "positive_volume", "> 0", repr(grid.cell_volume)))
    return found


def _check_actions(actions: ActionSet) -> List[Violation]:
    if actions.size == 0:
        return [Violation("actions", "nonempty", ">= 1 action", "0")]
    if len(set(actions.labels)) != actions.size:
        return [Violation("actions.labels", "unique_labels", "unique", repr(list(actions.labels)))]
    return []


def _check_kernel(model: MdpModel) -> List[Violation]:
    kernel = model.kernel
    expected_shape = (model.n_points, model.modes, model.n_actions, model.n_points)
    if kernel.probs.shape != expected_shape:
        return [Violation("kernel.probs", "shape", repr(expected_shape), repr(kernel.probs.shape))]

    found: List[Violation] = []
    min_prob = float(min(kernel.probs.min(), kernel.exit_mass.min()))
    if min_prob < 0.0 or float(kernel.exit_mass.max()) > 1.0:
        found.append(Violation("kernel", "nonnegative_probabilities", "entries in [0, 1]", f"min {min_prob!r}"))

    totals = kernel.probs.sum(axis=3) + kernel.exit_mass
    deviation = np.abs(totals - 1.0)
    worst = np.unravel_index(int(np.argmax(deviation)), deviation.shape)
    if deviation[worst] > STOCHASTIC_ATOL:
        path = f"kernel[x={worst[0]}, s={worst[1]}, u={worst[2]}]"
        found.append(Violation(path, "kernel_conservation", "sum(probs) + exit_mass = 1", repr(float(totals[worst]))))
    return found


def _check_chain(model: MdpModel) -> List[Violation]:
    matrices = model.chain.matrices
    expected_shape = (model.n_points, model.modes, model.modes)
    if matrices.shape != expected_shape:
        return [Violation("chain.matrices", "shape", repr(expected_shape), repr(matrices.shape))]

    found: List[Violation] = []
    if float(matrices.min()) < 0.0:
        worst = np.unravel_index(int(np.argmin(matrices)), matrices.shape)
        found.append(Violation(f"chain[x={worst[0]}]", "nonnegative_probabilities", ">= 0", repr(float(matrices[worst]))))

    row_sums = matrices.sum(axis=2)
    deviation = np.abs(row_sums - 1.0)
    worst = np.unravel_index(int(np.argmax(deviation)), deviation.shape)
    if deviation[worst] > STOCHASTIC_ATOL:
        path = f"chain[x={worst[0]}].row[{worst[1]}]"
        found.append(Violation(path, "row_stochastic", "row sum = 1", repr(float(row_sums[worst]))))
    return found


def _check_reward(model: MdpModel) -> List[Violation]:
    reward = model.reward
    expected_shape = (model.n_points, model.n_actions)
    if reward.values.shape != expected_shape:
        return [Violation("reward.values", "shape", repr(expected_shape), repr(reward.values.shape))]

    found: List[Violation] = []
    if not reward.bound_M > 0:
        found.append(Violation("reward.bound_M", "positive_bound", "M > 0", repr(reward.bound_M)))
    low = float(reward.values.min())
    high = float(reward.values.max())
    if low < 0.0 or high > reward.bound_M:
        bad = reward.values < 0.0 if low < 0.0 else reward.values > reward.bound_M
        worst = np.unravel_index(int(np.argmax(bad)), bad.shape)
        actual = repr(float(reward.values[worst]))
        found.append(Violation(f"reward[x={worst[0]}, u={worst[1]}]", "reward_bounds", f"0 <= R <= {reward.bound_M}", actual))
    return found


def _check_scalars(model: MdpModel) -> List[Violation]:
    found: List[Violation] = []
    if not (0.0 <= model.gamma < 1.0):
        found.append(Violation("gamma", "discount_range", "0 <= gamma < 1", repr(model.gamma)))

    initial_x = model.initial_x
    if initial_x.shape != (model.n_points,):
        found.append(Violation("initial.x", "shape", repr((model.n_points,)), repr(initial_x.shape)))
    elif float(initial_x.min()) < 0.0 or abs(float(initial_x.sum()) - 1.0) > STOCHASTIC_ATOL:
        found.append(Violation("initial.x", "normalized_distribution", "nonnegative, sum 1", repr(float(initial_x.sum()))))

    if model.initial_s.size != model.modes:
        found.append(Violation("initial.s", "shape", repr(model.modes), repr(model.initial_s.size)))
    return found
