"""有限记忆信息状态 I(k) = (x(k), x(k-1), ..., x(k-L)) 与信息空间 X^{L+1} 的稠密编号。

编号规则：窗口看作以网格点数为基数的数，最新观测 x(k) 是最高位。
    index(I) = x(k) * N^L + x(k-1) * N^(L-1) + ... + x(k-L)
于是 push_observation 在编号上就是 x_new * N^L + index // N。
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from src.settings import MAX_TABLE_ELEMENTS


class TableTooLargeError(MemoryError):
    """稠密表所需元素数超过上限，在分配前抛出。"""

    def __init__(self, what: str, required: int, limit: int) -> None:
        self.what = what
        self.required = int(required)
        self.limit = int(limit)
        super().__init__(f"{what} needs {self.required} elements, limit is {self.limit}")


@dataclass(frozen=True)
class InfoState:
    """窗口按“最新在前”存放网格编号。"""

    window: Tuple[int, ...]
    n_points: int

    def __post_init__(self) -> None:
        window = tuple(int(x) for x in self.window)
        if not window:
            raise ValueError("info window must hold at least one observation")
        for position, x in enumerate(window):
            if not (0 <= x < self.n_points):
                raise ValueError(f"info window[{position}]={x} is not a grid index in [0, {self.n_points})")
        object.__setattr__(self, "window", window)

    @property
    def memory_L(self) -> int:
        return len(self.window) - 1

    @property
    def newest(self) -> int:
        return self.window[0]

    def to_list(self) -> List[int]:
        """JSON 形式：网格编号数组，最新在前。"""
        return list(self.window)

    @classmethod
    def repeated(cls, x0: int, memory: int, n_points: int) -> "InfoState":
        """用 x(0) 重复填满窗口，作为回合开始时的默认前史。"""
        return cls(tuple([int(x0)] * (memory + 1)), n_points)


def push_observation(info: InfoState, x_new: int) -> InfoState:
    """新观测放到最前，丢掉最旧的一个，长度不变。"""
    if not (0 <= int(x_new) < info.n_points):
        raise ValueError(f"observation {x_new} is not a grid index in [0, {info.n_points})")
    return InfoState((int(x_new),) + info.window[:-1], info.n_points)


class InfoSpace:
    """信息空间 X^{L+1} 的稠密枚举，包括动态上不可达的窗口。"""

    def __init__(self, n_points: int, memory: int) -> None:
        if n_points < 1:
            raise ValueError("n_points must be >= 1")
        if memory < 0:
            raise ValueError("memory must be >= 0")
        self.n_points = int(n_points)
        self.memory = int(memory)
        self.size = self.n_points ** (self.memory + 1)
        self._top = self.n_points ** self.memory

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, InfoSpace):
            return NotImplemented
        return self.n_points == other.n_points and self.memory == other.memory

    def __hash__(self) -> int:
        return hash((self.n_points, self.memory))

    def __repr__(self) -> str:
        return f"InfoSpace(n_points={self.n_points}, memory={self.memory}, size={self.size})"

    def require(self, per_state: int, what: str) -> None:
        """分配 size * per_state 个元素前先检查上限。"""
        required = self.size * int(per_state)
        if required > MAX_TABLE_ELEMENTS:
            logging.getLogger(__name__).error(
                "table too large what=%s required=%s limit=%s", what, required, MAX_TABLE_ELEMENTS
            )
            raise TableTooLargeError(what, required, MAX_TABLE_ELEMENTS)

    def index_of(self, info: InfoState) -> int:
        if info.n_points != self.n_points or info.memory_L != self.memory:
            raise ValueError(f"info state with L={info.memory_L} does not belong to {self!r}")
        index = 0
        for x in info.window:
            index = index * self.n_points + x
        return index

    def state_at(self, index: int) -> InfoState:
        if not (0 <= int(index) < self.size):
            raise IndexError(f"info index {index} outside [0, {self.size})")
        window = []
        remaining = int(index)
        for _ in range(self.memory + 1):
            window.append(remaining % self.n_points)
            remaining //= self.n_points
        return InfoState(tuple(reversed(window)), self.n_points)

    def windows(self) -> np.ndarray:
        """所有窗口，形状 (size, L+1)，第 0 列是最新观测。"""
        self.require(self.memory + 1, "info windows")
        indices = np.arange(self.size)
        shape = (self.n_points,) * (self.memory + 1)
        return np.stack(np.unravel_index(indices, shape), axis=1)

    def newest(self) -> np.ndarray:
        """每个信息状态的最新观测 x(0)，形状 (size,)。"""
        return np.arange(self.size) // self._top

    def successors(self) -> np.ndarray:
        """successors[i, x'] = push_observation(I_i, x') 的编号，形状 (size, N)。"""
        self.require(self.n_points, "info successor table")
        base = np.arange(self.size) // self.n_points
        return np.arange(self.n_points)[None, :] * self._top + base[:, None]

    def successor_index(self, index: int, x_new: int) -> int:
        return int(x_new) * self._top + int(index) // self.n_points

    def legend(self) -> List[List[int]]:
        """索引说明：第 i 行是编号 i 对应的窗口。"""
        return self.windows().tolist()


def window_matrices(chain_matrices: np.ndarray, space: InfoSpace) -> np.ndarray:
    """
    每个窗口的 β 线性映射 A_I = P(x(0))^T ... P(x(-L))^T，形状 (size, S, S)。
    从最旧的观测开始左乘，与 beta() 的应用顺序一致。
    """
    n_modes = chain_matrices.shape[1]
    space.require(n_modes * n_modes, "window matrices")
    windows = space.windows()
    transposed = np.transpose(chain_matrices, (0, 2, 1))
    result = transposed[windows[:, -1]]
    for column in range(space.memory - 1, -1, -1):
        result = np.matmul(transposed[windows[:, column]], result)
    return result
