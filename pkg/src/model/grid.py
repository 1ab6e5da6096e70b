from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np


@dataclass(frozen=True)
class GridSpace:
    """
    连续状态空间 X 的规则网格。
    网格点（而不是网格单元）是状态的基本单位，点按 C 顺序展平编号。
    """

    dim: int
    bounds: Tuple[Tuple[float, float], ...]
    points_per_axis: int
    axes: Tuple[np.ndarray, ...] = field(init=False, repr=False, compare=False)
    points: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError("grid.dim must be a positive integer")
        if len(self.bounds) != self.dim:
            raise ValueError(f"grid.bounds must have {self.dim} intervals, got {len(self.bounds)}")
        if self.points_per_axis < 2:
            raise ValueError("grid.points_per_axis must be >= 2")
        for axis, (lo, hi) in enumerate(self.bounds):
            if not np.isfinite(lo) or not np.isfinite(hi) or hi <= lo:
                raise ValueError(f"grid.bounds[{axis}] must be a finite interval with lo < hi")

        axes = []
        for lo, hi in self.bounds:
            axis_points = np.linspace(float(lo), float(hi), self.points_per_axis)
            axis_points.setflags(write=False)
            axes.append(axis_points)
        mesh = np.meshgrid(*axes, indexing="ij")
        points = np.stack([m.ravel() for m in mesh], axis=1)
        points.setflags(write=False)
        # frozen dataclass 里只能用 object.__setattr__ 填派生字段
        object.__setattr__(self, "axes", tuple(axes))
        object.__setattr__(self, "points", points)

    @property
    def n_points(self) -> int:
        return int(self.points.shape[0])

    @property
    def spacings(self) -> np.ndarray:
        return np.array([(hi - lo) / (self.points_per_axis - 1) for lo, hi in self.bounds])

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacings))

    @property
    def volume(self) -> float:
        return float(np.prod([hi - lo for lo, hi in self.bounds]))

    def contains(self, point: Sequence[float], atol: float = 1e-12) -> bool:
        coords = np.asarray(point, dtype=float).reshape(-1)
        for axis, (lo, hi) in enumerate(self.bounds):
            if coords[axis] < lo - atol or coords[axis] > hi + atol:
                return False
        return True

    def nearest_index(self, point: Sequence[float]) -> int:
        """返回离 point 最近的网格点编号（按轴取整）。"""
        coords = np.asarray(point, dtype=float).reshape(-1)
        spacings = self.spacings
        multi = []
        for axis, (lo, _hi) in enumerate(self.bounds):
            position = int(np.rint((coords[axis] - lo) / spacings[axis]))
            multi.append(min(max(position, 0), self.points_per_axis - 1))
        return int(np.ravel_multi_index(tuple(multi), (self.points_per_axis,) * self.dim))

    def refined(self, factor: int = 2) -> "GridSpace":
        """按 factor 加密，原网格点仍是新网格点。"""
        points = (self.points_per_axis - 1) * factor + 1
        return GridSpace(dim=self.dim, bounds=self.bounds, points_per_axis=points)


@dataclass(frozen=True)
class ActionSet:
    """有限动作集合：标签 + 数值载荷（每个动作一个 dim 维向量）。"""

    labels: Tuple[str, ...]
    payloads: np.ndarray

    def __post_init__(self) -> None:
        if not self.labels:
            raise ValueError("actions must be nonempty")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("action labels must be unique")
        payloads = np.asarray(self.payloads, dtype=float)
        if payloads.ndim == 1:
            payloads = payloads.reshape(-1, 1)
        if payloads.shape[0] != len(self.labels):
            raise ValueError("actions.payloads must have one row per label")
        payloads = payloads.copy()
        payloads.setflags(write=False)
        object.__setattr__(self, "payloads", payloads)

    @property
    def size(self) -> int:
        return len(self.labels)

    def payload(self, index: int, dim: int) -> np.ndarray:
        """取第 index 个动作的载荷，标量载荷广播到 dim 维。"""
        row = self.payloads[index]
        if row.shape[0] == dim:
            return row
        return np.full(dim, float(row[0]))

    @classmethod
    def from_pairs(cls, pairs: List[Tuple[str, object]]) -> "ActionSet":
        labels = tuple(label for label, _payload in pairs)
        rows = [np.atleast_1d(np.asarray(payload, dtype=float)) for _label, payload in pairs]
        width = max(row.shape[0] for row in rows)
        matrix = np.zeros((len(rows), width))
        for i, row in enumerate(rows):
            matrix[i, :] = row if row.shape[0] == width else row[0]
        return cls(labels=labels, payloads=matrix)
