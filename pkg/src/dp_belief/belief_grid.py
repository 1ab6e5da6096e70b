"""
信念单纯形 Δ_|S| 的规则格点（分辨率 m）与重心插值。

格点：所有坐标为 1/m 整数倍的信念，共 C(m+|S|-1, |S|-1) 个。
插值：Freudenthal 三角剖分。令累积坐标 y_i = m * Σ_{j>=i} b_j，
取 v = floor(y)、d = y - v，把 d[1:] 降序排列后逐个加 1 得到单纯形的 |S| 个顶点，
权重为相邻 d 的差。权重非负、和为 1，线性函数插值精确。
"""
from __future__ import annotations

import itertools
import logging
from typing import List, Tuple

import numpy as np

from src.info.belief import Belief

# 累积坐标贴近整数时直接取整，避免 floor(3.9999999) 这种情况
SNAP_ATOL = 1e-9


def _compositions(total: int, parts: int) -> List[Tuple[int, ...]]:
    """total 拆成 parts 个非负整数的全部方式，按字典序。"""
    if parts == 1:
        return [(total,)]
    found = []
    for bars in itertools.combinations(range(total + parts - 1), parts - 1):
        previous = -1
        counts = []
        for bar in bars:
            counts.append(bar - previous - 1)
            previous = bar
        counts.append(total + parts - 1 - previous - 1)
        found.append(tuple(counts))
    return sorted(found)


class BeliefGrid:
    """分辨率为 m 的单纯形格点。"""

    def __init__(self, n_modes: int, resolution: int) -> None:
        if n_modes < 1:
            raise ValueError(f"n_modes must be >= 1, got {n_modes!r}")
        if resolution < 1:
            raise ValueError(f"belief resolution must be >= 1, got {resolution!r}")
        self.n_modes = int(n_modes)
        self.resolution = int(resolution)
        counts = np.array(_compositions(self.resolution, self.n_modes), dtype=np.int64)
        self.counts = counts
        self.points = counts / float(self.resolution)
        self.points.setflags(write=False)
        self.counts.setflags(write=False)
        # 计数向量编码成 (m+1) 进制整数，排序后用 searchsorted 反查编号
        self._radix = (self.resolution + 1) ** np.arange(self.n_modes, dtype=np.int64)
        keys = counts @ self._radix
        self._order = np.argsort(keys, kind="stable")
        self._sorted_keys = keys[self._order]
        logging.getLogger(__name__).debug(
            "belief grid built modes=%s resolution=%s points=%s", self.n_modes, self.resolution, self.size
        )

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    def __repr__(self) -> str:
        return f"BeliefGrid(n_modes={self.n_modes}, resolution={self.resolution}, size={self.size})"

    def lookup_counts(self, counts: np.ndarray) -> np.ndarray:
        keys = counts @ self._radix
        positions = np.searchsorted(self._sorted_keys, keys)
        positions = np.clip(positions, 0, self.size - 1)
        if np.any(self._sorted_keys[positions] != keys):
            raise ValueError("count vector is not a lattice point")
        return self._order[positions]

    def index_of(self, point) -> int:
        """格点信念的编号；不在格点上时抛 ValueError。"""
        weights = point.weights if isinstance(point, Belief) else np.asarray(point, dtype=float)
        if weights.shape != (self.n_modes,):
            raise ValueError(f"belief has shape {weights.shape}, grid needs ({self.n_modes},)")
        scaled = weights * self.resolution
        counts = np.rint(scaled).astype(np.int64)
        if np.max(np.abs(scaled - counts)) > SNAP_ATOL or counts.sum() != self.resolution:
            raise ValueError(f"belief {weights.tolist()} is not on the resolution-{self.resolution} lattice")
        return int(self.lookup_counts(counts[None, :])[0])

    def interpolate_many(self, beliefs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        批量插值。beliefs 形状 (..., S)；返回 (indices, weights)，形状均为 (..., S)，
        第 k 列是包含该信念的格点单纯形的第 k 个顶点。
        """
        beliefs = np.asarray(beliefs, dtype=float)
        if beliefs.shape[-1] != self.n_modes:
            raise ValueError(f"beliefs have {beliefs.shape[-1]} modes, grid has {self.n_modes}")
        lead = beliefs.shape[:-1]
        flat = beliefs.reshape(-1, self.n_modes)
        n = flat.shape[0]
        S = self.n_modes
        if S == 1:
            return np.zeros(lead + (1,), dtype=np.int64), np.ones(lead + (1,))

        cumulative = np.cumsum(flat[:, ::-1], axis=1)[:, ::-1] * self.resolution
        cumulative[:, 0] = self.resolution
        rounded = np.rint(cumulative)
        cumulative = np.where(np.abs(cumulative - rounded) <= SNAP_ATOL, rounded, cumulative)
        base = np.floor(cumulative)
        frac = cumulative - base

        order = np.argsort(-frac[:, 1:], axis=1, kind="stable") + 1
        sorted_frac = np.take_along_axis(frac, order, axis=1)

        weights = np.empty((n, S))
        weights[:, 0] = 1.0 - sorted_frac[:, 0]
        weights[:, 1:-1] = sorted_frac[:, :-1] - sorted_frac[:, 1:]
        weights[:, -1] = sorted_frac[:, -1]

        vertices = np.empty((n, S, S))
        vertices[:, 0, :] = base
        rows = np.arange(n)
        for k in range(1, S):
            vertices[:, k, :] = vertices[:, k - 1, :]
            vertices[rows, k, order[:, k - 1]] += 1.0

        padded = np.concatenate([vertices, np.zeros((n, S, 1))], axis=2)
        counts = np.rint(padded[:, :, :-1] - padded[:, :, 1:]).astype(np.int64)
        # 权重为 0 的顶点可能落在单纯形外，用基顶点代替
        invalid = np.any(counts < 0, axis=2)
        if np.any(invalid & (weights > SNAP_ATOL)):
            raise ValueError("belief lies outside the simplex")
        counts = np.where(invalid[:, :, None], counts[:, :1, :], counts)
        weights = np.where(invalid, 0.0, weights)

        indices = self.lookup_counts(counts.reshape(-1, S)).reshape(n, S)
        return indices.reshape(lead + (S,)), weights.reshape(lead + (S,))

    def interpolate(self, b: Belief) -> List[Tuple[int, float]]:
        """单个信念的插值：合并重复顶点，只保留正权重。"""
        indices, weights = self.interpolate_many(b.weights[None, :])
        merged = {}
        for index, weight in zip(indices[0].tolist(), weights[0].tolist()):
            if weight > 0.0:
                merged[index] = merged.get(index, 0.0) + weight
        return sorted(merged.items())


def belief_interpolate(bgrid: BeliefGrid, b: Belief) -> List[Tuple[int, float]]:
    """返回 [(格点编号, 权重), ...]，权重非负、和为 1；b 在格点上时只有一项。"""
    if b.size != bgrid.n_modes:
        raise ValueError(f"belief has {b.size} modes, grid has {bgrid.n_modes}")
    return bgrid.interpolate(b)
