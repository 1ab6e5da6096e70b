"""连续密度的中点法离散化。

网格行 = 密度 × 单元体积，出界质量用解析尾概率；
网格内质量按比例缩放到 1 - exit_mass，保证每行守恒。
"""
from __future__ import annotations

from typing import Tuple

import numpy as np


class ContinuousDensity:
    """连续密度族的基类：子类实现 pdf 与 exit_probability。"""

    def pdf(self, targets: np.ndarray, source: np.ndarray, mode: int, payload: np.ndarray, bounds) -> np.ndarray:
        raise NotImplementedError

    def exit_probability(self, source: np.ndarray, mode: int, payload: np.ndarray, bounds) -> float:
        raise NotImplementedError

    def row(self, grid, source_index: int, mode: int, payload: np.ndarray) -> Tuple[np.ndarray, float]:
        source = grid.points[source_index]
        density = np.asarray(self.pdf(grid.points, source, mode, payload, grid.bounds), dtype=float)
        exit_mass = float(self.exit_probability(source, mode, payload, grid.bounds))
        location = f"x={source_index} s={mode} payload={payload.tolist()}"
        return midpoint_row(density, grid.cell_volume, exit_mass, location)


def midpoint_row(density: np.ndarray, cell_volume: float, exit_mass: float, location: str) -> Tuple[np.ndarray, float]:
    if not np.all(np.isfinite(density)):
        bad = int(np.flatnonzero(~np.isfinite(density))[0])
        raise ValueError(f"non-finite density value at {location} target={bad}")
    if np.any(density < 0.0):
        bad = int(np.flatnonzero(density < 0.0)[0])
        raise ValueError(f"negative density value at {location} target={bad}")
    if not np.isfinite(exit_mass) or exit_mass < 0.0 or exit_mass > 1.0:
        raise ValueError(f"exit probability {exit_mass} outside [0, 1] at {location}")

    raw = density * cell_volume
    in_mass = float(raw.sum())
    inside = 1.0 - exit_mass
    if inside <= 0.0:
        return np.zeros_like(raw), 1.0
    if in_mass <= 0.0:
        raise ValueError(f"density has no mass on grid points at {location}; refine the grid")
    return raw * (inside / in_mass), exit_mass
