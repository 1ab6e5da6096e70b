from __future__ import annotations

import numpy as np

from src.model.families.midpoint import ContinuousDensity


class UniformDensity(ContinuousDensity):
    """X 上的均匀密度，与当前状态无关，不会出界。"""

    @classmethod
    def from_params(cls, params: dict, n_modes: int, dim: int) -> "UniformDensity":
        return cls()

    def pdf(self, targets: np.ndarray, source: np.ndarray, mode: int, payload: np.ndarray, bounds) -> np.ndarray:
        lows = np.array([lo for lo, _hi in bounds], dtype=float)
        highs = np.array([hi for _lo, hi in bounds], dtype=float)
        volume = float(np.prod(highs - lows))
        inside = np.all((targets >= lows) & (targets <= highs), axis=1)
        return np.where(inside, 1.0 / volume, 0.0)

    def exit_probability(self, source: np.ndarray, mode: int, payload: np.ndarray, bounds) -> float:
        return 0.0
