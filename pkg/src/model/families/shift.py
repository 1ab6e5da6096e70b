from __future__ import annotations

from typing import Tuple

import numpy as np

from src.model.validators import expect_number, expect_vector


class ShiftDynamics:
    """
    确定性平移：x' = x + gain * u + drift[s]，取最近网格点。
    平移后离开 X 则整行质量记为出界。
    """

    def __init__(self, gain: float, drift: np.ndarray) -> None:
        self.gain = float(gain)
        self.drift = np.asarray(drift, dtype=float)

    @classmethod
    def from_params(cls, params: dict, n_modes: int, dim: int) -> "ShiftDynamics":
        gain = expect_number(params.get("gain", 1.0), "dynamics.params.gain")
        drift = expect_vector(params.get("drift", 0.0), n_modes, "dynamics.params.drift")
        return cls(gain=gain, drift=drift)

    def row(self, grid, source_index: int, mode: int, payload: np.ndarray) -> Tuple[np.ndarray, float]:
        target = grid.points[source_index] + self.gain * payload + self.drift[mode]
        probs = np.zeros(grid.n_points)
        if not grid.contains(target, atol=1e-9):
            return probs, 1.0
        probs[grid.nearest_index(target)] = 1.0
        return probs, 0.0
