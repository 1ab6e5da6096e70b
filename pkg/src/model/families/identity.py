from __future__ import annotations

from typing import Tuple

import numpy as np


class IdentityDynamics:
    """恒等动态：下一时刻停在当前网格点，不会出界。"""

    @classmethod
    def from_params(cls, params: dict, n_modes: int, dim: int) -> "IdentityDynamics":
        return cls()

    def row(self, grid, source_index: int, mode: int, payload: np.ndarray) -> Tuple[np.ndarray, float]:
        probs = np.zeros(grid.n_points)
        probs[source_index] = 1.0
        return probs, 0.0
