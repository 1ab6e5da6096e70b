from __future__ import annotations

import numpy as np
from scipy import stats

from src.model.families.midpoint import ContinuousDensity
from src.model.validators import expect_number, expect_type, expect_vector

BOUNDARY_MODES = ("exit", "truncate")


class GaussianDensity(ContinuousDensity):
    """
    各轴独立的高斯转移密度：
        x' ~ N(x + gain * u + drift[s], sigma[s]^2 I)
    boundary="exit"：落在 X 外的尾概率记为出界质量（回合终止）；
    boundary="truncate"：尾概率折回 X 内，出界质量恒为 0（τ = ∞ 的配置用）。
    """

    def __init__(self, gain: float, sigma: np.ndarray, drift: np.ndarray, boundary: str = "exit") -> None:
        if boundary not in BOUNDARY_MODES:
            raise ValueError(f"dynamics.params.boundary must be one of {BOUNDARY_MODES}")
        if np.any(np.asarray(sigma) <= 0):
            raise ValueError("dynamics.params.sigma must be greater than 0")
        self.gain = float(gain)
        self.sigma = np.asarray(sigma, dtype=float)
        self.drift = np.asarray(drift, dtype=float)
        self.boundary = boundary

    @classmethod
    def from_params(cls, params: dict, n_modes: int, dim: int) -> "GaussianDensity":
        gain = expect_number(params.get("gain", 1.0), "dynamics.params.gain")
        sigma = expect_vector(params.get("sigma", 0.1), n_modes, "dynamics.params.sigma")
        drift = expect_vector(params.get("drift", 0.0), n_modes, "dynamics.params.drift")
        boundary = expect_type(params.get("boundary", "exit"), str, "dynamics.params.boundary")
        return cls(gain=gain, sigma=sigma, drift=drift, boundary=boundary)

    def mean(self, source: np.ndarray, mode: int, payload: np.ndarray) -> np.ndarray:
        return source + self.gain * payload + self.drift[mode]

    def pdf(self, targets: np.ndarray, source: np.ndarray, mode: int, payload: np.ndarray, bounds) -> np.ndarray:
        mean = self.mean(source, mode, payload)
        per_axis = stats.norm.pdf(targets, loc=mean, scale=self.sigma[mode])
        return np.prod(per_axis, axis=1)

    def exit_probability(self, source: np.ndarray, mode: int, payload: np.ndarray, bounds) -> float:
        if self.boundary == "truncate":
            return 0.0
        mean = self.mean(source, mode, payload)
        inside = 1.0
        for axis, (lo, hi) in enumerate(bounds):
            scale = self.sigma[mode]
            # sf/cdf 分别算上下尾，避免 1 - cdf 的抵消误差
            upper_tail = stats.norm.sf(hi, loc=mean[axis], scale=scale)
            lower_tail = stats.norm.cdf(lo, loc=mean[axis], scale=scale)
            inside *= 1.0 - upper_tail - lower_tail
        return float(min(max(1.0 - inside, 0.0), 1.0))
