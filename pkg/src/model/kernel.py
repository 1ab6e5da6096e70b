import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.model.grid import ActionSet, GridSpace


@dataclass(frozen=True)
class TransitionKernel:
    """
    离散化后的连续状态转移核。
    probs[x, s, u, x'] 为落在网格点 x' 的概率，exit_mass[x, s, u] 为离开 X 的概率。
    """

    probs: np.ndarray
    exit_mass: np.ndarray

    def __post_init__(self) -> None:
        probs = np.array(self.probs, dtype=float)
        exit_mass = np.array(self.exit_mass, dtype=float)
        if probs.ndim != 4 or probs.shape[0] != probs.shape[3]:
            raise ValueError(f"kernel.probs must have shape (X, S, U, X), got {probs.shape}")
        if exit_mass.shape != probs.shape[:3]:
            raise ValueError(f"kernel.exit_mass must have shape {probs.shape[:3]}, got {exit_mass.shape}")
        probs.setflags(write=False)
        exit_mass.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "exit_mass", exit_mass)

    @property
    def n_points(self) -> int:
        return int(self.probs.shape[0])

    @property
    def n_modes(self) -> int:
        return int(self.probs.shape[1])

    @property
    def n_actions(self) -> int:
        return int(self.probs.shape[2])

    def row(self, x: int, s: int, u: int) -> Tuple[np.ndarray, float]:
        return self.probs[x, s, u], float(self.exit_mass[x, s, u])

    def conservation_error(self) -> float:
        """各行 (网格内质量 + 出界质量) 与 1 的最大偏差。"""
        totals = self.probs.sum(axis=3) + self.exit_mass
        return float(np.max(np.abs(totals - 1.0)))

    def has_exit(self) -> bool:
        return bool(np.any(self.exit_mass > 0.0))


def build_kernel(density, grid: GridSpace, modes: int, actions: ActionSet) -> TransitionKernel:
    """
    对每个 (x, s, u) 调用族的 row()，拼成转移核。
    族内部出现非有限值或负密度时抛 ValueError，这里补上位置信息再抛出。
    """
    logger = logging.getLogger(__name__)
    n_points = grid.n_points
    probs = np.zeros((n_points, modes, actions.size, n_points))
    exit_mass = np.zeros((n_points, modes, actions.size))

    for u in range(actions.size):
        payload = actions.payload(u, grid.dim)
        for s in range(modes):
            for x in range(n_points):
                try:
                    row, exit_value = density.row(grid, x, s, payload)
                except ValueError as exc:
                    raise ValueError(f"build_kernel failed at (x={x}, s={s}, u={u}): {exc}") from exc
                probs[x, s, u, :] = row
                exit_mass[x, s, u] = exit_value

    kernel = TransitionKernel(probs=probs, exit_mass=exit_mass)
    logger.info(
        "kernel built family=%s points=%s modes=%s actions=%s max_exit=%.3g conservation_error=%.3g",
        type(density).__name__,
        n_points,
        modes,
        actions.size,
        float(exit_mass.max()),
        kernel.conservation_error(),
    )
    return kernel


def quadrature_exit_mass(
    density,
    source: np.ndarray,
    mode: int,
    payload: np.ndarray,
    bounds,
    resolution: int,
) -> Tuple[float, float]:
    """
    数值积分求出界质量：中点法在 resolution 和 2*resolution 两档上积分 X 内的质量，
    返回 (细档估计, 两档之差作为误差估计)。只适用于连续密度族。
    """
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    estimates = []
    for cells in (resolution, 2 * resolution):
        axes = []
        widths = []
        for lo, hi in bounds:
            width = (hi - lo) / cells
            axes.append(lo + (np.arange(cells) + 0.5) * width)
            widths.append(width)
        mesh = np.meshgrid(*axes, indexing="ij")
        centers = np.stack([m.ravel() for m in mesh], axis=1)
        values = density.pdf(centers, np.asarray(source, dtype=float), mode, np.asarray(payload, dtype=float), bounds)
        inside = float(np.sum(values) * np.prod(widths))
        estimates.append(1.0 - inside)
    return estimates[1], abs(estimates[1] - estimates[0])
