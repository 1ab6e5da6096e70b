"""Monte-Carlo 策略评估：J^π(I) ≈ 折扣回报的样本均值，附标准误差和截断尾项。"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Union

import numpy as np

from src.info.belief import Belief
from src.info.info_state import InfoState
from src.settings import DEFAULT_THREADS, MC_BATCH_SIZE
from src.sim.episode import EpisodeBatch, default_horizon, simulate_batch


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: float
    standard_error: float
    n: int
    truncation_tail: float
    max_steps: int
    horizon: Optional[int] = None

    def to_dict(self) -> Dict[str, object]:
        return asdict(self)


def batch_returns(batch: EpisodeBatch, gamma: float, horizon: Optional[int] = None) -> List[float]:
    """每个 episode 的折扣回报，逐条用 math.fsum 求和。"""
    steps = batch.r.shape[1]
    if horizon is not None:
        steps = min(steps, int(horizon) + 1)
    weighted = batch.r[:, :steps] * (gamma ** np.arange(steps))[None, :]
    return [math.fsum(row) for row in weighted.tolist()]


def _chunks(n_episodes: int, batch_size: int) -> List[range]:
    return [range(start, min(start + batch_size, n_episodes)) for start in range(0, n_episodes, batch_size)]


def monte_carlo_value(
    model,
    policy,
    I0: Union[InfoState, str, None],
    b0: Union[Belief, int],
    n_episodes: int,
    seed: int,
    max_steps: Optional[int] = None,
    horizon: Optional[int] = None,
    threads: int = DEFAULT_THREADS,
    batch_size: int = MC_BATCH_SIZE,
) -> MonteCarloEstimate:
    """
    horizon 给定时只累加到第 horizon 步（k 步截断回报），此时 max_steps 取 horizon + 1。
    批次在线程池里并行，结果按提交顺序收集，与调度无关。
    """
    logger = logging.getLogger(__name__)
    if n_episodes < 1:
        raise ValueError(f"n_episodes must be >= 1, got {n_episodes!r}")
    if horizon is not None:
        if horizon < 0:
            raise ValueError(f"horizon must be >= 0, got {horizon!r}")
        steps = int(horizon) + 1
    else:
        steps = int(max_steps) if max_steps is not None else default_horizon(model.gamma, model.bound_M)

    chunks = _chunks(n_episodes, max(1, int(batch_size)))

    def run(chunk: range) -> List[float]:
        batch = simulate_batch(model, policy, I0, b0, steps, seed, len(chunk), chunk.start)
        return batch_returns(batch, model.gamma, horizon)

    logger.info(
        "monte carlo start episodes=%s max_steps=%s batches=%s threads=%s", n_episodes, steps, len(chunks), threads
    )
    with ThreadPoolExecutor(max_workers=max(1, int(threads))) as pool:
        results = list(pool.map(run, chunks))
    returns = [value for chunk in results for value in chunk]

    mean = math.fsum(returns) / n_episodes
    if n_episodes > 1:
        variance = math.fsum((value - mean) ** 2 for value in returns) / (n_episodes - 1)
        standard_error = math.sqrt(variance / n_episodes)
    else:
        standard_error = 0.0

    if horizon is not None:
        tail = 0.0
    else:
        tail = model.gamma ** steps * model.bound_M / (1.0 - model.gamma)
    logger.info("monte carlo done mean=%s standard_error=%s tail=%s", mean, standard_error, tail)
    return MonteCarloEstimate(mean, standard_error, n_episodes, tail, steps, horizon)
