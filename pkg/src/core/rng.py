"""可复现随机数：每个 episode 一条独立的计数器型随机流。

分流规则（固定，写入 trace 元数据）：
    stream(seed, episode_index) = Philox(SeedSequence([seed, episode_index]))
同一 (seed, episode_index) 无论在哪个批次、哪个线程里生成，得到的随机数都完全一致。
"""

import numpy as np

# 生成器名称，记录到 trace / manifest 里
GENERATOR_NAME = "numpy.Philox4x64-10"
STREAM_RULE = "SeedSequence([seed, episode_index])"


def episode_stream(seed: int, episode_index: int) -> np.random.Generator:
    """返回某个 episode 专属的随机流。"""
    if seed < 0 or episode_index < 0:
        raise ValueError("seed and episode_index must be non-negative")
    sequence = np.random.SeedSequence([int(seed), int(episode_index)])
    return np.random.Generator(np.random.Philox(sequence))


def stream(seed: int) -> np.random.Generator:
    """非 episode 场景（随机表、采样窗口）使用的随机流。"""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))
