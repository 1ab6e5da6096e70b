"""
β(I, ·) 的 Lipschitz 常数 l_L（∞ 范数）。

β(I, b) = A_I b 是线性映射，A_I = P(x(0))^T ... P(x(-L))^T。两个信念之差 d 满足 Σd = 0，
所以 l(A) = max { ||A d||_∞ : Σd = 0, ||d||_∞ <= 1 }。该多面体的顶点都在 {-1, 0, 1}^S 里，
枚举这些方向即可精确求得。l_L* 取所有窗口 I 的上确界。
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.rng import stream
from src.info.belief import project_to_simplex
from src.settings import LIPSCHITZ_DEFAULT_SAMPLES, LIPSCHITZ_MAX_MODES, LIPSCHITZ_MAX_WINDOWS

EXACT = "exact"
SAMPLED = "sampled"


@dataclass(frozen=True)
class LipschitzEstimate:
    value: float
    memory: int
    method: str
    is_exact: bool
    samples: int = 0
    sequences: int = 0
    product_bound: Optional[float] = None

    def to_dict(self) -> Dict[str, object]:
        return asdict(self)


def vertex_directions(n_modes: int) -> np.ndarray:
    """{-1, 0, 1}^S 中满足 Σd = 0 的非零方向，形状 (V, S)。"""
    found = [d for d in itertools.product((-1.0, 0.0, 1.0), repeat=n_modes) if sum(d) == 0 and any(d)]
    if not found:
        return np.zeros((1, n_modes))
    return np.array(found)


def matrix_lipschitz(matrices: np.ndarray, directions: Optional[np.ndarray] = None) -> np.ndarray:
    """对 (..., S, S) 的每个矩阵 A 求 max_d ||A d||_∞，返回形状 (...)。"""
    matrices = np.asarray(matrices, dtype=float)
    if directions is None:
        directions = vertex_directions(matrices.shape[-1])
    images = np.einsum("...ab,vb->...va", matrices, directions)
    return np.abs(images).max(axis=(-1, -2))


def unique_chain_matrices(chain_matrices: np.ndarray) -> np.ndarray:
    """去重后的 P(x)，保持首次出现的顺序。"""
    flat = chain_matrices.reshape(chain_matrices.shape[0], -1)
    _, first = np.unique(flat, axis=0, return_index=True)
    return chain_matrices[np.sort(first)]


def product_bound(chain_matrices: np.ndarray, memory: int) -> float:
    """次乘性上界 (max_j l(P_j^T))^(L+1)。"""
    unique = unique_chain_matrices(chain_matrices)
    per_factor = matrix_lipschitz(np.transpose(unique, (0, 2, 1)))
    return float(per_factor.max()) ** (memory + 1)


def _exact_value(chain_matrices: np.ndarray, memory: int, directions: np.ndarray) -> Tuple[float, int]:
    transposed = np.transpose(unique_chain_matrices(chain_matrices), (0, 2, 1))
    # 最旧的观测先作用，新的矩阵乘在左边
    products = transposed
    for _ in range(memory):
        products = np.einsum("jab,pbc->jpac", transposed, products).reshape(-1, *transposed.shape[1:])
    return float(matrix_lipschitz(products, directions).max()), int(products.shape[0])


def _sampled_value(chain_matrices: np.ndarray, memory: int, samples: int, seed: int, directions: np.ndarray) -> float:
    generator = stream(seed)
    n_points = chain_matrices.shape[0]
    windows = generator.integers(0, n_points, size=(samples, memory + 1))
    transposed = np.transpose(chain_matrices, (0, 2, 1))
    products = transposed[windows[:, -1]]
    for column in range(memory - 1, -1, -1):
        products = np.matmul(transposed[windows[:, column]], products)
    return float(matrix_lipschitz(products, directions).max())


def estimate_lipschitz(
    model,
    L: int,
    mode: str = EXACT,
    samples: int = LIPSCHITZ_DEFAULT_SAMPLES,
    seed: int = 0,
) -> LipschitzEstimate:
    """
    exact：枚举不同 P(x) 组成的全部长度 L+1 序列（等价于枚举所有窗口），
    仅在 |S| <= 4 且序列数 <= 上限时可用，否则退回 sampled 并记 warning。
    sampled：随机抽取窗口，结果是 l_L* 的下界。
    """
    logger = logging.getLogger(__name__)
    if L < 0:
        raise ValueError(f"memory L must be >= 0, got {L!r}")
    if mode not in (EXACT, SAMPLED):
        raise ValueError(f"mode must be '{EXACT}' or '{SAMPLED}', got {mode!r}")

    chain_matrices = model.chain.matrices
    n_modes = chain_matrices.shape[1]
    directions = vertex_directions(n_modes)
    bound = product_bound(chain_matrices, L)

    if mode == EXACT:
        n_unique = unique_chain_matrices(chain_matrices).shape[0]
        sequences = n_unique ** (L + 1)
        if n_modes <= LIPSCHITZ_MAX_MODES and sequences <= LIPSCHITZ_MAX_WINDOWS:
            value, count = _exact_value(chain_matrices, L, directions)
            logger.info("lipschitz exact memory=%s value=%s sequences=%s", L, value, count)
            return LipschitzEstimate(value, L, EXACT, True, 0, count, bound)
        logger.warning(
            "lipschitz exact gate exceeded memory=%s modes=%s sequences=%s, falling back to sampled",
            L,
            n_modes,
            sequences,
        )

    if samples <= 0:
        raise ValueError(f"sampled Lipschitz estimate needs samples > 0, got {samples!r}")
    value = _sampled_value(chain_matrices, L, int(samples), seed, directions)
    logger.info("lipschitz sampled memory=%s value=%s samples=%s", L, value, samples)
    return LipschitzEstimate(value, L, SAMPLED, False, int(samples), 0, bound)


def lipschitz_sweep(
    model,
    memories: Sequence[int],
    mode: str = EXACT,
    samples: int = LIPSCHITZ_DEFAULT_SAMPLES,
    seed: int = 0,
) -> List[LipschitzEstimate]:
    return [estimate_lipschitz(model, int(L), mode, samples, seed) for L in memories]


def pairwise_ratio_lower_bound(model, L: int, pairs: int, seed: int = 0) -> float:
    """
    随机抽 (I, b, b') 三元组，计算 ||β(I,b) - β(I,b')||_∞ / ||b - b'||_∞ 的最大值。
    只是下界，用于交叉检验精确值。
    """
    if pairs <= 0:
        raise ValueError("pairs must be > 0")
    generator = stream(seed)
    chain_matrices = model.chain.matrices
    n_points, n_modes = chain_matrices.shape[0], chain_matrices.shape[1]
    windows = generator.integers(0, n_points, size=(pairs, L + 1))
    left = project_to_simplex(generator.dirichlet(np.ones(n_modes), size=pairs))
    right = project_to_simplex(generator.dirichlet(np.ones(n_modes), size=pairs))
    a, b = left, right
    for column in range(L, -1, -1):
        step = chain_matrices[windows[:, column]]
        a = np.einsum("nts,nt->ns", step, a)
        b = np.einsum("nts,nt->ns", step, b)
    numerator = np.abs(a - b).max(axis=1)
    denominator = np.abs(left - right).max(axis=1)
    usable = denominator > 1e-12
    if not np.any(usable):
        return 0.0
    return float((numerator[usable] / denominator[usable]).max())
