import os


def _env_bool(name: str, default: bool) -> bool:
    raw = os.getenv(name)
    if raw is None:
        return default
    return raw.strip().lower() not in {"0", "false", "no", "off"}


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    return int(raw)


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    return float(raw)


# 默认输出目录，CLI 未给 --out 时使用，支持通过环境变量覆盖
OUTPUT_DIR = os.getenv(
    "HYBRID_DP_OUTPUT_DIR",
    os.path.join("artifacts", "runs"),
)

# 日志级别（INFO / DEBUG / WARNING）
LOG_LEVEL = os.getenv("HYBRID_DP_LOG_LEVEL", "INFO").upper()

# 稠密表分配上限（元素个数），超出时在分配前报错
MAX_TABLE_ELEMENTS = _env_int("HYBRID_DP_MAX_TABLE_ELEMENTS", 50_000_000)

# 库内部并行度上限（episode 批次、多个种子）
DEFAULT_THREADS = max(1, _env_int("HYBRID_DP_THREADS", 1))

# Monte-Carlo 每批 episode 数
MC_BATCH_SIZE = max(1, _env_int("HYBRID_DP_MC_BATCH", 4096))

# 是否在 solve 结果里附带完整表（大表时可关闭）
DUMP_FULL_TABLES = _env_bool("HYBRID_DP_DUMP_TABLES", True)

# 随机行概率和、信念和的容差
STOCHASTIC_ATOL = 1e-12
SIMPLEX_ATOL = 1e-12

# 信念分量的浮点负值容忍，超过则视为非法
NEGATIVE_CLAMP_ATOL = 1e-15

# 迭代默认参数
DEFAULT_TOL = _env_float("HYBRID_DP_TOL", 1e-8)
DEFAULT_MAX_ITERS = _env_int("HYBRID_DP_MAX_ITERS", 10_000)

# argmin 平局容差：与行最小值相差不超过该值视为平局，取最小动作下标
TIE_TOLERANCE = 1e-9

# Lipschitz 精确枚举门限
LIPSCHITZ_MAX_MODES = 4
LIPSCHITZ_MAX_WINDOWS = 1_000_000
LIPSCHITZ_DEFAULT_SAMPLES = 20_000

# 信念单纯形格点默认分辨率（按模态数）
DEFAULT_BELIEF_RESOLUTION = {1: 1, 2: 20, 3: 10}
FALLBACK_BELIEF_RESOLUTION = 6

# 截断回报尾项阈值，用来推导默认 max_steps
TRUNCATION_EPS = 1e-6

# 误差界验证默认种子数
DEFAULT_BOUND_SEEDS = 20
