"""
实验参数：默认值 <- 模型文件的 experiment 段 <- 命令行参数，后者优先。
解析完统一做区间校验，错误收集后以 ConfigError 抛出。
"""
from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

from src.model.config import ConfigError
from src.settings import (
    DEFAULT_BOUND_SEEDS,
    DEFAULT_MAX_ITERS,
    DEFAULT_THREADS,
    DEFAULT_TOL,
    LIPSCHITZ_DEFAULT_SAMPLES,
    OUTPUT_DIR,
)

EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_NOT_CONVERGED = 3
EXIT_VIOLATION = 4

LIPSCHITZ_MODES = ("exact", "sampled")

# 命令行参数名 -> ExperimentConfig 字段名
FLAG_FIELDS = {
    "seed": "seed",
    "tol": "tol",
    "memory": "memory",
    "belief_res": "belief_res",
    "iters": "iters",
    "episodes": "episodes",
    "threads": "threads",
    "seeds": "seeds",
    "mode": "mode",
    "samples": "samples",
    "max_memory": "max_memory",
    "max_iters": "max_iters",
}


@dataclass
class ExperimentConfig:
    command: str
    model_path: str
    out_dir: str = OUTPUT_DIR
    seed: int = 0
    tol: float = DEFAULT_TOL
    memory: int = 0
    belief_res: Optional[int] = None
    iters: int = 50
    episodes: int = 1000
    threads: int = DEFAULT_THREADS
    seeds: int = DEFAULT_BOUND_SEEDS
    mode: str = "exact"
    samples: int = LIPSCHITZ_DEFAULT_SAMPLES
    max_memory: int = 8
    max_iters: int = DEFAULT_MAX_ITERS
    sources: Dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def parameters(self) -> Dict[str, Any]:
        """进入配置哈希的参数（不含输出目录与线程数，它们不影响结果）。"""
        payload = self.to_dict()
        for key in ("out_dir", "threads", "sources", "model_path"):
            payload.pop(key, None)
        return payload

    @classmethod
    def resolve(cls, args: Any, file_defaults: Optional[Dict[str, Any]] = None) -> "ExperimentConfig":
        config = cls(command=args.command, model_path=args.model)
        if getattr(args, "out", None):
            config.out_dir = args.out
        for key, value in (file_defaults or {}).items():
            if key in FLAG_FIELDS:
                setattr(config, FLAG_FIELDS[key], value)
                config.sources[FLAG_FIELDS[key]] = "model"
        for flag, name in FLAG_FIELDS.items():
            value = getattr(args, flag, None)
            if value is not None:
                setattr(config, name, value)
                config.sources[name] = "flag"
        config.validate()
        return config

    def validate(self) -> None:
        errors: List[str] = []
        if not os.path.isfile(self.model_path):
            errors.append(f"--model: file not found: {self.model_path}")
        if not self.tol > 0:
            errors.append(f"--tol must be > 0, got {self.tol!r}")
        minimums = {
            "seed": 0,
            "memory": 0,
            "iters": 0,
            "episodes": 1,
            "threads": 1,
            "seeds": 1,
            "samples": 1,
            "max_memory": 0,
            "max_iters": 1,
        }
        for name, minimum in minimums.items():
            value = getattr(self, name)
            if int(value) != value or value < minimum:
                errors.append(f"--{name.replace('_', '-')} must be an integer >= {minimum}, got {value!r}")
        if self.belief_res is not None and (int(self.belief_res) != self.belief_res or self.belief_res < 1):
            errors.append(f"--belief-res must be an integer >= 1, got {self.belief_res!r}")
        if self.mode not in LIPSCHITZ_MODES:
            errors.append(f"--mode must be one of {list(LIPSCHITZ_MODES)}, got {self.mode!r}")
        if errors:
            raise ConfigError(errors)
