# -*- coding: utf-8 -*-
"""模型配置定义与校验。

设计要点：
1) 每个配置段一个 dataclass，from_dict 做类型、区间、形状校验，报错带字段路径。
2) 族名称只能取 registry 白名单里的值。
3) 以 "_comment" 开头的键是给人看的说明，解析时忽略。
4) ModelConfig.from_dict 逐段解析并收集所有段的错误，一次性通过 ConfigError 报告。
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.info.belief import Belief
from src.model.grid import ActionSet, GridSpace
from src.model.kernel import build_kernel
from src.model.mdp import ChainModel, MdpModel, RewardModel
from src.model.registry import CHAIN_FAMILIES, DYNAMICS_FAMILIES, REWARD_FAMILIES
from src.model.validators import (
    expect_int,
    expect_number,
    expect_positive,
    expect_range,
    expect_type,
    expect_vector,
)

MIXING_FAMILIES = ("uniform", "stationary", "prior", "fixed")


class ConfigError(ValueError):
    """配置错误，diagnostics 为逐字段的错误描述。"""

    def __init__(self, diagnostics: List[str]) -> None:
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


def _strip_comments(data: Dict[str, Any]) -> Dict[str, Any]:
    return {key: value for key, value in data.items() if not str(key).startswith("_comment")}


# ------------- 各配置段 -------------


@dataclass
class GridConfig:
    # 每轴一个闭区间 [lo, hi]，每轴网格点数相同。
    bounds: List[Tuple[float, float]]
    points_per_axis: int

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GridConfig":
        raw_bounds = expect_type(data.get("bounds"), list, "grid.bounds")
        if not raw_bounds:
            raise ValueError("grid.bounds must contain at least one interval")
        bounds = []
        for axis, pair in enumerate(raw_bounds):
            if not (isinstance(pair, list) and len(pair) == 2):
                raise ValueError(f"grid.bounds[{axis}] must be a 2-element list")
            lo = expect_number(pair[0], f"grid.bounds[{axis}][0]")
            hi = expect_number(pair[1], f"grid.bounds[{axis}][1]")
            if hi <= lo:
                raise ValueError(f"grid.bounds[{axis}]: hi must be > lo")
            bounds.append((lo, hi))
        points = expect_int(data.get("points_per_axis"), "grid.points_per_axis", minimum=2)
        return cls(bounds=bounds, points_per_axis=points)

    def build(self) -> GridSpace:
        return GridSpace(dim=len(self.bounds), bounds=tuple(self.bounds), points_per_axis=self.points_per_axis)


@dataclass
class FamilyConfig:
    # 族名称 + 参数字典，参数由具体族的 from_params 校验。
    section: str
    family: str
    params: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: Dict[str, Any], section: str, whitelist) -> "FamilyConfig":
        family = expect_type(data.get("family"), str, f"{section}.family")
        if family not in whitelist:
            raise ValueError(f"{section}.family must be one of {sorted(whitelist)}, got {family!r}")
        params = _strip_comments(expect_type(data.get("params", {}), dict, f"{section}.params"))
        return cls(section=section, family=family, params=params)


@dataclass
class RewardConfig:
    family: FamilyConfig
    bound: float

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RewardConfig":
        family = FamilyConfig.from_dict(data, "reward", REWARD_FAMILIES)
        bound = expect_positive(data.get("bound", 1.0), "reward.bound")
        return cls(family=family, bound=bound)


@dataclass
class InitialConfig:
    # x: "uniform" 或 {"point": [...]}；s: 初始模态分布。
    x_mode: str
    x_point: Optional[List[float]]
    s: List[float]

    @classmethod
    def from_dict(cls, data: Dict[str, Any], n_modes: int) -> "InitialConfig":
        raw_x = data.get("x", "uniform")
        if raw_x == "uniform":
            x_mode, x_point = "uniform", None
        elif isinstance(raw_x, dict) and "point" in raw_x:
            point = raw_x["point"]
            if isinstance(point, (int, float)):
                point = [point]
            x_point = [expect_number(v, f"initial.x.point[{i}]") for i, v in enumerate(expect_type(point, list, "initial.x.point"))]
            x_mode = "point"
        else:
            raise ValueError("initial.x must be \"uniform\" or {\"point\": [...]}")
        s = expect_vector(data.get("s", [1.0 / n_modes] * n_modes), n_modes, "initial.s")
        if np.any(s < 0) or abs(float(s.sum()) - 1.0) > 1e-12:
            raise ValueError("initial.s must be a probability vector")
        return cls(x_mode=x_mode, x_point=x_point, s=[float(v) for v in s])


@dataclass
class MixingConfig:
    # dp_markov 的模态边际 w(I) 的构造方式。
    family: str
    belief: Optional[List[float]]

    @classmethod
    def from_dict(cls, data: Dict[str, Any], n_modes: int) -> "MixingConfig":
        family = expect_type(data.get("family", "uniform"), str, "mixing.family")
        if family not in MIXING_FAMILIES:
            raise ValueError(f"mixing.family must be one of {list(MIXING_FAMILIES)}, got {family!r}")
        belief = None
        if family in ("prior", "fixed"):
            raw = expect_vector(data.get("belief"), n_modes, "mixing.belief")
            belief = [float(v) for v in raw]
        return cls(family=family, belief=belief)


EXPERIMENT_KEYS = {
    "memory": int,
    "tol": float,
    "belief_res": int,
    "iters": int,
    "episodes": int,
    "seed": int,
    "seeds": int,
    "max_iters": int,
    "max_memory": int,
    "samples": int,
    "threads": int,
}


@dataclass
class ModelConfig:
    # 总配置：聚合所有段。experiment 是 CLI 参数的默认值，命令行参数优先。
    grid: GridConfig
    modes: int
    actions: List[Tuple[str, Any]]
    dynamics: FamilyConfig
    chain: FamilyConfig
    reward: RewardConfig
    gamma: float
    initial: InitialConfig
    mixing: MixingConfig
    experiment: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ModelConfig":
        data = _strip_comments(data)
        errors: List[str] = []

        def section(parse, *args):
            try:
                return parse(*args)
            except (ValueError, TypeError, KeyError) as exc:
                errors.append(str(exc))
                return None

        grid = section(GridConfig.from_dict, _section(data, "grid"))
        modes = section(expect_int, data.get("modes"), "modes", 1)
        actions = section(_parse_actions, data.get("actions"))
        dynamics = section(FamilyConfig.from_dict, _section(data, "dynamics"), "dynamics", DYNAMICS_FAMILIES)
        chain = section(FamilyConfig.from_dict, _section(data, "chain"), "chain", CHAIN_FAMILIES)
        reward = section(RewardConfig.from_dict, _section(data, "reward"))
        gamma = section(_parse_gamma, data.get("gamma"))
        n_modes = modes or 1
        initial = section(InitialConfig.from_dict, _section(data, "initial", required=False), n_modes)
        mixing = section(MixingConfig.from_dict, _section(data, "mixing", required=False), n_modes)
        experiment = section(_parse_experiment, _section(data, "experiment", required=False))

        if errors:
            raise ConfigError(errors)
        return cls(
            grid=grid,
            modes=modes,
            actions=actions,
            dynamics=dynamics,
            chain=chain,
            reward=reward,
            gamma=gamma,
            initial=initial,
            mixing=mixing,
            experiment=experiment,
        )

    @classmethod
    def from_json_file(cls, path: str) -> "ModelConfig":
        """从 JSON 文件加载配置并进行校验。"""
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError as exc:
            raise ConfigError([f"model file not found: {path}"]) from exc
        except json.JSONDecodeError as exc:
            raise ConfigError([f"model file is not valid JSON: {exc}"]) from exc
        if not isinstance(data, dict):
            raise ConfigError(["Top-level JSON must be an object"])
        return cls.from_dict(data)


def _section(data: Dict[str, Any], name: str, required: bool = True) -> Dict[str, Any]:
    value = data.get(name)
    if value is None:
        if required:
            raise ValueError(f"{name} section is required")
        return {}
    return _strip_comments(expect_type(value, dict, name))


def _parse_actions(raw: Any) -> List[Tuple[str, Any]]:
    items = expect_type(raw, list, "actions")
    if not items:
        raise ValueError("actions must be nonempty")
    pairs = []
    for i, item in enumerate(items):
        item = expect_type(item, dict, f"actions[{i}]")
        label = expect_type(item.get("label"), str, f"actions[{i}].label")
        payload = item.get("payload", 0.0)
        if isinstance(payload, list):
            payload = [expect_number(v, f"actions[{i}].payload[{j}]") for j, v in enumerate(payload)]
        else:
            payload = expect_number(payload, f"actions[{i}].payload")
        pairs.append((label, payload))
    labels = [label for label, _payload in pairs]
    if len(set(labels)) != len(labels):
        raise ValueError("actions labels must be unique")
    return pairs


def _parse_gamma(raw: Any) -> float:
    gamma = expect_range(raw, 0.0, 1.0, "gamma")
    if gamma >= 1.0:
        raise ValueError("gamma must be < 1")
    return gamma


def _parse_experiment(data: Dict[str, Any]) -> Dict[str, Any]:
    parsed: Dict[str, Any] = {}
    for key, value in data.items():
        if key not in EXPERIMENT_KEYS:
            raise ValueError(f"experiment.{key} is not a known parameter ({sorted(EXPERIMENT_KEYS)})")
        if EXPERIMENT_KEYS[key] is int:
            parsed[key] = expect_int(value, f"experiment.{key}")
        else:
            parsed[key] = expect_positive(value, f"experiment.{key}")
    return parsed


# ------------- 构建模型 -------------


def build_model(config: ModelConfig) -> MdpModel:
    """根据配置构建 MdpModel。族参数错误统一转成 ConfigError。"""
    logger = logging.getLogger(__name__)
    try:
        grid = config.grid.build()
        actions = ActionSet.from_pairs(config.actions)
        dim = grid.dim

        dynamics_cls = DYNAMICS_FAMILIES[config.dynamics.family]
        dynamics = dynamics_cls.from_params(config.dynamics.params, config.modes, dim)
        chain_cls = CHAIN_FAMILIES[config.chain.family]
        chain_family = chain_cls.from_params(config.chain.params, config.modes)
        reward_cls = REWARD_FAMILIES[config.reward.family.family]
        reward_family = reward_cls.from_params(config.reward.family.params, dim)

        kernel = build_kernel(dynamics, grid, config.modes, actions)
        chain = ChainModel(chain_family.matrices(grid, config.modes))
        reward = RewardModel(reward_family.values(grid, actions, config.reward.bound), config.reward.bound)
        initial_x = _initial_x(config.initial, grid)
        initial_s = Belief(np.array(config.initial.s))
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError([str(exc)]) from exc

    model = MdpModel(
        grid=grid,
        modes=config.modes,
        actions=actions,
        kernel=kernel,
        chain=chain,
        reward=reward,
        gamma=config.gamma,
        initial_x=initial_x,
        initial_s=initial_s,
    )
    logger.info(
        "model built points=%s modes=%s actions=%s gamma=%s dynamics=%s chain=%s reward=%s",
        grid.n_points,
        config.modes,
        actions.size,
        config.gamma,
        config.dynamics.family,
        config.chain.family,
        config.reward.family.family,
    )
    return model


def _initial_x(initial: InitialConfig, grid: GridSpace) -> np.ndarray:
    if initial.x_mode == "uniform":
        return np.full(grid.n_points, 1.0 / grid.n_points)
    point = np.array(initial.x_point, dtype=float)
    if point.shape[0] == 1 and grid.dim > 1:
        point = np.full(grid.dim, point[0])
    if not grid.contains(point):
        raise ValueError(f"initial.x.point {point.tolist()} lies outside X")
    distribution = np.zeros(grid.n_points)
    distribution[grid.nearest_index(point)] = 1.0
    return distribution


def load_model(path: str) -> Tuple[MdpModel, ModelConfig]:
    """读取模型文件，返回 (模型, 配置)。"""
    config = ModelConfig.from_json_file(path)
    return build_model(config), config
