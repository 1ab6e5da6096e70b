"""模型的规范 JSON 导出：每个数组写成 {shape, dtype, data}，用于黄金文件比对。"""
from typing import Any, Dict

import numpy as np

from src.info.belief import Belief
from src.model.grid import ActionSet, GridSpace
from src.model.kernel import TransitionKernel
from src.model.mdp import ChainModel, MdpModel, RewardModel

DUMP_FORMAT = "hybrid-dp-model/1"


def array_to_dict(values: np.ndarray) -> Dict[str, Any]:
    # float64 小端语义；JSON 浮点用 repr 往返是精确的
    flat = np.ascontiguousarray(values, dtype="<f8").reshape(-1)
    return {"shape": list(values.shape), "dtype": "<f8", "data": [float(v) for v in flat]}


def array_from_dict(payload: Dict[str, Any]) -> np.ndarray:
    if payload.get("dtype") != "<f8":
        raise ValueError(f"unsupported dtype {payload.get('dtype')!r}")
    data = np.array(payload["data"], dtype="<f8")
    return data.reshape(tuple(payload["shape"]))


def dump_model(model: MdpModel) -> Dict[str, Any]:
    return {
        "format": DUMP_FORMAT,
        "grid": {
            "dim": model.grid.dim,
            "bounds": [[float(lo), float(hi)] for lo, hi in model.grid.bounds],
            "points_per_axis": model.grid.points_per_axis,
            "cell_volume": model.grid.cell_volume,
        },
        "modes": model.modes,
        "actions": {
            "labels": list(model.actions.labels),
            "payloads": array_to_dict(model.actions.payloads),
        },
        "kernel": {
            "probs": array_to_dict(model.kernel.probs),
            "exit_mass": array_to_dict(model.kernel.exit_mass),
        },
        "chain": array_to_dict(model.chain.matrices),
        "reward": {"values": array_to_dict(model.reward.values), "bound_M": model.reward.bound_M},
        "gamma": model.gamma,
        "initial": {"x": array_to_dict(model.initial_x), "s": model.initial_s.to_list()},
    }


def load_model_dump(payload: Dict[str, Any]) -> MdpModel:
    if payload.get("format") != DUMP_FORMAT:
        raise ValueError(f"unknown model dump format {payload.get('format')!r}")
    grid_data = payload["grid"]
    grid = GridSpace(
        dim=int(grid_data["dim"]),
        bounds=tuple((float(lo), float(hi)) for lo, hi in grid_data["bounds"]),
        points_per_axis=int(grid_data["points_per_axis"]),
    )
    actions = ActionSet(
        labels=tuple(payload["actions"]["labels"]),
        payloads=array_from_dict(payload["actions"]["payloads"]),
    )
    return MdpModel(
        grid=grid,
        modes=int(payload["modes"]),
        actions=actions,
        kernel=TransitionKernel(
            probs=array_from_dict(payload["kernel"]["probs"]),
            exit_mass=array_from_dict(payload["kernel"]["exit_mass"]),
        ),
        chain=ChainModel(array_from_dict(payload["chain"])),
        reward=RewardModel(array_from_dict(payload["reward"]["values"]), float(payload["reward"]["bound_M"])),
        gamma=float(payload["gamma"]),
        initial_x=array_from_dict(payload["initial"]["x"]),
        initial_s=Belief(np.array(payload["initial"]["s"], dtype=float)),
    )
