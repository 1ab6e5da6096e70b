"""运行清单：配置哈希、版本、种子、耗时、产物列表与产物 sha256，足以复现并核对同样的输出。"""
from __future__ import annotations

import hashlib
import json
import os
import platform
from typing import Any, Dict, List, Optional

import numpy as np
import scipy

from src import __version__
from src.cli.experiment import EXIT_CONFIG_ERROR, EXIT_NOT_CONVERGED, EXIT_OK, EXIT_VIOLATION, ExperimentConfig
from src.core.artifacts import relative_to, write_json
from src.core.rng import GENERATOR_NAME, STREAM_RULE
from src.core.run_context import RunContext

MANIFEST_NAME = "manifest.json"

# 退出码 -> manifest 里的 status
STATUS_BY_EXIT_CODE = {
    EXIT_OK: "ok",
    EXIT_CONFIG_ERROR: "config_error",
    EXIT_NOT_CONVERGED: "not_converged",
    EXIT_VIOLATION: "violation",
}

_CHUNK = 1 << 20


def config_hash(model_path: str, parameters: Dict[str, Any]) -> str:
    """sha256(模型文件字节 + 规范化后的参数 JSON)。"""
    digest = hashlib.sha256()
    with open(model_path, "rb") as handle:
        digest.update(handle.read())
    digest.update(json.dumps(parameters, sort_keys=True).encode("utf-8"))
    return digest.hexdigest()


def file_sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(_CHUNK), b""):
            digest.update(chunk)
    return digest.hexdigest()


def artifact_digests(paths: List[str], out_dir: str) -> Dict[str, str]:
    """相对路径 -> sha256；已不存在的产物跳过。"""
    return {relative_to(path, out_dir): file_sha256(path) for path in paths if os.path.isfile(path)}


def versions() -> Dict[str, str]:
    return {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "package": __version__,
    }


def status_of(exit_code: Optional[int]) -> Optional[str]:
    if exit_code is None:
        return None
    return STATUS_BY_EXIT_CODE.get(int(exit_code), "error")


def build_manifest(experiment: ExperimentConfig, context: RunContext, digest: Optional[str]) -> Dict[str, Any]:
    snapshot = context.snapshot()
    exit_code = snapshot.meta.get("exit_code")
    return {
        "command": snapshot.command,
        "status": status_of(exit_code),
        "config_hash": digest,
        "model_path": experiment.model_path,
        "parameters": experiment.parameters(),
        "parameter_sources": dict(experiment.sources),
        "threads": experiment.threads,
        "versions": versions(),
        "rng": {"generator": GENERATOR_NAME, "stream_rule": STREAM_RULE},
        "seeds": snapshot.seeds,
        "artifacts": [relative_to(path, experiment.out_dir) for path in snapshot.artifacts],
        "artifact_sha256": artifact_digests(snapshot.artifacts, experiment.out_dir),
        "exit_code": exit_code,
        "wall_time_sec": snapshot.meta.get("wall_time_sec"),
        "last_error": snapshot.meta.get("last_error"),
    }


def write_manifest(experiment: ExperimentConfig, context: RunContext) -> str:
    digest = config_hash(experiment.model_path, experiment.parameters()) if os.path.isfile(experiment.model_path) else None
    path = os.path.join(experiment.out_dir, MANIFEST_NAME)
    return write_json(path, build_manifest(experiment, context, digest))


def write_failure_manifest(out_dir: str, model_path: str, context: RunContext) -> str:
    """配置还没解析出来就失败时的最小清单：没有参数和配置哈希，只记录命令、状态和错误。"""
    snapshot = context.snapshot()
    exit_code = snapshot.meta.get("exit_code")
    payload = {
        "command": snapshot.command,
        "status": status_of(exit_code),
        "config_hash": None,
        "model_path": model_path,
        "versions": versions(),
        "artifacts": [],
        "exit_code": exit_code,
        "wall_time_sec": snapshot.meta.get("wall_time_sec"),
        "last_error": snapshot.meta.get("last_error"),
    }
    return write_json(os.path.join(out_dir, MANIFEST_NAME), payload)
