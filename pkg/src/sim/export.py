"""
轨迹导出：
  JSON-lines：每行一步 {"episode", "seed", "k", "x", "s", "u", "r"}
  列式二进制：MAGIC + uint32 小端头长度 + JSON 头 + 各列小端数组（顺序见头里的 fields）
"""
from __future__ import annotations

import json
from typing import Dict, Iterable, Tuple

import numpy as np

from src.core.artifacts import write_bytes, write_lines
from src.core.rng import GENERATOR_NAME, STREAM_RULE
from src.sim.episode import EpisodeBatch, EpisodeTrace

MAGIC = b"HDPCOL1\n"
STEP_FIELDS = (("episode", "<i8"), ("k", "<i8"), ("x", "<i8"), ("s", "<i8"), ("u", "<i8"), ("r", "<f8"))
EPISODE_FIELDS = (("episode_index", "<i8"), ("tau", "<i8"), ("truncated", "<i8"))


def trace_lines(traces: Iterable[EpisodeTrace]) -> Iterable[str]:
    for trace in traces:
        for step in trace.steps:
            record = {"episode": trace.episode_index, "seed": trace.seed}
            record.update(step)
            yield json.dumps(record, sort_keys=True, allow_nan=False)


def write_jsonl(path: str, traces: Iterable[EpisodeTrace]) -> str:
    return write_lines(path, trace_lines(traces))


def _step_columns(batch: EpisodeBatch) -> Dict[str, np.ndarray]:
    mask = np.arange(batch.x.shape[1])[None, :] < batch.length[:, None]
    episodes = np.broadcast_to((batch.first_episode + np.arange(batch.n_episodes))[:, None], batch.x.shape)
    ks = np.broadcast_to(np.arange(batch.x.shape[1])[None, :], batch.x.shape)
    return {
        "episode": episodes[mask],
        "k": ks[mask],
        "x": batch.x[mask],
        "s": batch.s[mask],
        "u": batch.u[mask],
        "r": batch.r[mask],
    }


def write_columnar(path: str, batch: EpisodeBatch) -> str:
    steps = _step_columns(batch)
    episodes = {
        "episode_index": batch.first_episode + np.arange(batch.n_episodes),
        "tau": batch.tau,
        "truncated": batch.truncated.astype(np.int64),
    }
    header = {
        "counts": {"episodes": batch.n_episodes, "steps": int(steps["x"].shape[0])},
        "step_fields": [list(item) for item in STEP_FIELDS],
        "episode_fields": [list(item) for item in EPISODE_FIELDS],
        "seed": batch.seed,
        "policy": batch.policy_label,
        "generator": GENERATOR_NAME,
        "stream_rule": STREAM_RULE,
    }
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    chunks = [MAGIC, np.array([len(header_bytes)], dtype="<u4").tobytes(), header_bytes]
    for name, dtype in STEP_FIELDS:
        chunks.append(np.ascontiguousarray(steps[name], dtype=dtype).tobytes())
    for name, dtype in EPISODE_FIELDS:
        chunks.append(np.ascontiguousarray(episodes[name], dtype=dtype).tobytes())
    return write_bytes(path, chunks)


def read_columnar(path: str) -> Tuple[Dict[str, object], Dict[str, np.ndarray]]:
    """返回 (header, columns)。"""
    with open(path, "rb") as handle:
        payload = handle.read()
    if not payload.startswith(MAGIC):
        raise ValueError(f"{path} is not a columnar trace dump")
    offset = len(MAGIC)
    (header_length,) = np.frombuffer(payload, dtype="<u4", count=1, offset=offset)
    offset += 4
    header = json.loads(payload[offset:offset + int(header_length)].decode("utf-8"))
    offset += int(header_length)

    columns: Dict[str, np.ndarray] = {}
    sections = ((header["step_fields"], header["counts"]["steps"]), (header["episode_fields"], header["counts"]["episodes"]))
    for fields, count in sections:
        for name, dtype in fields:
            if int(count) == 0:
                columns[name] = np.zeros(0, dtype=dtype)
                continue
            array = np.frombuffer(payload, dtype=dtype, count=int(count), offset=offset)
            columns[name] = array.copy()
            offset += array.nbytes
    if offset != len(payload):
        raise ValueError(f"{path} has {len(payload) - offset} trailing bytes")
    return header, columns
