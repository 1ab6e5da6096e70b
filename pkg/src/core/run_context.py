import threading
import time
from dataclasses import dataclass
from typing import Dict, List, Optional


@dataclass(frozen=True)
class RunContextSnapshot:
    command: Optional[str]
    seeds: List[int]
    artifacts: List[str]
    meta: Dict[str, object]


class RunContext:
    """
    一次 CLI 运行的上下文：记录产物、种子、耗时等，最后写进 manifest。
    多个线程（episode 批次、种子）可能同时登记产物，所以用锁保护。
    """

    def __init__(self, command: Optional[str] = None) -> None:
        self._lock = threading.Lock()
        self._command = command
        self._seeds: List[int] = []
        self._artifacts: List[str] = []
        self._started_at = time.time()
        self._meta: Dict[str, object] = {
            "started_at": self._started_at,
            "finished_at": None,
            "wall_time_sec": None,
            "exit_code": None,
            "last_error": None,
        }

    def snapshot(self) -> RunContextSnapshot:
        with self._lock:
            return RunContextSnapshot(
                command=self._command,
                seeds=list(self._seeds),
                artifacts=sorted(self._artifacts),
                meta=dict(self._meta),
            )

    def add_artifact(self, path: str) -> str:
        with self._lock:
            if path not in self._artifacts:
                self._artifacts.append(path)
        return path

    def add_seeds(self, seeds: List[int]) -> None:
        with self._lock:
            for seed in seeds:
                if int(seed) not in self._seeds:
                    self._seeds.append(int(seed))

    def set_last_error(self, message: Optional[str]) -> None:
        with self._lock:
            self._meta["last_error"] = message

    def finish(self, exit_code: int) -> None:
        with self._lock:
            finished_at = time.time()
            self._meta["finished_at"] = finished_at
            self._meta["wall_time_sec"] = finished_at - self._started_at
            self._meta["exit_code"] = int(exit_code)
