import csv
import json
import logging
import os
from typing import Iterable, Optional, Sequence


def ensure_folder(path: str) -> None:
    folder = os.path.dirname(path)
    if folder:
        os.makedirs(folder, exist_ok=True)


def _tmp_path(target_path: str) -> str:
    base, ext = os.path.splitext(target_path)
    return f"{base}.tmp{ext}"


def write_json(path: str, payload: object) -> str:
    """
    原子写 JSON：先写临时文件再 os.replace，避免半写文件。
    sort_keys 固定键顺序，保证同样输入得到逐字节一致的文件。
    """
    ensure_folder(path)
    tmp_path = _tmp_path(path)
    with open(tmp_path, "w", encoding="utf-8", newline="\n") as handle:
        json.dump(payload, handle, sort_keys=True, indent=2, allow_nan=False)
        handle.write("\n")
    os.replace(tmp_path, path)
    logging.getLogger(__name__).debug("artifact written path=%s", path)
    return path


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    """原子写 CSV，浮点数用 repr 保证可逆且确定。"""
    ensure_folder(path)
    tmp_path = _tmp_path(path)
    with open(tmp_path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([_format_cell(cell) for cell in row])
    os.replace(tmp_path, path)
    logging.getLogger(__name__).debug("artifact written path=%s", path)
    return path


def write_lines(path: str, lines: Iterable[str]) -> str:
    ensure_folder(path)
    tmp_path = _tmp_path(path)
    with open(tmp_path, "w", encoding="utf-8", newline="\n") as handle:
        for line in lines:
            handle.write(line)
            handle.write("\n")
    os.replace(tmp_path, path)
    return path


def write_bytes(path: str, chunks: Iterable[bytes]) -> str:
    ensure_folder(path)
    tmp_path = _tmp_path(path)
    with open(tmp_path, "wb") as handle:
        for chunk in chunks:
            handle.write(chunk)
    os.replace(tmp_path, path)
    return path


def _format_cell(cell: object) -> object:
    if isinstance(cell, float):
        return repr(cell)
    if isinstance(cell, bool):
        return "true" if cell else "false"
    return cell


def relative_to(path: str, root: Optional[str]) -> str:
    if not root:
        return path
    return os.path.relpath(path, root)
