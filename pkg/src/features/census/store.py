# src/features/census/store.py
from __future__ import annotations
import os, hashlib
from pathlib import Path
from typing import Any, Iterable

from services.logger_setup import get_logger
from services.util import dump_json

logger = get_logger("features.census.store")


def write_jsonl(path: str | os.PathLike[str], records: Iterable[dict[str, Any]]) -> str:
    """
    Пишет записи построчно через временный файл и os.replace.
    Возвращает sha256 записанного содержимого.
    """
    target = Path(path)
    if target.parent and not target.parent.exists():
        target.parent.mkdir(parents=True, exist_ok=True)
    tmp = target.with_name(target.name + ".tmp")
    h = hashlib.sha256()
    count = 0
    try:
        with open(tmp, "w", encoding="utf-8") as f:
            for rec in records:
                line = dump_json(rec) + "\n"
                f.write(line)
                h.update(line.encode("utf-8"))
                count += 1
        os.replace(tmp, target)
    except Exception:
        try:
            tmp.unlink(missing_ok=True)
        except Exception:
            pass
        raise
    digest = h.hexdigest()
    logger.info({"event": "census_written", "path": str(target), "records": count, "sha256": digest})
    return digest


def sha256_file(path: str | os.PathLike[str]) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()
