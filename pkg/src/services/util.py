# src/services/util.py
from __future__ import annotations
import os, json, hashlib
from datetime import datetime, timezone
from fractions import Fraction
from typing import Any

UTC = timezone.utc

# ====== СЛУЧАЙНОСТЬ ======
NILCONE_SEED           = int(os.environ.get("NILCONE_SEED", "0"))
NILCONE_ENTRY_BOUND    = int(os.environ.get("NILCONE_ENTRY_BOUND", "3"))
NILCONE_SAMPLE_FACTORS = int(os.environ.get("NILCONE_SAMPLE_FACTORS", "2"))

# ====== ОТЧЁТЫ ======
NILCONE_MAX_REPORTED = int(os.environ.get("NILCONE_MAX_REPORTED", "20"))
NILCONE_CENSUS_WARN  = int(os.environ.get("NILCONE_CENSUS_WARN", "16"))


def now_iso() -> str:
    return datetime.now(UTC).isoformat(timespec="seconds")


def _json_default(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def dump_json(obj: Any) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"), default=_json_default)


def fingerprint(obj: Any) -> str:
    """sha256 канонического JSON: ключи отсортированы, без пробелов."""
    raw = json.dumps(obj, ensure_ascii=False, separators=(",", ":"), sort_keys=True, default=_json_default)
    return hashlib.sha256(raw.encode("utf-8")).hexdigest()
