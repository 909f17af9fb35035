# src/services/logger_setup.py
from __future__ import annotations
import os, sys, json, logging, logging.handlers
from pathlib import Path
from typing import Any

from services.util import now_iso

_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()
LEVEL = getattr(logging, _LEVEL, logging.INFO)

# файл логов включается только если задан каталог
LOG_DIR = os.getenv("NILCONE_LOG_DIR", "")
LOG_NAME = "nilcone.log"


class JsonFormatter(logging.Formatter):
    def format(self, record: logging.LogRecord) -> str:
        payload: dict[str, Any] = {
            "ts": now_iso(),
            "level": record.levelname,
            "logger": record.name,
            "file": record.pathname,
            "line": record.lineno,
            "func": record.funcName,
        }
        # если msg — словарь, сольём; иначе как строку
        if isinstance(record.msg, dict):
            payload.update(record.msg)
        else:
            payload["msg"] = record.getMessage()
        if record.exc_info:
            payload["exc"] = self.formatException(record.exc_info)
        # Fraction и прочее нестандартное строкой
        return json.dumps(payload, ensure_ascii=False, default=str)


def _file_handler(log_dir: str) -> logging.Handler | None:
    try:
        path = Path(log_dir)
        path.mkdir(parents=True, exist_ok=True)
    except OSError:
        return None
    # размерная ротация (1MB x 5) -> JSON
    handler = logging.handlers.RotatingFileHandler(
        path / LOG_NAME, maxBytes=1_000_000, backupCount=5, encoding="utf-8"
    )
    handler.setFormatter(JsonFormatter())
    handler.setLevel(LEVEL)
    return handler


def get_logger(name: str = "nilcone") -> logging.Logger:
    logger = logging.getLogger(name)
    # повторный вызов не плодит хендлеры
    if getattr(logger, "_nilcone_configured", False):
        return logger
    for h in list(logger.handlers):
        logger.removeHandler(h)
    logger.propagate = False
    logger.setLevel(LEVEL)

    # stdout занят JSON-выводом CLI, поток stderr
    stream_handler = logging.StreamHandler(sys.stderr)
    stream_handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    stream_handler.setLevel(LEVEL)
    logger.addHandler(stream_handler)

    if LOG_DIR:
        fh = _file_handler(LOG_DIR)
        if fh is not None:
            logger.addHandler(fh)

    logger._nilcone_configured = True  # type: ignore[attr-defined]
    return logger
