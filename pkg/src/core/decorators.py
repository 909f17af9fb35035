# src/core/decorators.py
from __future__ import annotations
import time, uuid
from functools import wraps
from typing import Callable, TypeVar

from services.logger_setup import get_logger

logger = get_logger()

F = TypeVar("F", bound=Callable)


def new_rid() -> str:
    return uuid.uuid4().hex[:8]


def log_operation(name: str) -> Callable[[F], F]:
    """
    Оборачивает публичную операцию: op_start / op_ok с длительностью на DEBUG,
    op_error на ERROR со стеком; исключение пробрасывается дальше.
    """

    def deco(fn: F) -> F:
        @wraps(fn)
        def wrapper(*args, **kwargs):
            rid = new_rid()
            logger.debug({"event": "op_start", "rid": rid, "op": name})
            t0 = time.monotonic()
            try:
                res = fn(*args, **kwargs)
            except ValueError as e:
                # плохой вход: без стека
                dt = int((time.monotonic() - t0) * 1000)
                logger.warning({"event": "op_rejected", "rid": rid, "op": name, "ms": dt, "err": str(e)})
                raise
            except Exception as e:
                dt = int((time.monotonic() - t0) * 1000)
                logger.error(
                    {"event": "op_error", "rid": rid, "op": name, "ms": dt, "err": str(e)},
                    exc_info=True,
                )
                raise
            dt = int((time.monotonic() - t0) * 1000)
            logger.debug({"event": "op_ok", "rid": rid, "op": name, "ms": dt})
            return res

        return wrapper  # type: ignore[return-value]

    return deco
