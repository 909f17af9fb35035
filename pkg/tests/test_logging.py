# tests/test_logging.py
from __future__ import annotations
import hashlib, json, logging
from datetime import datetime, timedelta
from fractions import Fraction

import pytest

from core.decorators import log_operation, new_rid
from services.logger_setup import JsonFormatter, get_logger
from services.util import dump_json, fingerprint, now_iso


class ListHandler(logging.Handler):
    def __init__(self):
        super().__init__(level=logging.DEBUG)
        self.records: list[logging.LogRecord] = []

    def emit(self, record: logging.LogRecord) -> None:
        self.records.append(record)


@pytest.fixture
def captured():
    # propagate выключен, поэтому вешаем свой хендлер прямо на логгер
    logger = get_logger()
    handler = ListHandler()
    old_level = logger.level
    logger.setLevel(logging.DEBUG)
    logger.addHandler(handler)
    yield handler
    logger.removeHandler(handler)
    logger.setLevel(old_level)


def _record(msg, level=logging.INFO) -> logging.LogRecord:
    return logging.LogRecord("nilcone.test", level, __file__, 10, msg, None, None)


def test_json_formatter_merges_dicts():
    out = json.loads(JsonFormatter().format(_record({"event": "x", "value": Fraction(1, 2)})))
    assert out["event"] == "x"
    assert out["value"] == "1/2"
    assert out["level"] == "INFO"
    assert out["logger"] == "nilcone.test"


def test_json_formatter_plain_message():
    out = json.loads(JsonFormatter().format(_record("hello")))
    assert out["msg"] == "hello"


def test_get_logger_is_idempotent():
    a = get_logger("nilcone.idem")
    n = len(a.handlers)
    b = get_logger("nilcone.idem")
    assert a is b
    assert len(b.handlers) == n
    assert b.propagate is False


def test_log_operation_events(captured):
    @log_operation("double")
    def double(v):
        return 2 * v

    assert double(3) == 6
    events = [r.msg["event"] for r in captured.records]
    assert events[-2:] == ["op_start", "op_ok"]
    assert captured.records[-1].msg["op"] == "double"
    assert captured.records[-1].msg["rid"] == captured.records[-2].msg["rid"]


def test_log_operation_value_error_is_warning(captured):
    @log_operation("reject")
    def reject():
        raise ValueError("bad input")

    with pytest.raises(ValueError):
        reject()
    last = captured.records[-1]
    assert last.levelno == logging.WARNING
    assert last.msg["event"] == "op_rejected"
    assert last.exc_info is None


def test_log_operation_other_errors_are_errors(captured):
    @log_operation("crash")
    def crash():
        raise RuntimeError("boom")

    with pytest.raises(RuntimeError):
        crash()
    last = captured.records[-1]
    assert last.levelno == logging.ERROR
    assert last.msg["event"] == "op_error"
    assert last.exc_info is not None


def test_new_rid_shape():
    a, b = new_rid(), new_rid()
    assert len(a) == 8 and a != b


def test_dump_json():
    assert dump_json({"a": Fraction(3, 4), "b": {2, 1}}) == '{"a":"3/4","b":[1,2]}'
    with pytest.raises(TypeError):
        dump_json({"a": object()})


def test_fingerprint_is_key_order_independent():
    a = fingerprint({"b": [1, 2], "a": Fraction(1, 2)})
    assert a == fingerprint({"a": Fraction(1, 2), "b": [1, 2]})
    assert len(a) == 64 and a != fingerprint({"a": "1/3", "b": [1, 2]})
    assert a == hashlib.sha256(b'{"a":"1/2","b":[1,2]}').hexdigest()


def test_now_iso_is_utc_seconds():
    ts = datetime.fromisoformat(now_iso())
    assert ts.utcoffset() == timedelta(0)
    assert ts.microsecond == 0
