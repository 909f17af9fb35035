# src/services/__init__.py
# Логгер и настройки из окружения; здесь только лёгкие модули без numpy.
from . import logger_setup, util

__all__ = ["logger_setup", "util"]
