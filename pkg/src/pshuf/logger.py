"""
结构化日志模块

每条日志是一行紧凑 JSON，写入 stderr；命令行报告独占 stdout。
证明与抽取过程可以挂上会话 ID，便于把同一次回退产生的多条日志串起来。
私钥、见证、随机数与种子不进入日志。
"""

import json
import logging
import sys
import traceback
from contextlib import contextmanager
from contextvars import ContextVar
from datetime import datetime
from typing import Any, Dict, Iterator, Optional

DEFAULT_SERVICE = "pshuf"

# 键名包含这些片段时值被替换为 "***"
SENSITIVE_KEYS = ("sk", "secret", "witness", "seed", "randomness", "omega")
REDACTED = "***"

_SESSION_ID: ContextVar[Optional[str]] = ContextVar("pshuf_session_id", default=None)


def redact(value: Any) -> Any:
    """递归替换敏感键的值"""
    if isinstance(value, dict):
        return {
            key: REDACTED if any(s in str(key).lower() for s in SENSITIVE_KEYS) else redact(item)
            for key, item in value.items()
        }
    if isinstance(value, (list, tuple)):
        return [redact(item) for item in value]
    return value


class StructuredFormatter(logging.Formatter):
    """LogRecord -> 单行 JSON"""

    def __init__(self, service_name: str = DEFAULT_SERVICE):
        super().__init__()
        self.service_name = service_name

    def format(self, record: logging.LogRecord) -> str:
        entry: Dict[str, Any] = {
            "timestamp": datetime.fromtimestamp(record.created).isoformat(),
            "level": record.levelname,
            "service": self.service_name,
            "logger": record.name,
            "message": record.getMessage(),
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno,
        }
        if record.exc_info:
            exc_type, exc_value, _ = record.exc_info
            entry["exception"] = {
                "type": exc_type.__name__ if exc_type else None,
                "message": str(exc_value) if exc_value else None,
                "traceback": traceback.format_exception(*record.exc_info),
            }
        for attr, key in (("extra_data", "data"), ("session_id", "session_id")):
            value = getattr(record, attr, None)
            if value is not None:
                entry[key] = value
        # 群元素是大整数，JSON 原样保留
        return json.dumps(entry, ensure_ascii=False, separators=(",", ":"), default=str)


class StderrHandler(logging.StreamHandler):
    """输出时才解析 sys.stderr，可被显式替换为其他流"""

    def __init__(self) -> None:
        super().__init__()
        self._stream: Optional[Any] = None

    @property
    def stream(self) -> Any:  # type: ignore[override]
        return self._stream if self._stream is not None else sys.stderr

    @stream.setter
    def stream(self, value: Any) -> None:
        self._stream = value


class PShufLogger:
    """带上下文字段与会话 ID 的日志器"""

    def __init__(self, name: str, level: str = "INFO", service_name: str = DEFAULT_SERVICE):
        self.logger = logging.getLogger(name)
        self.service_name = service_name
        self._setup_logger(level)

    def _setup_logger(self, level: str) -> None:
        numeric_level = getattr(logging, level.upper(), logging.INFO)
        handler = StderrHandler()
        handler.setLevel(numeric_level)
        handler.setFormatter(StructuredFormatter(self.service_name))

        self.logger.handlers.clear()
        self.logger.addHandler(handler)
        self.logger.setLevel(numeric_level)
        self.logger.propagate = False

    # 会话：保存在 ContextVar 中，每个线程与协程各自独立

    def set_session_id(self, session_id: str) -> None:
        _SESSION_ID.set(session_id)

    def clear_session_id(self) -> None:
        _SESSION_ID.set(None)

    @property
    def session_id(self) -> Optional[str]:
        return _SESSION_ID.get()

    @contextmanager
    def session(self, session_id: str) -> Iterator[str]:
        """with 块内的日志都带上 session_id，退出时恢复外层的值"""
        token = _SESSION_ID.set(session_id)
        try:
            yield session_id
        finally:
            _SESSION_ID.reset(token)

    # 输出

    def _emit(self, level: int, message: str, context: Dict[str, Any],
              exc_info: bool = False) -> None:
        if not self.logger.isEnabledFor(level):
            return
        extra: Dict[str, Any] = {}
        session_id = _SESSION_ID.get()
        if session_id:
            extra["session_id"] = session_id
        if context:
            extra["extra_data"] = context
        self.logger.log(level, message, exc_info=exc_info, extra=extra, stacklevel=3)

    def debug(self, message: str, **context: Any) -> None:
        self._emit(logging.DEBUG, message, context)

    def info(self, message: str, **context: Any) -> None:
        self._emit(logging.INFO, message, context)

    def warning(self, message: str, **context: Any) -> None:
        self._emit(logging.WARNING, message, context)

    def error(self, message: str, **context: Any) -> None:
        self._emit(logging.ERROR, message, context)

    def critical(self, message: str, **context: Any) -> None:
        self._emit(logging.CRITICAL, message, context)

    def exception(self, message: str, **context: Any) -> None:
        """ERROR 级别，附带当前异常"""
        self._emit(logging.ERROR, message, context, exc_info=True)

    # 领域事件

    def log_protocol_event(self, event: str, **context: Any) -> None:
        """承诺、回应、验证、抽取等协议步骤，DEBUG 级别"""
        self._emit(logging.DEBUG, f"协议事件: {event}", {"event": event, **context})

    def log_command(self, command: str, parameters: Dict[str, Any],
                    status: str, duration: float, **context: Any) -> None:
        """子命令执行结果；参数中的敏感值被替换"""
        self._emit(logging.INFO, f"命令执行: {command}", {
            "command": command,
            "parameters": self._filter_sensitive_data(parameters),
            "status": status,
            "duration_ms": round(duration * 1000, 2),
            **context,
        })

    def _filter_sensitive_data(self, data: Dict[str, Any]) -> Dict[str, Any]:
        return redact(data)


class LoggerManager:
    """按名称缓存日志器，统一调整级别与服务名"""

    def __init__(self) -> None:
        self._loggers: Dict[str, PShufLogger] = {}
        self._default_level = "INFO"
        self._service_name = DEFAULT_SERVICE

    def get_logger(self, name: str, level: Optional[str] = None) -> PShufLogger:
        if name not in self._loggers:
            self._loggers[name] = PShufLogger(name, level or self._default_level,
                                              self._service_name)
        return self._loggers[name]

    def _reconfigure(self, level: Optional[str] = None) -> None:
        for logger in self._loggers.values():
            logger.service_name = self._service_name
            logger._setup_logger(level or logging.getLevelName(logger.logger.level))

    def set_level(self, level: str) -> None:
        self._default_level = level
        self._reconfigure(level)

    def set_service_name(self, service_name: str) -> None:
        self._service_name = service_name
        self._reconfigure()


logger_manager = LoggerManager()


def get_logger(name: str, level: Optional[str] = None) -> PShufLogger:
    return logger_manager.get_logger(name, level)


def set_log_level(level: str) -> None:
    logger_manager.set_level(level)


def set_service_name(service_name: str) -> None:
    logger_manager.set_service_name(service_name)
