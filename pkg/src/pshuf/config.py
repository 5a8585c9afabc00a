"""
配置管理模块

运行时可调的只有日志与命令行行为：日志级别、服务名、默认群参数预设、抽取演示的 N 上限。
群参数预设本身、域分隔标签和文件格式版本属于格式定义，不在此处配置。

优先级：环境变量 > 配置文件 > 默认值。
"""

import json
import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from dotenv import load_dotenv

from .exceptions import ConfigurationError

VALID_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")
VALID_PRESETS = ("toy", "test160", "prod2048")
FORMAT_VERSION = "pshuf-1"

# 字段名 -> 环境变量
ENV_VARS: Dict[str, Dict[str, str]] = {
    "logging": {
        "level": "PSHUF_LOG_LEVEL",
        "service_name": "PSHUF_SERVICE_NAME",
    },
    "protocol": {
        "default_preset": "PSHUF_DEFAULT_PRESET",
        "max_demo_n": "PSHUF_MAX_DEMO_N",
    },
}


def _section_values(cls: type, section: str,
                    file_values: Optional[Mapping[str, Any]] = None) -> Dict[str, Any]:
    """合并一个配置段：环境变量覆盖文件值，按字段默认值的类型转换"""
    values: Dict[str, Any] = {}
    file_values = file_values or {}
    for f in fields(cls):
        env_name = ENV_VARS[section].get(f.name)
        raw = os.getenv(env_name) if env_name else None
        if raw is None:
            raw = file_values.get(f.name)
        if raw is None:
            continue
        values[f.name] = int(raw) if isinstance(f.default, int) else raw
    return values


@dataclass
class LoggingConfig:
    """日志配置"""
    level: str = "INFO"
    service_name: str = "pshuf"

    @classmethod
    def from_env(cls, file_values: Optional[Mapping[str, Any]] = None) -> "LoggingConfig":
        return cls(**_section_values(cls, "logging", file_values))


@dataclass
class ProtocolConfig:
    """命令行协议行为"""
    default_preset: str = "test160"
    max_demo_n: int = 8
    format_version: str = FORMAT_VERSION

    @classmethod
    def from_env(cls, file_values: Optional[Mapping[str, Any]] = None) -> "ProtocolConfig":
        return cls(**_section_values(cls, "protocol", file_values))


@dataclass
class Config:
    """主配置"""
    logging: LoggingConfig
    protocol: ProtocolConfig

    @classmethod
    def from_env(cls) -> "Config":
        return cls(logging=LoggingConfig.from_env(), protocol=ProtocolConfig.from_env())

    @classmethod
    def from_file(cls, config_path: str) -> "Config":
        """读取 JSON 配置文件，环境变量仍然优先"""
        config_file = Path(config_path)
        if not config_file.exists():
            raise FileNotFoundError(f"配置文件不存在: {config_path}")

        data = json.loads(config_file.read_text(encoding="utf-8"))
        if not isinstance(data, dict):
            raise ConfigurationError(f"配置文件顶层必须是 JSON 对象: {config_path}")
        for section in ENV_VARS:
            if not isinstance(data.get(section, {}), dict):
                raise ConfigurationError(f"配置段 {section} 必须是 JSON 对象",
                                         details={"section": section})
        return cls(
            logging=LoggingConfig.from_env(data.get("logging")),
            protocol=ProtocolConfig.from_env(data.get("protocol")),
        )

    def validate(self) -> None:
        """收集所有错误后一次抛出"""
        checks = (
            (self.logging.level.upper() in VALID_LOG_LEVELS,
             f"日志级别无效: {self.logging.level}"),
            (self.protocol.default_preset in VALID_PRESETS,
             f"默认群参数预设无效: {self.protocol.default_preset}"),
            (self.protocol.max_demo_n >= 1,
             f"抽取演示的最大 N 无效: {self.protocol.max_demo_n}"),
            (self.protocol.format_version == FORMAT_VERSION,
             f"不支持的文件格式版本: {self.protocol.format_version}"),
        )
        errors = [message for ok, message in checks if not ok]
        if errors:
            raise ConfigurationError(
                "配置验证失败:\n" + "\n".join(f"- {error}" for error in errors),
                details={"errors": errors}
            )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class ConfigManager:
    """加载、缓存并按需重新加载配置"""

    def __init__(self, config_path: Optional[str] = None, env_file: Optional[str] = None):
        self._config: Optional[Config] = None
        self._config_path = config_path
        self._env_file = env_file

    def load_config(self) -> Config:
        if self._env_file:
            load_dotenv(self._env_file, override=False)

        try:
            if self._config_path and os.path.exists(self._config_path):
                config = Config.from_file(self._config_path)
            else:
                config = Config.from_env()
        except (ValueError, TypeError) as e:
            raise ConfigurationError(f"配置加载失败: {e}")

        config.validate()
        self._config = config
        return config

    @property
    def config(self) -> Config:
        if self._config is None:
            self._config = self.load_config()
        return self._config

    def reload_config(self) -> Config:
        self._config = None
        return self.load_config()

