"""
测试配置管理模块
"""

import json
import os
from unittest.mock import patch

import pytest

from src.pshuf.config import (
    FORMAT_VERSION,
    Config,
    ConfigManager,
    LoggingConfig,
    ProtocolConfig,
)
from src.pshuf.exceptions import ConfigurationError


class TestLoggingConfig:
    """测试LoggingConfig类"""

    def test_default_values(self):
        """测试默认值"""
        config = LoggingConfig()
        assert config.level == "INFO"
        assert config.service_name == "pshuf"

    @patch.dict(os.environ, {
        'PSHUF_LOG_LEVEL': 'DEBUG',
        'PSHUF_SERVICE_NAME': 'mixnet'
    })
    def test_from_env(self):
        """测试从环境变量加载"""
        config = LoggingConfig.from_env()
        assert config.level == "DEBUG"
        assert config.service_name == "mixnet"


class TestProtocolConfig:
    """测试ProtocolConfig类"""

    def test_default_values(self):
        config = ProtocolConfig()
        assert config.default_preset == "test160"
        assert config.max_demo_n == 8
        assert config.format_version == FORMAT_VERSION == "pshuf-1"

    @patch.dict(os.environ, {
        'PSHUF_DEFAULT_PRESET': 'toy',
        'PSHUF_MAX_DEMO_N': '4'
    })
    def test_from_env(self):
        """测试从环境变量加载"""
        config = ProtocolConfig.from_env()
        assert config.default_preset == "toy"
        assert config.max_demo_n == 4


class TestConfig:
    """测试主配置类"""

    @patch.dict(os.environ, {}, clear=True)
    def test_from_env_defaults(self):
        """测试无环境变量时的默认配置"""
        config = Config.from_env()
        config.validate()
        assert config.logging.level == "INFO"
        assert config.protocol.default_preset == "test160"

    @patch.dict(os.environ, {}, clear=True)
    def test_from_file(self, temp_dir):
        """测试从配置文件加载"""
        path = os.path.join(temp_dir, "config.json")
        with open(path, "w", encoding="utf-8") as f:
            json.dump({"logging": {"level": "WARNING"},
                       "protocol": {"default_preset": "toy", "max_demo_n": 5}}, f)

        config = Config.from_file(path)
        assert config.logging.level == "WARNING"
        assert config.logging.service_name == "pshuf"
        assert config.protocol.default_preset == "toy"
        assert config.protocol.max_demo_n == 5

    @patch.dict(os.environ, {'PSHUF_DEFAULT_PRESET': 'prod2048'}, clear=True)
    def test_env_overrides_file(self, temp_dir):
        """环境变量优先于文件"""
        path = os.path.join(temp_dir, "config.json")
        with open(path, "w", encoding="utf-8") as f:
            json.dump({"protocol": {"default_preset": "toy"}}, f)
        assert Config.from_file(path).protocol.default_preset == "prod2048"

    def test_from_missing_file(self, temp_dir):
        with pytest.raises(FileNotFoundError):
            Config.from_file(os.path.join(temp_dir, "missing.json"))

    def test_validate_collects_errors(self):
        """所有错误一次性报告"""
        config = Config(
            logging=LoggingConfig(level="LOUD"),
            protocol=ProtocolConfig(default_preset="tiny", max_demo_n=0, format_version="pshuf-0"),
        )
        with pytest.raises(ConfigurationError) as exc_info:
            config.validate()
        assert len(exc_info.value.details["errors"]) == 4

    def test_lowercase_level_is_valid(self):
        Config(logging=LoggingConfig(level="debug"), protocol=ProtocolConfig()).validate()

    def test_to_dict(self):
        config = Config(logging=LoggingConfig(), protocol=ProtocolConfig())
        assert config.to_dict() == {
            "logging": {"level": "INFO", "service_name": "pshuf"},
            "protocol": {"default_preset": "test160", "max_demo_n": 8,
                         "format_version": "pshuf-1"},
        }


class TestConfigManager:
    """测试配置管理器"""

    @patch.dict(os.environ, {}, clear=True)
    def test_caches_config(self):
        manager = ConfigManager()
        assert manager.config is manager.config

    @patch.dict(os.environ, {}, clear=True)
    def test_reload(self, temp_dir):
        path = os.path.join(temp_dir, "config.json")
        with open(path, "w", encoding="utf-8") as f:
            json.dump({"protocol": {"max_demo_n": 3}}, f)
        manager = ConfigManager(config_path=path)
        assert manager.config.protocol.max_demo_n == 3

        with open(path, "w", encoding="utf-8") as f:
            json.dump({"protocol": {"max_demo_n": 6}}, f)
        assert manager.reload_config().protocol.max_demo_n == 6

    @patch.dict(os.environ, {}, clear=True)
    def test_env_file(self, temp_dir):
        """从 .env 文件读取环境变量"""
        env_path = os.path.join(temp_dir, ".env")
        with open(env_path, "w", encoding="utf-8") as f:
            f.write("PSHUF_LOG_LEVEL=ERROR\n")
        config = ConfigManager(env_file=env_path).load_config()
        assert config.logging.level == "ERROR"

    @patch.dict(os.environ, {'PSHUF_MAX_DEMO_N': 'many'}, clear=True)
    def test_bad_integer(self):
        """无法解析的整数包装为配置错误"""
        with pytest.raises(ConfigurationError):
            ConfigManager().load_config()

    @patch.dict(os.environ, {}, clear=True)
    def test_invalid_json(self, temp_dir):
        path = os.path.join(temp_dir, "config.json")
        with open(path, "w", encoding="utf-8") as f:
            f.write("{broken")
        with pytest.raises(ConfigurationError):
            ConfigManager(config_path=path).load_config()

    @pytest.mark.parametrize("content", [
        [1, 2],
        "protocol",
        {"protocol": [8]},
        {"logging": "DEBUG"},
        {"protocol": {"max_demo_n": [8]}},
    ])
    @patch.dict(os.environ, {}, clear=True)
    def test_non_object_file(self, temp_dir, content):
        """顶层或配置段不是对象、整数字段不是数字时报配置错误"""
        path = os.path.join(temp_dir, "config.json")
        with open(path, "w", encoding="utf-8") as f:
            json.dump(content, f)
        with pytest.raises(ConfigurationError):
            ConfigManager(config_path=path).load_config()

    @patch.dict(os.environ, {'PSHUF_DEFAULT_PRESET': 'tiny'}, clear=True)
    def test_invalid_values(self):
        with pytest.raises(ConfigurationError):
            ConfigManager().load_config()
