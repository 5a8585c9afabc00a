"""
异常处理模块

定义混洗证明库的自定义异常类和错误处理机制。
"""

from typing import Optional, Dict, Any
import json


class PShufError(Exception):
    """混洗证明库基础异常类"""

    def __init__(self, message: str, error_code: Optional[str] = None,
                 details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.error_code = error_code or self.__class__.__name__
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        """转换为字典格式"""
        return {
            "error": {
                "code": self.error_code,
                "message": self.message,
                "details": self.details
            }
        }

    def to_json(self) -> str:
        """转换为JSON字符串"""
        return json.dumps(self.to_dict(), ensure_ascii=False)


class ConfigurationError(PShufError):
    """配置错误"""
    pass


class ValidationError(PShufError):
    """参数验证错误"""
    pass


class ParameterError(ValidationError):
    """群参数错误（非安全素数、未知预设等）"""
    pass


class ShapeMismatchError(ValidationError):
    """向量长度、矩阵维度或密文宽度不匹配"""

    def __init__(self, message: str, expected: Any = None, actual: Any = None, **kwargs):
        super().__init__(message, **kwargs)
        if expected is not None:
            self.details["expected"] = expected
        if actual is not None:
            self.details["actual"] = actual


class SingularMatrixError(PShufError):
    """矩阵在 Z_q 上不可逆；调用方应重新采样挑战"""

    def __init__(self, message: str, **kwargs):
        super().__init__(message, **kwargs)
        self.details["retryable"] = True


class RelationViolationError(PShufError):
    """见证不满足陈述关系，证明者拒绝证明"""
    pass


class ProverStateError(PShufError):
    """证明者状态被重复使用"""
    pass


class TranscriptError(PShufError):
    """抽取器输入的对话记录不满足前置条件"""
    pass


class ExtractionError(PShufError):
    """见证抽取失败"""
    pass


class MoreWitnessesRequired(ExtractionError):
    """需要额外一个基础见证（N+1 次抽取）"""

    def __init__(self, message: str, supplied: int, **kwargs):
        super().__init__(message, **kwargs)
        self.details["supplied"] = supplied
        self.details["retryable"] = True

    @property
    def supplied(self) -> int:
        """已提供的基础见证数量"""
        return self.details.get("supplied", 0)


class EnvelopeFormatError(PShufError):
    """文件容器格式错误"""

    def __init__(self, message: str, path: Optional[str] = None, **kwargs):
        super().__init__(message, **kwargs)
        if path:
            self.details["path"] = path


class ResourceNotFoundError(PShufError):
    """资源未找到错误"""
    pass


# 错误代码映射
ERROR_CODE_MAPPING = {
    "CONFIGURATION_ERROR": ConfigurationError,
    "VALIDATION_ERROR": ValidationError,
    "PARAMETER_ERROR": ParameterError,
    "SHAPE_MISMATCH": ShapeMismatchError,
    "SINGULAR_MATRIX": SingularMatrixError,
    "RELATION_VIOLATION": RelationViolationError,
    "PROVER_STATE_ERROR": ProverStateError,
    "TRANSCRIPT_ERROR": TranscriptError,
    "EXTRACTION_ERROR": ExtractionError,
    "ENVELOPE_FORMAT_ERROR": EnvelopeFormatError,
    "RESOURCE_NOT_FOUND": ResourceNotFoundError,
    "PSHUF_ERROR": PShufError
}


class ErrorHandler:
    """错误处理器"""

    @staticmethod
    def create_error(error_code: str, message: str,
                     details: Optional[Dict[str, Any]] = None) -> PShufError:
        """根据错误代码创建异常"""
        error_class = ERROR_CODE_MAPPING.get(error_code, PShufError)
        return error_class(message, error_code=error_code, details=details)

    @staticmethod
    def wrap_exception(exc: Exception, context: Optional[str] = None) -> PShufError:
        """包装标准异常为库异常"""
        if isinstance(exc, PShufError):
            return exc

        message = str(exc)
        if context:
            message = f"{context}: {message}"

        details = {"original_exception": type(exc).__name__}

        # JSONDecodeError 是 ValueError 的子类，必须先判断
        if isinstance(exc, json.JSONDecodeError):
            return EnvelopeFormatError(message, details=details)
        elif isinstance(exc, FileNotFoundError):
            return ResourceNotFoundError(message, details=details)
        elif isinstance(exc, (ValueError, TypeError, KeyError)):
            return ValidationError(message, details=details)
        else:
            return PShufError(message, details=details)
