"""
序列化模块

规范 JSON 容器 {version, kind, body}：键按固定插入顺序、无多余空白、
整数一律为小写十六进制（无前导零）。该字节流同时是 Fiat-Shamir 哈希的输入，
是规范性的格式定义，版本为 "pshuf-1"。
"""

import json
import re
from enum import Enum
from pathlib import Path
from typing import Annotated, Any, Dict, List, Optional, Type, Union

from pydantic import BaseModel, ConfigDict, Field, StringConstraints, field_validator
from pydantic import ValidationError as PydanticValidationError

from .commit import CommitmentKey
from .config import FORMAT_VERSION
from .elgamal import CiphertextVector, KeyPair
from .exceptions import EnvelopeFormatError, ResourceNotFoundError, ValidationError
from .group import GroupParams
from .shuffle_core import ShuffleStatement, ShuffleWitness
from .sigma import Transcript

HEX_PATTERN = r"^(0|[1-9a-f][0-9a-f]*)$"
_HEX_RE = re.compile(HEX_PATTERN)

Hex = Annotated[str, StringConstraints(pattern=HEX_PATTERN)]
HexPair = Annotated[List[Hex], Field(min_length=2, max_length=2)]


class EnvelopeKind(str, Enum):
    """文件容器类型"""
    PARAMS = "params"
    COMMIT_KEY = "commit-key"
    KEYPAIR = "keypair"
    CIPHERTEXTS = "ciphertexts"
    STATEMENT = "statement"
    PROOF = "proof"
    WITNESS = "witness"
    TRANSCRIPT = "transcript"


class _Body(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ParamsBody(_Body):
    p: Hex = Field(..., description="安全素数模数")
    q: Hex = Field(..., description="子群阶")
    g: Hex = Field(..., description="生成元")


class KeyBody(_Body):
    h: Hex
    basis: List[Hex] = Field(..., min_length=1, description="h_1..h_N")


class CommitKeyBody(KeyBody):
    params: ParamsBody


class KeypairBody(_Body):
    params: ParamsBody
    pk: Hex
    sk: Optional[Hex] = Field(default=None, description="公钥文件中省略")


class CiphertextsBody(_Body):
    ciphertexts: List[List[HexPair]] = Field(..., min_length=1)


class StatementBody(_Body):
    params: ParamsBody
    key: KeyBody
    pk: Hex
    c: List[Hex] = Field(..., min_length=1)
    inputs: List[List[HexPair]]
    outputs: List[List[HexPair]]


class WitnessBody(_Body):
    M: List[List[Hex]]
    r: List[Hex]
    R: List[List[Hex]]


class MessageBody(_Body):
    c_hat: List[Hex]
    t1: Hex
    t2: Hex
    t3: Hex
    t4: List[HexPair]
    t_hat: List[Hex]


class ResponseBody(_Body):
    s1: Hex
    s2: Hex
    s3: Hex
    s4: List[Hex]
    s_hat: List[Hex]
    s_prime: List[Hex]


class ProofBody(_Body):
    msg2: MessageBody
    resp: ResponseBody


class TranscriptBody(_Body):
    u: List[Hex]
    msg2: MessageBody
    c: Hex
    resp: ResponseBody


BODY_MODELS: Dict[EnvelopeKind, Type[_Body]] = {
    EnvelopeKind.PARAMS: ParamsBody,
    EnvelopeKind.COMMIT_KEY: CommitKeyBody,
    EnvelopeKind.KEYPAIR: KeypairBody,
    EnvelopeKind.CIPHERTEXTS: CiphertextsBody,
    EnvelopeKind.STATEMENT: StatementBody,
    EnvelopeKind.PROOF: ProofBody,
    EnvelopeKind.WITNESS: WitnessBody,
    EnvelopeKind.TRANSCRIPT: TranscriptBody,
}


class FileEnvelope(BaseModel):
    """{version, kind, body}"""
    model_config = ConfigDict(extra="forbid")

    version: str = Field(..., description="格式版本")
    kind: EnvelopeKind = Field(..., description="容器类型")
    body: Dict[str, Any] = Field(..., description="与类型对应的记录")

    @field_validator('version')
    @classmethod
    def validate_version(cls, v: str) -> str:
        if v != FORMAT_VERSION:
            raise ValueError(f"不支持的格式版本: {v}")
        return v


def to_hex(n: int) -> str:
    """非负整数的规范十六进制"""
    if n < 0:
        raise ValidationError("只能序列化非负整数", details={"value": n})
    return format(n, "x")


def from_hex(s: str) -> int:
    if not isinstance(s, str) or not _HEX_RE.match(s):
        raise EnvelopeFormatError(f"不是规范十六进制整数: {s!r}")
    return int(s, 16)


def _encode_tree(obj: Any) -> Any:
    if isinstance(obj, bool):
        raise ValidationError("容器中不允许布尔值")
    if isinstance(obj, int):
        return to_hex(obj)
    if isinstance(obj, dict):
        return {k: _encode_tree(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode_tree(v) for v in obj]
    return obj


def _decode_tree(obj: Any) -> Any:
    if isinstance(obj, str):
        return from_hex(obj)
    if isinstance(obj, dict):
        return {k: _decode_tree(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_decode_tree(v) for v in obj]
    return obj


def canonical_bytes(obj: Any) -> bytes:
    """紧凑 JSON，保持键的插入顺序，整数转为十六进制字符串"""
    return json.dumps(_encode_tree(obj), separators=(",", ":"), ensure_ascii=True).encode("ascii")


def envelope_bytes(kind: Union[EnvelopeKind, str], body: Dict[str, Any]) -> bytes:
    """完整容器的规范字节"""
    kind = EnvelopeKind(kind)
    encoded = _encode_tree(body)
    try:
        BODY_MODELS[kind].model_validate(encoded)
    except PydanticValidationError as e:
        raise EnvelopeFormatError(f"{kind.value} 内容不符合格式: {e.error_count()} 处错误")
    envelope = {"version": FORMAT_VERSION, "kind": kind.value, "body": encoded}
    return json.dumps(envelope, separators=(",", ":"), ensure_ascii=True).encode("ascii")


def parse_envelope(data: Union[bytes, str], expected_kind: Union[EnvelopeKind, str],
                   path: Optional[str] = None) -> Dict[str, Any]:
    """校验容器并返回整数化的 body"""
    expected = EnvelopeKind(expected_kind)
    try:
        raw = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise EnvelopeFormatError(f"JSON 解析失败: {e}", path=path)

    try:
        envelope = FileEnvelope.model_validate(raw)
    except PydanticValidationError as e:
        raise EnvelopeFormatError(f"容器格式错误: {e.error_count()} 处错误", path=path)

    if envelope.kind != expected:
        raise EnvelopeFormatError(
            f"容器类型不匹配: 期望 {expected.value}，实际 {envelope.kind.value}", path=path
        )

    try:
        BODY_MODELS[expected].model_validate(envelope.body)
    except PydanticValidationError as e:
        raise EnvelopeFormatError(
            f"{expected.value} 内容不符合格式: {e.error_count()} 处错误",
            path=path,
            details={"errors": [err["msg"] for err in e.errors()]}
        )
    return _decode_tree(envelope.body)


def dump_envelope(kind: Union[EnvelopeKind, str], body: Dict[str, Any], path: str) -> bytes:
    """写出规范字节（无结尾换行），返回写出的内容"""
    data = envelope_bytes(kind, body)
    Path(path).write_bytes(data)
    return data


def load_envelope(path: str, expected_kind: Union[EnvelopeKind, str]) -> Dict[str, Any]:
    file_path = Path(path)
    if not file_path.exists():
        raise ResourceNotFoundError(f"文件不存在: {path}", details={"path": path})
    return parse_envelope(file_path.read_bytes(), expected_kind, path=path)


# 领域对象的读写辅助

def statement_bytes(statement: ShuffleStatement) -> bytes:
    return envelope_bytes(EnvelopeKind.STATEMENT, statement.to_dict())


def load_params(path: str) -> GroupParams:
    return GroupParams.from_dict(load_envelope(path, EnvelopeKind.PARAMS))


def load_commit_key(path: str, params: Optional[GroupParams] = None) -> CommitmentKey:
    body = load_envelope(path, EnvelopeKind.COMMIT_KEY)
    file_params = GroupParams.from_dict(body["params"])
    if params is not None and file_params != params:
        raise ValidationError("承诺参数文件的群参数与指定参数不一致", details={"path": path})
    return CommitmentKey.from_dict(file_params, body)


def load_keypair(path: str, params: Optional[GroupParams] = None) -> KeyPair:
    body = load_envelope(path, EnvelopeKind.KEYPAIR)
    file_params = GroupParams.from_dict(body["params"])
    if params is not None and file_params != params:
        raise ValidationError("密钥文件的群参数与指定参数不一致", details={"path": path})
    return KeyPair.from_dict(file_params, body)


def load_ciphertexts(path: str, params: GroupParams) -> List[CiphertextVector]:
    body = load_envelope(path, EnvelopeKind.CIPHERTEXTS)
    return [CiphertextVector.from_list(params, x) for x in body["ciphertexts"]]


def ciphertexts_body(vectors: List[CiphertextVector]) -> Dict[str, Any]:
    return {"ciphertexts": [x.to_list() for x in vectors]}


def load_statement(path: str) -> ShuffleStatement:
    return ShuffleStatement.from_dict(load_envelope(path, EnvelopeKind.STATEMENT))


def load_witness(path: str, params: GroupParams) -> ShuffleWitness:
    return ShuffleWitness.from_dict(params, load_envelope(path, EnvelopeKind.WITNESS))


def load_transcript(path: str) -> Transcript:
    return Transcript.from_dict(load_envelope(path, EnvelopeKind.TRANSCRIPT))
