"""
ElGamal 加密模块

加密、重加密以及宽度为 w 的密文向量运算（分量乘、幂、逆），供验证方程使用。
dec 只作为测试与命令行的解密预言机，证明与验证路径从不需要私钥。
"""

import random
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .exceptions import ShapeMismatchError, ValidationError
from .group import GroupElement, GroupParams, Scalar


@dataclass(frozen=True)
class KeyPair:
    """ElGamal 密钥对，pk = g^sk"""
    pk: GroupElement
    sk: Optional[Scalar] = None

    @classmethod
    def from_secret(cls, params: GroupParams, sk: Scalar) -> "KeyPair":
        return cls(pk=params.exp(params.g, sk), sk=sk % params.q)

    def public(self) -> "KeyPair":
        return KeyPair(pk=self.pk)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"pk": self.pk}
        if self.sk is not None:
            data["sk"] = self.sk
        return data

    @classmethod
    def from_dict(cls, params: GroupParams, data: Dict[str, Any]) -> "KeyPair":
        pk = params.require_member(data["pk"], "公钥")
        sk = data.get("sk")
        if sk is not None and params.exp(params.g, sk) != pk:
            raise ValidationError("私钥与公钥不匹配")
        return cls(pk=pk, sk=sk)


@dataclass(frozen=True)
class Ciphertext:
    """ElGamal 密文 (a, b) = (g^r, pk^r * m)"""
    a: GroupElement
    b: GroupElement

    def to_list(self) -> List[int]:
        return [self.a, self.b]


@dataclass(frozen=True)
class CiphertextVector:
    """宽度为 w 的密文向量，混洗的基本单位"""
    entries: Tuple[Ciphertext, ...]

    @property
    def width(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, index: int) -> Ciphertext:
        return self.entries[index]

    def to_list(self) -> List[List[int]]:
        return [e.to_list() for e in self.entries]

    @classmethod
    def from_list(cls, params: GroupParams, data: Sequence[Sequence[int]]) -> "CiphertextVector":
        entries = []
        for pair in data:
            if len(pair) != 2:
                raise ShapeMismatchError("密文必须是二元组", expected=2, actual=len(pair))
            a = params.require_member(pair[0], "密文分量")
            b = params.require_member(pair[1], "密文分量")
            entries.append(Ciphertext(a, b))
        return cls(tuple(entries))

    def is_member_of(self, params: GroupParams) -> bool:
        return all(params.is_member(e.a) and params.is_member(e.b) for e in self.entries)


def require_uniform_width(vectors: Sequence[CiphertextVector],
                          width: Optional[int] = None) -> int:
    """所有密文向量宽度一致，返回宽度"""
    if not vectors:
        raise ShapeMismatchError("密文向量列表为空", expected=">=1", actual=0)
    w = vectors[0].width if width is None else width
    for x in vectors:
        if x.width != w:
            raise ShapeMismatchError("密文向量宽度不一致", expected=w, actual=x.width)
    if w < 1:
        raise ShapeMismatchError("密文宽度必须至少为 1", expected=">=1", actual=w)
    return w


def keygen(params: GroupParams, rng: random.Random) -> KeyPair:
    """sk 在 [1, q) 中均匀采样"""
    sk = 1 + rng.randrange(params.q - 1)
    return KeyPair.from_secret(params, sk)


def enc(params: GroupParams, pk: GroupElement, m: GroupElement, r: Scalar) -> Ciphertext:
    """(g^r, pk^r * m)"""
    if not params.is_member(m):
        raise ValidationError("明文不是子群成员", details={"m": m})
    return Ciphertext(params.exp(params.g, r), params.mul(params.exp(pk, r), m))


def enc_one(params: GroupParams, pk: GroupElement, r: Scalar) -> Ciphertext:
    """Enc(1, r)"""
    return enc(params, pk, 1, r)


def dec(params: GroupParams, sk: Scalar, e: Ciphertext) -> GroupElement:
    """b * (a^sk)^-1"""
    return params.div(e.b, params.exp(e.a, sk))


def reenc(params: GroupParams, pk: GroupElement, e: Ciphertext, r: Scalar) -> Ciphertext:
    """(a * g^r, b * pk^r)"""
    return Ciphertext(
        params.mul(e.a, params.exp(params.g, r)),
        params.mul(e.b, params.exp(pk, r)),
    )


def _check_width(expected: int, actual: int) -> None:
    if expected != actual:
        raise ShapeMismatchError("密文向量宽度不匹配", expected=expected, actual=actual)


def enc_vec(params: GroupParams, pk: GroupElement, ms: Sequence[GroupElement],
            rs: Sequence[Scalar]) -> CiphertextVector:
    _check_width(len(ms), len(rs))
    return CiphertextVector(tuple(enc(params, pk, m, r) for m, r in zip(ms, rs)))


def reenc_vec(params: GroupParams, pk: GroupElement, x: CiphertextVector,
              rs: Sequence[Scalar]) -> CiphertextVector:
    _check_width(x.width, len(rs))
    return CiphertextVector(tuple(reenc(params, pk, e, r) for e, r in zip(x.entries, rs)))


def dec_vec(params: GroupParams, sk: Scalar, x: CiphertextVector) -> Tuple[GroupElement, ...]:
    return tuple(dec(params, sk, e) for e in x.entries)


def cmul(params: GroupParams, x: CiphertextVector, y: CiphertextVector) -> CiphertextVector:
    """逐槽逐分量相乘"""
    _check_width(x.width, y.width)
    return CiphertextVector(tuple(
        Ciphertext(params.mul(ex.a, ey.a), params.mul(ex.b, ey.b))
        for ex, ey in zip(x.entries, y.entries)
    ))


def cexp(params: GroupParams, x: CiphertextVector, k: Scalar) -> CiphertextVector:
    """逐槽逐分量取幂"""
    return CiphertextVector(tuple(
        Ciphertext(params.exp(e.a, k), params.exp(e.b, k)) for e in x.entries
    ))


def cinv(params: GroupParams, x: CiphertextVector) -> CiphertextVector:
    return CiphertextVector(tuple(
        Ciphertext(params.inv(e.a), params.inv(e.b)) for e in x.entries
    ))


def cone(width: int) -> CiphertextVector:
    """全 (1, 1) 向量，cmul 的单位元"""
    return CiphertextVector(tuple(Ciphertext(1, 1) for _ in range(width)))


def cprod_exp(params: GroupParams, xs: Sequence[CiphertextVector],
              exps: Sequence[Scalar]) -> CiphertextVector:
    """prod_i xs_i^{exps_i}"""
    if len(xs) != len(exps):
        raise ShapeMismatchError("密文数量与指数数量不一致",
                                 expected=len(xs), actual=len(exps))
    width = require_uniform_width(xs)
    acc = cone(width)
    for x, k in zip(xs, exps):
        acc = cmul(params, acc, cexp(params, x, k))
    return acc
