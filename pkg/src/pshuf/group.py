"""
群运算模块

安全素数 p = 2q + 1 下 Z_p* 的 q 阶子群 G_q，以及指数域 Z_q 上的标量运算。
所有随机性都来自调用方注入的 random.Random 实例，库内部不读取系统熵。
"""

import random
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Iterable

import gmpy2

from .exceptions import ParameterError, ValidationError

Scalar = int
GroupElement = int


class Preset(str, Enum):
    """群参数预设"""
    TOY = "toy"
    TEST160 = "test160"
    PROD2048 = "prod2048"


# RFC 3526 第 14 组（2048 位 MODP 安全素数）
_PROD2048_P = int(
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD1"
    "29024E088A67CC74020BBEA63B139B22514A08798E3404DD"
    "EF9519B3CD3A431B302B0A6DF25F14374FE1356D6D51C245"
    "E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3D"
    "C2007CB8A163BF0598DA48361C55D39A69163FA8FD24CF5F"
    "83655D23DCA3AD961C62F356208552BB9ED529077096966D"
    "670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B"
    "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9"
    "DE2BCBF6955817183995497CEA956AE515D2261898FA0510"
    "15728E5A8AACAA68FFFFFFFFFFFFFFFF",
    16,
)

_PRESETS: Dict[Preset, Dict[str, int]] = {
    Preset.TOY: {"p": 23, "q": 11, "g": 2},
    Preset.TEST160: {
        "p": 0x1B81D0DFF08EAED5848FABD3634DA132CE235FA67,
        "q": 0xDC0E86FF847576AC247D5E9B1A6D0996711AFD33,
        "g": 4,
    },
    Preset.PROD2048: {
        "p": _PROD2048_P,
        "q": (_PROD2048_P - 1) // 2,
        "g": 4,
    },
}


@dataclass(frozen=True)
class GroupParams:
    """群参数 (p, q, g)"""
    p: int
    q: int
    g: GroupElement

    def validate(self) -> None:
        """检查 p、q 为素数，p = 2q + 1，g 为 q 阶子群的非单位元"""
        errors = []
        if self.p != 2 * self.q + 1:
            errors.append(f"p != 2q + 1 (p={self.p}, q={self.q})")
        if not gmpy2.is_prime(self.q):
            errors.append(f"q 不是素数: {self.q}")
        if not gmpy2.is_prime(self.p):
            errors.append(f"p 不是素数: {self.p}")
        if not 1 < self.g < self.p:
            errors.append(f"生成元超出范围: {self.g}")
        elif self.p > 2 and int(gmpy2.powmod(self.g, self.q, self.p)) != 1:
            errors.append(f"生成元不在 q 阶子群中: {self.g}")

        if errors:
            raise ParameterError("群参数无效: " + "; ".join(errors),
                                 details={"errors": errors})

    # 群运算

    def exp(self, base: GroupElement, e: Scalar) -> GroupElement:
        """base^e mod p，指数先约化到 Z_q"""
        return int(gmpy2.powmod(base, e % self.q, self.p))

    def mul(self, a: GroupElement, b: GroupElement) -> GroupElement:
        return a * b % self.p

    def inv(self, a: GroupElement) -> GroupElement:
        return int(gmpy2.invert(a, self.p))

    def div(self, a: GroupElement, b: GroupElement) -> GroupElement:
        return a * self.inv(b) % self.p

    def prod(self, elements: Iterable[GroupElement]) -> GroupElement:
        """左折叠连乘，空乘积为 1"""
        acc = 1
        for x in elements:
            acc = acc * x % self.p
        return acc

    # 标量运算

    def scalar_add(self, a: Scalar, b: Scalar) -> Scalar:
        return (a + b) % self.q

    def scalar_sub(self, a: Scalar, b: Scalar) -> Scalar:
        return (a - b) % self.q

    def scalar_mul(self, a: Scalar, b: Scalar) -> Scalar:
        return a * b % self.q

    def scalar_neg(self, a: Scalar) -> Scalar:
        return -a % self.q

    def scalar_inv(self, a: Scalar) -> Scalar:
        """Z_q 中的乘法逆元"""
        if a % self.q == 0:
            raise ValidationError("零元没有乘法逆元", details={"value": a})
        return int(gmpy2.invert(a, self.q))

    def scalar_div(self, a: Scalar, b: Scalar) -> Scalar:
        return a * self.scalar_inv(b) % self.q

    # 随机采样

    def random_scalar(self, rng: random.Random) -> Scalar:
        """Z_q 上的均匀标量"""
        return rng.randrange(self.q)

    def random_element(self, rng: random.Random) -> GroupElement:
        """G_q 上的均匀元素"""
        return self.exp(self.g, self.random_scalar(rng))

    # 成员判定

    def is_member(self, x: int) -> bool:
        """x 属于 q 阶子群"""
        if not isinstance(x, int) or not 1 <= x < self.p:
            return False
        return int(gmpy2.powmod(x, self.q, self.p)) == 1

    def is_scalar(self, x: int) -> bool:
        return isinstance(x, int) and 0 <= x < self.q

    def require_member(self, x: int, what: str = "群元素") -> GroupElement:
        if not self.is_member(x):
            raise ValidationError(f"{what}不是子群成员", details={"value": hex(x) if isinstance(x, int) else str(x)})
        return x

    def to_dict(self) -> Dict[str, Any]:
        return {"p": self.p, "q": self.q, "g": self.g}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GroupParams":
        params = cls(p=data["p"], q=data["q"], g=data["g"])
        params.validate()
        return params


def gen_params(preset: str = "test160") -> GroupParams:
    """返回预设群参数"""
    try:
        key = Preset(preset)
    except ValueError:
        raise ParameterError(
            f"未知的群参数预设: {preset}",
            details={"preset": preset, "available": [p.value for p in Preset]}
        )
    return GroupParams(**_PRESETS[key])
