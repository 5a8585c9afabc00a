"""
承诺模块

Pedersen 承诺 PC、扩展 Pedersen 承诺 EPC、按列的矩阵承诺，以及承诺绑定性破解的检查。
"""

import hashlib
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .exceptions import ShapeMismatchError, ValidationError
from .group import GroupElement, GroupParams, Scalar
from .logger import get_logger
from .permmat import Permutation, ScalarMatrix

logger = get_logger(__name__)

HASH_TO_GROUP_TAG = b"PSHUF/h2g"


@dataclass(frozen=True)
class CommitmentKey:
    """承诺参数 h, h_1..h_N"""
    params: GroupParams
    h: GroupElement
    basis: Tuple[GroupElement, ...]

    @property
    def n(self) -> int:
        return len(self.basis)

    @property
    def h1(self) -> GroupElement:
        return self.basis[0]

    def validate(self) -> None:
        elements = (self.h,) + tuple(self.basis)
        if not self.basis:
            raise ValidationError("承诺参数至少需要一个基元素")
        for x in elements:
            self.params.require_member(x, "承诺参数")
            if x == 1:
                raise ValidationError("承诺参数不能为单位元")
        if len(set(elements)) != len(elements):
            raise ValidationError("承诺参数必须两两不同")

    def to_dict(self) -> Dict[str, Any]:
        return {"h": self.h, "basis": list(self.basis)}

    @classmethod
    def from_dict(cls, params: GroupParams, data: Dict[str, Any]) -> "CommitmentKey":
        key = cls(params=params, h=data["h"], basis=tuple(data["basis"]))
        key.validate()
        return key


@dataclass(frozen=True)
class CommitmentBreak:
    """同一 EPC 值的两个不同打开 (m, r) 与 (m', r')"""
    m: Tuple[Scalar, ...]
    r: Scalar
    m_prime: Tuple[Scalar, ...]
    r_prime: Scalar

    def to_dict(self) -> Dict[str, Any]:
        return {
            "m": list(self.m),
            "r": self.r,
            "m_prime": list(self.m_prime),
            "r_prime": self.r_prime,
        }


def _hash_to_group(params: GroupParams, seed: bytes, index: int, counter: int) -> int:
    """计数器模式扩展到比 p 多 128 位后约化，再平方进入子群"""
    width = (params.p.bit_length() + 7) // 8 + 16
    stream = b""
    block = 0
    while len(stream) < width:
        stream += hashlib.sha256(
            HASH_TO_GROUP_TAG + seed
            + index.to_bytes(4, "big")
            + counter.to_bytes(4, "big")
            + block.to_bytes(4, "big")
        ).digest()
        block += 1
    x = int.from_bytes(stream[:width], "big") % params.p
    return x * x % params.p


def gen_commit_key(params: GroupParams, n: int, seed: bytes) -> CommitmentKey:
    """由种子确定性地派生 h 与 h_1..h_N"""
    if n < 1:
        raise ValidationError("N 必须至少为 1", details={"n": n})
    if n + 1 > params.q - 1:
        raise ValidationError(
            "子群中不存在足够多的互不相同的非单位元",
            details={"n": n, "q": params.q}
        )

    elements: List[int] = []
    for index in range(n + 1):
        counter = 0
        while True:
            y = _hash_to_group(params, seed, index, counter)
            counter += 1
            if y in (0, 1) or y in elements:
                continue
            elements.append(y)
            break

    logger.debug("承诺参数已生成", n=n)
    return CommitmentKey(params=params, h=elements[0], basis=tuple(elements[1:]))


def pc(key: CommitmentKey, m: Scalar, r: Scalar,
       base: Optional[GroupElement] = None) -> GroupElement:
    """h^r * base^m，base 默认为 h_1"""
    params = key.params
    b = key.h1 if base is None else base
    return params.mul(params.exp(key.h, r), params.exp(b, m))


def epc(key: CommitmentKey, m: Sequence[Scalar], r: Scalar) -> GroupElement:
    """h^r * prod h_i^{m_i}，零指数不做幂运算"""
    if len(m) != key.n:
        raise ShapeMismatchError("EPC 向量长度与承诺参数不一致",
                                 expected=key.n, actual=len(m))
    params = key.params
    acc = params.exp(key.h, r)
    for hi, mi in zip(key.basis, m):
        mi %= params.q
        if mi == 0:
            continue
        acc = params.mul(acc, hi if mi == 1 else params.exp(hi, mi))
    return acc


def commit_permutation(key: CommitmentKey, pi: Permutation,
                       r: Sequence[Scalar]) -> Tuple[GroupElement, ...]:
    """置换矩阵的承诺，c_j = h^{r_j} * h_{pi^-1(j)}，与 commit_matrix(perm_to_matrix(pi)) 相同"""
    n = key.n
    if pi.n != n:
        raise ShapeMismatchError("置换长度与承诺参数不一致", expected=n, actual=pi.n)
    if len(r) != n:
        raise ShapeMismatchError("承诺随机数长度不一致", expected=n, actual=len(r))
    params = key.params
    inverse = pi.inverse()
    return tuple(params.mul(params.exp(key.h, r[j]), key.basis[inverse(j)]) for j in range(n))


def commit_matrix(key: CommitmentKey, matrix: ScalarMatrix,
                  r: Sequence[Scalar]) -> Tuple[GroupElement, ...]:
    """c_i = EPC(第 i 列, r_i)"""
    n = key.n
    if matrix.n_rows != n or matrix.n_cols != n:
        raise ShapeMismatchError("矩阵维度与承诺参数不一致",
                                 expected=(n, n), actual=(matrix.n_rows, matrix.n_cols))
    if len(r) != n:
        raise ShapeMismatchError("承诺随机数长度不一致", expected=n, actual=len(r))
    return tuple(epc(key, matrix.column(i), r[i]) for i in range(n))


def verify_commitment_break(key: CommitmentKey, brk: CommitmentBreak) -> bool:
    """两个打开不同且承诺值相同"""
    q = key.params.q
    if len(brk.m) != key.n or len(brk.m_prime) != key.n:
        return False
    m = tuple(x % q for x in brk.m)
    m_prime = tuple(x % q for x in brk.m_prime)
    if m == m_prime:
        return False
    return epc(key, m, brk.r) == epc(key, m_prime, brk.r_prime)
