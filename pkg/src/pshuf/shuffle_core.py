"""
混洗核心模块

陈述与见证模型、混洗操作本身，以及矩阵承诺关系、重加密关系和两者合取的直接检查。
"""

import random
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

from .commit import CommitmentKey, commit_permutation
from .elgamal import CiphertextVector, reenc_vec, require_uniform_width
from .exceptions import ShapeMismatchError, ValidationError
from .group import GroupElement, GroupParams, Scalar
from .logger import get_logger
from .permmat import (
    Permutation,
    ScalarMatrix,
    matrix_to_perm,
    perm_to_matrix,
    permutation_of,
)

logger = get_logger(__name__)


@dataclass(frozen=True)
class ShuffleStatement:
    """公共输入：矩阵承诺 c、输入密文 e、输出密文 e'"""
    params: GroupParams
    key: CommitmentKey
    pk: GroupElement
    c: Tuple[GroupElement, ...]
    inputs: Tuple[CiphertextVector, ...]
    outputs: Tuple[CiphertextVector, ...]

    @property
    def n(self) -> int:
        return len(self.c)

    @property
    def width(self) -> int:
        return self.inputs[0].width

    def validate(self) -> None:
        """形状一致，所有元素都是子群成员"""
        n = self.key.n
        for name, seq in (("c", self.c), ("inputs", self.inputs), ("outputs", self.outputs)):
            if len(seq) != n:
                raise ShapeMismatchError(f"{name} 长度与承诺参数不一致",
                                         expected=n, actual=len(seq))
        w = require_uniform_width(self.inputs)
        require_uniform_width(self.outputs, w)
        self.params.require_member(self.pk, "公钥")
        for x in self.c:
            self.params.require_member(x, "矩阵承诺")
        for x in self.inputs + self.outputs:
            if not x.is_member_of(self.params):
                raise ValidationError("密文分量不是子群成员")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "params": self.params.to_dict(),
            "key": self.key.to_dict(),
            "pk": self.pk,
            "c": list(self.c),
            "inputs": [x.to_list() for x in self.inputs],
            "outputs": [x.to_list() for x in self.outputs],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ShuffleStatement":
        params = GroupParams.from_dict(data["params"])
        statement = cls(
            params=params,
            key=CommitmentKey.from_dict(params, data["key"]),
            pk=data["pk"],
            c=tuple(data["c"]),
            inputs=tuple(CiphertextVector.from_list(params, x) for x in data["inputs"]),
            outputs=tuple(CiphertextVector.from_list(params, x) for x in data["outputs"]),
        )
        statement.validate()
        return statement


@dataclass(frozen=True)
class ShuffleWitness:
    """私有输入：置换矩阵 M、承诺随机数 r、w x N 重加密随机数矩阵 R"""
    M: ScalarMatrix
    r: Tuple[Scalar, ...]
    R: ScalarMatrix

    @property
    def permutation(self) -> Permutation:
        return matrix_to_perm(self.M)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "M": self.M.to_lists(),
            "r": list(self.r),
            "R": self.R.to_lists(),
        }

    @classmethod
    def from_dict(cls, params: GroupParams, data: Dict[str, Any]) -> "ShuffleWitness":
        return cls(
            M=ScalarMatrix.from_rows(data["M"], params.q),
            r=tuple(x % params.q for x in data["r"]),
            R=ScalarMatrix.from_rows(data["R"], params.q),
        )


@dataclass(frozen=True)
class ShuffleResult:
    statement: ShuffleStatement
    witness: ShuffleWitness

    @property
    def outputs(self) -> Tuple[CiphertextVector, ...]:
        return self.statement.outputs


def shuffle(params: GroupParams, key: CommitmentKey, pk: GroupElement,
            inputs: Sequence[CiphertextVector], rng: random.Random,
            permutation: Optional[Permutation] = None,
            randomize: bool = True) -> ShuffleResult:
    """
    置换并重加密输入：e'_i = ReEnc(e_{pi(i)}, R_{pi(i)})。

    采样顺序固定为：置换、R（逐列）、r，保证同一种子下结果逐字节一致。
    """
    n = len(inputs)
    if n < 1:
        raise ShapeMismatchError("至少需要一个输入密文向量", expected=">=1", actual=0)
    if n != key.n:
        raise ShapeMismatchError("输入数量与承诺参数不一致", expected=key.n, actual=n)
    w = require_uniform_width(inputs)

    pi = permutation if permutation is not None else Permutation.random(n, rng)
    if pi.n != n:
        raise ShapeMismatchError("置换长度不一致", expected=n, actual=pi.n)

    if randomize:
        r_columns = [[params.random_scalar(rng) for _ in range(w)] for _ in range(n)]
        r = tuple(params.random_scalar(rng) for _ in range(n))
    else:
        r_columns = [[0] * w for _ in range(n)]
        r = (0,) * n

    M = perm_to_matrix(pi, params.q)
    R = ScalarMatrix.from_columns(r_columns, params.q)
    outputs = tuple(
        reenc_vec(params, pk, inputs[pi(i)], R.column(pi(i))) for i in range(n)
    )
    c = commit_permutation(key, pi, r)

    statement = ShuffleStatement(params=params, key=key, pk=pk, c=c,
                                 inputs=tuple(inputs), outputs=outputs)
    logger.debug("混洗完成", n=n, width=w)
    return ShuffleResult(statement=statement, witness=ShuffleWitness(M=M, r=r, R=R))


def check_commitment_relation(statement: ShuffleStatement, M: ScalarMatrix,
                              r: Sequence[Scalar]) -> bool:
    """M 为置换矩阵且 C(M, r) = c"""
    pi = permutation_of(M)
    if pi is None or pi.n != statement.n or len(r) != statement.n:
        return False
    return commit_permutation(statement.key, pi, r) == tuple(statement.c)


def check_reencryption_relation(statement: ShuffleStatement, M: ScalarMatrix,
                                R: ScalarMatrix) -> bool:
    """对所有 i，e'_i = ReEnc(e_{pi(i)}, R 的第 pi(i) 列)"""
    n = statement.n
    pi = permutation_of(M)
    if pi is None or pi.n != n:
        return False
    if R.n_cols != n or R.n_rows != statement.width:
        return False
    params = statement.params
    return all(
        reenc_vec(params, statement.pk, statement.inputs[pi(i)], R.column(pi(i)))
        == statement.outputs[i]
        for i in range(n)
    )


def check_relation(statement: ShuffleStatement, witness: ShuffleWitness) -> bool:
    """两个关系的合取"""
    return (check_commitment_relation(statement, witness.M, witness.r)
            and check_reencryption_relation(statement, witness.M, witness.R))
