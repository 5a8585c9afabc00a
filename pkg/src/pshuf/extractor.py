"""
见证抽取模块

基础抽取器：从共享 (u, 消息二) 而挑战 c 不同的两个接受对话中解出基础见证。
扩展抽取器：由 N 个（必要时 N+1 个）挑战向量线性无关的基础见证恢复 (M, r, R)，
或者给出一个承诺绑定性破解。抽取器对输入是确定性的，回退由调用方负责。
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .commit import CommitmentBreak, CommitmentKey, epc, pc, verify_commitment_break
from .elgamal import cmul, cprod_exp, enc_vec
from .exceptions import (
    ExtractionError,
    MoreWitnessesRequired,
    ShapeMismatchError,
    TranscriptError,
)
from .group import GroupElement, Scalar
from .logger import get_logger
from .permmat import (
    ScalarMatrix,
    inner,
    is_permutation_matrix,
    mat_inverse,
    mat_mul,
    mat_vec_mul,
    perm_product_check,
)
from .shuffle_core import ShuffleStatement, ShuffleWitness, check_relation
from .sigma import Transcript, VectorChallenge, chain_randomness, verify

logger = get_logger(__name__)

KIND_WITNESS = "witness"
KIND_OPTION_ONE = "option_one"
KIND_PRODUCT_CHAIN = "product_chain"
KIND_OPTION_TWO = "option_two"
KIND_U_PRIME_MISMATCH = "u_prime_mismatch"


@dataclass(frozen=True)
class BasicWitness:
    """五个子陈述的见证，附带对话中的 c_hat 链"""
    u: VectorChallenge
    r_bar: Scalar
    r_diamond: Scalar
    r_tilde: Scalar
    r_star: Tuple[Scalar, ...]
    r_hat: Tuple[Scalar, ...]
    u_prime: Tuple[Scalar, ...]
    c_hat: Tuple[GroupElement, ...]


@dataclass(frozen=True)
class ExtendedWitness:
    """主陈述的见证 (M, r, R)"""
    M: ScalarMatrix
    r: Tuple[Scalar, ...]
    R: ScalarMatrix

    def as_shuffle_witness(self) -> ShuffleWitness:
        return ShuffleWitness(M=self.M, r=self.r, R=self.R)


@dataclass(frozen=True)
class ExtractionOutcome:
    """恰好是见证或承诺破解之一；kind 记录走过的分支"""
    kind: str
    witness: Optional[ExtendedWitness] = None
    commitment_break: Optional[CommitmentBreak] = None
    source_index: Optional[int] = None

    def __post_init__(self) -> None:
        if (self.witness is None) == (self.commitment_break is None):
            raise ExtractionError("抽取结果必须恰好是见证或承诺破解之一")

    @property
    def is_break(self) -> bool:
        return self.commitment_break is not None

    def verify(self, statement: ShuffleStatement) -> bool:
        if self.witness is not None:
            return check_relation(statement, self.witness.as_shuffle_witness())
        return verify_commitment_break(statement.key, self.commitment_break)


def basic_extract(statement: ShuffleStatement, t: Transcript,
                  t_star: Transcript) -> BasicWitness:
    """各回应分量之差除以 c - c*"""
    params = statement.params
    q = params.q
    if t.u != t_star.u:
        raise TranscriptError("两个对话的挑战向量 u 不同")
    if t.msg2 != t_star.msg2:
        raise TranscriptError("两个对话的消息二不同")
    if (t.c - t_star.c) % q == 0:
        raise TranscriptError("两个对话的挑战 c 相同")
    for label, transcript in (("t", t), ("t*", t_star)):
        result = verify(statement, transcript)
        if not result.accepted:
            raise TranscriptError(
                f"对话 {label} 未通过验证",
                details={"failed_equation": result.failed_equation}
            )

    d = params.scalar_inv(t.c - t_star.c)
    a, b = t.resp, t_star.resp

    def quotient(x: Scalar, y: Scalar) -> Scalar:
        return (x - y) * d % q

    def quotients(xs: Sequence[Scalar], ys: Sequence[Scalar]) -> Tuple[Scalar, ...]:
        return tuple(quotient(x, y) for x, y in zip(xs, ys))

    witness = BasicWitness(
        u=t.u,
        r_bar=quotient(a.s1, b.s1),
        r_diamond=quotient(a.s2, b.s2),
        r_tilde=quotient(a.s3, b.s3),
        r_star=quotients(a.s4, b.s4),
        r_hat=quotients(a.s_hat, b.s_hat),
        u_prime=quotients(a.s_prime, b.s_prime),
        c_hat=t.msg2.c_hat,
    )
    logger.log_protocol_event("basic_extract", n=statement.n)
    return witness


def substatement_failures(statement: ShuffleStatement, bw: BasicWitness) -> List[int]:
    """返回不成立的子陈述编号（1..5），全部成立时为空"""
    params = statement.params
    key = statement.key
    n = statement.n
    if len(bw.u) != n or len(bw.u_prime) != n or len(bw.r_hat) != n or len(bw.c_hat) != n:
        raise ShapeMismatchError("基础见证长度与陈述不一致", expected=n)
    if len(bw.r_star) != statement.width:
        raise ShapeMismatchError("r_star 宽度与陈述不一致",
                                 expected=statement.width, actual=len(bw.r_star))

    failures = []
    prod_c = params.prod(statement.c)
    if prod_c != epc(key, (1,) * n, bw.r_bar):
        failures.append(1)

    c_pow_u = params.prod(params.exp(ci, ui) for ci, ui in zip(statement.c, bw.u))
    if c_pow_u != epc(key, bw.u_prime, bw.r_tilde):
        failures.append(2)

    lhs = cprod_exp(params, statement.outputs, bw.u_prime)
    rhs = cmul(params, enc_vec(params, statement.pk, (1,) * statement.width, bw.r_star),
               cprod_exp(params, statement.inputs, bw.u))
    if lhs != rhs:
        failures.append(3)

    previous = (key.h1,) + bw.c_hat[:-1]
    if any(ci != pc(key, ui, ri, base=prev)
           for ci, ui, ri, prev in zip(bw.c_hat, bw.u_prime, bw.r_hat, previous)):
        failures.append(4)

    prod_u = 1
    for x in bw.u:
        prod_u = prod_u * x % params.q
    if bw.c_hat[-1] != pc(key, prod_u, bw.r_diamond):
        failures.append(5)

    return failures


def check_substatements(statement: ShuffleStatement, bw: BasicWitness) -> bool:
    return not substatement_failures(statement, bw)


def _single_slot(key: CommitmentKey, value: Scalar) -> Tuple[Scalar, ...]:
    return (value,) + (0,) * (key.n - 1)


def extended_extract(statement: ShuffleStatement,
                     witnesses: Sequence[BasicWitness]) -> ExtractionOutcome:
    """
    前 N 个基础见证的 u 作为列组成 U，A = U^-1，M = U'A，r_l = <r_tilde, A_l>。

    依次判断：M1 != 1 时给出第一种破解；M 不是置换矩阵时在全部见证中寻找
    prod(M U_j) != prod(U_j) 的点；M 是置换矩阵时用第 N 个之后的见证检查 U'；
    以上都不触发时恢复 R = R_star A 并返回见证。
    """
    params = statement.params
    key = statement.key
    q = params.q
    n = statement.n

    if len(witnesses) < n:
        raise ExtractionError(f"至少需要 {n} 个基础见证",
                              details={"supplied": len(witnesses), "required": n})
    for index, bw in enumerate(witnesses):
        failures = substatement_failures(statement, bw)
        if failures:
            raise ExtractionError(f"第 {index} 个基础见证的子陈述不成立",
                                  details={"index": index, "failures": failures})

    basis = witnesses[:n]
    U = ScalarMatrix.from_columns([bw.u.values for bw in basis], q)
    A = mat_inverse(U)
    U_prime = ScalarMatrix.from_columns([bw.u_prime for bw in basis], q)
    M = mat_mul(U_prime, A)
    r_tilde = tuple(bw.r_tilde for bw in basis)
    r = tuple(inner(r_tilde, A.column(l), q) for l in range(n))

    ones = (1,) * n
    row_sums = mat_vec_mul(M, ones)
    if row_sums != ones:
        brk = CommitmentBreak(m=ones, r=basis[0].r_bar, m_prime=row_sums, r_prime=sum(r) % q)
        logger.log_protocol_event("extended_extract", outcome=KIND_OPTION_ONE)
        return ExtractionOutcome(KIND_OPTION_ONE, commitment_break=brk, source_index=0)

    if not is_permutation_matrix(M):
        rows_form = M.transpose()
        for j, bw in enumerate(witnesses):
            if perm_product_check(rows_form, bw.u.values) == 0:
                continue
            u_double = mat_vec_mul(M, bw.u.values)
            if u_double != bw.u_prime:
                brk = CommitmentBreak(m=bw.u_prime, r=bw.r_tilde,
                                      m_prime=u_double, r_prime=inner(r, bw.u.values, q))
                kind = KIND_OPTION_TWO
            else:
                prod_u = prod_u_prime = 1
                for x, y in zip(bw.u.values, bw.u_prime):
                    prod_u = prod_u * x % q
                    prod_u_prime = prod_u_prime * y % q
                brk = CommitmentBreak(
                    m=_single_slot(key, prod_u_prime),
                    r=chain_randomness(params, bw.r_hat, bw.u_prime),
                    m_prime=_single_slot(key, prod_u),
                    r_prime=bw.r_diamond,
                )
                kind = KIND_PRODUCT_CHAIN
            logger.log_protocol_event("extended_extract", outcome=kind, source_index=j)
            return ExtractionOutcome(kind, commitment_break=brk, source_index=j)
        raise MoreWitnessesRequired("抽取的矩阵不是置换矩阵，需要再提供一个基础见证",
                                    supplied=len(witnesses))

    for k in range(n, len(witnesses)):
        bw = witnesses[k]
        u_double = mat_vec_mul(M, bw.u.values)
        if u_double != bw.u_prime:
            brk = CommitmentBreak(m=bw.u_prime, r=bw.r_tilde,
                                  m_prime=u_double, r_prime=inner(r, bw.u.values, q))
            logger.log_protocol_event("extended_extract", outcome=KIND_U_PRIME_MISMATCH,
                                      source_index=k)
            return ExtractionOutcome(KIND_U_PRIME_MISMATCH, commitment_break=brk, source_index=k)

    R_star = ScalarMatrix.from_columns([bw.r_star for bw in basis], q)
    R = mat_mul(R_star, A)
    extracted = ExtendedWitness(M=M, r=r, R=R)
    if not check_relation(statement, extracted.as_shuffle_witness()):
        raise ExtractionError("恢复的见证不满足混洗关系")

    logger.log_protocol_event("extended_extract", outcome=KIND_WITNESS)
    return ExtractionOutcome(KIND_WITNESS, witness=extracted)
