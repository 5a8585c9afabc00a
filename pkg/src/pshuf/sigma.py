"""
交互式混洗证明模块

四消息 sigma 协议：验证方发送向量挑战 u，证明方发送承诺消息（c_hat 链与 t 值），
验证方发送标量挑战 c，证明方回应；验证方检查五个方程。
另外提供诚实验证方零知识模拟器和一次完整交互运行的辅助函数。

c_hat_0 = h_1 是验证方常量，从不传输。
"""

import copy
import random
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

from .commit import epc
from .elgamal import (
    Ciphertext,
    CiphertextVector,
    cexp,
    cmul,
    cprod_exp,
    reenc_vec,
)
from .exceptions import (
    ProverStateError,
    RelationViolationError,
    ShapeMismatchError,
    ValidationError,
)
from .group import GroupElement, GroupParams, Scalar
from .logger import get_logger
from .permmat import inner, mat_vec_mul, permutation_of
from .shuffle_core import ShuffleStatement, ShuffleWitness, check_relation

logger = get_logger(__name__)

EQUATION_NAMES = {0: "domain", 1: "t1", 2: "t2", 3: "t3", 4: "t4", 5: "t_hat"}


@dataclass(frozen=True)
class VectorChallenge:
    """验证方的第一个挑战 u ∈ Z_q^N"""
    values: Tuple[Scalar, ...]

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[Scalar]:
        return iter(self.values)

    def __getitem__(self, index: int) -> Scalar:
        return self.values[index]

    @classmethod
    def random(cls, params: GroupParams, n: int, rng: random.Random) -> "VectorChallenge":
        return cls(tuple(params.random_scalar(rng) for _ in range(n)))


@dataclass(frozen=True)
class ProverRandomness:
    """证明方在第二步选取的全部随机数"""
    r_hat: Tuple[Scalar, ...]
    omega_hat: Tuple[Scalar, ...]
    omega_prime: Tuple[Scalar, ...]
    omega1: Scalar
    omega2: Scalar
    omega3: Scalar
    omega4: Tuple[Scalar, ...]

    @classmethod
    def sample(cls, params: GroupParams, n: int, w: int, rng: random.Random) -> "ProverRandomness":
        draw = params.random_scalar
        return cls(
            r_hat=tuple(draw(rng) for _ in range(n)),
            omega_hat=tuple(draw(rng) for _ in range(n)),
            omega_prime=tuple(draw(rng) for _ in range(n)),
            omega1=draw(rng),
            omega2=draw(rng),
            omega3=draw(rng),
            omega4=tuple(draw(rng) for _ in range(w)),
        )

    @classmethod
    def zeros(cls, n: int, w: int) -> "ProverRandomness":
        return cls((0,) * n, (0,) * n, (0,) * n, 0, 0, 0, (0,) * w)


@dataclass(frozen=True)
class ProverCommitMessage:
    """第二条消息：c_hat_1..c_hat_N、t1、t2、t3、t4（宽度 w）、t_hat_1..t_hat_N"""
    c_hat: Tuple[GroupElement, ...]
    t1: GroupElement
    t2: GroupElement
    t3: GroupElement
    t4: CiphertextVector
    t_hat: Tuple[GroupElement, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "c_hat": list(self.c_hat),
            "t1": self.t1,
            "t2": self.t2,
            "t3": self.t3,
            "t4": self.t4.to_list(),
            "t_hat": list(self.t_hat),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ProverCommitMessage":
        # 不检查成员资格，由 verify 负责拒绝
        return cls(
            c_hat=tuple(data["c_hat"]),
            t1=data["t1"],
            t2=data["t2"],
            t3=data["t3"],
            t4=CiphertextVector(tuple(Ciphertext(a, b) for a, b in data["t4"])),
            t_hat=tuple(data["t_hat"]),
        )


@dataclass(frozen=True)
class Response:
    """第四条消息"""
    s1: Scalar
    s2: Scalar
    s3: Scalar
    s4: Tuple[Scalar, ...]
    s_hat: Tuple[Scalar, ...]
    s_prime: Tuple[Scalar, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "s1": self.s1,
            "s2": self.s2,
            "s3": self.s3,
            "s4": list(self.s4),
            "s_hat": list(self.s_hat),
            "s_prime": list(self.s_prime),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Response":
        return cls(
            s1=data["s1"],
            s2=data["s2"],
            s3=data["s3"],
            s4=tuple(data["s4"]),
            s_hat=tuple(data["s_hat"]),
            s_prime=tuple(data["s_prime"]),
        )


@dataclass(frozen=True)
class Transcript:
    """一次交互运行 (u, 消息二, c, 回应)"""
    u: VectorChallenge
    msg2: ProverCommitMessage
    c: Scalar
    resp: Response

    def to_dict(self) -> Dict[str, Any]:
        return {
            "u": list(self.u.values),
            "msg2": self.msg2.to_dict(),
            "c": self.c,
            "resp": self.resp.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Transcript":
        return cls(
            u=VectorChallenge(tuple(data["u"])),
            msg2=ProverCommitMessage.from_dict(data["msg2"]),
            c=data["c"],
            resp=Response.from_dict(data["resp"]),
        )


@dataclass(frozen=True)
class DerivedSecrets:
    """由见证与 u 导出的秘密值"""
    u_prime: Tuple[Scalar, ...]
    r_bar: Scalar
    r_tilde: Scalar
    r_diamond: Scalar
    r_star: Tuple[Scalar, ...]


@dataclass(frozen=True)
class VerificationResult:
    """验证结果；failed_equation 为 1..5，0 表示输入不在群或域中"""
    accepted: bool
    failed_equation: Optional[int] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.accepted

    @classmethod
    def accept(cls) -> "VerificationResult":
        return cls(True, None, "accepted")

    @classmethod
    def reject(cls, equation: int, reason: str) -> "VerificationResult":
        return cls(False, equation, reason)


def chain_randomness(params: GroupParams, r_hat: Sequence[Scalar],
                     u_prime: Sequence[Scalar]) -> Scalar:
    """r_hat_N + sum_{i<N} r_hat_i * prod_{j>i} u'_j，按 Horner 形式折叠"""
    acc = 0
    for r_i, u_i in zip(r_hat, u_prime):
        acc = (acc * u_i + r_i) % params.q
    return acc


def derive_secrets(params: GroupParams, witness: ShuffleWitness, u: Sequence[Scalar],
                   r_hat: Sequence[Scalar]) -> DerivedSecrets:
    """u' = Mu，r_bar = sum r，r_tilde = <r, u>，r_diamond（链随机数），r_star = Ru"""
    q = params.q
    pi = permutation_of(witness.M)
    u_prime = tuple(pi.apply(u)) if pi is not None else mat_vec_mul(witness.M, u)
    return DerivedSecrets(
        u_prime=u_prime,
        r_bar=sum(witness.r) % q,
        r_tilde=inner(witness.r, u, q),
        r_diamond=chain_randomness(params, r_hat, u_prime),
        r_star=mat_vec_mul(witness.R, u),
    )


def compute_c_hat_chain(statement: ShuffleStatement, r_hat: Sequence[Scalar],
                        u_prime: Sequence[Scalar]) -> Tuple[GroupElement, ...]:
    """c_hat_i = h^{r_hat_i} * c_hat_{i-1}^{u'_i}，c_hat_0 = h_1"""
    params = statement.params
    key = statement.key
    prev = key.h1
    chain = []
    for r_i, u_i in zip(r_hat, u_prime):
        prev = params.mul(params.exp(key.h, r_i), params.exp(prev, u_i))
        chain.append(prev)
    return tuple(chain)


class ProverState:
    """
    单次会话的证明方状态，只能回应一次。

    fork_for_rewinding() 是抽取器回退测试专用的钩子，生产路径不调用。
    """

    def __init__(self, statement: ShuffleStatement, u: VectorChallenge,
                 secrets: DerivedSecrets, randomness: ProverRandomness,
                 message: ProverCommitMessage):
        self.statement = statement
        self.u = u
        self.secrets = secrets
        self.randomness = randomness
        self.message = message
        self._used = False

    @property
    def used(self) -> bool:
        return self._used

    def respond(self, c: Scalar) -> Response:
        if self._used:
            raise ProverStateError("证明方状态已经回应过一次挑战")
        self._used = True

        params = self.statement.params
        q = params.q
        c = c % q
        s = self.secrets
        w = self.randomness

        def lin(omega: Scalar, secret: Scalar) -> Scalar:
            return (omega + c * secret) % q

        response = Response(
            s1=lin(w.omega1, s.r_bar),
            s2=lin(w.omega2, s.r_diamond),
            s3=lin(w.omega3, s.r_tilde),
            s4=tuple(lin(o, x) for o, x in zip(w.omega4, s.r_star)),
            s_hat=tuple(lin(o, x) for o, x in zip(w.omega_hat, w.r_hat)),
            s_prime=tuple(lin(o, x) for o, x in zip(w.omega_prime, s.u_prime)),
        )
        logger.log_protocol_event("prover_respond", n=self.statement.n)
        return response

    def fork_for_rewinding(self) -> "ProverState":
        """复制一个尚未回应的状态（共享 u 与消息二）"""
        fork = copy.copy(self)
        fork._used = False
        return fork


def _check_challenge_shape(statement: ShuffleStatement, u: Sequence[Scalar]) -> None:
    if len(u) != statement.n:
        raise ShapeMismatchError("挑战向量长度不一致", expected=statement.n, actual=len(u))


def prover_commit(statement: ShuffleStatement, witness: ShuffleWitness,
                  u: Sequence[Scalar], rng: random.Random,
                  randomness: Optional[ProverRandomness] = None
                  ) -> Tuple[ProverState, ProverCommitMessage]:
    """
    计算第二条消息。

    randomness 只供测试注入（例如全零）；缺省时从 rng 采样。
    见证不满足关系时拒绝证明。
    """
    _check_challenge_shape(statement, u)
    if not check_relation(statement, witness):
        raise RelationViolationError("见证不满足混洗关系，拒绝生成证明")

    params = statement.params
    key = statement.key
    n = statement.n
    w = statement.width
    challenge = u if isinstance(u, VectorChallenge) else VectorChallenge(tuple(u))

    if randomness is None:
        randomness = ProverRandomness.sample(params, n, w, rng)
    secrets = derive_secrets(params, witness, challenge.values, randomness.r_hat)

    c_hat = compute_c_hat_chain(statement, randomness.r_hat, secrets.u_prime)
    previous = (key.h1,) + c_hat[:-1]

    t1 = params.exp(key.h, randomness.omega1)
    t2 = params.exp(key.h, randomness.omega2)
    t3 = epc(key, randomness.omega_prime, randomness.omega3)
    t4 = reenc_vec(
        params, statement.pk,
        cprod_exp(params, statement.outputs, randomness.omega_prime),
        [params.scalar_neg(x) for x in randomness.omega4],
    )
    t_hat = tuple(
        params.mul(params.exp(key.h, oh), params.exp(prev, op))
        for oh, op, prev in zip(randomness.omega_hat, randomness.omega_prime, previous)
    )

    message = ProverCommitMessage(c_hat=c_hat, t1=t1, t2=t2, t3=t3, t4=t4, t_hat=t_hat)
    logger.log_protocol_event("prover_commit", n=n, width=w)
    return ProverState(statement, challenge, secrets, randomness, message), message


def prover_respond(state: ProverState, c: Scalar) -> Response:
    return state.respond(c)


def _expected_commitments(statement: ShuffleStatement, u: Sequence[Scalar], c: Scalar,
                          c_hat: Sequence[GroupElement], resp: Response
                          ) -> Tuple[GroupElement, GroupElement, GroupElement,
                                     CiphertextVector, Tuple[GroupElement, ...]]:
    """由验证方程右侧求出 (t1, t2, t3, t4, t_hat)"""
    params = statement.params
    key = statement.key
    q = params.q
    neg_c = (-c) % q

    prod_c = params.prod(statement.c)
    prod_h = params.prod(key.basis)
    t1 = params.mul(params.exp(params.div(prod_c, prod_h), neg_c),
                    params.exp(key.h, resp.s1))

    prod_u = 1
    for x in u:
        prod_u = prod_u * x % q
    t2 = params.mul(params.exp(params.div(c_hat[-1], params.exp(key.h1, prod_u)), neg_c),
                    params.exp(key.h, resp.s2))

    c_pow_u = params.prod(params.exp(ci, ui) for ci, ui in zip(statement.c, u))
    t3 = params.mul(params.exp(c_pow_u, neg_c), epc(key, resp.s_prime, resp.s3))

    e_pow_u = cprod_exp(params, statement.inputs, u)
    t4 = reenc_vec(
        params, statement.pk,
        cmul(params, cexp(params, e_pow_u, neg_c),
             cprod_exp(params, statement.outputs, resp.s_prime)),
        [params.scalar_neg(x) for x in resp.s4],
    )

    previous = (key.h1,) + tuple(c_hat[:-1])
    t_hat = tuple(
        params.prod((params.exp(ci, neg_c), params.exp(key.h, sh), params.exp(prev, sp)))
        for ci, sh, sp, prev in zip(c_hat, resp.s_hat, resp.s_prime, previous)
    )
    return t1, t2, t3, t4, t_hat


def _check_transcript_shape(statement: ShuffleStatement, transcript: Transcript) -> None:
    n = statement.n
    w = statement.width
    msg2 = transcript.msg2
    resp = transcript.resp
    for name, length, expected in (
        ("u", len(transcript.u), n),
        ("c_hat", len(msg2.c_hat), n),
        ("t_hat", len(msg2.t_hat), n),
        ("t4", msg2.t4.width, w),
        ("s4", len(resp.s4), w),
        ("s_hat", len(resp.s_hat), n),
        ("s_prime", len(resp.s_prime), n),
    ):
        if length != expected:
            raise ShapeMismatchError(f"{name} 长度与陈述不一致", expected=expected, actual=length)


def _domain_failure(statement: ShuffleStatement, transcript: Transcript) -> Optional[str]:
    """检查标量在 [0, q) 内、群元素为子群成员"""
    params = statement.params
    msg2 = transcript.msg2
    resp = transcript.resp
    scalars = (list(transcript.u) + [transcript.c, resp.s1, resp.s2, resp.s3]
               + list(resp.s4) + list(resp.s_hat) + list(resp.s_prime))
    if not all(params.is_scalar(x) for x in scalars):
        return "标量超出 Z_q"
    elements: List[int] = list(msg2.c_hat) + [msg2.t1, msg2.t2, msg2.t3] + list(msg2.t_hat)
    for e in msg2.t4:
        elements.extend((e.a, e.b))
    if not all(params.is_member(x) for x in elements):
        return "消息二中存在非子群成员"
    try:
        statement.validate()
    except ShapeMismatchError:
        raise
    except ValidationError as e:
        return f"陈述无效: {e.message}"
    return None


def verify(statement: ShuffleStatement, transcript: Transcript) -> VerificationResult:
    """检查全部五个方程，拒绝时给出第一个失败方程的编号"""
    _check_transcript_shape(statement, transcript)

    failure = _domain_failure(statement, transcript)
    if failure is not None:
        logger.info("验证拒绝", failed_equation=0, reason=failure)
        return VerificationResult.reject(0, failure)

    msg2 = transcript.msg2
    t1, t2, t3, t4, t_hat = _expected_commitments(
        statement, transcript.u.values, transcript.c, msg2.c_hat, transcript.resp
    )
    checks = (
        (1, msg2.t1 == t1),
        (2, msg2.t2 == t2),
        (3, msg2.t3 == t3),
        (4, msg2.t4 == t4),
        (5, msg2.t_hat == t_hat),
    )
    for index, ok in checks:
        if not ok:
            reason = f"方程 {EQUATION_NAMES[index]} 不成立"
            logger.info("验证拒绝", failed_equation=index, reason=reason)
            return VerificationResult.reject(index, reason)

    logger.log_protocol_event("verify", accepted=True, n=statement.n)
    return VerificationResult.accept()


def simulate(statement: ShuffleStatement, u: Sequence[Scalar], c: Scalar,
             rng: random.Random) -> Transcript:
    """
    诚实验证方零知识模拟器：均匀采样 c_hat 与全部回应，
    再由五个验证方程解出 t1、t2、t3、t4、t_hat。
    """
    _check_challenge_shape(statement, u)
    params = statement.params
    n = statement.n
    w = statement.width
    draw = params.random_scalar
    c = c % params.q

    c_hat = tuple(params.random_element(rng) for _ in range(n))
    resp = Response(
        s1=draw(rng),
        s2=draw(rng),
        s3=draw(rng),
        s4=tuple(draw(rng) for _ in range(w)),
        s_hat=tuple(draw(rng) for _ in range(n)),
        s_prime=tuple(draw(rng) for _ in range(n)),
    )
    challenge = u if isinstance(u, VectorChallenge) else VectorChallenge(tuple(u))
    t1, t2, t3, t4, t_hat = _expected_commitments(statement, challenge.values, c, c_hat, resp)
    message = ProverCommitMessage(c_hat=c_hat, t1=t1, t2=t2, t3=t3, t4=t4, t_hat=t_hat)
    return Transcript(u=challenge, msg2=message, c=c, resp=resp)


def run_interactive(statement: ShuffleStatement, witness: ShuffleWitness,
                    rng: random.Random) -> Tuple[Transcript, VerificationResult]:
    """一次完整的诚实交互运行，验证方挑战也取自 rng"""
    params = statement.params
    u = VectorChallenge.random(params, statement.n, rng)
    state, message = prover_commit(statement, witness, u, rng)
    c = params.random_scalar(rng)
    resp = prover_respond(state, c)
    transcript = Transcript(u=u, msg2=message, c=c, resp=resp)
    return transcript, verify(statement, transcript)
