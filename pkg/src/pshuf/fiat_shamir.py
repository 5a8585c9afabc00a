"""
Fiat-Shamir 非交互证明模块

两个验证方挑战都由哈希派生：u 只绑定陈述（u 先于消息二），c 同时绑定陈述与消息二。
256 位摘要对 q 取模带来的偏差在 test160 下不超过 2^-96。
域分隔标签是固定的 ASCII 常量，修改即为格式变更。
"""

import hashlib
import random
from dataclasses import dataclass
from typing import Any, Dict, Tuple

from .group import GroupParams, Scalar
from .logger import get_logger
from .serialization import canonical_bytes, statement_bytes
from .shuffle_core import ShuffleStatement, ShuffleWitness
from .sigma import (
    ProverCommitMessage,
    Response,
    Transcript,
    VectorChallenge,
    VerificationResult,
    prover_commit,
    prover_respond,
    verify,
)

logger = get_logger(__name__)

U_TAG = b"PSHUF/u"
C_TAG = b"PSHUF/c"


@dataclass(frozen=True)
class NIProof:
    """非交互证明：只保存消息二与回应，u 和 c 由验证方重新计算"""
    msg2: ProverCommitMessage
    resp: Response

    def to_dict(self) -> Dict[str, Any]:
        return {"msg2": self.msg2.to_dict(), "resp": self.resp.to_dict()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "NIProof":
        return cls(
            msg2=ProverCommitMessage.from_dict(data["msg2"]),
            resp=Response.from_dict(data["resp"]),
        )


def derive_u(params: GroupParams, stmt_bytes: bytes, n: int) -> VectorChallenge:
    """u_i = SHA-256(tag || statement || i) mod q，i 从 1 开始，4 字节大端"""
    values = []
    for i in range(1, n + 1):
        digest = hashlib.sha256(U_TAG + stmt_bytes + i.to_bytes(4, "big")).digest()
        values.append(int.from_bytes(digest, "big") % params.q)
    return VectorChallenge(tuple(values))


def derive_c(params: GroupParams, stmt_bytes: bytes, msg2_bytes: bytes) -> Scalar:
    """c = SHA-256(tag || statement || msg2) mod q"""
    digest = hashlib.sha256(C_TAG + stmt_bytes + msg2_bytes).digest()
    return int.from_bytes(digest, "big") % params.q


def message_bytes(msg2: ProverCommitMessage) -> bytes:
    return canonical_bytes(msg2.to_dict())


def recompute_challenges(statement: ShuffleStatement,
                         proof: NIProof) -> Tuple[VectorChallenge, Scalar]:
    """验证方视角下的 (u, c)"""
    params = statement.params
    stmt_bytes = statement_bytes(statement)
    u = derive_u(params, stmt_bytes, statement.n)
    c = derive_c(params, stmt_bytes, message_bytes(proof.msg2))
    return u, c


def prove_ni(statement: ShuffleStatement, witness: ShuffleWitness,
             rng: random.Random) -> NIProof:
    params = statement.params
    stmt_bytes = statement_bytes(statement)
    u = derive_u(params, stmt_bytes, statement.n)
    state, msg2 = prover_commit(statement, witness, u, rng)
    c = derive_c(params, stmt_bytes, message_bytes(msg2))
    resp = prover_respond(state, c)
    logger.log_protocol_event("prove_ni", n=statement.n, width=statement.width)
    return NIProof(msg2=msg2, resp=resp)


def to_transcript(statement: ShuffleStatement, proof: NIProof) -> Transcript:
    u, c = recompute_challenges(statement, proof)
    return Transcript(u=u, msg2=proof.msg2, c=c, resp=proof.resp)


def verify_ni(statement: ShuffleStatement, proof: NIProof) -> VerificationResult:
    return verify(statement, to_transcript(statement, proof))
