"""
回退抽取驱动

在进程内驱动诚实证明方：对同一个 u 只执行一次 prover_commit，
再通过 ProverState.fork_for_rewinding() 回应多个不同的 c，得到共享前缀的接受对话。
"""

import random
import uuid
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Set, Tuple

from .exceptions import ExtractionError, MoreWitnessesRequired, SingularMatrixError
from .extractor import BasicWitness, ExtractionOutcome, basic_extract, extended_extract
from .logger import get_logger
from .shuffle_core import ShuffleStatement, ShuffleWitness
from .sigma import Transcript, VectorChallenge, prover_commit, prover_respond

logger = get_logger(__name__)


@dataclass
class ExtractionReport:
    """一次完整回退抽取的结果与统计"""
    outcome: ExtractionOutcome
    witnesses_used: int
    singular_retries: int
    extra_requests: int
    transcripts: int = 0


@dataclass
class RewindingHarness:
    statement: ShuffleStatement
    witness: ShuffleWitness
    rng: random.Random
    max_singular_retries: int = 16
    _seen_u: Set[Tuple[int, ...]] = field(default_factory=set, init=False, repr=False)
    transcript_count: int = field(default=0, init=False)

    def _fresh_u(self) -> VectorChallenge:
        params = self.statement.params
        while True:
            u = VectorChallenge.random(params, self.statement.n, self.rng)
            if u.values not in self._seen_u:
                self._seen_u.add(u.values)
                return u

    def rewound_transcripts(self, u: Optional[VectorChallenge] = None,
                            challenges: Optional[Sequence[int]] = None) -> List[Transcript]:
        """同一 (u, 消息二) 下对每个 c 回应一次；缺省时采样两个不同的 c"""
        params = self.statement.params
        if u is None:
            u = self._fresh_u()
        if challenges is None:
            c1 = params.random_scalar(self.rng)
            c2 = params.random_scalar(self.rng)
            while c2 == c1:
                c2 = params.random_scalar(self.rng)
            challenges = (c1, c2)
        if len(set(c % params.q for c in challenges)) != len(challenges):
            raise ExtractionError("回退的挑战 c 必须两两不同")

        state, msg2 = prover_commit(self.statement, self.witness, u, self.rng)
        transcripts = []
        for c in challenges:
            branch = state.fork_for_rewinding()
            resp = prover_respond(branch, c)
            transcripts.append(Transcript(u=u, msg2=msg2, c=c % params.q, resp=resp))
        self.transcript_count += len(transcripts)
        return transcripts

    def rewound_pair(self, u: Optional[VectorChallenge] = None,
                     challenges: Optional[Sequence[int]] = None) -> Tuple[Transcript, Transcript]:
        first, second = self.rewound_transcripts(u, challenges)[:2]
        return first, second

    def basic_witness(self, u: Optional[VectorChallenge] = None) -> BasicWitness:
        t, t_star = self.rewound_pair(u)
        return basic_extract(self.statement, t, t_star)

    def collect_basic_witnesses(self, count: int) -> List[BasicWitness]:
        """count 个挑战向量互不相同的基础见证"""
        return [self.basic_witness() for _ in range(count)]

    def run_extraction(self) -> ExtractionReport:
        """收集 N 个基础见证并抽取；U 奇异时整体重采样，需要时追加一个见证"""
        n = self.statement.n
        with logger.session(uuid.uuid4().hex[:12]):
            singular_retries = 0
            extra_requests = 0
            witnesses = self.collect_basic_witnesses(n)
            while True:
                try:
                    outcome = extended_extract(self.statement, witnesses)
                except SingularMatrixError:
                    singular_retries += 1
                    if singular_retries > self.max_singular_retries:
                        raise
                    logger.debug("挑战矩阵奇异，重新采样", retries=singular_retries)
                    witnesses = self.collect_basic_witnesses(n)
                    continue
                except MoreWitnessesRequired as e:
                    extra_requests += 1
                    if extra_requests > self.max_singular_retries:
                        raise
                    logger.debug("追加一个基础见证", supplied=e.supplied)
                    witnesses.append(self.basic_witness())
                    continue
                break

            logger.info("回退抽取完成", outcome=outcome.kind,
                        witnesses=len(witnesses), singular_retries=singular_retries)
            return ExtractionReport(
                outcome=outcome,
                witnesses_used=len(witnesses),
                singular_retries=singular_retries,
                extra_requests=extra_requests,
                transcripts=self.transcript_count,
            )


def collect_basic_witnesses(statement: ShuffleStatement, witness: ShuffleWitness,
                            rng: random.Random, count: int) -> List[BasicWitness]:
    return RewindingHarness(statement, witness, rng).collect_basic_witnesses(count)


def run_extraction(statement: ShuffleStatement, witness: ShuffleWitness,
                   rng: random.Random) -> ExtractionReport:
    return RewindingHarness(statement, witness, rng).run_extraction()
