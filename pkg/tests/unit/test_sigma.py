"""
测试交互式混洗证明模块
"""

import random
from collections import Counter
from dataclasses import replace

import pytest
from scipy.stats import chi2_contingency

from src.pshuf.elgamal import enc_vec
from src.pshuf.exceptions import ProverStateError, RelationViolationError, ShapeMismatchError
from src.pshuf.permmat import mat_vec_mul
from src.pshuf.sigma import (
    ProverRandomness,
    Transcript,
    VectorChallenge,
    VerificationResult,
    chain_randomness,
    compute_c_hat_chain,
    derive_secrets,
    prover_commit,
    prover_respond,
    run_interactive,
    simulate,
    verify,
)
from tests.utils.test_helpers import make_instance, product, tamper_response


def honest_transcript(instance, seed="transcript"):
    rng = random.Random(seed)
    statement = instance.statement
    u = VectorChallenge.random(statement.params, statement.n, rng)
    state, msg2 = prover_commit(statement, instance.witness, u, rng)
    c = statement.params.random_scalar(rng)
    return Transcript(u=u, msg2=msg2, c=c, resp=prover_respond(state, c))


class TestCompleteness:
    """测试完备性"""

    def test_honest_run_accepts(self, honest_instance, rng):
        """诚实运行总被接受"""
        for _ in range(5):
            transcript, result = run_interactive(honest_instance.statement,
                                                 honest_instance.witness, rng)
            assert result.accepted
            assert result.failed_equation is None
            assert bool(result)

    @pytest.mark.parametrize("n,w", [(1, 1), (2, 3), (5, 1)])
    def test_shapes(self, test160_params, test160_keypair, n, w):
        """不同的 N 与 w"""
        instance = make_instance(test160_params, n, w, f"shape-{n}-{w}", test160_keypair)
        _, result = run_interactive(instance.statement, instance.witness, random.Random(n))
        assert result.accepted

    @pytest.mark.slow
    @pytest.mark.parametrize("w", [1, 2, 3])
    @pytest.mark.parametrize("n", [1, 2, 3, 5, 10])
    def test_completeness_matrix(self, test160_params, test160_keypair, n, w):
        """每个 (N, w) 的 100 次诚实运行全部接受"""
        instance = make_instance(test160_params, n, w, f"matrix-{n}-{w}", test160_keypair)
        rng = random.Random(f"runs-{n}-{w}")
        for _ in range(100):
            _, result = run_interactive(instance.statement, instance.witness, rng)
            assert result.accepted

    def test_toy_group(self, toy_instance, rng):
        """toy 群中同样成立"""
        for _ in range(20):
            _, result = run_interactive(toy_instance.statement, toy_instance.witness, rng)
            assert result.accepted

    def test_zero_randomness(self, honest_instance):
        """注入全零随机数时消息二确定且仍被接受"""
        statement = honest_instance.statement
        rng = random.Random(0)
        u = VectorChallenge.random(statement.params, statement.n, rng)
        zeros = ProverRandomness.zeros(statement.n, statement.width)
        state, msg2 = prover_commit(statement, honest_instance.witness, u, rng, randomness=zeros)
        assert msg2.t1 == 1 and msg2.t2 == 1
        c = statement.params.random_scalar(rng)
        transcript = Transcript(u=u, msg2=msg2, c=c, resp=prover_respond(state, c))
        assert verify(statement, transcript).accepted


class TestProverState:
    """测试证明方状态"""

    def test_single_use(self, honest_instance, rng):
        """同一状态只能回应一次"""
        statement = honest_instance.statement
        u = VectorChallenge.random(statement.params, statement.n, rng)
        state, _ = prover_commit(statement, honest_instance.witness, u, rng)
        prover_respond(state, 1)
        assert state.used
        with pytest.raises(ProverStateError):
            prover_respond(state, 2)

    def test_fork_resets_use(self, honest_instance, rng):
        """分叉的状态可以回应另一个挑战"""
        statement = honest_instance.statement
        u = VectorChallenge.random(statement.params, statement.n, rng)
        state, _ = prover_commit(statement, honest_instance.witness, u, rng)
        fork = state.fork_for_rewinding()
        a = prover_respond(state, 1)
        b = prover_respond(fork, 2)
        assert a != b
        assert fork.used

    def test_refuses_invalid_witness(self, honest_instance, rng):
        """见证不满足关系时拒绝证明"""
        witness = honest_instance.witness
        bad = replace(witness, r=(witness.r[0] + 1,) + witness.r[1:])
        u = VectorChallenge.random(honest_instance.statement.params, 3, rng)
        with pytest.raises(RelationViolationError):
            prover_commit(honest_instance.statement, bad, u, rng)

    def test_challenge_length(self, honest_instance, rng):
        """u 的长度必须为 N"""
        with pytest.raises(ShapeMismatchError):
            prover_commit(honest_instance.statement, honest_instance.witness, (1, 2), rng)


class TestDerivedSecrets:
    """测试导出的秘密值"""

    def test_values(self, honest_instance, rng):
        """u' = Mu，r_bar = sum r，r_star = R u"""
        statement = honest_instance.statement
        witness = honest_instance.witness
        q = statement.params.q
        u = [statement.params.random_scalar(rng) for _ in range(statement.n)]
        r_hat = [statement.params.random_scalar(rng) for _ in range(statement.n)]
        secrets = derive_secrets(statement.params, witness, u, r_hat)
        assert secrets.u_prime == tuple(witness.permutation.apply(u))
        assert secrets.r_bar == sum(witness.r) % q
        assert secrets.r_star == mat_vec_mul(witness.R, u)
        assert product(secrets.u_prime, q) == product(u, q)

    def test_chain_randomness(self, toy_params):
        """r_hat_2 + r_hat_1 u'_2"""
        assert chain_randomness(toy_params, (3, 4), (5, 6)) == (4 + 3 * 6) % 11
        assert chain_randomness(toy_params, (7,), (9,)) == 7

    def test_last_chain_element(self, honest_instance):
        """c_hat_N = h^{r_diamond} h_1^{prod u}"""
        statement = honest_instance.statement
        params = statement.params
        key = statement.key
        state_rng = random.Random("transcript")
        u = VectorChallenge.random(params, statement.n, state_rng)
        state, msg2 = prover_commit(statement, honest_instance.witness, u, state_rng)
        expected = params.mul(params.exp(key.h, state.secrets.r_diamond),
                              params.exp(key.h1, product(u, params.q)))
        assert msg2.c_hat[-1] == expected
        assert honest_transcript(honest_instance).msg2 == msg2

    def test_chain_closed_form(self, test160_params, test160_keypair):
        """c_hat_i = h^{sum_k r_hat_k prod_{k<j<=i} u'_j} * h_1^{prod_{j<=i} u'_j}"""
        params = test160_params
        q = params.q
        rng = random.Random("chain")
        for n in range(1, 9):
            statement = make_instance(params, n, 1, f"chain-{n}", test160_keypair).statement
            key = statement.key
            for _ in range(100):
                r_hat = [params.random_scalar(rng) for _ in range(n)]
                u_prime = [params.random_scalar(rng) for _ in range(n)]
                expected = []
                for i in range(1, n + 1):
                    h_exp = sum(r_hat[k] * product(u_prime[k + 1:i], q) for k in range(i)) % q
                    expected.append(params.mul(params.exp(key.h, h_exp),
                                               params.exp(key.h1, product(u_prime[:i], q))))
                assert compute_c_hat_chain(statement, r_hat, u_prime) == tuple(expected)
                assert chain_randomness(params, r_hat, u_prime) == h_exp


class TestSoundnessChecks:
    """测试篡改后的拒绝编号"""

    @pytest.mark.parametrize("field,equation", [
        ("s1", 1),
        ("s2", 2),
        ("s3", 3),
        ("s4", 4),
        ("s_hat", 5),
        ("s_prime", 3),
    ])
    def test_tampered_response(self, honest_instance, field, equation):
        """修改回应的一个分量后第一个失败方程确定"""
        q = honest_instance.statement.params.q
        transcript = tamper_response(honest_transcript(honest_instance), field, q)
        result = verify(honest_instance.statement, transcript)
        assert not result.accepted
        assert result.failed_equation == equation

    def test_tampered_last_s_hat(self, honest_instance):
        """修改最后一个 s_hat 同样在方程 5 失败"""
        q = honest_instance.statement.params.q
        transcript = tamper_response(honest_transcript(honest_instance), "s_hat", q, index=2)
        assert verify(honest_instance.statement, transcript).failed_equation == 5

    def test_tampered_challenge(self, honest_instance):
        """修改 c 后方程 1 失败"""
        transcript = honest_transcript(honest_instance)
        q = honest_instance.statement.params.q
        result = verify(honest_instance.statement, replace(transcript, c=(transcript.c + 1) % q))
        assert result.failed_equation == 1

    def test_tampered_u(self, honest_instance):
        """修改 u 后方程 2 失败"""
        transcript = honest_transcript(honest_instance)
        q = honest_instance.statement.params.q
        values = list(transcript.u.values)
        values[0] = (values[0] + 1) % q
        result = verify(honest_instance.statement,
                        replace(transcript, u=VectorChallenge(tuple(values))))
        assert result.failed_equation == 2

    def test_scalar_out_of_range(self, honest_instance):
        """标量不在 [0, q) 内时以编号 0 拒绝"""
        transcript = honest_transcript(honest_instance)
        q = honest_instance.statement.params.q
        bad = replace(transcript, resp=replace(transcript.resp, s1=transcript.resp.s1 + q))
        result = verify(honest_instance.statement, bad)
        assert result == VerificationResult(False, 0, result.reason)

    def test_non_member_in_message(self, honest_instance):
        """消息二中的非成员元素以编号 0 拒绝"""
        transcript = honest_transcript(honest_instance)
        p = honest_instance.statement.params.p
        bad = replace(transcript, msg2=replace(transcript.msg2, t1=p - 1))
        assert verify(honest_instance.statement, bad).failed_equation == 0

    def test_shape_mismatch_raises(self, honest_instance):
        """长度不一致是调用方错误"""
        transcript = honest_transcript(honest_instance)
        bad = replace(transcript, resp=replace(transcript.resp, s_hat=transcript.resp.s_hat[:-1]))
        with pytest.raises(ShapeMismatchError):
            verify(honest_instance.statement, bad)

    def test_other_statement(self, honest_instance, test160_params, test160_keypair):
        """对话不能转移到另一个陈述"""
        other = make_instance(test160_params, 3, 2, "other", test160_keypair)
        transcript = honest_transcript(honest_instance)
        assert not verify(other.statement, transcript).accepted


class TestSimulator:
    """测试诚实验证方零知识模拟器"""

    def test_simulated_transcripts_accept(self, honest_instance, rng):
        """模拟对话总被接受"""
        statement = honest_instance.statement
        for _ in range(10):
            u = VectorChallenge.random(statement.params, statement.n, rng)
            c = statement.params.random_scalar(rng)
            transcript = simulate(statement, u, c, rng)
            assert transcript.u == u and transcript.c == c
            assert verify(statement, transcript).accepted

    def test_simulation_without_valid_shuffle(self, honest_instance, rng):
        """输出不是混洗结果时模拟对话依然被接受"""
        statement = honest_instance.statement
        params = statement.params
        fake_outputs = tuple(
            enc_vec(params, statement.pk,
                    [params.random_element(rng) for _ in range(statement.width)],
                    [params.random_scalar(rng) for _ in range(statement.width)])
            for _ in range(statement.n)
        )
        fake = replace(statement, outputs=fake_outputs)
        u = VectorChallenge.random(params, statement.n, rng)
        transcript = simulate(fake, u, params.random_scalar(rng), rng)
        assert verify(fake, transcript).accepted

    @pytest.mark.slow
    def test_ten_thousand_toy_simulations_accept(self, toy_instance):
        """toy 参数下 10000 个随机 (u, c) 的模拟对话全部被接受"""
        statement = toy_instance.statement
        params = statement.params
        rng = random.Random("sim-10k")
        for _ in range(10000):
            u = VectorChallenge.random(params, statement.n, rng)
            transcript = simulate(statement, u, params.random_scalar(rng), rng)
            assert verify(statement, transcript).accepted

    @pytest.mark.slow
    def test_distribution_matches_honest(self, toy_instance):
        """固定 (u, c) 时 (c_hat_1, s'_1) 的分布与诚实对话不可区分"""
        statement = toy_instance.statement
        u = VectorChallenge((3, 5))
        c = 7
        honest_rng = random.Random("honest-zk")
        sim_rng = random.Random("sim-zk")
        honest = Counter()
        simulated = Counter()
        for _ in range(2500):
            state, msg2 = prover_commit(statement, toy_instance.witness, u, honest_rng)
            resp = prover_respond(state, c)
            honest[(msg2.c_hat[0], resp.s_prime[0])] += 1
            transcript = simulate(statement, u, c, sim_rng)
            simulated[(transcript.msg2.c_hat[0], transcript.resp.s_prime[0])] += 1

        cells = sorted(set(honest) | set(simulated))
        table = [[honest[k] for k in cells], [simulated[k] for k in cells]]
        assert len(cells) == 121
        assert chi2_contingency(table)[1] > 0.001
