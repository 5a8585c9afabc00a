"""
命令行端到端流程测试

在 test160 参数上走完 生成参数 -> 密钥 -> 承诺参数 -> 加密 -> 混洗 -> 证明 -> 验证，
并检查验证方只读取公开文件。
"""

import os
import subprocess
import sys
from pathlib import Path

import pytest

from src.pshuf.cli import EXIT_OK, EXIT_REJECT, main
from src.pshuf.elgamal import dec_vec
from src.pshuf.fiat_shamir import NIProof, recompute_challenges, verify_ni
from src.pshuf.serialization import (
    EnvelopeKind,
    ciphertexts_body,
    dump_envelope,
    load_ciphertexts,
    load_envelope,
    load_keypair,
    load_statement,
    load_witness,
)

REPO_ROOT = Path(__file__).resolve().parents[2]


def step(*argv):
    code = main(list(argv))
    assert code == EXIT_OK
    return code


@pytest.fixture
def workflow(temp_dir):
    f = {name: os.path.join(temp_dir, f"{name}.json") for name in (
        "params", "keypair", "public", "key", "inputs", "statement", "witness", "proof",
    )}
    step("gen-params", "--preset", "test160", "--out", f["params"])
    step("keygen", "--params", f["params"], "--seed", "authority",
         "--out", f["keypair"], "--public-out", f["public"])
    step("gen-commit-key", "--params", f["params"], "--n", "4", "--seed", "election-1",
         "--out", f["key"])
    step("encrypt", "--params", f["params"], "--pk", f["public"], "--count", "4",
         "--width", "3", "--seed", "ballots", "--out", f["inputs"])
    step("shuffle", "--params", f["params"], "--pk", f["public"], "--commit-key", f["key"],
         "--in", f["inputs"], "--seed", "mix-1",
         "--out-statement", f["statement"], "--out-witness", f["witness"])
    step("prove", "--statement", f["statement"], "--witness", f["witness"],
         "--seed", "proof-1", "--out", f["proof"])
    return f


@pytest.mark.integration
class TestCliWorkflow:
    """命令行完整流程"""

    def test_proof_accepted(self, workflow, capsys):
        capsys.readouterr()
        assert main(["verify", "--statement", workflow["statement"],
                     "--proof", workflow["proof"]]) == EXIT_OK
        assert capsys.readouterr().out.strip() == "ACCEPT"

    def test_verifier_needs_only_public_files(self, workflow):
        """删除见证与私钥后仍可验证"""
        os.remove(workflow["witness"])
        os.remove(workflow["keypair"])
        statement = load_statement(workflow["statement"])
        proof = NIProof.from_dict(load_envelope(workflow["proof"], EnvelopeKind.PROOF))
        assert verify_ni(statement, proof).accepted

    def test_mix_preserves_ballots(self, workflow):
        """输出解密后的多重集与输入一致，顺序由见证中的置换给出"""
        statement = load_statement(workflow["statement"])
        params = statement.params
        sk = load_keypair(workflow["keypair"], params).sk
        witness = load_witness(workflow["witness"], params)
        inputs = load_ciphertexts(workflow["inputs"], params)

        plain_in = [dec_vec(params, sk, x) for x in inputs]
        plain_out = [dec_vec(params, sk, x) for x in statement.outputs]
        assert sorted(plain_in) == sorted(plain_out)
        assert plain_out == witness.permutation.apply(plain_in)

    def test_proof_does_not_transfer(self, workflow, temp_dir):
        """第二次混洗的陈述不能用第一次的证明"""
        other = os.path.join(temp_dir, "statement2.json")
        step("shuffle", "--params", workflow["params"], "--pk", workflow["public"],
             "--commit-key", workflow["key"], "--in", workflow["inputs"], "--seed", "mix-2",
             "--out-statement", other, "--out-witness", os.path.join(temp_dir, "w2.json"))
        assert main(["verify", "--statement", other, "--proof", workflow["proof"]]) == EXIT_REJECT

    def test_chained_mix(self, workflow, temp_dir):
        """第一次混洗的输出作为第二次混洗的输入"""
        statement = load_statement(workflow["statement"])
        outputs = os.path.join(temp_dir, "outputs.json")
        dump_envelope(EnvelopeKind.CIPHERTEXTS, ciphertexts_body(list(statement.outputs)), outputs)

        s2 = os.path.join(temp_dir, "s2.json")
        w2 = os.path.join(temp_dir, "w2.json")
        p2 = os.path.join(temp_dir, "p2.json")
        step("shuffle", "--params", workflow["params"], "--pk", workflow["public"],
             "--commit-key", workflow["key"], "--in", outputs, "--seed", "mix-2",
             "--out-statement", s2, "--out-witness", w2)
        step("prove", "--statement", s2, "--witness", w2, "--seed", "proof-2", "--out", p2)
        assert main(["verify", "--statement", s2, "--proof", p2]) == EXIT_OK

    def test_demo_extract(self, workflow, capsys):
        capsys.readouterr()
        code = main(["demo-extract", "--params", workflow["params"], "--pk", workflow["public"],
                     "--commit-key", workflow["key"], "--n", "4", "--w", "2", "--seed", "demo"])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert out.strip().endswith("PASS")


def run_cli_process(*argv, hash_seed="0"):
    """在独立的解释器进程中运行命令行"""
    env = dict(os.environ, PYTHONHASHSEED=hash_seed)
    return subprocess.run(
        [sys.executable, "-m", "src.pshuf.cli", *argv],
        cwd=REPO_ROOT, env=env, capture_output=True, text=True, timeout=300,
    )


@pytest.mark.integration
@pytest.mark.slow
class TestCrossProcessDeterminism:
    """同一种子在两个进程中得到相同的证明字节"""

    def test_prove_twice_in_separate_processes(self, workflow, temp_dir):
        paths = [os.path.join(temp_dir, f"proof-run-{i}.json") for i in (1, 2)]
        for path, hash_seed in zip(paths, ("1", "2")):
            result = run_cli_process("prove", "--statement", workflow["statement"],
                                     "--witness", workflow["witness"], "--seed", "proof-1",
                                     "--out", path, hash_seed=hash_seed)
            assert result.returncode == EXIT_OK, result.stderr

        first, second = (Path(p).read_bytes() for p in paths)
        assert first == second
        assert first == Path(workflow["proof"]).read_bytes()

        statement = load_statement(workflow["statement"])
        proofs = [NIProof.from_dict(load_envelope(p, EnvelopeKind.PROOF)) for p in paths]
        assert recompute_challenges(statement, proofs[0]) == \
            recompute_challenges(statement, proofs[1])
        assert all(verify_ni(statement, proof).accepted for proof in proofs)

        result = run_cli_process("verify", "--statement", workflow["statement"],
                                 "--proof", paths[1])
        assert result.returncode == EXIT_OK
        assert result.stdout.strip() == "ACCEPT"
