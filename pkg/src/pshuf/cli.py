"""
命令行入口

子命令读写规范容器文件。退出码：0 成功/接受，1 验证拒绝或抽取演示失败，2 用法或格式错误。
验证路径从不读取见证或私钥。

非规范编码（前导零、大写十六进制、多余字段）在解析阶段拒绝，退出码 2；
能解析的证明才进入验证方程，方程不成立时退出码 1。
"""

import argparse
import random
import sys
import time
from pathlib import Path
from typing import Callable, Dict, List, Optional

from .commit import gen_commit_key
from .config import ConfigManager
from .elgamal import dec_vec, enc_vec, keygen
from .exceptions import ErrorHandler, PShufError
from .fiat_shamir import NIProof, prove_ni, verify_ni
from .group import gen_params
from .logger import get_logger, set_log_level, set_service_name
from .permmat import matrix_to_perm
from .rewinding import run_extraction
from .serialization import (
    EnvelopeKind,
    ciphertexts_body,
    dump_envelope,
    load_ciphertexts,
    load_commit_key,
    load_envelope,
    load_keypair,
    load_params,
    load_statement,
    load_transcript,
    load_witness,
)
from .shuffle_core import shuffle
from .sigma import VectorChallenge, simulate, verify

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_REJECT = 1
EXIT_USAGE = 2


def _rng(seed: Optional[str]) -> random.Random:
    """给定种子时可复现；否则使用系统随机源"""
    if seed is None:
        return random.SystemRandom()
    return random.Random(seed)


def cmd_gen_params(args: argparse.Namespace) -> int:
    params = gen_params(args.preset)
    params.validate()
    dump_envelope(EnvelopeKind.PARAMS, params.to_dict(), args.out)
    print(f"params {args.preset}: q has {params.q.bit_length()} bits")
    return EXIT_OK


def cmd_keygen(args: argparse.Namespace) -> int:
    params = load_params(args.params)
    pair = keygen(params, _rng(args.seed))
    dump_envelope(EnvelopeKind.KEYPAIR, {"params": params.to_dict(), **pair.to_dict()}, args.out)
    if args.public_out:
        dump_envelope(EnvelopeKind.KEYPAIR,
                      {"params": params.to_dict(), **pair.public().to_dict()}, args.public_out)
    print(f"pk {pair.pk:x}")
    return EXIT_OK


def cmd_gen_commit_key(args: argparse.Namespace) -> int:
    params = load_params(args.params)
    key = gen_commit_key(params, args.n, args.seed.encode("utf-8"))
    dump_envelope(EnvelopeKind.COMMIT_KEY, {"params": params.to_dict(), **key.to_dict()}, args.out)
    print(f"commit key N={key.n}")
    return EXIT_OK


def cmd_encrypt(args: argparse.Namespace) -> int:
    params = load_params(args.params)
    pk = load_keypair(args.pk, params).pk
    rng = _rng(args.seed)
    vectors = []
    for _ in range(args.count):
        messages = [params.random_element(rng) for _ in range(args.width)]
        randomness = [params.random_scalar(rng) for _ in range(args.width)]
        vectors.append(enc_vec(params, pk, messages, randomness))
    dump_envelope(EnvelopeKind.CIPHERTEXTS, ciphertexts_body(vectors), args.out)
    print(f"ciphertexts N={args.count} w={args.width}")
    return EXIT_OK


def cmd_decrypt(args: argparse.Namespace) -> int:
    params = load_params(args.params)
    pair = load_keypair(args.keypair, params)
    if pair.sk is None:
        print("error: keypair file has no secret key", file=sys.stderr)
        return EXIT_USAGE
    for vector in load_ciphertexts(args.input, params):
        print(" ".join(f"{m:x}" for m in dec_vec(params, pair.sk, vector)))
    return EXIT_OK


def cmd_shuffle(args: argparse.Namespace) -> int:
    params = load_params(args.params)
    pk = load_keypair(args.pk, params).pk
    key = load_commit_key(args.commit_key, params)
    inputs = load_ciphertexts(args.input, params)
    result = shuffle(params, key, pk, inputs, _rng(args.seed))
    dump_envelope(EnvelopeKind.STATEMENT, result.statement.to_dict(), args.out_statement)
    dump_envelope(EnvelopeKind.WITNESS, result.witness.to_dict(), args.out_witness)
    print(f"shuffled N={result.statement.n} w={result.statement.width}")
    return EXIT_OK


def cmd_prove(args: argparse.Namespace) -> int:
    statement = load_statement(args.statement)
    witness = load_witness(args.witness, statement.params)
    proof = prove_ni(statement, witness, _rng(args.seed))
    dump_envelope(EnvelopeKind.PROOF, proof.to_dict(), args.out)
    print("proof written")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    statement = load_statement(args.statement)
    if args.proof:
        proof = NIProof.from_dict(load_envelope(args.proof, EnvelopeKind.PROOF))
        result = verify_ni(statement, proof)
    else:
        result = verify(statement, load_transcript(args.transcript))

    if result.accepted:
        print("ACCEPT")
        return EXIT_OK
    print(f"REJECT equation {result.failed_equation}: {result.reason}")
    return EXIT_REJECT


def cmd_simulate(args: argparse.Namespace) -> int:
    statement = load_statement(args.statement)
    rng = _rng(args.seed)
    params = statement.params
    u = VectorChallenge.random(params, statement.n, rng)
    c = params.random_scalar(rng)
    transcript = simulate(statement, u, c, rng)
    dump_envelope(EnvelopeKind.TRANSCRIPT, transcript.to_dict(), args.out)
    print("simulated transcript written")
    return EXIT_OK


def cmd_demo_extract(args: argparse.Namespace, max_demo_n: int) -> int:
    if not 1 <= args.n <= max_demo_n:
        print(f"error: --n must be between 1 and {max_demo_n}", file=sys.stderr)
        return EXIT_USAGE
    if args.w < 1:
        print("error: --w must be at least 1", file=sys.stderr)
        return EXIT_USAGE

    params = load_params(args.params)
    rng = _rng(args.seed)
    pk = load_keypair(args.pk, params).pk if args.pk else keygen(params, rng).pk
    if args.commit_key:
        key = load_commit_key(args.commit_key, params)
        if key.n != args.n:
            print(f"error: commit key has N={key.n}, expected {args.n}", file=sys.stderr)
            return EXIT_USAGE
    else:
        key = gen_commit_key(params, args.n, (args.seed or "demo").encode("utf-8"))

    inputs = [
        enc_vec(params, pk,
                [params.random_element(rng) for _ in range(args.w)],
                [params.random_scalar(rng) for _ in range(args.w)])
        for _ in range(args.n)
    ]
    result = shuffle(params, key, pk, inputs, rng)
    report = run_extraction(result.statement, result.witness, rng)
    outcome = report.outcome

    truth = result.witness.permutation
    if outcome.witness is None:
        print(f"outcome: {outcome.kind}")
        print("FAIL")
        return EXIT_REJECT

    recovered = matrix_to_perm(outcome.witness.M)
    print(f"permutation: {recovered.one_based()}")
    passed = recovered == truth and outcome.verify(result.statement)
    print("PASS" if passed else "FAIL")
    return EXIT_OK if passed else EXIT_REJECT


def build_parser(default_preset: str = "test160") -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pshuf",
        description="Parallel ElGamal shuffle with a verifiable proof of shuffle."
    )
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ERROR")
    parser.add_argument("--config", default=None, help="JSON configuration file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-params", help="write group parameters")
    p.add_argument("--preset", default=default_preset, choices=["toy", "test160", "prod2048"])
    p.add_argument("--out", required=True)

    p = sub.add_parser("keygen", help="generate an ElGamal key pair")
    p.add_argument("--params", required=True)
    p.add_argument("--seed", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--public-out", default=None, help="also write the public key alone")

    p = sub.add_parser("gen-commit-key", help="derive commitment parameters h, h_1..h_N")
    p.add_argument("--params", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("encrypt", help="encrypt random messages into shuffle input")
    p.add_argument("--params", required=True)
    p.add_argument("--pk", required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--width", type=int, default=1)
    p.add_argument("--seed", default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("decrypt", help="decrypt a ciphertexts file")
    p.add_argument("--params", required=True)
    p.add_argument("--keypair", required=True)
    p.add_argument("--in", dest="input", required=True)

    p = sub.add_parser("shuffle", help="permute and re-encrypt ciphertexts")
    p.add_argument("--params", required=True)
    p.add_argument("--pk", required=True)
    p.add_argument("--commit-key", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--seed", default=None)
    p.add_argument("--out-statement", required=True)
    p.add_argument("--out-witness", required=True)

    p = sub.add_parser("prove", help="produce a non-interactive proof of shuffle")
    p.add_argument("--statement", required=True)
    p.add_argument("--witness", required=True)
    p.add_argument("--seed", default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("verify", help="verify a proof or an interactive transcript")
    p.add_argument("--statement", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--proof")
    group.add_argument("--transcript")

    p = sub.add_parser("simulate", help="write a simulated transcript without the witness")
    p.add_argument("--statement", required=True)
    p.add_argument("--seed", default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("demo-extract", help="rewind an honest prover and extract its witness")
    p.add_argument("--params", required=True)
    p.add_argument("--pk", default=None)
    p.add_argument("--commit-key", default=None)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--w", type=int, default=1)
    p.add_argument("--seed", default=None)

    return parser


COMMANDS: Dict[str, Callable[[argparse.Namespace], int]] = {
    "gen-params": cmd_gen_params,
    "keygen": cmd_keygen,
    "gen-commit-key": cmd_gen_commit_key,
    "encrypt": cmd_encrypt,
    "decrypt": cmd_decrypt,
    "shuffle": cmd_shuffle,
    "prove": cmd_prove,
    "verify": cmd_verify,
    "simulate": cmd_simulate,
}


def main(argv: Optional[List[str]] = None) -> int:
    try:
        config = ConfigManager().config
    except PShufError as e:
        print(f"error: {e.message}", file=sys.stderr)
        return EXIT_USAGE

    parser = build_parser(config.protocol.default_preset)
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    if args.config:
        try:
            if not Path(args.config).exists():
                raise FileNotFoundError(f"配置文件不存在: {args.config}")
            config = ConfigManager(config_path=args.config).reload_config()
        except (PShufError, OSError) as e:
            error = ErrorHandler.wrap_exception(e, "config")
            print(f"error [{error.error_code}]: {error.message}", file=sys.stderr)
            return EXIT_USAGE

    set_service_name(config.logging.service_name)
    set_log_level(args.log_level or config.logging.level)

    start = time.perf_counter()
    status = "error"
    try:
        if args.command == "demo-extract":
            code = cmd_demo_extract(args, config.protocol.max_demo_n)
        else:
            code = COMMANDS[args.command](args)
        status = {EXIT_OK: "success", EXIT_REJECT: "rejected"}.get(code, "error")
        return code
    except (PShufError, OSError) as e:
        error = ErrorHandler.wrap_exception(e, args.command)
        print(f"error [{error.error_code}]: {error.message}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        logger.log_command(args.command, vars(args), status, time.perf_counter() - start)


if __name__ == "__main__":
    sys.exit(main())
