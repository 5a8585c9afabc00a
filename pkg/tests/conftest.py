"""
pytest配置和共用fixtures

提供测试所需的群参数、承诺参数、密钥对、可复现随机源以及诚实混洗实例。
"""

import random
import shutil
import tempfile
from typing import Generator

import pytest

from src.pshuf.commit import CommitmentKey
from src.pshuf.elgamal import KeyPair, keygen
from src.pshuf.group import GroupParams, gen_params
from src.pshuf.shuffle_core import ShuffleResult
from tests.utils.test_helpers import make_instance


# pytest配置
def pytest_configure(config):
    """pytest配置"""
    config.addinivalue_line(
        "markers", "unit: marks tests as unit tests"
    )
    config.addinivalue_line(
        "markers", "integration: marks tests as integration tests"
    )
    config.addinivalue_line(
        "markers", "performance: marks tests as performance tests"
    )
    config.addinivalue_line(
        "markers", "slow: marks tests as slow running"
    )


@pytest.fixture
def temp_dir() -> Generator[str, None, None]:
    """创建临时目录"""
    temp_dir = tempfile.mkdtemp()
    yield temp_dir
    shutil.rmtree(temp_dir, ignore_errors=True)


# 群参数fixtures
@pytest.fixture(scope="session")
def toy_params() -> GroupParams:
    """p=23, q=11, g=2"""
    return gen_params("toy")


@pytest.fixture(scope="session")
def test160_params() -> GroupParams:
    """160 位子群阶的测试参数"""
    return gen_params("test160")


@pytest.fixture
def rng() -> random.Random:
    """固定种子的随机源"""
    return random.Random(20240601)


@pytest.fixture
def toy_key(toy_params: GroupParams) -> CommitmentKey:
    """手工构造的 h=3, h1=4, h2=9"""
    return CommitmentKey(params=toy_params, h=3, basis=(4, 9))


@pytest.fixture
def toy_keypair(toy_params: GroupParams) -> KeyPair:
    """sk=2, pk=4"""
    return KeyPair.from_secret(toy_params, 2)


@pytest.fixture
def test160_keypair(test160_params: GroupParams) -> KeyPair:
    return keygen(test160_params, random.Random("keypair"))


@pytest.fixture
def honest_instance(test160_params: GroupParams, test160_keypair: KeyPair) -> ShuffleResult:
    """test160 上 N=3, w=2 的诚实混洗"""
    return make_instance(test160_params, 3, 2, "honest", test160_keypair)


@pytest.fixture
def toy_instance(toy_params: GroupParams, toy_keypair: KeyPair) -> ShuffleResult:
    """toy 参数上 N=2, w=1 的诚实混洗"""
    return make_instance(toy_params, 2, 1, "toy", toy_keypair)
