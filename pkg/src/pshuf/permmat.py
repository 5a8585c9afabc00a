"""
置换与矩阵模块

置换、置换矩阵以及 Z_q 上的矩阵/向量运算，包括抽取器需要的高斯-约当求逆。

方向约定：置换 pi 对应的矩阵满足 M[i][pi(i)] = 1，
因此 (M x)_i = x_{pi(i)}，输出 e'_i 由输入 e_{pi(i)} 重加密得到。
下标在代码中一律从 0 开始，one_based() 仅用于展示。
"""

import random
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import gmpy2

from .exceptions import ShapeMismatchError, SingularMatrixError, ValidationError


@dataclass(frozen=True)
class Permutation:
    """{0..N-1} 上的双射，mapping[i] = pi(i)"""
    mapping: Tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.mapping)
        if sorted(self.mapping) != list(range(n)):
            raise ValidationError("不是合法的置换", details={"mapping": list(self.mapping)})

    @property
    def n(self) -> int:
        return len(self.mapping)

    def __call__(self, i: int) -> int:
        return self.mapping[i]

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, j in enumerate(self.mapping):
            inv[j] = i
        return Permutation(tuple(inv))

    def apply(self, items: Sequence) -> list:
        """返回 (items[pi(0)], ..., items[pi(N-1)])"""
        if len(items) != self.n:
            raise ShapeMismatchError("置换长度不一致", expected=self.n, actual=len(items))
        return [items[j] for j in self.mapping]

    def one_based(self) -> str:
        """单行展示，例如 1->3 2->1 3->2"""
        return " ".join(f"{i + 1}->{j + 1}" for i, j in enumerate(self.mapping))

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def random(cls, n: int, rng: random.Random) -> "Permutation":
        """Fisher-Yates 均匀采样"""
        items = list(range(n))
        for i in range(n - 1, 0, -1):
            j = rng.randrange(i + 1)
            items[i], items[j] = items[j], items[i]
        return cls(tuple(items))


@dataclass(frozen=True)
class ScalarMatrix:
    """Z_q 上的矩形矩阵，按行存储"""
    rows: Tuple[Tuple[int, ...], ...]
    q: int

    def __post_init__(self) -> None:
        if self.rows:
            width = len(self.rows[0])
            if any(len(row) != width for row in self.rows):
                raise ShapeMismatchError("矩阵各行长度不一致")

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def __getitem__(self, index: Tuple[int, int]) -> int:
        i, j = index
        return self.rows[i][j]

    def row(self, i: int) -> Tuple[int, ...]:
        return self.rows[i]

    def column(self, j: int) -> Tuple[int, ...]:
        return tuple(row[j] for row in self.rows)

    def columns(self) -> List[Tuple[int, ...]]:
        return [self.column(j) for j in range(self.n_cols)]

    def transpose(self) -> "ScalarMatrix":
        return ScalarMatrix.from_columns(self.rows, self.q)

    def is_square(self) -> bool:
        return self.n_rows == self.n_cols

    def to_lists(self) -> List[List[int]]:
        return [list(row) for row in self.rows]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], q: int) -> "ScalarMatrix":
        return cls(tuple(tuple(x % q for x in row) for row in rows), q)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], q: int) -> "ScalarMatrix":
        if not columns:
            return cls((), q)
        n_rows = len(columns[0])
        if any(len(col) != n_rows for col in columns):
            raise ShapeMismatchError("矩阵各列长度不一致")
        return cls(tuple(tuple(col[i] % q for col in columns) for i in range(n_rows)), q)

    @classmethod
    def identity(cls, n: int, q: int) -> "ScalarMatrix":
        return cls(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)), q)

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int, q: int) -> "ScalarMatrix":
        return cls(tuple((0,) * n_cols for _ in range(n_rows)), q)


def perm_to_matrix(pi: Permutation, q: int) -> ScalarMatrix:
    """M[i][pi(i)] = 1"""
    n = pi.n
    rows = []
    for i in range(n):
        row = [0] * n
        row[pi(i)] = 1
        rows.append(tuple(row))
    return ScalarMatrix(tuple(rows), q)


def permutation_of(m: ScalarMatrix) -> Optional[Permutation]:
    """m 为置换矩阵时返回对应置换，否则返回 None"""
    if not m.is_square():
        return None
    n = m.n_rows
    mapping = []
    for row in m.rows:
        if row.count(1) != 1 or row.count(0) != n - 1:
            return None
        mapping.append(row.index(1))
    if len(set(mapping)) != n:
        return None
    return Permutation(tuple(mapping))


def is_permutation_matrix(m: ScalarMatrix) -> bool:
    """方阵，元素为 0/1，每行每列恰有一个 1"""
    return permutation_of(m) is not None


def matrix_to_perm(m: ScalarMatrix) -> Permutation:
    pi = permutation_of(m)
    if pi is None:
        raise ValidationError("矩阵不是置换矩阵")
    return pi


def inner(a: Sequence[int], b: Sequence[int], q: int) -> int:
    """<a, b> mod q"""
    if len(a) != len(b):
        raise ShapeMismatchError("内积的向量长度不一致", expected=len(a), actual=len(b))
    return sum(x * y for x, y in zip(a, b)) % q


def mat_vec_mul(m: ScalarMatrix, x: Sequence[int]) -> Tuple[int, ...]:
    if m.n_cols != len(x):
        raise ShapeMismatchError("矩阵与向量维度不匹配", expected=m.n_cols, actual=len(x))
    return tuple(inner(row, x, m.q) for row in m.rows)


def vec_mat_mul(x: Sequence[int], m: ScalarMatrix) -> Tuple[int, ...]:
    if m.n_rows != len(x):
        raise ShapeMismatchError("向量与矩阵维度不匹配", expected=m.n_rows, actual=len(x))
    return tuple(inner(x, m.column(j), m.q) for j in range(m.n_cols))


def mat_mul(a: ScalarMatrix, b: ScalarMatrix) -> ScalarMatrix:
    if a.n_cols != b.n_rows:
        raise ShapeMismatchError("矩阵乘法维度不匹配",
                                 expected=a.n_cols, actual=b.n_rows)
    columns = [b.column(j) for j in range(b.n_cols)]
    return ScalarMatrix(
        tuple(tuple(inner(row, col, a.q) for col in columns) for row in a.rows), a.q
    )


def mat_inverse(u: ScalarMatrix) -> ScalarMatrix:
    """高斯-约当消元求逆；奇异时抛出 SingularMatrixError"""
    if not u.is_square():
        raise ShapeMismatchError("只能对方阵求逆", expected="square",
                                 actual=(u.n_rows, u.n_cols))
    q = u.q
    n = u.n_rows
    # 增广矩阵 [U | I]
    aug = [list(row) + [1 if i == j else 0 for j in range(n)]
           for i, row in enumerate(u.rows)]

    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] % q != 0), None)
        if pivot is None:
            raise SingularMatrixError("矩阵在 Z_q 上不可逆", details={"column": col})
        aug[col], aug[pivot] = aug[pivot], aug[col]

        inv_pivot = int(gmpy2.invert(aug[col][col], q))
        aug[col] = [x * inv_pivot % q for x in aug[col]]

        for r in range(n):
            if r != col and aug[r][col] % q != 0:
                factor = aug[r][col]
                aug[r] = [(x - factor * y) % q for x, y in zip(aug[r], aug[col])]

    return ScalarMatrix(tuple(tuple(row[n:]) for row in aug), q)


def perm_product_check(m: ScalarMatrix, x: Sequence[int]) -> int:
    """prod_i <第 i 列, x> - prod_i x_i mod q；置换矩阵恒为 0"""
    if not m.is_square() or m.n_rows != len(x):
        raise ShapeMismatchError("维度不匹配", expected=m.n_rows, actual=len(x))
    q = m.q
    lhs = 1
    for j in range(m.n_cols):
        lhs = lhs * inner(m.column(j), x, q) % q
    rhs = 1
    for xi in x:
        rhs = rhs * xi % q
    return (lhs - rhs) % q
