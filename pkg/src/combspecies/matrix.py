"""Square matrices of truncated series sharing one order."""

from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence

from .errors import SingularLinearSystem
from .series import FLOAT, INT, RAT, TruncSeries, coerce, mul, precision_ladder


class SeriesMatrix:
    __slots__ = ("rows",)

    def __init__(self, rows: Sequence[Sequence[TruncSeries]]):
        self.rows: List[List[TruncSeries]] = [list(r) for r in rows]
        orders = {e.order for r in self.rows for e in r}
        if len(orders) > 1:
            raise ValueError(f"entries of a series matrix must share one order, got {sorted(orders)}")

    @classmethod
    def identity(cls, m: int, order: int, ring: str) -> "SeriesMatrix":
        return cls(
            [
                [TruncSeries.one(order, ring) if i == j else TruncSeries.zero(order, ring) for j in range(m)]
                for i in range(m)
            ]
        )

    @classmethod
    def constant(cls, values, order: int, ring: str) -> "SeriesMatrix":
        return cls([[TruncSeries.constant(v, order, ring) for v in row] for row in values])

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def order(self) -> int:
        return self.rows[0][0].order if self.rows else 0

    @property
    def ring(self) -> str:
        return self.rows[0][0].ring

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        return isinstance(other, SeriesMatrix) and self.rows == other.rows

    def __repr__(self) -> str:
        return f"SeriesMatrix({self.rows!r})"

    def map(self, f) -> "SeriesMatrix":
        return SeriesMatrix([[f(e) for e in r] for r in self.rows])

    def truncate(self, n: int) -> "SeriesMatrix":
        return self.map(lambda e: e.truncate(n))

    def pad(self, n: int) -> "SeriesMatrix":
        return self.map(lambda e: e.pad(n))

    def constant_term(self):
        return [[e.coeffs[0] for e in r] for r in self.rows]

    def __add__(self, other: "SeriesMatrix") -> "SeriesMatrix":
        return SeriesMatrix([[x + y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "SeriesMatrix") -> "SeriesMatrix":
        return SeriesMatrix([[x - y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __matmul__(self, other):
        if isinstance(other, SeriesMatrix):
            return mat_mul(self, other)
        return mat_vec(self, other)


def _dot(row: Sequence[TruncSeries], col: Sequence[TruncSeries]) -> TruncSeries:
    acc = None
    for x, y in zip(row, col):
        if x.is_zero() or y.is_zero():
            continue
        p = mul(x, y)
        acc = p if acc is None else acc + p
    if acc is None:
        n = min(min(x.order for x in row), min(y.order for y in col))
        return TruncSeries.zero(n, row[0].ring)
    return acc


def mat_mul(a: SeriesMatrix, b: SeriesMatrix) -> SeriesMatrix:
    cols = list(zip(*b.rows))
    return SeriesMatrix([[_dot(r, c) for c in cols] for r in a.rows])


def mat_vec(a: SeriesMatrix, v: Sequence[TruncSeries]) -> List[TruncSeries]:
    return [_dot(r, v) for r in a.rows]


def constant_inverse(values, ring: str):
    """Inverse of a constant matrix by Gauss-Jordan elimination over ``ring``.

    Integer input is inverted over the rationals and converted back, which
    fails (RingMismatch) unless the matrix is unimodular.
    """
    m = len(values)
    work = RAT if ring == INT else ring
    one = 1.0 if work == FLOAT else Fraction(1)
    a = [[(float(x) if work == FLOAT else Fraction(x)) for x in row] + [one if i == j else 0 * one for j in range(m)]
         for i, row in enumerate(values)]
    for col in range(m):
        if work == FLOAT:
            piv = max(range(col, m), key=lambda r: abs(a[r][col]))
        else:
            piv = next((r for r in range(col, m) if a[r][col] != 0), None)
        if piv is None or a[piv][col] == 0:
            raise SingularLinearSystem("constant matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(m):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [[coerce(x, ring) for x in row[m:]] for row in a]


def matrix_inv_newton(mat: SeriesMatrix) -> SeriesMatrix:
    """Inverse of a series matrix by Schulz iteration N <- N + N (Id - M N).

    The constant term is inverted by exact elimination; every step doubles
    the number of correct coefficients.
    """
    n, m, ring = mat.order, mat.m, mat.ring
    inv0 = constant_inverse(mat.constant_term(), ring)
    cur = SeriesMatrix.constant(inv0, 1, ring)
    for p in precision_ladder(n)[1:]:
        cp = cur.pad(p)
        err = SeriesMatrix.identity(m, p, ring) - mat_mul(mat.truncate(p), cp)
        cur = cp + mat_mul(cp, err)
    return cur
