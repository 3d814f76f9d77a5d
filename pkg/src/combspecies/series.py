"""Dense truncated power series over exact and floating coefficient rings.

A :class:`TruncSeries` stores ``coeffs[0..N-1]`` and stands for the series
known modulo ``z^N``.  Three rings are supported: ``INT`` (Python ints),
``RAT`` (ints and :class:`fractions.Fraction`, always reduced) and ``FLOAT``.

Multiplication goes through :func:`poly_mul`, which picks schoolbook,
Karatsuba or Kronecker substitution (packing a polynomial into one big
integer) depending on the configured backend.
"""

from __future__ import annotations

import contextlib
import contextvars
import math
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence

from .errors import RingMismatch, ZeroConstantTerm

INT, RAT, FLOAT = "int", "rat", "float"
RINGS = (INT, RAT, FLOAT)

KARATSUBA_THRESHOLD = 32

try:  # GMP multiplication is much faster than CPython's for huge operands
    import gmpy2 as _gmpy2
except ImportError:  # pragma: no cover - optional
    _gmpy2 = None


# -- configuration ---------------------------------------------------------

_backend: contextvars.ContextVar[str] = contextvars.ContextVar("series_backend", default="auto")
_threshold: contextvars.ContextVar[int] = contextvars.ContextVar(
    "karatsuba_threshold", default=KARATSUBA_THRESHOLD
)
_counter: contextvars.ContextVar[Optional[list]] = contextvars.ContextVar("mul_counter", default=None)

BACKENDS = ("auto", "schoolbook", "karatsuba", "kronecker")


@contextlib.contextmanager
def multiplication_backend(name: str, threshold: Optional[int] = None):
    """Temporarily select the polynomial multiplication backend.

    ``auto`` uses Kronecker substitution for exact rings on long operands and
    Karatsuba otherwise.
    """
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}; expected one of {BACKENDS}")
    tok = _backend.set(name)
    tok2 = _threshold.set(threshold) if threshold is not None else None
    try:
        yield
    finally:
        _backend.reset(tok)
        if tok2 is not None:
            _threshold.reset(tok2)


@contextlib.contextmanager
def count_multiplications():
    """Count coefficient-ring multiplications performed inside the block.

    Yields a one-element list whose entry is updated in place.  Only the
    schoolbook and Karatsuba paths count individual ring products; a
    Kronecker product is one big-integer multiplication and counts as one.
    """
    box = [0]
    tok = _counter.set(box)
    try:
        yield box
    finally:
        _counter.reset(tok)


# -- polynomial products on plain lists -----------------------------------


def _school(a: Sequence, b: Sequence) -> list:
    out = [0] * (len(a) + len(b) - 1)
    done = 0
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            if y:
                out[i + j] += x * y
                done += 1
    box = _counter.get()
    if box is not None:
        box[0] += done
    return out


def _addl(a: Sequence, b: Sequence) -> list:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, y in enumerate(b):
        out[i] += y
    return out


def _kara(a: Sequence, b: Sequence, th: int) -> list:
    n, m = len(a), len(b)
    if n > m:
        a, b, n, m = b, a, m, n
    if n <= th:
        return _school(a, b)
    if 2 * n <= m:
        out = [0] * (n + m - 1)
        for s in range(0, m, n):
            for i, c in enumerate(_kara(a, b[s : s + n], th)):
                out[s + i] += c
        return out
    h = (m + 1) // 2
    a0, a1, b0, b1 = a[:h], a[h:], b[:h], b[h:]
    z0 = _kara(a0, b0, th)
    z2 = _kara(a1, b1, th) if a1 else []
    mid = _kara(_addl(a0, a1), _addl(b0, b1), th)
    out = [0] * (n + m - 1)
    for i, c in enumerate(z0):
        out[i] += c
        mid[i] -= c
    for i, c in enumerate(z2):
        out[i + 2 * h] += c
        mid[i] -= c
    for i, c in enumerate(mid):
        if i + h < len(out):
            out[i + h] += c
    return out


def _pack(a: Sequence[int], k: int, off: int) -> int:
    raw = b"".join((x + off).to_bytes(k, "little") for x in a)
    return int.from_bytes(raw, "little") - int.from_bytes(off.to_bytes(k, "little") * len(a), "little")


def _kron_int(a: Sequence[int], b: Sequence[int], keep: int) -> list:
    ma = max(abs(x) for x in a)
    mb = max(abs(x) for x in b)
    if ma == 0 or mb == 0:
        return [0] * keep
    bits = (ma * mb * min(len(a), len(b))).bit_length() + 2
    k = (bits + 7) // 8
    off = 1 << (8 * k - 1)
    pa, pb = _pack(a, k, off), _pack(b, k, off)
    if _gmpy2 is not None:
        prod = int(_gmpy2.mpz(pa) * _gmpy2.mpz(pb))
    else:
        prod = pa * pb
    box = _counter.get()
    if box is not None:
        box[0] += 1
    total = len(a) + len(b) - 1
    t = min(keep, total)
    # adding `off` to every digit makes them all nonnegative, so plain
    # base-256^k digits can be read off the bytes
    prod += int.from_bytes(off.to_bytes(k, "little") * total, "little")
    raw = prod.to_bytes(k * total, "little")
    out = [int.from_bytes(raw[i * k : (i + 1) * k], "little") - off for i in range(t)]
    out.extend([0] * (keep - len(out)))
    return out


def _kron_rat(a: Sequence, b: Sequence, keep: int) -> list:
    da = math.lcm(*(x.denominator for x in a))
    db = math.lcm(*(x.denominator for x in b))
    ia = [x.numerator * (da // x.denominator) for x in a]
    ib = [x.numerator * (db // x.denominator) for x in b]
    d = da * db
    out = _kron_int(ia, ib, keep)
    if d == 1:
        return out
    return [Fraction(c, d) if c else 0 for c in out]


def poly_mul(a: Sequence, b: Sequence, ring: str, keep: Optional[int] = None) -> list:
    """Coefficients 0..keep-1 of the product of two coefficient lists."""
    if not a or not b:
        return [0.0 if ring == FLOAT else 0] * (keep or 0)
    total = len(a) + len(b) - 1
    keep = total if keep is None else keep
    a, b = a[:keep], b[:keep]
    if ring == FLOAT:
        from . import _kernels

        out = _kernels.convolve(a, b).tolist()
        box = _counter.get()
        if box is not None:
            box[0] += len(a) * len(b)
    else:
        backend = _backend.get()
        th = _threshold.get()
        small = min(len(a), len(b))
        sparse = _sparse_mul(a, b)
        if sparse is not None:
            out = sparse
        elif backend == "schoolbook" or (backend != "kronecker" and small <= th):
            out = _school(a, b)
        elif backend == "karatsuba" or (backend == "auto" and small <= 4 * th):
            out = _kara(a, b, th)
        elif ring == INT:
            return _kron_int(a, b, keep)
        else:
            return _kron_rat(a, b, keep)
    out = out[:keep]
    if len(out) < keep:
        out.extend([0] * (keep - len(out)))
    return out


def _sparse_mul(a: Sequence, b: Sequence) -> Optional[list]:
    # multiplying by a monomial or a binomial (z, 1 - z, ...) is a shift-and-add
    for x, y in ((a, b), (b, a)):
        nz = [(i, c) for i, c in enumerate(x) if c]
        if len(nz) <= 2:
            out = [0] * (len(a) + len(b) - 1)
            for i, c in nz:
                for j, d in enumerate(y):
                    if d:
                        out[i + j] += c * d
            box = _counter.get()
            if box is not None:
                box[0] += len(nz) * len(y)
            return out
    return None


# -- coefficients ----------------------------------------------------------


def coerce(x, ring: str):
    if ring == FLOAT:
        return float(x)
    if ring == RAT:
        if isinstance(x, int):
            return x
        if isinstance(x, float):
            return Fraction(x)
        x = Fraction(x)
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, int):
        return x
    x = Fraction(x)
    if x.denominator != 1:
        raise RingMismatch(f"{x} is not an integer")
    return x.numerator


def _div(x, n: int, ring: str):
    if ring == FLOAT:
        return x / n
    if ring == INT:
        raise RingMismatch("division in the integer ring")
    q = Fraction(x, n) if isinstance(x, int) else x / n
    return q.numerator if q.denominator == 1 else q


def fmt_coeff(x) -> str:
    """Decimal string for a coefficient: "num/den" for rationals."""
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return str(x)


# -- the series type -------------------------------------------------------


class TruncSeries:
    """A power series known modulo ``z^order``."""

    __slots__ = ("coeffs", "ring")

    def __init__(self, coeffs: Iterable, ring: str = RAT):
        if ring not in RINGS:
            raise ValueError(f"unknown ring {ring!r}")
        self.ring = ring
        self.coeffs = [coerce(c, ring) for c in coeffs]

    @classmethod
    def _raw(cls, coeffs: list, ring: str) -> "TruncSeries":
        s = cls.__new__(cls)
        s.coeffs = coeffs
        s.ring = ring
        return s

    # -- construction ------------------------------------------------------

    @classmethod
    def zero(cls, order: int, ring: str = RAT) -> "TruncSeries":
        return cls._raw([0.0 if ring == FLOAT else 0] * order, ring)

    @classmethod
    def constant(cls, c, order: int, ring: str = RAT) -> "TruncSeries":
        out = cls.zero(order, ring)
        if order:
            out.coeffs[0] = coerce(c, ring)
        return out

    @classmethod
    def one(cls, order: int, ring: str = RAT) -> "TruncSeries":
        return cls.constant(1, order, ring)

    @classmethod
    def variable(cls, order: int, ring: str = RAT) -> "TruncSeries":
        out = cls.zero(order, ring)
        if order > 1:
            out.coeffs[1] = coerce(1, ring)
        return out

    # -- basic protocol ----------------------------------------------------

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i]

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return len(self.coeffs) == len(other.coeffs) and all(
            x == y for x, y in zip(self.coeffs, other.coeffs)
        )

    def __hash__(self):
        return hash((self.ring, tuple(self.coeffs)))

    def __repr__(self) -> str:
        shown = ", ".join(fmt_coeff(c) for c in self.coeffs[:12])
        more = ", ..." if len(self.coeffs) > 12 else ""
        return f"TruncSeries([{shown}{more}], ring={self.ring}, order={self.order})"

    def valuation(self) -> int:
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return self.order

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def truncate(self, n: int) -> "TruncSeries":
        if n > self.order:
            raise ValueError(f"cannot truncate a series of order {self.order} to {n}")
        return TruncSeries._raw(self.coeffs[:n], self.ring)

    def pad(self, n: int) -> "TruncSeries":
        """Reinterpret the prefix as an exact polynomial known to order ``n``."""
        if n <= self.order:
            return self.truncate(n)
        z = 0.0 if self.ring == FLOAT else 0
        return TruncSeries._raw(self.coeffs + [z] * (n - self.order), self.ring)

    def shift(self, k: int, order: Optional[int] = None) -> "TruncSeries":
        """``z^k * self`` known to ``order`` (default: own order + k)."""
        order = self.order + k if order is None else order
        z = 0.0 if self.ring == FLOAT else 0
        out = [z] * min(k, order) + self.coeffs[: max(order - k, 0)]
        out.extend([z] * (order - len(out)))
        return TruncSeries._raw(out, self.ring)

    def to_ring(self, ring: str) -> "TruncSeries":
        if ring == self.ring:
            return self
        return TruncSeries(self.coeffs, ring)

    def evaluate(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    # -- arithmetic --------------------------------------------------------

    def _check(self, other: "TruncSeries"):
        if self.ring != other.ring:
            raise RingMismatch(f"cannot combine {self.ring} and {other.ring} series")

    def __add__(self, other):
        if not isinstance(other, TruncSeries):
            return self + TruncSeries.constant(other, self.order, self.ring)
        self._check(other)
        n = min(self.order, other.order)
        return TruncSeries._raw([x + y for x, y in zip(self.coeffs[:n], other.coeffs[:n])], self.ring)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries._raw([-x for x in self.coeffs], self.ring)

    def __sub__(self, other):
        if not isinstance(other, TruncSeries):
            return self - TruncSeries.constant(other, self.order, self.ring)
        self._check(other)
        n = min(self.order, other.order)
        return TruncSeries._raw([x - y for x, y in zip(self.coeffs[:n], other.coeffs[:n])], self.ring)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncSeries):
            return mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c) -> "TruncSeries":
        c = coerce(c, self.ring) if self.ring != RAT else c
        out = [x * c for x in self.coeffs]
        if self.ring == RAT:
            out = [_norm(x) for x in out]
        return TruncSeries._raw(out, self.ring)

    def divide(self, n: int) -> "TruncSeries":
        """Divide every coefficient by the integer ``n`` (not over INT)."""
        return TruncSeries._raw([_div(x, n, self.ring) for x in self.coeffs], self.ring)


def _norm(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


# -- operations -------------------------------------------------------------


def mul(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    """Product modulo ``z^min(order a, order b)``."""
    a._check(b)
    n = min(a.order, b.order)
    return TruncSeries._raw(poly_mul(a.coeffs[:n], b.coeffs[:n], a.ring, keep=n), a.ring)


def promote(a: TruncSeries, ring: str = RAT) -> TruncSeries:
    return a.to_ring(ring)


def demote(a: TruncSeries, ring: str = INT) -> TruncSeries:
    """Convert back to ``ring``; raises RingMismatch if a coefficient does not fit."""
    return TruncSeries(a.coeffs, ring)


def _orders(n: int) -> List[int]:
    ladder = [n]
    while ladder[-1] > 1:
        ladder.append((ladder[-1] + 1) // 2)
    return ladder[::-1]


def precision_ladder(n: int) -> List[int]:
    """Orders 1 = n_0 < n_1 < ... < n_r = n with n_{i+1} = 2 n_i or 2 n_i - 1."""
    return _orders(max(n, 1))


def inv(a: TruncSeries) -> TruncSeries:
    """Reciprocal by precision-doubling Newton: b <- b + b (1 - a b)."""
    n = a.order
    if n == 0:
        return a
    a0 = a.coeffs[0]
    if not a0:
        raise ZeroConstantTerm("series with zero constant term has no inverse")
    if a.ring == INT:
        if a0 not in (1, -1):
            raise RingMismatch(f"constant term {a0} is not a unit of the integers")
        b0 = a0
    elif a.ring == RAT:
        b0 = _norm(Fraction(1) / a0)
    else:
        b0 = 1.0 / a0
    b = TruncSeries._raw([b0], a.ring)
    for p in precision_ladder(n)[1:]:
        bp = b.pad(p)
        e = TruncSeries.one(p, a.ring) - mul(a.truncate(p), bp)
        b = bp + mul(bp, e)
    return b


def differentiate(a: TruncSeries) -> TruncSeries:
    return TruncSeries._raw([i * c for i, c in enumerate(a.coeffs)][1:], a.ring)


def integrate(a: TruncSeries) -> TruncSeries:
    """Primitive with zero constant term; order grows by one.

    Over the integers the result is promoted to rationals.
    """
    ring = RAT if a.ring == INT else a.ring
    z = 0.0 if ring == FLOAT else 0
    return TruncSeries._raw([z] + [_div(c, i + 1, ring) for i, c in enumerate(a.coeffs)], ring)


def log(a: TruncSeries) -> TruncSeries:
    """log(a) = integral of a'/a, for a(0) = 1."""
    if a.order == 0:
        return a
    if a.coeffs[0] != 1:
        raise ValueError("log requires a constant term equal to 1")
    b = promote(a, RAT) if a.ring == INT else a
    return integrate(mul(differentiate(b), inv(b.truncate(b.order - 1))))


def exp(a: TruncSeries) -> TruncSeries:
    """exp(a) for a(0) = 0 by the coupled iteration on (m, 1/m).

    m <- m + m * Int(mbar * (a' m - m')), with mbar refined by the reciprocal
    Newton step at half precision.  Over the integers the result is rational.
    """
    n = a.order
    if n == 0:
        return a
    if a.coeffs[0]:
        raise ValueError("exp requires a zero constant term")
    b = promote(a, RAT) if a.ring == INT else a
    ring = b.ring
    da = differentiate(b)
    m = TruncSeries.one(1, ring)
    mbar = TruncSeries.one(1, ring)
    prev = 1
    for p in precision_ladder(n)[1:]:
        # mbar: correct to order prev from the exact-to-prev m
        half = prev
        mb = mbar.pad(half)
        mb = mb + mul(mb, TruncSeries.one(half, ring) - mul(m.truncate(half), mb))
        mbar = mb
        mp = m.pad(p)
        inner = mul(da.truncate(p - 1), mp.truncate(p - 1)) - differentiate(mp)
        corr = integrate(mul(mbar.pad(p - 1), inner))
        m = mp + mul(mp, corr)
        prev = p
    return m


def subst_power(a: TruncSeries, k: int) -> TruncSeries:
    """a(z^k) modulo z^order; no ring multiplications."""
    if k < 1:
        raise ValueError("k must be positive")
    if k == 1:
        return a
    n = a.order
    z = 0.0 if a.ring == FLOAT else 0
    out = [z] * n
    for j in range((n - 1) // k + 1):
        out[j * k] = a.coeffs[j]
    return TruncSeries._raw(out, a.ring)


def power(a: TruncSeries, e: int) -> TruncSeries:
    """a^e by repeated squaring (e >= 0)."""
    result = TruncSeries.one(a.order, a.ring)
    base = a
    while e:
        if e & 1:
            result = mul(result, base)
        e >>= 1
        if e:
            base = mul(base, base)
    return result


def powers(a: TruncSeries, top: int) -> List[TruncSeries]:
    """[a^0, a^1, ..., a^top]."""
    out = [TruncSeries.one(a.order, a.ring)]
    for _ in range(top):
        out.append(mul(out[-1], a) if len(out) > 1 else a)
    return out


def series_from_poly(coeffs, order: int, ring: str) -> TruncSeries:
    """An exact polynomial viewed as a series known to ``order``."""
    return TruncSeries(list(coeffs)[:order], ring).pad(order)


__all__ = [
    "INT",
    "RAT",
    "FLOAT",
    "TruncSeries",
    "mul",
    "inv",
    "exp",
    "log",
    "integrate",
    "differentiate",
    "subst_power",
    "power",
    "powers",
    "promote",
    "demote",
    "precision_ladder",
    "poly_mul",
    "multiplication_backend",
    "count_multiplications",
    "fmt_coeff",
]
