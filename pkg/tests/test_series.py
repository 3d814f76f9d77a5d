import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from combspecies.errors import RingMismatch, ZeroConstantTerm
from combspecies.evaluate import OGF
from combspecies.parser import parse_system
from combspecies.series import (
    FLOAT,
    INT,
    RAT,
    count_multiplications,
    differentiate,
    exp,
    integrate,
    inv,
    log,
    mul,
    multiplication_backend,
    precision_ladder,
    subst_power,
    TruncSeries,
)
from combspecies.solver import joyal_solve, newton_solve


def S(coeffs, ring=RAT):
    return TruncSeries(coeffs, ring)


def schoolbook(a, b, n):
    out = [0] * n
    for i, x in enumerate(a[:n]):
        for j, y in enumerate(b[: n - i]):
            out[i + j] += x * y
    return out


def _rand(rng, ring, n):
    if ring == INT:
        return [rng.randint(-10**6, 10**6) for _ in range(n)]
    if ring == RAT:
        return [Fraction(rng.randint(-999, 999), rng.randint(1, 99)) for _ in range(n)]
    return [rng.uniform(-1, 1) for _ in range(n)]


# -- multiplication --------------------------------------------------------


def test_mul_small():
    assert mul(S([1, 1, 0]), S([1, -1, 0])) == S([1, 0, -1])


def test_mul_truncates_to_min_order():
    assert mul(S([1, 1, 1, 1]), S([1, 1])).order == 2


def test_mul_ring_mismatch():
    with pytest.raises(RingMismatch):
        mul(S([1], INT), S([1], RAT))


@pytest.mark.parametrize("ring", [INT, RAT, FLOAT])
@pytest.mark.parametrize("backend", ["auto", "karatsuba", "kronecker"])
def test_mul_matches_schoolbook(ring, backend):
    rng = random.Random(hash((ring, backend)) & 0xFFFF)
    with multiplication_backend(backend, threshold=8):
        for _ in range(200):
            n = rng.randint(1, 128)
            a, b = _rand(rng, ring, n), _rand(rng, ring, n)
            got = mul(S(a, ring), S(b, ring)).coeffs
            want = schoolbook(a, b, n)
            if ring == FLOAT:
                assert got == pytest.approx(want, rel=1e-9, abs=1e-9)
            else:
                assert got == want


def test_mul_degree_255_integers():
    rng = random.Random(255)
    a, b = _rand(rng, INT, 256), _rand(rng, INT, 256)
    with multiplication_backend("karatsuba"):
        assert mul(S(a, INT), S(b, INT)).coeffs == schoolbook(a, b, 256)


@pytest.mark.parametrize("ring", [INT, RAT])
def test_ring_axioms(ring):
    rng = random.Random(7)
    for _ in range(20):
        n = rng.randint(1, 64)
        a, b, c = (S(_rand(rng, ring, n), ring) for _ in range(3))
        assert mul(mul(a, b), c) == mul(a, mul(b, c))
        assert mul(a, b + c) == mul(a, b) + mul(a, c)
        assert mul(a, b) == mul(b, a)


def test_ring_axioms_float():
    rng = random.Random(8)
    for _ in range(20):
        n = rng.randint(1, 64)
        a, b, c = (S(_rand(rng, FLOAT, n), FLOAT) for _ in range(3))
        assert mul(mul(a, b), c).coeffs == pytest.approx(mul(a, mul(b, c)).coeffs, abs=1e-9)
        assert mul(a, b + c).coeffs == pytest.approx((mul(a, b) + mul(a, c)).coeffs, abs=1e-9)


def test_catalan_satisfies_its_equation():
    t = newton_solve(parse_system("T = Z * Seq(T);"), OGF, 16)[0]
    assert mul(t, TruncSeries.one(16, INT) - t) == TruncSeries.variable(16, INT)


# -- inverse ---------------------------------------------------------------


def test_inv_examples():
    assert inv(S([1, -1, 0, 0, 0], INT)) == S([1] * 5, INT)
    assert inv(S([2])) == S([Fraction(1, 2)])
    with pytest.raises(ZeroConstantTerm):
        inv(S([0, 1]))


def test_inv_of_one_minus_catalan_is_seq():
    t = newton_solve(parse_system("T = Z * Seq(T);"), OGF, 12)[0]
    seq_t = joyal_solve(parse_system("T = Z * Seq(T); Q = Seq(T);"), OGF, 12)[1]
    assert inv(TruncSeries.one(12, INT) - t) == seq_t


@settings(max_examples=50, deadline=None)
@given(st.lists(st.builds(Fraction, st.integers(-99, 99), st.integers(1, 50)), min_size=1, max_size=40))
def test_inv_property(tail):
    a = S([Fraction(3, 2)] + tail)
    assert mul(a, inv(a)) == TruncSeries.one(a.order, RAT)


# -- exp, log --------------------------------------------------------------


def test_exp_log_examples():
    assert exp(S([0, 1, 0, 0, 0])) == S([1, 1, Fraction(1, 2), Fraction(1, 6), Fraction(1, 24)])
    a = S([0, 1, 1, 0, 0, 0, 0, 0])
    assert log(exp(a)) == a
    with pytest.raises(ValueError):
        exp(S([1, 1]))
    with pytest.raises(ValueError):
        log(S([2, 1]))


def test_exp_inside_cayley_ogf():
    # G = Z Set(G): the OGF evaluation of Set goes through exp of the Polya sum
    g = newton_solve(parse_system("G = Z * Set(G);"), OGF, 11)[0]
    assert g.coeffs[1:] == [1, 1, 2, 4, 9, 20, 48, 115, 286, 719]


_frac = st.builds(Fraction, st.integers(-20, 20), st.integers(1, 20))
_poly = st.lists(_frac, min_size=1, max_size=24)


@settings(max_examples=40, deadline=None)
@given(_poly, _poly)
def test_exp_additive(a, b):
    n = min(len(a), len(b)) + 1
    sa, sb = S([0] + a[: n - 1]), S([0] + b[: n - 1])
    assert exp(sa + sb) == mul(exp(sa), exp(sb))


@settings(max_examples=40, deadline=None)
@given(_poly)
def test_log_exp_inverse(a):
    sa = S([0] + a)
    assert log(exp(sa)) == sa


def test_exp_float_matches_math():
    e = exp(S([0.0, 1.0] + [0.0] * 18, FLOAT))
    assert sum(e.coeffs) == pytest.approx(math.e, rel=1e-14)


# -- prefix stability of Newton-type operations ----------------------------


@pytest.mark.parametrize("op", [inv, exp, log])
def test_prefix_idempotence(op):
    rng = random.Random(3)
    base = [Fraction(rng.randint(-5, 5), rng.randint(1, 5)) for _ in range(64)]
    base[0] = 0 if op is exp else 1
    full = op(S(base)).coeffs
    for p in precision_ladder(64):
        assert op(S(base[:p])).coeffs == full[:p]


# -- substitution at powers, calculus --------------------------------------


def test_subst_power_examples():
    assert subst_power(S([0, 1, 1, 0, 0]), 2) == S([0, 0, 1, 0, 1])
    assert subst_power(S([0, 1, 1, 2, 0, 0, 0]), 3) == S([0, 0, 0, 1, 0, 0, 1])
    with count_multiplications() as box:
        subst_power(S(list(range(100))), 7)
    assert box[0] == 0


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=1, max_size=40), st.integers(1, 5), st.integers(1, 5))
def test_subst_power_composes(coeffs, j, k):
    a = S(coeffs, INT)
    assert subst_power(subst_power(a, j), k) == subst_power(a, j * k)


def test_cycle_polya_sum_is_geometric():
    # sum_k phi(k)/k log 1/(1 - z^k) = z/(1 - z)
    n = 9
    acc = TruncSeries.zero(n, RAT)
    lg = log(inv(S([1, -1] + [0] * (n - 2))))
    for k in range(1, n):
        acc = acc + subst_power(lg, k).scale(Fraction(sum(1 for i in range(1, k + 1) if math.gcd(i, k) == 1), k))
    assert acc == S([0] + [1] * (n - 1))


def test_integrate_differentiate():
    assert integrate(S([1, 1])) == S([0, 1, Fraction(1, 2)])
    assert integrate(S([1, 1], INT)).ring == RAT


@settings(max_examples=50, deadline=None)
@given(st.lists(st.fractions(max_denominator=30), min_size=1, max_size=30))
def test_differentiate_integrate(coeffs):
    a = S(coeffs)
    assert differentiate(integrate(a)) == a


def test_tan_by_integration():
    # B = z + Int(B^2), by plain term-by-term iteration
    n = 8
    b = TruncSeries.zero(n, RAT)
    z = TruncSeries.variable(n, RAT)
    for _ in range(n):
        b = z + integrate(mul(b, b)).truncate(n)
    assert [b.coeffs[i] for i in (1, 3, 5, 7)] == [1, Fraction(1, 3), Fraction(2, 15), Fraction(17, 315)]


def test_precision_ladder():
    assert precision_ladder(11) == [1, 2, 3, 6, 11]
    assert precision_ladder(1) == [1]
    for n in range(1, 200):
        lad = precision_ladder(n)
        assert lad[-1] == n and all(b in (2 * a, 2 * a - 1) for a, b in zip(lad, lad[1:]))
