import random
from fractions import Fraction

import pytest

from combspecies.errors import NotWellFounded
from combspecies.evaluate import EGF
from combspecies.integral import (
    check_integral_wf,
    fundamental_solution,
    integral_residual,
    naive_integral_solve,
    refine_fundamental,
    solve_integral,
    variation_of_constants,
)
from combspecies.matrix import SeriesMatrix
from combspecies.parser import parse_system
from combspecies.resources import load_corpus
from combspecies.series import RAT, TruncSeries, differentiate, exp, mul
from combspecies.solver import newton_solve

from conftest import LINEAR

F = Fraction


def linear(text):
    return parse_system("mode linear;\n" + text)


def ser(coeffs):
    return TruncSeries(coeffs, RAT)


def one(n):
    return TruncSeries.one(n, RAT)


# -- well-foundedness ------------------------------------------------------


@pytest.mark.parametrize(
    "text, verdict, reason",
    [
        ("B = Z + Int(B*B);", True, None),
        ("Y2 = 1 + Int(Y3*Y2); Y3 = Y2 + Z*Y2*Y3;", True, None),
        ("Y = Y + Int(Y);", False, "JacobianNotNilpotentAt0"),
        ("Y = Z * Y + Int(Y);", True, None),
        ("Y = 1 + Int(Y*Y);", True, None),
        ("Y = 1 + Int(Seq(Y, card >= 1));", False, "NotPolynomialInInitialValues"),
        ("Y1 = 1 + Int(Y1); Y2 = Z + Seq(Y1, card >= 1);", False, "ConstantPartNotPolynomial"),
    ],
)
def test_check_integral_wf(text, verdict, reason):
    rep = check_integral_wf(linear(text))
    assert rep.verdict is verdict and rep.reason == reason


@pytest.mark.parametrize("name", LINEAR)
def test_corpus_well_founded(name):
    assert check_integral_wf(load_corpus(name)).verdict


def test_geometric_from_initial_value():
    (y,) = solve_integral(linear("Y = 1 + Int(Y*Y);"), 10)
    assert y == ser([1] * 10)


def test_ill_founded_rejected():
    with pytest.raises(NotWellFounded):
        solve_integral(linear("Y = Y + Int(Y);"), 4)


# -- the solver ------------------------------------------------------------


def test_tan():
    (b,) = solve_integral(load_corpus("tan"), 8)
    assert b == ser([0, 1, 0, F(1, 3), 0, F(2, 15), 0, F(17, 315)])


def test_mobiles():
    y1 = solve_integral(load_corpus("mobiles"), 9)[0]
    assert y1 == ser([0, 1, F(1, 2), F(1, 3), F(7, 24), F(3, 10), F(49, 144), F(173, 420), F(21059, 40320)])


def test_cayley_via_integral():
    n = 32
    y2, _ = solve_integral(load_corpus("cayley_integral"), n)
    (g,) = newton_solve(load_corpus("cayley"), EGF, n)
    assert mul(TruncSeries.variable(n, RAT), y2) == g


@pytest.mark.parametrize("name", LINEAR)
def test_equals_naive_iteration(name):
    sys_ = load_corpus(name)
    for n in (1, 2, 5, 17, 40):
        assert solve_integral(sys_, n) == naive_integral_solve(sys_, n)


@pytest.mark.parametrize("name", LINEAR)
def test_residual_vanishes(name):
    sys_ = load_corpus(name)
    for r in integral_residual(sys_, solve_integral(sys_, 48)):
        assert r.is_zero


@pytest.mark.parametrize("name", LINEAR)
def test_prefix_stability(name):
    levels = []
    solve_integral(load_corpus(name), 64, trace=lambda p, ys: levels.append((p, ys)))
    final = levels[-1][1]
    for p, ys in levels:
        assert [y.coeffs[:p] for y in ys] == [y.coeffs[:p] for y in final]


def _poly_text(coeffs):
    # sum_j c_j Z^j written with the grammar's 1, Z, + and *
    terms = []
    for j, c in enumerate(coeffs):
        terms += [" * ".join(["Z"] * j) if j else "1"] * c
    return " + ".join(terms) if terms else "0"


def test_set_via_integral():
    rng = random.Random(20)
    n = 24
    for _ in range(20):
        a = [0] + [rng.randint(0, 3) for _ in range(rng.randint(1, 5))]
        da = [j * c for j, c in enumerate(a)][1:]
        (y,) = solve_integral(linear(f"Y = 1 + Int(({_poly_text(da)}) * Y);"), n)
        assert y == exp(ser(a).pad(n))


# -- variation of constants ------------------------------------------------


def test_plain_integration():
    n = 5
    ident = SeriesMatrix.identity(1, n, RAT)
    assert variation_of_constants(None, [one(n)], ident, ident, n) == [TruncSeries.variable(n, RAT)]


def test_scalar_linear_ode():
    # y' = y + 1, y(0) = 0  ->  exp(z) - 1
    n = 12
    a = SeriesMatrix([[one(n)]])
    (y,) = variation_of_constants(a, [one(n)], None, None, n)
    assert y == exp(TruncSeries.variable(n, RAT)) - one(n)


def _ode_matrix(n):
    rng = random.Random(5)
    return SeriesMatrix([[ser([F(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(n)]) for _ in range(2)] for _ in range(2)])


def test_fundamental_solution():
    n = 20
    a = _ode_matrix(n)
    w, w_bar = fundamental_solution(a, n)
    assert w.map(differentiate) == (a.truncate(n - 1) @ w.truncate(n - 1))
    h = (n + 1) // 2
    assert w.truncate(h) @ w_bar.truncate(h) == SeriesMatrix.identity(2, h, RAT)


def test_refinement_doubles_contact():
    n = 32
    a = _ode_matrix(n)
    exact, _ = fundamental_solution(a, n)
    for k in (2, 4, 8):
        w, w_bar = fundamental_solution(a, k)
        # W and its inverse with contact k; one step reaches 2k
        w2, _ = refine_fundamental(a, w, w_bar, 2 * k)
        assert w2 == exact.truncate(2 * k)


def test_variation_of_constants_solves_ode():
    n = 16
    a = _ode_matrix(n)
    b = [ser([1] * n), ser([0, 2] + [0] * (n - 2))]
    y = variation_of_constants(a, b, None, None, n)
    lhs = [differentiate(v) for v in y]
    rows = a.truncate(n - 1)
    rhs = [sum((mul(rows[i, j], y[j].truncate(n - 1)) for j in range(2)), b[i].truncate(n - 1)) for i in range(2)]
    assert lhs == rhs and all(v.coeffs[0] == 0 for v in y)
