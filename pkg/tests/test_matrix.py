from fractions import Fraction

import pytest

from combspecies.errors import SingularLinearSystem, ZeroConstantTerm
from combspecies.evaluate import OGF, SeriesEvaluator
from combspecies.matrix import SeriesMatrix, constant_inverse, mat_vec, matrix_inv_newton
from combspecies.parser import parse_system
from combspecies.series import INT, RAT, TruncSeries
from combspecies.solver import newton_solve
from combspecies.symbolic import jacobian


def test_identity_inverse():
    for m in (1, 2, 4):
        ident = SeriesMatrix.identity(m, 8, RAT)
        assert matrix_inv_newton(ident) == ident


def test_unipotent_2x2():
    n = 6
    z = TruncSeries.variable(n, RAT)
    one, zero = TruncSeries.one(n, RAT), TruncSeries.zero(n, RAT)
    got = matrix_inv_newton(SeriesMatrix([[one, -z], [zero, one]]))
    assert got == SeriesMatrix([[one, z], [zero, one]])


def test_series_parallel_jacobian_inverse():
    sys_ = parse_system("S = Seq(Z + P, card >= 2); P = Set(Z + S, card >= 2);")
    n = 32
    ys = newton_solve(sys_, OGF, n)
    ev = SeriesEvaluator(OGF, dict(zip(sys_.names, ys)), n, INT)
    j = SeriesMatrix([[ev(e) for e in row] for row in jacobian(sys_)])
    a = SeriesMatrix.identity(2, n, INT) - j
    assert a @ matrix_inv_newton(a) == SeriesMatrix.identity(2, n, INT)


def test_constant_inverse_exact():
    inv = constant_inverse([[2, 1], [1, 1]], RAT)
    assert inv == [[1, -1], [-1, 2]]
    assert constant_inverse([[Fraction(1, 2)]], RAT) == [[2]]


def test_singular_constant_term():
    n = 4
    z = TruncSeries.variable(n, RAT)
    with pytest.raises((SingularLinearSystem, ZeroConstantTerm)):
        matrix_inv_newton(SeriesMatrix([[z, z], [z, z]]))


def test_mat_vec():
    n = 3
    one, z = TruncSeries.one(n, RAT), TruncSeries.variable(n, RAT)
    assert mat_vec(SeriesMatrix([[one, z], [z, one]]), [one, one]) == [one + z, one + z]


def test_inverse_prefix_stable():
    sys_ = parse_system("S = Seq(Z + P, card >= 2); P = Set(Z + S, card >= 2);")
    n = 40
    ys = newton_solve(sys_, OGF, n)
    ev = SeriesEvaluator(OGF, dict(zip(sys_.names, ys)), n, INT)
    a = SeriesMatrix.identity(2, n, INT) - SeriesMatrix([[ev(e) for e in row] for row in jacobian(sys_)])
    full = matrix_inv_newton(a)
    for p in (1, 3, 5, 10, 20):
        assert matrix_inv_newton(a.truncate(p)) == full.truncate(p)
