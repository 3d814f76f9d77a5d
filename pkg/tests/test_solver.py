import math
from fractions import Fraction

import pytest

from combspecies.errors import CompositionUndefined, NotWellFounded
from combspecies.evaluate import EGF, OGF, egf_eval, is_virtual, ogf_eval
from combspecies.expr import is_flat
from combspecies.numeric import dominant_system
from combspecies.parser import parse_expr, parse_system
from combspecies.resources import load_corpus
from combspecies.series import INT, RAT, exp, TruncSeries, count_multiplications, multiplication_backend
from combspecies.solver import joyal_solve, labeled_counts, newton_solve

from conftest import CLASSICAL

F = Fraction


def ser(coeffs, ring=RAT):
    return TruncSeries(coeffs, ring)


# -- evaluation rules ------------------------------------------------------


def test_egf_set_of_atom():
    e = parse_expr("Set(Y)", ["Y"])
    assert egf_eval(e, {"Y": ser([0, 1, 0, 0])}, 4) == ser([1, 1, F(1, 2), F(1, 6)])


def test_egf_seq_at_least_two():
    e = parse_expr("Seq(Y, card >= 2)", ["Y"])
    assert egf_eval(e, {"Y": ser([0, 1] + [0] * 6)}, 8) == ser([0, 0] + [1] * 6)


def test_egf_pset_is_exp_difference():
    e = parse_expr("PSet(Y)", ["Y"])
    y = ser([0, 1, 3, 0, 0, 0])
    # F(z) - F(z^2) = z + 2 z^2 - 3 z^4
    assert egf_eval(e, {"Y": y}, 6) == exp(ser([0, 1, 2, 0, -3, 0]))
    assert is_virtual([egf_eval(e, {"Y": ser([0, 1, 0, 0])}, 4)])


def test_egf_cayley_iterate():
    g = newton_solve(load_corpus("cayley"), EGF, 6)[0]
    assert labeled_counts(g)[1:] == [1, 2, 9, 64, 625]
    assert egf_eval(parse_expr("Z * Set(G)", ["G"]), {"G": g}, 6) == g


def test_ogf_cycle_of_atoms():
    assert ogf_eval(parse_expr("Cyc(Z)"), {}, 6) == ser([0, 1, 1, 1, 1, 1], INT)


def test_ogf_fixed_cardinality():
    assert ogf_eval(parse_expr("Set(Z, card = 2)"), {}, 4) == ser([0, 0, 1, 0], INT)
    assert ogf_eval(parse_expr("Cyc(Z + Z, card = 2)"), {}, 4) == ser([0, 0, 3, 0], INT)
    assert ogf_eval(parse_expr("Set(Z + Z, card = 2)"), {}, 4) == ser([0, 0, 3, 0], INT)


def test_ogf_pset_of_atom():
    assert ogf_eval(parse_expr("PSet(Z)"), {}, 3) == ser([1, 1, 0], INT)


def test_ogf_unions_by_interval():
    # Set(Z + Z) has n+1 multisets of size n; constraints keep sizes 0..1 and 3..inf
    got = ogf_eval(parse_expr("Set(Z + Z, card in [0..1, 3..inf])"), {}, 6)
    assert got == ser([1, 2, 0, 4, 5, 6], INT)


def test_composition_undefined():
    with pytest.raises(CompositionUndefined):
        egf_eval(parse_expr("Seq(Y)", ["Y"]), {"Y": ser([1, 1, 0])}, 3)


# -- solvers ---------------------------------------------------------------

CATALAN = [1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796, 58786, 208012, 742900, 2674440]


def test_catalan():
    sys_ = load_corpus("catalan")
    assert joyal_solve(sys_, OGF, 8)[0].coeffs[1:] == CATALAN[:7]
    assert newton_solve(sys_, OGF, 16)[0].coeffs[1:] == CATALAN


def test_cayley_both_kinds():
    sys_ = load_corpus("cayley")
    assert labeled_counts(newton_solve(sys_, EGF, 11)[0])[1:] == [n ** (n - 1) for n in range(1, 11)]
    assert newton_solve(sys_, OGF, 11)[0].coeffs[1:] == [1, 1, 2, 4, 9, 20, 48, 115, 286, 719]


def test_asymmetric_trees():
    got = newton_solve(load_corpus("asymmetric"), OGF, 13)[0].coeffs[1:]
    assert got == [1, 1, 1, 2, 3, 6, 12, 25, 52, 113, 247, 548]


def test_constant_terms_egf():
    y1, y2 = joyal_solve(load_corpus("constant_terms"), EGF, 4)
    assert labeled_counts(y1) == [1, 1, 2, 6]
    assert y2.coeffs[0] == 2


def test_series_parallel_agree():
    sys_ = load_corpus("series_parallel")
    assert joyal_solve(sys_, OGF, 6) == newton_solve(sys_, OGF, 6)


def test_rejects_ill_founded():
    with pytest.raises(NotWellFounded):
        newton_solve(parse_system("Y = Z * Y;"), OGF, 4)


@pytest.mark.parametrize("name", CLASSICAL)
@pytest.mark.parametrize("kind", [EGF, OGF])
@pytest.mark.parametrize("plain", [False, True])
def test_newton_equals_joyal(name, kind, plain):
    sys_ = load_corpus(name)
    for n in (1, 2, 7, 33) if plain else (1, 2, 7, 33, 64):
        assert newton_solve(sys_, kind, n, plain=plain) == joyal_solve(sys_, kind, n)


@pytest.mark.parametrize("name", CLASSICAL)
@pytest.mark.parametrize("kind", [EGF, OGF])
def test_prefix_stability(name, kind):
    levels = []
    newton_solve(load_corpus(name), kind, 64, trace=lambda p, ys: levels.append((p, ys)))
    final = levels[-1][1]
    for (p, ys), (q, _) in zip(levels, levels[1:]):
        assert q <= 2 * p
        assert [y.coeffs[:p] for y in ys] == [y.coeffs[:p] for y in final]


@pytest.mark.parametrize("name", CLASSICAL)
@pytest.mark.parametrize("kind", [EGF, OGF])
def test_residual(name, kind):
    sys_ = load_corpus(name)
    ys = newton_solve(sys_, kind, 40)
    env = dict(zip(sys_.names, ys))
    ev = egf_eval if kind == EGF else ogf_eval
    ring = RAT if kind == EGF else INT
    assert [ev(h, env, 40, ring) for h in sys_.rhs] == ys


@pytest.mark.parametrize("name", [n for n in CLASSICAL if all(is_flat(h) for h in load_corpus(n).rhs)])
def test_flat_egf_equals_ogf(name):
    sys_ = load_corpus(name)
    assert [y.to_ring(RAT) for y in newton_solve(sys_, OGF, 40)] == newton_solve(sys_, EGF, 40)


def test_flat_dominant_systems():
    for name in CLASSICAL:
        dom = dominant_system(load_corpus(name))
        assert all(is_flat(h) for h in dom.rhs)


def test_dominant_examples():
    assert dominant_system(load_corpus("cayley")).rhs == parse_system("G = Z * Seq(G);").rhs
    assert dominant_system(load_corpus("catalan")).rhs == load_corpus("catalan").rhs
    sp = dominant_system(load_corpus("series_parallel"))
    assert sp.rhs == parse_system("S = Seq(Z + P, card >= 2); P = Seq(Z + S, card >= 2);").rhs


@pytest.mark.parametrize("name", ["cayley", "series_parallel", "asymmetric", "cycle_trees"])
def test_dominance(name):
    sys_ = load_corpus(name)
    small = joyal_solve(sys_, OGF, 20)
    big = joyal_solve(dominant_system(sys_), OGF, 20)
    for s, b in zip(small, big):
        assert all(x <= y for x, y in zip(s.coeffs, b.coeffs))


@pytest.mark.parametrize("name", CLASSICAL)
def test_labeled_unlabeled_bridge(name):
    sys_ = load_corpus(name)
    egf, ogf = newton_solve(sys_, EGF, 16), newton_solve(sys_, OGF, 16)
    for e, o in zip(egf, ogf):
        for n, (f, g) in enumerate(zip(labeled_counts(e), o.coeffs)):
            assert f <= math.factorial(n) * g


def _mults(n):
    with multiplication_backend("karatsuba"), count_multiplications() as box:
        newton_solve(load_corpus("catalan"), OGF, n)
    return box[0]


@pytest.mark.parametrize("n", [128, 256, 512])
def test_cost_ratio(n):
    assert _mults(2 * n) / _mults(n) <= 3.5


def test_backends_agree():
    sys_ = load_corpus("cayley")
    ref = newton_solve(sys_, EGF, 48)
    for b in ("schoolbook", "karatsuba", "kronecker"):
        with multiplication_backend(b):
            assert newton_solve(sys_, EGF, 48) == ref
