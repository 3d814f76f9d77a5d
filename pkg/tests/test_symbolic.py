from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from combspecies.errors import InfiniteConstantTerm
from combspecies.evaluate import egf_eval, ogf_eval
from combspecies.expr import Zero, make_prod, make_sum, pretty
from combspecies.parser import parse_expr, parse_system
from combspecies.series import INT, RAT, TruncSeries
from combspecies.symbolic import constant_count, differentiate, jacobian, substitute


def d(text, var, names=("T", "S", "P", "Y")):
    return pretty(differentiate(parse_expr(text, names), var))


@pytest.mark.parametrize(
    "text, var, expected",
    [
        ("Z * Seq(T)", "T", "Z * Seq(T) * Seq(T)"),
        ("Z", "T", "0"),
        ("Set(Z + S, card >= 2)", "S", "Set(Z + S, card >= 1)"),
        ("Set(Y)", "Y", "Set(Y)"),
        ("Cyc(Y)", "Y", "Seq(Y)"),
        ("Y * Y", "Y", "Y + Y"),
    ],
)
def test_derivative_rules(text, var, expected):
    assert d(text, var) == expected


def test_jacobians():
    sp = parse_system("S = Seq(Z + P, card >= 2); P = Set(Z + S, card >= 2);")
    jac = jacobian(sp)
    assert jac[0][0] == Zero and jac[1][1] == Zero
    assert jac[0][1] != Zero and jac[1][0] != Zero
    assert [[pretty(e) for e in row] for row in jacobian(parse_system("T = Z * Seq(T);"))] == [
        ["Z * Seq(T) * Seq(T)"]
    ]
    assert jacobian(parse_system("A = Z * Z; B = Seq(Z);")) == ((Zero, Zero), (Zero, Zero))


def test_substitute_examples():
    zero = parse_expr("0")
    assert pretty(substitute(parse_expr("Z * Seq(T)", ["T"]), {"T": zero})) == "Z"
    assert pretty(substitute(parse_expr("1 + Z * Y", ["Y"]), {"Y": zero}, {"Z": zero})) == "1"
    assert substitute(parse_expr("Set(Z + S, card >= 2)", ["S"]), {"S": zero}, {"Z": zero}) == Zero


def test_substitute_is_simultaneous():
    e = parse_expr("A * B", ["A", "B"])
    swapped = substitute(e, {"A": parse_expr("B", ["B"]), "B": parse_expr("A", ["A"])})
    assert pretty(swapped) == "B * A"


def test_constant_counts():
    assert constant_count(parse_expr("1 + Y * Y", ["Y"]), {"Y": 1}) == 2
    assert constant_count(parse_expr("Seq(Y, card <= 2)", ["Y"]), {"Y": 3}) == 1 + 3 + 9
    with pytest.raises(InfiniteConstantTerm):
        constant_count(parse_expr("Seq(Y)", ["Y"]), {"Y": 1})


# -- linearity and product rule, checked on series ---------------------------

_names = ("Y",)
_leaf = st.sampled_from(["Z", "Y", "1"])
_exprs = st.recursive(
    _leaf,
    lambda c: st.one_of(
        st.tuples(c, c).map(lambda t: f"({t[0]} + {t[1]})"),
        st.tuples(c, c).map(lambda t: f"{t[0]} * {t[1]}"),
        st.tuples(st.sampled_from(["Seq", "Set", "Cyc"]), c, st.sampled_from(["", ", card >= 2", ", card in [1..2, 4..inf]"])).map(
            lambda t: f"{t[0]}(Z * ({t[1]}){t[2]})"
        ),
    ),
    max_leaves=6,
)

N = 10
# a bound value for Y with zero constant term so every composition is defined
_Y_EGF = TruncSeries([0, 1, Fraction(1, 2), Fraction(1, 3)] + [0] * (N - 4), RAT)
_Y_OGF = TruncSeries([0, 1, 1, 2, 5] + [0] * (N - 5), INT)


def _egf(e):
    return egf_eval(e, {"Y": _Y_EGF}, N)


def _ogf(e):
    return ogf_eval(e, {"Y": _Y_OGF}, N)


@settings(max_examples=60, deadline=None)
@given(_exprs, _exprs)
def test_derivative_linear(a, b):
    ea, eb = parse_expr(a, _names), parse_expr(b, _names)
    lhs = differentiate(make_sum([ea, eb]), "Y")
    rhs = make_sum([differentiate(ea, "Y"), differentiate(eb, "Y")])
    assert _egf(lhs) == _egf(rhs)
    assert _ogf(lhs) == _ogf(rhs)


@settings(max_examples=60, deadline=None)
@given(_exprs, _exprs)
def test_product_rule_on_series(a, b):
    ea, eb = parse_expr(a, _names), parse_expr(b, _names)
    lhs = differentiate(make_prod([ea, eb]), "Y")
    rhs = make_sum([make_prod([differentiate(ea, "Y"), eb]), make_prod([ea, differentiate(eb, "Y")])])
    assert _egf(lhs) == _egf(rhs)
