"""Species expressions.

Nodes are immutable and hashable.  Build them through the ``make_*``
helpers, which apply the syntactic simplifications (neutral elements,
flattening, constructors applied to the empty species) so that every
expression in circulation is in a canonical-enough form for the structural
tests of :mod:`combspecies.analysis`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple, Union

from .cardinality import FULL, Card

CTOR_KINDS = ("Seq", "Set", "Cyc", "PSet")

# Name of the internal sort marking size-0 structures in companion systems.
# It is not a valid identifier of the input language, so it cannot clash.
MARKER = "Z@1"


class Expr:
    __slots__ = ()

    def __add__(self, other: "Expr") -> "Expr":
        return make_sum([self, other])

    def __mul__(self, other: "Expr") -> "Expr":
        return make_prod([self, other])

    def __str__(self) -> str:
        return pretty(self)


@dataclass(frozen=True, repr=False)
class ZeroT(Expr):
    def __repr__(self) -> str:
        return "Zero"


@dataclass(frozen=True, repr=False)
class OneT(Expr):
    def __repr__(self) -> str:
        return "One"


Zero = ZeroT()
One = OneT()


@dataclass(frozen=True)
class Atom(Expr):
    sort: str = "Z"


@dataclass(frozen=True)
class Ref(Expr):
    name: str


@dataclass(frozen=True)
class Sum(Expr):
    terms: Tuple[Expr, ...]


@dataclass(frozen=True)
class Prod(Expr):
    factors: Tuple[Expr, ...]


@dataclass(frozen=True)
class Ctor(Expr):
    """Seq, Set, Cyc or PSet applied to ``child`` under a cardinality constraint."""

    kind: str
    child: Expr
    card: Card = FULL


@dataclass(frozen=True)
class Integral(Expr):
    child: Expr


Z = Atom("Z")


# -- smart constructors ----------------------------------------------------


def make_sum(terms) -> Expr:
    flat: list[Expr] = []
    for t in terms:
        if isinstance(t, Sum):
            flat.extend(t.terms)
        elif t is not Zero and not isinstance(t, ZeroT):
            flat.append(t)
    if not flat:
        return Zero
    if len(flat) == 1:
        return flat[0]
    return Sum(tuple(flat))


def make_prod(factors) -> Expr:
    flat: list[Expr] = []
    for f in factors:
        if isinstance(f, ZeroT):
            return Zero
        if isinstance(f, Prod):
            flat.extend(f.factors)
        elif not isinstance(f, OneT):
            flat.append(f)
    if not flat:
        return One
    if len(flat) == 1:
        return flat[0]
    return Prod(tuple(flat))


def make_ctor(kind: str, child: Expr, card: Card = FULL) -> Expr:
    if kind not in CTOR_KINDS:
        raise ValueError(f"unknown constructor {kind}")
    card = card.normalized()
    if kind == "Cyc":
        card = card.without_zero()
    if card.is_empty:
        return Zero
    if isinstance(child, ZeroT):
        # only the empty structure survives
        return One if 0 in card and kind != "Cyc" else Zero
    exact = card.is_exactly()
    if exact == 0:
        return One
    if exact == 1:
        return child
    return Ctor(kind, child, card)


def seq(child: Expr, card: Card = FULL) -> Expr:
    return make_ctor("Seq", child, card)


def set_(child: Expr, card: Card = FULL) -> Expr:
    return make_ctor("Set", child, card)


def cyc(child: Expr, card: Card = FULL) -> Expr:
    return make_ctor("Cyc", child, card)


def pset(child: Expr, card: Card = FULL) -> Expr:
    return make_ctor("PSet", child, card)


def make_integral(child: Expr) -> Expr:
    if isinstance(child, ZeroT):
        return Zero
    return Integral(child)


def scaled(n: int, e: Expr) -> Expr:
    """n copies of e added together (n a small nonnegative integer)."""
    return make_sum([e] * n)


# -- traversal helpers -----------------------------------------------------


def children(e: Expr) -> Tuple[Expr, ...]:
    if isinstance(e, Sum):
        return e.terms
    if isinstance(e, Prod):
        return e.factors
    if isinstance(e, (Ctor, Integral)):
        return (e.child,)
    return ()


def refs(e: Expr) -> set:
    out: set = set()
    stack = [e]
    while stack:
        x = stack.pop()
        if isinstance(x, Ref):
            out.add(x.name)
        stack.extend(children(x))
    return out


def atoms(e: Expr) -> set:
    out: set = set()
    stack = [e]
    while stack:
        x = stack.pop()
        if isinstance(x, Atom):
            out.add(x.sort)
        stack.extend(children(x))
    return out


def contains(e: Expr, pred) -> bool:
    stack = [e]
    while stack:
        x = stack.pop()
        if pred(x):
            return True
        stack.extend(children(x))
    return False


def is_flat(e: Expr) -> bool:
    """True when no symmetric constructor (Set, Cyc, PSet) occurs."""
    return not contains(e, lambda x: isinstance(x, Ctor) and x.kind != "Seq")


# -- printing --------------------------------------------------------------

_PREC_SUM, _PREC_PROD, _PREC_ATOM = 1, 2, 3


def _prec(e: Expr) -> int:
    if isinstance(e, Sum):
        return _PREC_SUM
    if isinstance(e, Prod):
        return _PREC_PROD
    return _PREC_ATOM


def _wrap(e: Expr, level: int) -> str:
    s = pretty(e)
    return f"({s})" if _prec(e) < level else s


def pretty(e: Expr) -> str:
    if isinstance(e, ZeroT):
        return "0"
    if isinstance(e, OneT):
        return "1"
    if isinstance(e, Atom):
        return e.sort
    if isinstance(e, Ref):
        return e.name
    if isinstance(e, Sum):
        return " + ".join(_wrap(t, _PREC_SUM) for t in e.terms)
    if isinstance(e, Prod):
        return " * ".join(_wrap(f, _PREC_ATOM) for f in e.factors)
    if isinstance(e, Ctor):
        card = str(e.card)
        inner = pretty(e.child)
        return f"{e.kind}({inner}, {card})" if card else f"{e.kind}({inner})"
    if isinstance(e, Integral):
        return f"Int({pretty(e.child)})"
    raise TypeError(f"not an expression: {e!r}")


Node = Union[ZeroT, OneT, Atom, Ref, Sum, Prod, Ctor, Integral]
