"""Symbolic manipulation of species expressions.

Substitution, derivatives with respect to an unknown or an atom sort, the
Jacobian matrix of a system, and the bookkeeping of size-0 structures that
the companion-system construction needs.
"""

from __future__ import annotations

from typing import Callable, Dict, Optional, Tuple

from .cardinality import Card
from .errors import CompositionUndefined, InfiniteConstantTerm
from .expr import (
    Atom,
    Ctor,
    Expr,
    Integral,
    One,
    OneT,
    Prod,
    Ref,
    Sum,
    Zero,
    ZeroT,
    make_ctor,
    make_integral,
    make_prod,
    make_sum,
    scaled,
    seq,
)


def rebuild(e: Expr, leaf: Callable[[Expr], Optional[Expr]]) -> Expr:
    """Rebuild ``e`` bottom-up through the smart constructors.

    ``leaf`` is consulted on every node first; a non-None answer replaces
    the node wholesale.
    """
    r = leaf(e)
    if r is not None:
        return r
    if isinstance(e, Sum):
        return make_sum([rebuild(t, leaf) for t in e.terms])
    if isinstance(e, Prod):
        return make_prod([rebuild(f, leaf) for f in e.factors])
    if isinstance(e, Ctor):
        return make_ctor(e.kind, rebuild(e.child, leaf), e.card)
    if isinstance(e, Integral):
        return make_integral(rebuild(e.child, leaf))
    return e


def substitute(e: Expr, bindings: Dict[str, Expr], atoms: Optional[Dict[str, Expr]] = None) -> Expr:
    """Simultaneous substitution of unknowns (and optionally atom sorts)."""
    atoms = atoms or {}

    def leaf(x):
        if isinstance(x, Ref):
            return bindings.get(x.name)
        if isinstance(x, Atom):
            return atoms.get(x.sort)
        return None

    return rebuild(e, leaf)


# -- derivatives -----------------------------------------------------------


def _is_var(x: Expr, var: str, atom: bool) -> bool:
    if atom:
        return isinstance(x, Atom) and x.sort == var
    return isinstance(x, Ref) and x.name == var


def _seq_derivative(a: Expr, da: Expr, card: Card) -> Expr:
    # A sequence whose length lies in [lo..hi] with one marked component:
    # i components on the left, the marked one, the rest on the right.
    terms = []
    for lo, hi in card.intervals:
        if hi is None:
            terms.append(make_prod([seq(a, Card.at_least(max(lo - 1, 0))), da, seq(a)]))
            for i in range(0, lo - 1):
                terms.append(make_prod([seq(a, Card.exactly(i)), da, seq(a, Card.at_least(lo - 1 - i))]))
        else:
            for i in range(0, hi):
                right = Card.of((max(0, lo - 1 - i), hi - 1 - i))
                terms.append(make_prod([seq(a, Card.exactly(i)), da, seq(a, right)]))
    return make_sum(terms)


def differentiate(e: Expr, var: str, atom: bool = False) -> Expr:
    """Derivative of ``e`` with respect to the unknown ``var``.

    With ``atom=True`` the derivative is taken with respect to the atom sort
    ``var`` instead.
    """
    if isinstance(e, (ZeroT, OneT)):
        return Zero
    if isinstance(e, (Atom, Ref)):
        return One if _is_var(e, var, atom) else Zero
    if isinstance(e, Sum):
        return make_sum([differentiate(t, var, atom) for t in e.terms])
    if isinstance(e, Prod):
        terms = []
        fs = e.factors
        for i, f in enumerate(fs):
            df = differentiate(f, var, atom)
            if df is not Zero:
                terms.append(make_prod(fs[:i] + (df,) + fs[i + 1 :]))
        return make_sum(terms)
    if isinstance(e, Ctor):
        da = differentiate(e.child, var, atom)
        if da is Zero:
            return Zero
        a = e.child
        if e.kind == "Seq":
            return _seq_derivative(a, da, e.card)
        if e.kind == "Set":
            return make_prod([make_ctor("Set", a, e.card.shift_down()), da])
        if e.kind == "Cyc":
            return make_prod([seq(a, e.card.shift_down()), da])
        if e.kind == "PSet":
            # PSet(A + U) = PSet(A)(1 + U) to first order, like Set
            return make_prod([make_ctor("PSet", a), da])
    if isinstance(e, Integral):
        raise ValueError("Int(...) cannot be differentiated symbolically; use the integral-system solver")
    raise TypeError(f"not an expression: {e!r}")


def jacobian(system) -> Tuple[Tuple[Expr, ...], ...]:
    """Matrix of derivatives dH_i/dY_j of the algebraic parts of ``system``."""
    return tuple(tuple(differentiate(h, name) for name in system.names) for h in system.rhs)


def integrand_jacobian(system) -> Tuple[Tuple[Expr, ...], ...]:
    return tuple(tuple(differentiate(g, name) for name in system.names) for g in system.integrands)


def atom_derivative(e: Expr, sorts) -> Expr:
    """Total derivative with respect to all atom sorts (every atom has size one)."""
    return make_sum([differentiate(e, s, atom=True) for s in sorts])


# -- size-0 structures -----------------------------------------------------

COUNT_CAP = 2**64 - 1


def _check_cap(n: int, cap: int) -> int:
    if n > cap:
        raise InfiniteConstantTerm(f"size-0 count {n} exceeds the cap {cap}")
    return n


def _ctor_constant(kind: str, card: Card, a: int, cap: int) -> int:
    if a == 0:
        if kind == "Cyc":
            return 0
        return 1 if 0 in card else 0
    if kind == "Seq":
        if not card.is_finite:
            raise InfiniteConstantTerm("Seq with unbounded length applied to size-0 structures")
        return _check_cap(sum(a**k for k in card.members(card.max + 1)), cap)
    if card.is_finite and card.max <= 1:
        return (1 if 0 in card else 0) + (a if 1 in card else 0)
    raise CompositionUndefined(
        f"{kind} with more than one component applied to a species with size-0 structures"
    )


def constant_count(e: Expr, values: Dict[str, int], cap: int = COUNT_CAP) -> int:
    """Number of size-0 structures of ``e`` when unknown Y_j has ``values[Y_j]`` of them.

    Atoms contribute nothing at size 0.
    """
    if isinstance(e, ZeroT):
        return 0
    if isinstance(e, OneT):
        return 1
    if isinstance(e, Atom):
        return 0
    if isinstance(e, Ref):
        return values.get(e.name, 0)
    if isinstance(e, Sum):
        return _check_cap(sum(constant_count(t, values, cap) for t in e.terms), cap)
    if isinstance(e, Prod):
        out = 1
        for f in e.factors:
            out = _check_cap(out * constant_count(f, values, cap), cap)
            if out == 0:
                return 0
        return out
    if isinstance(e, Ctor):
        return _ctor_constant(e.kind, e.card, constant_count(e.child, values, cap), cap)
    if isinstance(e, Integral):
        return 0
    raise TypeError(f"not an expression: {e!r}")


def split_constant(e: Expr) -> Tuple[int, Expr]:
    """Split ``e`` at (Z, Y) = (0, 0) into (count of size-0 structures, the rest).

    The rest is an expression for ``e`` minus its size-0 structures; it is
    used to build companion systems.
    """
    if isinstance(e, ZeroT):
        return 0, Zero
    if isinstance(e, OneT):
        return 1, Zero
    if isinstance(e, (Atom, Ref, Integral)):
        return 0, e
    if isinstance(e, Sum):
        parts = [split_constant(t) for t in e.terms]
        return sum(c for c, _ in parts), make_sum([r for _, r in parts])
    if isinstance(e, Prod):
        count, rest = 1, Zero
        for f in e.factors:
            c, r = split_constant(f)
            # (count + rest) * (c + r) = count*c + [rest*f + count*r]
            rest = make_sum([make_prod([rest, f]), scaled(count, r)])
            count *= c
        return count, rest
    if isinstance(e, Ctor):
        a, ra = split_constant(e.child)
        if a == 0:
            if e.kind == "Cyc" or 0 not in e.card:
                return 0, e
            return 1, make_ctor(e.kind, e.child, e.card.without_zero())
        if e.kind == "Seq":
            if not e.card.is_finite:
                raise InfiniteConstantTerm(f"{e}: unbounded Seq of a species with size-0 structures")
            expanded = make_sum(
                [make_prod([e.child] * k) for k in e.card.members(e.card.max + 1)]
            )
            return split_constant(expanded)
        _ctor_constant(e.kind, e.card, a, COUNT_CAP)  # raises unless card within {0, 1}
        c = (1 if 0 in e.card else 0) + (a if 1 in e.card else 0)
        return c, (ra if 1 in e.card else Zero)
    raise TypeError(f"not an expression: {e!r}")
