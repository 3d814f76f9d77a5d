"""Generating series of species expressions.

EGF rules: Seq -> 1/(1-G), Set -> exp(G), Cyc -> log 1/(1-G),
Set_l -> G^l/l!, Cyc_l -> G^l/l, PSet -> exp(G(z) - G(z^2)).

OGF rules go through the Polya operators, which need G(z^k); these are
obtained from the single prefix G(z) by :func:`subst_power`.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, List, Mapping, Optional

from .cardinality import Card
from .errors import CompositionUndefined
from .expr import MARKER, Atom, Ctor, Expr, Integral, OneT, Prod, Ref, Sum, ZeroT
from .series import FLOAT, INT, RAT, TruncSeries, demote, exp, integrate, inv, log, mul, power, promote, subst_power

EGF, OGF = "egf", "ogf"


def default_ring(kind: str) -> str:
    return RAT if kind == EGF else INT


def check_kind(kind: str) -> str:
    k = str(kind).lower()
    if k not in (EGF, OGF):
        raise ValueError(f"unknown series kind {kind!r}; expected 'egf' or 'ogf'")
    return k


def totient(n: int) -> int:
    out, p, m = n, 2, n
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            out -= out // p
        p += 1
    if m > 1:
        out -= out // m
    return out


class SeriesEvaluator:
    """Evaluate expressions to series modulo ``z^order`` for fixed unknowns.

    ``env`` maps equation names to series (truncated to ``order``); ``atoms``
    optionally overrides atom sorts (default: every sort is ``z``, the
    companion marker is 1).  Results are memoized per expression, so the
    right-hand sides and their Jacobian share common subterms.
    """

    def __init__(
        self,
        kind: str,
        env: Mapping[str, TruncSeries],
        order: int,
        ring: Optional[str] = None,
        atoms: Optional[Mapping[str, TruncSeries]] = None,
    ):
        self.kind = check_kind(kind)
        self.order = order
        self.ring = ring or default_ring(self.kind)
        self.env = {k: self._fit(v) for k, v in env.items()}
        self.atoms = dict(atoms or {})
        self.cache: Dict[Expr, TruncSeries] = {}

    def _fit(self, s: TruncSeries) -> TruncSeries:
        s = s.to_ring(self.ring)
        return s.truncate(self.order) if s.order >= self.order else s.pad(self.order)

    def _out(self, s: TruncSeries) -> TruncSeries:
        # computations that divide run over the rationals
        if s.ring == self.ring:
            return s
        return demote(s, self.ring) if self.ring == INT else s.to_ring(self.ring)

    def __call__(self, e: Expr) -> TruncSeries:
        hit = self.cache.get(e)
        if hit is None:
            hit = self._eval(e)
            self.cache[e] = hit
        return hit

    def _eval(self, e: Expr) -> TruncSeries:
        n, ring = self.order, self.ring
        if isinstance(e, ZeroT):
            return TruncSeries.zero(n, ring)
        if isinstance(e, OneT):
            return TruncSeries.one(n, ring)
        if isinstance(e, Atom):
            if e.sort in self.atoms:
                return self._fit(self.atoms[e.sort])
            if e.sort == MARKER:
                return TruncSeries.one(n, ring)
            return TruncSeries.variable(n, ring)
        if isinstance(e, Ref):
            if e.name not in self.env:
                raise KeyError(f"no series bound to {e.name}")
            return self.env[e.name]
        if isinstance(e, Sum):
            acc = self(e.terms[0])
            for t in e.terms[1:]:
                acc = acc + self(t)
            return acc
        if isinstance(e, Prod):
            acc = self(e.factors[0])
            for f in e.factors[1:]:
                if acc.is_zero():
                    break
                acc = mul(acc, self(f))
            return acc
        if isinstance(e, Ctor):
            return self._ctor(e.kind, e.card, self(e.child), e)
        if isinstance(e, Integral):
            if self.kind != EGF:
                raise ValueError("integrals only have exponential generating series")
            if n == 0:
                return TruncSeries.zero(0, ring)
            return self._out(integrate(self(e.child).truncate(n - 1)))
        raise TypeError(f"not an expression: {e!r}")

    # -- constructors ------------------------------------------------------

    def _ctor(self, kind: str, card: Card, g: TruncSeries, node: Expr) -> TruncSeries:
        n = self.order
        if n == 0:
            return g
        if g.coeffs[0]:
            if not card.is_finite:
                raise CompositionUndefined(f"{node}: unbounded {kind} of a series with nonzero constant term")
            if kind == "PSet":
                raise CompositionUndefined(f"{node}: PSet of a series with nonzero constant term")
            top = card.max
            terms = self._fixed(kind, g, top)
            return self._sum_members(terms, card.members(top + 1))
        top = n - 1  # F_l(G) = O(z^l) when G(0) = 0
        if card.is_full or (kind == "Cyc" and card == Card.at_least(1)):
            return self._full(kind, g)
        if kind == "PSet":
            if card != Card.at_least(1):
                raise CompositionUndefined(f"{node}: only PSet and PSet minus the empty set are supported")
            return self._full(kind, g) - 1
        finite_top = min(top, max((hi if hi is not None else lo - 1) for lo, hi in card.intervals))
        need = max(finite_top, 0)
        terms = self._fixed(kind, g, need)
        acc = TruncSeries.zero(n, self.ring)
        for lo, hi in card.intervals:
            if hi is None:
                if lo > top:
                    continue
                if kind == "Seq":
                    # G^lo / (1 - G)
                    acc = acc + mul(power(g, lo), inv(1 - g))
                else:
                    acc = acc + self._full(kind, g) - self._sum_members(terms, range(0, lo))
            else:
                acc = acc + self._sum_members(terms, range(lo, min(hi, top) + 1))
        return acc

    def _sum_members(self, terms: List[TruncSeries], members) -> TruncSeries:
        acc = TruncSeries.zero(self.order, self.ring)
        for l in members:
            if l < len(terms):
                acc = acc + terms[l]
        return acc

    def _full(self, kind: str, g: TruncSeries) -> TruncSeries:
        if kind == "Seq":
            return inv(1 - g)
        if self.kind == EGF:
            if kind == "Set":
                return self._out(exp(g))
            if kind == "Cyc":
                return self._out(-log(1 - g))
            return self._out(exp(g - subst_power(g, 2)))
        # Polya operators; G(0) = 0, so k <= N - 1 suffices
        if kind == "Set":
            return self._out(exp(self._harmonic(g, lambda k: Fraction(1, k))))
        if kind == "PSet":
            return self._out(exp(self._harmonic(g, lambda k: Fraction(1 if k % 2 else -1, k))))
        big = -log(1 - g)
        return self._out(self._harmonic(big, lambda k: Fraction(totient(k), k)))

    def _harmonic(self, g: TruncSeries, weight) -> TruncSeries:
        """sum_{k >= 1} weight(k) g(z^k), in the rationals (floats stay floats)."""
        n = g.order
        src = g.coeffs
        flt = g.ring == FLOAT
        out = [0.0 if flt else 0] * n
        for k in range(1, n):
            w = weight(k)
            if flt:
                w = float(w)
            for j in range(1, (n - 1) // k + 1):
                c = src[j]
                if c:
                    out[j * k] += w * c
        return TruncSeries._raw(out, FLOAT if flt else RAT) if flt else TruncSeries(out, RAT)

    def _fixed(self, kind: str, g: TruncSeries, top: int) -> List[TruncSeries]:
        """[F_0(G), ..., F_top(G)] for the constructor with exactly l components."""
        n, ring = self.order, self.ring
        if kind == "Seq" or (self.kind == EGF and kind in ("Set", "Cyc")):
            pw = [TruncSeries.one(n, ring)]
            for _ in range(top):
                pw.append(mul(pw[-1], g) if len(pw) > 1 else g)
            if kind == "Seq":
                return pw
            if kind == "Set":
                return [self._out(promote(p, RAT).divide(math.factorial(l))) if l > 1 else p for l, p in enumerate(pw)]
            return [TruncSeries.zero(n, ring)] + [
                self._out(promote(p, RAT).divide(l)) if l > 1 else p for l, p in enumerate(pw) if l >= 1
            ]
        if kind == "Set":
            # e_l = (1/l) sum_{k=1}^{l} p_k e_{l-k}, p_k = G(z^k)
            work = RAT if ring == INT else ring
            gw = g.to_ring(work)
            ps = [None] + [subst_power(gw, k) for k in range(1, top + 1)]
            es = [TruncSeries.one(n, work)]
            for l in range(1, top + 1):
                acc = TruncSeries.zero(n, work)
                for k in range(1, l + 1):
                    acc = acc + mul(ps[k], es[l - k])
                es.append(acc.divide(l))
            return [self._out(e) for e in es]
        if kind == "Cyc":
            work = RAT if ring == INT else ring
            gw = g.to_ring(work)
            out = [TruncSeries.zero(n, ring)]
            for l in range(1, top + 1):
                acc = TruncSeries.zero(n, work)
                for d in range(1, l + 1):
                    if l % d == 0:
                        acc = acc + power(subst_power(gw, d), l // d).scale(totient(d))
                out.append(self._out(acc.divide(l)))
            return out
        raise CompositionUndefined(f"fixed-cardinality {kind} is not supported")


def egf_eval(expr: Expr, env: Mapping[str, TruncSeries], N: int, ring: str = RAT) -> TruncSeries:
    return SeriesEvaluator(EGF, env, N, ring)(expr)


def ogf_eval(expr: Expr, env: Mapping[str, TruncSeries], N: int, ring: str = INT) -> TruncSeries:
    """OGF of ``expr``; ``env`` holds each Y(z), from which Y(z^k) is derived."""
    return SeriesEvaluator(OGF, env, N, ring)(expr)


def is_virtual(series) -> bool:
    """True if some coefficient is negative (a virtual species)."""
    return any(c < 0 for s in series for c in s.coeffs)
