"""Numerical values of generating series inside their disk of convergence.

EGF values come from Newton's iteration on the vector of values

    y <- y + (Id - dH/dY(a, y))^-1 (H(a, y) - y),  y = 0 initially.

OGF values need the whole sequence S(a^k), k >= 1, because of the Polya
operators.  The hybrid method keeps Newton unknowns for k <= K, reads the
values for K < k <= L off an exact prefix of the series, and cuts the Polya
sums at L, chosen so that the neglected tail is below the tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from .analysis import WellFoundedReport, is_well_founded
from .cardinality import Card
from .errors import CycDivergent, NonConvergence, NotWellFounded, SingularLinearSystem, UnsupportedOperation
from .evaluate import EGF, OGF, totient
from .expr import MARKER, Atom, Ctor, Expr, Integral, OneT, Prod, Ref, Sum, ZeroT, make_ctor
from .parser import SystemSpec
from .symbolic import jacobian, rebuild

MACHINE_EPS = np.finfo(float).eps
POLYA_KINDS = ("Set", "Cyc", "PSet")


class _Outside(Exception):
    """A value left the domain of a constructor (Seq/Cyc argument >= 1)."""


# -- scalar constructor rules (elementwise on arrays) ----------------------


def _pow_sum(g: np.ndarray, lo: int, hi: int, weight) -> np.ndarray:
    acc = np.zeros_like(g)
    p = g**lo
    for l in range(lo, hi + 1):
        acc += p * weight(l)
        p = p * g
    return acc


def _tail(g: np.ndarray, lo: int, weight, full) -> np.ndarray:
    """sum_{l >= lo} weight(l) g^l, summed directly where it converges fast."""
    out = np.empty_like(g)
    for i, x in enumerate(g):
        if abs(x) < 0.5:
            acc, term, l = 0.0, x**lo, lo
            while True:
                t = term * weight(l)
                acc += t
                if abs(t) <= 1e-18 * abs(acc) or l > lo + 2000:
                    break
                term *= x
                l += 1
            out[i] = acc
        else:
            out[i] = full(x) - sum(weight(l) * x**l for l in range(lo))
    return out


def _inv_fact(l: int) -> float:
    return 1.0 / math.factorial(l) if l < 171 else 0.0


def _seq_num(g: np.ndarray, card: Card) -> np.ndarray:
    acc = np.zeros_like(g)
    for lo, hi in card.intervals:
        if hi is None:
            if np.any(g >= 1.0):
                raise _Outside("Seq argument reached 1")
            acc += g**lo / (1.0 - g)
        else:
            acc += _pow_sum(g, lo, hi, lambda l: 1.0)
    return acc


def _egf_set(g: np.ndarray, card: Card) -> np.ndarray:
    acc = np.zeros_like(g)
    for lo, hi in card.intervals:
        if hi is None:
            acc += np.exp(g) if lo == 0 else _tail(g, lo, _inv_fact, math.exp)
        else:
            acc += _pow_sum(g, lo, hi, _inv_fact)
    return acc


def _log_full(x: float) -> float:
    if x >= 1.0:
        raise _Outside("Cyc argument reached 1")
    return -math.log1p(-x)


def _egf_cyc(g: np.ndarray, card: Card) -> np.ndarray:
    acc = np.zeros_like(g)
    for lo, hi in card.intervals:
        if hi is None:
            if np.any(g >= 1.0):
                raise _Outside("Cyc argument reached 1")
            acc += -np.log1p(-g) if lo <= 1 else _tail(g, lo, lambda l: 1.0 / l if l else 0.0, _log_full)
        else:
            acc += _pow_sum(g, max(lo, 1), hi, lambda l: 1.0 / l)
    return acc


# -- evaluation of expressions to value arrays ------------------------------


class _ArrayEval:
    """Values of expressions at a^k for k = 1..L (EGF: L = 1, no Polya sums)."""

    def __init__(self, kind: str, alpha: float, env: Dict[str, np.ndarray], L: int):
        self.kind, self.alpha, self.env, self.L = kind, alpha, env, L
        self.points = alpha ** np.arange(1, L + 1, dtype=float)
        self.cache: Dict[Expr, np.ndarray] = {}
        self._phi = None

    def __call__(self, e: Expr) -> np.ndarray:
        hit = self.cache.get(e)
        if hit is None:
            hit = self._eval(e)
            self.cache[e] = hit
        return hit

    def _eval(self, e: Expr) -> np.ndarray:
        L = self.L
        if isinstance(e, ZeroT):
            return np.zeros(L)
        if isinstance(e, OneT):
            return np.ones(L)
        if isinstance(e, Atom):
            return np.ones(L) if e.sort == MARKER else self.points.copy()
        if isinstance(e, Ref):
            return self.env[e.name]
        if isinstance(e, Sum):
            return sum((self(t) for t in e.terms[1:]), self(e.terms[0]).copy())
        if isinstance(e, Prod):
            acc = self(e.factors[0]).copy()
            for f in e.factors[1:]:
                acc = acc * self(f)
            return acc
        if isinstance(e, Ctor):
            g = self(e.child)
            if e.kind == "Seq":
                return _seq_num(g, e.card)
            if self.kind == EGF:
                if e.kind == "Set":
                    return _egf_set(g, e.card)
                if e.kind == "Cyc":
                    return _egf_cyc(g, e.card)
                raise UnsupportedOperation("numeric EGF values of PSet are not supported")
            return self._polya(e.kind, e.card, g)
        if isinstance(e, Integral):
            raise UnsupportedOperation("numeric values of integral systems are not supported")
        raise TypeError(f"not an expression: {e!r}")

    # Polya operators on value sequences: index k uses g at indices k*j <= L.

    def phi(self) -> np.ndarray:
        if self._phi is None:
            self._phi = _kernels.totients(self.L)
        return self._phi

    def _at(self, g: np.ndarray, k: int, j: int) -> float:
        return g[k * j - 1] if k * j <= self.L else 0.0

    def _set_fixed(self, g: np.ndarray, top: int) -> List[np.ndarray]:
        es = [np.ones(self.L)]
        for l in range(1, top + 1):
            acc = np.zeros(self.L)
            for k in range(1, self.L + 1):
                acc[k - 1] = sum(self._at(g, k, j) * es[l - j][k - 1] for j in range(1, l + 1)) / l
            es.append(acc)
        return es

    def _cyc_fixed(self, g: np.ndarray, top: int) -> List[np.ndarray]:
        out = [np.zeros(self.L)]
        for l in range(1, top + 1):
            acc = np.zeros(self.L)
            for k in range(1, self.L + 1):
                acc[k - 1] = sum(
                    totient(d) * self._at(g, k, d) ** (l // d) for d in range(1, l + 1) if l % d == 0
                ) / l
            out.append(acc)
        return out

    def _polya(self, kind: str, card: Card, g: np.ndarray) -> np.ndarray:
        if kind == "PSet":
            full = np.exp(_kernels.polya_sums(g, -1.0))
            return full if card.is_full else full - 1.0
        if kind == "Cyc" and np.any(g >= 1.0):
            raise CycDivergent(f"Cyc argument {float(np.max(g)):.6g} >= 1")

        def full():
            if kind == "Set":
                return np.exp(_kernels.polya_sums(g, 1.0))
            return _kernels.cyc_sums(g, self.phi())

        fixed = self._set_fixed if kind == "Set" else self._cyc_fixed
        acc = np.zeros(self.L)
        for lo, hi in card.intervals:
            if hi is None:
                if (kind == "Set" and lo == 0) or (kind == "Cyc" and lo <= 1):
                    acc += full()
                else:
                    acc += full() - sum(fixed(g, lo - 1))
            else:
                terms = fixed(g, hi)
                acc += sum(terms[lo : hi + 1])
        return acc


# -- dominant system, radius, truncation order ------------------------------


def dominant_system(sys: SystemSpec) -> SystemSpec:
    """Flat majorant: Set -> Seq, Cyc -> Seq (constraint >= 1), PSet -> Seq."""

    def leaf(x):
        if isinstance(x, Ctor) and x.kind != "Seq":
            card = x.card.without_zero() if x.kind == "Cyc" else x.card
            return make_ctor("Seq", rebuild(x.child, leaf), card)
        return None

    return sys.with_rhs([rebuild(h, leaf) for h in sys.rhs])


@dataclass
class NumericResult:
    values: np.ndarray
    iterations: int
    iterates: List[np.ndarray] = field(default_factory=list)


def _checked(sys: SystemSpec, report: Optional[WellFoundedReport]) -> WellFoundedReport:
    report = report or is_well_founded(sys)
    if not report.verdict:
        raise NotWellFounded(report)
    return report


def _newton_solve_linear(jac: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    a = np.eye(jac.shape[0]) - jac
    if not np.all(np.isfinite(a)) or np.linalg.cond(a) > 1.0 / MACHINE_EPS:
        raise SingularLinearSystem("Id - dH/dY is singular or ill-conditioned: point probably outside the disk")
    return np.linalg.solve(a, rhs)


def egf_value(
    sys: SystemSpec,
    alpha: float,
    eps: float = 1e-15,
    max_iter: int = 200,
    *,
    report: Optional[WellFoundedReport] = None,
) -> NumericResult:
    """Values of the exponential generating series of the solution at ``alpha``.

    Stops when both the Newton update and the residual are below ``eps`` in
    the sup norm (``eps`` is floored at a few units of roundoff of the
    values, which are otherwise unreachable).
    """
    report = _checked(sys, report)
    names, m = sys.names, sys.m
    if alpha == 0:
        y = np.array(report.constant_term, dtype=float)
        return NumericResult(y, 0, [y])
    jac = jacobian(sys)
    y = np.zeros(m)
    iterates = []
    for it in range(1, max_iter + 1):
        try:
            ev = _ArrayEval(EGF, alpha, {n: np.array([v]) for n, v in zip(names, y)}, 1)
            hv = np.array([ev(h)[0] for h in sys.rhs])
            jv = np.array([[ev(e)[0] for e in row] for row in jac]).reshape(m, m)
        except (_Outside, OverflowError, FloatingPointError) as exc:
            raise NonConvergence(f"alpha = {alpha} is probably outside the disk of convergence ({exc})")
        res = hv - y
        d = _newton_solve_linear(jv, res)
        y = y + d
        iterates.append(y.copy())
        tol = max(eps, 8 * MACHINE_EPS * max(1.0, float(np.max(np.abs(y)))))
        if not np.all(np.isfinite(y)):
            break
        if np.max(np.abs(d)) < tol and np.max(np.abs(res)) < tol:
            return NumericResult(y, it, iterates)
    raise NonConvergence(f"no convergence after {max_iter} iterations: alpha = {alpha} probably outside the disk")


def estimate_radius(sys: SystemSpec, steps: int = 20) -> float:
    """Bisection on (0, 1] for the largest point where the dominant system's value is computable."""
    dom = dominant_system(sys)
    rep = is_well_founded(dom)
    ok = lambda a: _converges(dom, a, rep)  # noqa: E731
    if ok(1.0):
        return 1.0
    lo, hi = 0.0, 1.0
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def _converges(sys, a, rep) -> bool:
    try:
        egf_value(sys, a, 1e-12, report=rep)
        return True
    except (NonConvergence, SingularLinearSystem, CycDivergent):
        return False


def truncation_order(sys: SystemSpec, rho: float, eps: float, *, return_residual: bool = False):
    """Number of terms (sizes 1, 2, ...) of the dominant series needed at ``rho``.

    The remainder R - sum_{i<=M} u_i rho^i is computed from the value R of
    the dominant system; once it drops to the roundoff level of R, the
    remainder is taken from the exact coefficients instead.
    """
    from .solver import newton_solve

    dom = dominant_system(sys)
    rep = is_well_founded(dom)
    R = egf_value(dom, rho, 1e-16, report=rep).values
    const = np.array(rep.constant_term, dtype=float)
    floor = 64 * MACHINE_EPS * max(1.0, float(np.max(np.abs(R))))
    order = 16
    while True:
        coeffs = newton_solve(dom, OGF, order, report=rep)
        terms = [[float(c.coeffs[i]) * rho**i for i in range(order)] for c in coeffs]
        for M in range(0, order):
            rem = np.array([math.fsum([R[j], -const[j]] + [-t for t in terms[j][1 : M + 1]]) for j in range(len(R))])
            if np.max(np.abs(rem)) <= floor:
                # below the roundoff of R: use the exact tail instead
                rem = np.array([math.fsum(terms[j][M + 1 :]) for j in range(len(R))])
                last = max(abs(terms[j][-1]) for j in range(len(R)))
                if last > eps * 1e-6 and last > 0:
                    break  # need more coefficients to trust the tail
            if np.max(np.abs(rem)) < eps:
                return (M, float(np.max(np.abs(rem)))) if return_residual else M
        order *= 2
        if order > 1 << 16:
            raise NonConvergence("truncation order exceeds 65536 terms")


# -- Polya tail bounds -------------------------------------------------------


def _power_tail(alpha: float, L: int) -> float:
    """sum_{i >= L} alpha^i / i."""
    if alpha <= 0:
        return 0.0
    if alpha >= 1:
        return math.inf
    acc, term, i = 0.0, alpha**L, L
    while term / i > 1e-18 * acc or i == L:
        acc += term / i
        term *= alpha
        i += 1
        if i > L + 100000:
            break
    return acc


def polya_gap(kind: str, values: Sequence[float], alpha: float, L: int) -> float:
    """Gap between the upper and lower bounds when the Polya sum stops at L.

    For Set and PSet it is relative, exp(delta * sum_{i>=L} a^i/i) - 1 with
    delta = Y(a^L)/a^L; for Cyc it is the absolute Y(a^L)/(1 - a), which
    needs delta <= 1.  Otherwise log(1/(1-x)) <= x/(1-x) gives the weaker
    Y(a^L)/((1 - a)(1 - Y(a^L))).
    """
    if alpha == 0:
        return 0.0
    y = float(values[L - 1])
    if kind == "Cyc":
        if y <= alpha**L:
            return y / (1.0 - alpha)
        return math.inf if y >= 1.0 else y / ((1.0 - alpha) * (1.0 - y))
    delta = y / alpha**L
    return math.expm1(delta * _power_tail(alpha, L))


def polya_tail_length(kind: str, values, alpha: float, eps: float, L_max: Optional[int] = None) -> Tuple[Optional[int], float]:
    """Smallest L with gap < eps, and that gap.

    ``values[k-1]`` (or ``values(k)`` if callable) is Y(a^k).  Returns
    (None, gap) when no L up to the number of available values qualifies.
    """
    if kind not in POLYA_KINDS:
        raise ValueError(f"{kind} has no Polya tail")
    if alpha == 0:
        return 1, 0.0
    get = values if callable(values) else (lambda k: values[k - 1])
    avail = L_max if L_max is not None else len(values)
    if kind == "Cyc" and get(1) >= 1.0:
        raise CycDivergent(f"Cyc argument value {get(1):.6g} >= 1")
    gap = math.inf
    for L in range(1, avail + 1):
        gap = polya_gap(kind, [get(k) for k in range(1, L + 1)], alpha, L)
        if gap < eps:
            return L, gap
    return None, gap


# -- OGF values: the hybrid method -----------------------------------------


@dataclass
class EvalState:
    values: np.ndarray
    values_at_powers: np.ndarray  # shape (K, m): S(a^k) for k = 1..K
    K: int
    L: int
    tail_series: list
    truncation_order: int
    iterations: int
    converged: bool


def _polya_nodes(exprs) -> List[Ctor]:
    seen: Dict[Expr, None] = {}
    for e in exprs:
        stack = [e]
        while stack:
            x = stack.pop()
            if isinstance(x, Ctor) and x.kind in POLYA_KINDS and not x.card.is_finite:
                seen.setdefault(x, None)
            if isinstance(x, (Sum, Prod)):
                stack.extend(x.terms if isinstance(x, Sum) else x.factors)
            elif isinstance(x, (Ctor, Integral)):
                stack.append(x.child)
    return list(seen)


def ogf_value(
    sys: SystemSpec,
    alpha: float,
    eps: float = 1e-12,
    K: int = 3,
    max_iter: int = 200,
    *,
    rho: Optional[float] = None,
    report: Optional[WellFoundedReport] = None,
) -> Tuple[np.ndarray, EvalState]:
    """Values S(a) of the ordinary generating series, with the full state."""
    from .solver import newton_solve

    report = _checked(sys, report)
    names, m = sys.names, sys.m
    if K < 1 or eps <= 0:
        raise ValueError("need K >= 1 and eps > 0")
    if alpha == 0:
        y = np.array(report.constant_term, dtype=float)
        return y, EvalState(y, y.reshape(1, m), K, 1, [], 0, 0, True)
    jac = jacobian(sys)
    nodes = _polya_nodes(list(sys.rhs) + [e for row in jac for e in row])
    if nodes and alpha >= 1:
        raise NonConvergence(f"alpha = {alpha} >= 1 is outside the disk of convergence")
    rho_safe = rho if rho is not None else 0.5 * estimate_radius(sys)
    if rho_safe <= 0:
        raise NonConvergence("the dominant system has no positive radius of convergence")
    while alpha ** (K + 1) > rho_safe:
        K += 1
        if K > 10000:
            raise NonConvergence("cannot place a^(K+1) inside the dominant disk")
    mcap = truncation_order(sys, alpha ** (K + 1), eps) if nodes else 0
    prefix = newton_solve(sys, OGF, mcap + 1, report=report)
    pcoeffs = [np.array([float(c) for c in s.coeffs]) for s in prefix]
    budget = eps / max(len(nodes), 1)

    y = np.zeros((K, m))
    L = K
    it = 0
    order_n = 1
    for it in range(1, max_iter + 1):
        order_n = min(2**it, mcap + 1)
        while True:
            env = {}
            for i, n in enumerate(names):
                col = np.empty(L)
                col[:K] = y[:, i]
                if L > K:
                    col[K:] = _kernels.horner_at_powers(pcoeffs[i][:order_n], alpha, L)[K:]
                env[n] = col
            ev = _ArrayEval(OGF, alpha, env, L)
            try:
                hv = np.array([ev(h) for h in sys.rhs])  # (m, L)
                jv = np.array([[ev(e) for e in row] for row in jac]).reshape(m, m, L)
            except _Outside as exc:
                raise NonConvergence(f"alpha = {alpha} is probably outside the disk of convergence ({exc})")
            lengths = [polya_tail_length(x.kind, ev(x.child), alpha, budget)[0] for x in nodes]
            if any(l is None for l in lengths):
                L *= 2
                if L > 1 << 14:
                    raise NonConvergence("Polya tail length exceeds 16384")
                continue
            break
        L_new = max([K] + lengths)
        upd = res = 0.0
        for k in range(K):
            r = hv[:, k] - y[k]
            d = _newton_solve_linear(jv[:, :, k], r)
            y[k] = y[k] + d
            upd, res = max(upd, float(np.max(np.abs(d)))), max(res, float(np.max(np.abs(r))))
        tol = max(eps, 8 * MACHINE_EPS * max(1.0, float(np.max(np.abs(y)))))
        done = upd < tol and res < tol and order_n == mcap + 1 and L_new <= L
        L = max(L, L_new)
        if done:
            return y[0].copy(), EvalState(y[0].copy(), y.copy(), K, L, prefix, mcap, it, True)
    raise NonConvergence(f"no convergence after {max_iter} iterations: alpha = {alpha} probably outside the disk")
