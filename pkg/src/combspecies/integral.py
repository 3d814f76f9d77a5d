"""Integral systems Y = H(Z, Y) + Int(G(Z, Y)) over linear species.

Only exponential generating series exist for these.  :func:`solve_integral`
runs the Newton recursion that carries, besides the solution prefix Y,

* U, a prefix of (Id - dH/dY)^-1,
* M, the fundamental solution of M' = (dG/dY) U M with M(0) = Id,
* Mbar, a prefix of M^-1,

and closes each level by variation of constants.  :func:`naive_integral_solve`
iterates the equation directly and serves as the oracle.
"""

from __future__ import annotations

from typing import Callable, List, Optional

from .analysis import (
    INFINITE_CONSTANT,
    JACOBIAN_NOT_NILPOTENT,
    UNSUPPORTED_CONSTANT,
    WellFoundedReport,
    bool_jacobian,
    companion_system,
    constant_is_zero,
    constant_term,
    is_nilpotent,
    is_partially_polynomial,
    is_well_founded_at_zero,
    nilpotence_order,
    prune_zero_coordinates,
    structurally_polynomial,
    zero_coordinates,
)
from .errors import CompositionUndefined, InfiniteConstantTerm, NonConvergence, NotWellFounded
from .evaluate import EGF, SeriesEvaluator
from .expr import MARKER, Atom, Integral, Ref, make_prod, make_sum
from .matrix import SeriesMatrix, constant_inverse, mat_vec
from .parser import Equation, SystemSpec
from .series import RAT, TruncSeries, differentiate, integrate, precision_ladder
from .symbolic import atom_derivative, integrand_jacobian, jacobian

# reason codes specific to integral systems
CONSTANT_PART_NOT_POLYNOMIAL = "ConstantPartNotPolynomial"
NOT_POLYNOMIAL_IN_INITIAL_VALUES = "NotPolynomialInInitialValues"

_Q = "Q@"  # prefix for the derivative unknowns of the W-system
_X = "X@"  # prefix for the initial-value sorts


def _algebraic_part(sys: SystemSpec) -> SystemSpec:
    eqs = tuple(Equation(eq.name, eq.rhs) for eq in sys.equations)
    return SystemSpec(eqs, sys.sorts, "classical")


def w_system(sys: SystemSpec) -> SystemSpec:
    """Y_i = X_i + Z Q_i,  Q = (dH/dY) Q + dH/dZ + G.

    Q stands for Y'; the integral is replaced by a product with Z, which
    has the same polynomiality behaviour and keeps the system classical.
    """
    jac = jacobian(sys)
    z = Atom(sys.sorts[0])
    eqs = []
    for name in sys.names:
        eqs.append(Equation(name, make_sum([Atom(_X + name), make_prod([z, Ref(_Q + name)])])))
    for i, name in enumerate(sys.names):
        lin = [make_prod([jac[i][j], Ref(_Q + other)]) for j, other in enumerate(sys.names)]
        rhs = make_sum(lin + [atom_derivative(sys.rhs[i], sys.sorts), sys.integrands[i]])
        eqs.append(Equation(_Q + name, rhs))
    sorts = tuple(sys.sorts) + tuple(_X + n for n in sys.names)
    return SystemSpec(tuple(eqs), sorts, "classical")


def check_integral_wf(sys: SystemSpec) -> WellFoundedReport:
    """Well-foundedness of an integral system.

    1. dH/dY(0, 0) is nilpotent.
    2. When H(0, 0) != 0: (a) H(0, Y) is polynomial with a nilpotent
       Jacobian, and (b) the solution of the W-system is polynomial in the
       initial-value sorts X_i whose constant term R_i is nonzero.
    """
    alg = _algebraic_part(sys)
    none = {n: False for n in sys.names}
    b0 = bool_jacobian(alg, none, lambda s: False)
    if not is_nilpotent(b0):
        return WellFoundedReport(False, JACOBIAN_NOT_NILPOTENT, detail="dH/dY at 0 is not nilpotent")
    order = nilpotence_order(b0)
    if constant_is_zero(alg):
        return WellFoundedReport(True, None, tuple(0 for _ in sys.names), order)

    every = {n: True for n in sys.names}
    no_atoms = lambda s: False  # noqa: E731
    if not all(structurally_polynomial(h, every, no_atoms) for h in alg.rhs) or not is_nilpotent(
        bool_jacobian(alg, every, no_atoms)
    ):
        return WellFoundedReport(
            False, CONSTANT_PART_NOT_POLYNOMIAL, jacobian_nilpotence_order=order,
            detail="H(0, Y) is not polynomial with a nilpotent Jacobian",
        )
    try:
        const = constant_term(alg)
        w = w_system(sys)
        if not constant_is_zero(w):
            w, _ = companion_system(w)
    except InfiniteConstantTerm as exc:
        return WellFoundedReport(False, INFINITE_CONSTANT, jacobian_nilpotence_order=order, detail=str(exc))
    except CompositionUndefined as exc:
        return WellFoundedReport(False, UNSUPPORTED_CONSTANT, jacobian_nilpotence_order=order, detail=str(exc))

    markers = {MARKER} | {_X + n for n, r in zip(sys.names, const) if r}
    w = prune_zero_coordinates(w, zero_coordinates(w))
    ok = w.m == 0 or (is_well_founded_at_zero(w).verdict and is_partially_polynomial(w, markers))
    if not ok:
        return WellFoundedReport(
            False, NOT_POLYNOMIAL_IN_INITIAL_VALUES, jacobian_nilpotence_order=order,
            detail="the derivative system is not polynomial in the initial values",
        )
    return WellFoundedReport(True, None, const, order)


# -- series helpers ----------------------------------------------------------


def _identity(m: int, n: int) -> SeriesMatrix:
    return SeriesMatrix.identity(m, n, RAT)


def _mat_derivative(a: SeriesMatrix) -> SeriesMatrix:
    return a.map(differentiate)


def _mat_integral(a: SeriesMatrix) -> SeriesMatrix:
    return a.map(integrate)


def refine_fundamental(a: SeriesMatrix, w: SeriesMatrix, w_bar: SeriesMatrix, n: int):
    """One Newton step for W' = A W, W(0) = Id, and for W^-1, at order n."""
    w, w_bar = w.pad(n), w_bar.pad(n)
    inner = w_bar.truncate(n - 1) @ (a.truncate(n - 1) @ w.truncate(n - 1) - _mat_derivative(w))
    w = w + w @ _mat_integral(inner)
    w_bar = w_bar + w_bar @ (_identity(w.m, n) - w @ w_bar)
    return w, w_bar


def fundamental_solution(a: SeriesMatrix, n: int):
    """(W, W^-1) mod z^n for W' = A W, W(0) = Id."""
    m = a.m
    w = w_bar = _identity(m, 1)
    for p in precision_ladder(n)[1:]:
        w, w_bar = refine_fundamental(a, w, w_bar, p)
    return w, w_bar


def variation_of_constants(
    a: Optional[SeriesMatrix],
    b: List[TruncSeries],
    w: Optional[SeriesMatrix],
    w_bar: Optional[SeriesMatrix],
    n: int,
) -> List[TruncSeries]:
    """W Int(Wbar B) mod z^n, the solution of Y' = A Y + B with Y(0) = 0.

    When ``w`` is None the fundamental solution is computed from ``a``.
    """
    if w is None:
        w, w_bar = fundamental_solution(a, n)
    w, w_bar = _fit(w, n), _fit(w_bar, n - 1)
    inner = mat_vec(w_bar, [_fit_series(x, n - 1) for x in b])
    return mat_vec(w, [integrate(x) for x in inner])


def _fit_series(s: TruncSeries, n: int) -> TruncSeries:
    return s.truncate(n) if s.order >= n else s.pad(n)


def _fit(a: SeriesMatrix, n: int) -> SeriesMatrix:
    return a.truncate(n) if a.order >= n else a.pad(n)


# -- solvers -----------------------------------------------------------------


def _checked(sys: SystemSpec, report: Optional[WellFoundedReport]) -> WellFoundedReport:
    report = report or check_integral_wf(sys)
    if not report.verdict:
        raise NotWellFounded(report)
    return report


class _Procedures:
    """sG, sJ, sK and sL of the recursion: series of G, dH/dY, dG/dY, dH/dZ at Y."""

    def __init__(self, sys: SystemSpec):
        self.sys = sys
        self.jac = jacobian(sys)
        self.gjac = integrand_jacobian(sys)
        self.hz = [atom_derivative(h, sys.sorts) for h in sys.rhs]

    def evaluator(self, ys, n) -> SeriesEvaluator:
        return SeriesEvaluator(EGF, dict(zip(self.sys.names, ys)), n, RAT)

    @staticmethod
    def matrix(rows, ev) -> SeriesMatrix:
        return SeriesMatrix([[ev(e) for e in row] for row in rows])


def solve_integral(
    sys: SystemSpec,
    N: int,
    *,
    report: Optional[WellFoundedReport] = None,
    trace: Optional[Callable[[int, List[TruncSeries]], None]] = None,
) -> List[TruncSeries]:
    """First N coefficients of the exponential generating series of the solution."""
    report = _checked(sys, report)
    m = sys.m
    if N <= 0:
        return [TruncSeries.zero(0, RAT) for _ in range(m)]
    proc = _Procedures(sys)

    ys = [TruncSeries.constant(c, 1, RAT) for c in report.constant_term]
    j0 = proc.matrix(proc.jac, proc.evaluator(ys, 1)).constant_term()
    base = [[(1 if i == k else 0) - j0[i][k] for k in range(m)] for i in range(m)]
    u = SeriesMatrix.constant(constant_inverse(base, RAT), 1, RAT)
    mm = mm_bar = _identity(m, 1)
    if trace:
        trace(1, ys)

    h = 1
    for p in precision_ladder(N)[1:]:
        if u.order < h:
            yh = [y.truncate(h) for y in ys]
            ev = proc.evaluator(yh, h)
            uh = u.pad(h)
            u = uh + uh @ (proc.matrix(proc.jac, ev) @ uh + _identity(m, h) - uh)
            a = proc.matrix(proc.gjac, ev) @ u
            mm, mm_bar = refine_fundamental(a, mm, mm_bar, h)
        # residual of the differentiated equation, at order p - 1
        yp = [y.pad(p) for y in ys]
        ev = proc.evaluator([y.truncate(p - 1) for y in yp], p - 1)
        dy = [differentiate(y) for y in yp]
        jv = proc.matrix(proc.jac, ev)
        jdy = mat_vec(jv, dy)
        q = [
            ev(hz) + jd - d + ev(g)
            for hz, jd, d, g in zip(proc.hz, jdy, dy, sys.integrands)
        ]
        corr = variation_of_constants(None, q, mm, mm_bar, p)
        delta = mat_vec(u.pad(p), corr)
        ys = [y + d for y, d in zip(yp, delta)]
        h = p
        if trace:
            trace(p, ys)
    return ys


def _combined(sys: SystemSpec) -> SystemSpec:
    eqs = tuple(
        Equation(eq.name, make_sum([eq.rhs, Integral(eq.integrand)]) if eq.integrand is not None else eq.rhs)
        for eq in sys.equations
    )
    return SystemSpec(eqs, sys.sorts, "linear")


def naive_integral_solve(sys: SystemSpec, N: int, max_iter: Optional[int] = None) -> List[TruncSeries]:
    """Iterate Y <- H(Z, Y) + Int(G(Z, Y)) from 0 until the prefix mod z^N is stable."""
    comb = _combined(sys)
    m = sys.m
    bound = max_iter if max_iter is not None else (m + 1) * (N + 1) + m
    ys = [TruncSeries.zero(N, RAT) for _ in range(m)]
    for _ in range(bound + 1):
        ev = SeriesEvaluator(EGF, dict(zip(sys.names, ys)), N, RAT)
        new = [ev(h) for h in comb.rhs]
        if new == ys:
            return ys
        ys = new
    raise NonConvergence(f"integral fixed-point iteration did not stabilize after {bound} steps")


def integral_residual(sys: SystemSpec, ys: List[TruncSeries]) -> List[TruncSeries]:
    """Y - H(Z, Y) - Int(G(Z, Y)) at the order of ``ys``."""
    n = ys[0].order
    ev = SeriesEvaluator(EGF, dict(zip(sys.names, ys)), n, RAT)
    return [y - ev(h) for y, h in zip(ys, _combined(sys).rhs)]


__all__ = [
    "check_integral_wf",
    "solve_integral",
    "naive_integral_solve",
    "variation_of_constants",
    "fundamental_solution",
    "refine_fundamental",
    "integral_residual",
    "w_system",
    "CONSTANT_PART_NOT_POLYNOMIAL",
    "NOT_POLYNOMIAL_IN_INITIAL_VALUES",
]
