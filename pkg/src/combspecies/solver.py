"""Coefficients of the generating series of a well-founded system.

:func:`newton_solve` is the fast path: the optimized Newton iteration, which
updates the solution prefix and a prefix of (Id - dH/dY)^-1 together, each
step roughly doubling the precision.  :func:`joyal_solve` is the plain
fixed-point iteration Y <- H(Z, Y) from Y = 0 and serves as an oracle.
"""

from __future__ import annotations

from typing import Callable, List, Optional

from .analysis import WellFoundedReport, is_well_founded
from .errors import NonConvergence, NotWellFounded
from .evaluate import EGF, OGF, SeriesEvaluator, check_kind, default_ring
from .matrix import SeriesMatrix, constant_inverse, mat_vec, matrix_inv_newton
from .parser import SystemSpec
from .series import TruncSeries, precision_ladder
from .symbolic import jacobian


def _checked(sys: SystemSpec, report: Optional[WellFoundedReport]) -> WellFoundedReport:
    if report is None:
        report = is_well_founded(sys)
    if not report.verdict:
        raise NotWellFounded(report)
    return report


def _eval_all(exprs, kind, names, ys, order, ring):
    ev = SeriesEvaluator(kind, dict(zip(names, ys)), order, ring)
    return [ev(e) for e in exprs], ev


def _eval_matrix(jac, ev) -> SeriesMatrix:
    return SeriesMatrix([[ev(e) for e in row] for row in jac])


def joyal_solve(
    sys: SystemSpec,
    kind: str,
    N: int,
    *,
    ring: Optional[str] = None,
    check: bool = True,
    max_iter: Optional[int] = None,
) -> List[TruncSeries]:
    """Iterate Y <- H(Z, Y) from 0 until the prefix mod z^N stops changing."""
    kind = check_kind(kind)
    if check:
        _checked(sys, None)
    ring = ring or default_ring(kind)
    m = sys.m
    bound = max_iter if max_iter is not None else (m + 1) * (N + 1) + m
    ys = [TruncSeries.zero(N, ring) for _ in range(m)]
    for _ in range(bound + 1):
        new, _ = _eval_all(sys.rhs, kind, sys.names, ys, N, ring)
        if new == ys:
            return ys
        ys = new
    raise NonConvergence(f"fixed-point iteration did not stabilize after {bound} steps")


def newton_solve(
    sys: SystemSpec,
    kind: str,
    N: int,
    *,
    ring: Optional[str] = None,
    plain: bool = False,
    report: Optional[WellFoundedReport] = None,
    trace: Optional[Callable[[int, List[TruncSeries]], None]] = None,
) -> List[TruncSeries]:
    """First N coefficients of each coordinate of the solution.

    ``plain=True`` switches to the unoptimized Newton step with a full matrix
    inversion at every level (kept as a second oracle).  ``trace(order, Y)``
    is called after every precision level.
    """
    kind = check_kind(kind)
    report = _checked(sys, report)
    ring = ring or default_ring(kind)
    names, m = sys.names, sys.m
    if N <= 0:
        return [TruncSeries.zero(0, ring) for _ in range(m)]
    jac = jacobian(sys)
    ident = lambda n: SeriesMatrix.identity(m, n, ring)  # noqa: E731

    ys = [TruncSeries.constant(c, 1, ring) for c in report.constant_term]
    _, ev = _eval_all((), kind, names, ys, 1, ring)
    j0 = _eval_matrix(jac, ev).constant_term()
    base = [[(1 if i == k else 0) - j0[i][k] for k in range(m)] for i in range(m)]
    u = SeriesMatrix.constant(constant_inverse(base, ring), 1, ring)
    if trace:
        trace(1, ys)

    prev = 1
    for p in precision_ladder(N)[1:]:
        h = prev
        if not plain and u.order < h:
            # U <- U + U (J(Y) U + Id - U)  mod z^h
            _, ev = _eval_all((), kind, names, ys, h, ring)
            jh = _eval_matrix(jac, ev)
            up = u.pad(h)
            u = up + up @ (jh @ up + ident(h) - up)
        yp = [y.pad(p) for y in ys]
        hs, ev = _eval_all(sys.rhs, kind, names, yp, p, ring)
        res = [hv - yv for hv, yv in zip(hs, yp)]
        if plain:
            u_full = matrix_inv_newton(ident(p) - _eval_matrix(jac, ev))
            delta = mat_vec(u_full, res)
            ys = [y + d for y, d in zip(yp, delta)]
        else:
            # the residual is z^h * r; only U mod z^(p-h) is needed
            for r in res:
                if any(r.coeffs[:h]):
                    raise NonConvergence("Newton residual lost its valuation; is the system well founded?")
            tail = [TruncSeries._raw(r.coeffs[h:], ring) for r in res]
            delta = mat_vec(u.truncate(p - h), tail)
            ys = [y + d.shift(h) for y, d in zip(yp, delta)]
        prev = p
        if trace:
            trace(p, ys)
    return ys


def labeled_counts(series: TruncSeries) -> List:
    """n! [z^n] of an exponential generating series."""
    out, fact = [], 1
    for n, c in enumerate(series.coeffs):
        if n:
            fact *= n
        out.append(c * fact)
    return [int(c) if getattr(c, "denominator", 1) == 1 else c for c in out]


__all__ = ["joyal_solve", "newton_solve", "labeled_counts", "EGF", "OGF"]
