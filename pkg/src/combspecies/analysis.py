"""Structural analysis of systems: zero coordinates, well-foundedness,
polynomiality and partial polynomiality, companion systems.

All tests are boolean: an expression is evaluated to "zero species" or
"nonzero species" given which unknowns and which atom sorts are nonzero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, Mapping, Optional, Tuple, Union

import numpy as np

from .errors import CompositionUndefined, DomainError, InfiniteConstantTerm
from .expr import MARKER, Atom, Ctor, Expr, Integral, OneT, Prod, Ref, Sum, Zero, ZeroT, make_sum, scaled
from .parser import SystemSpec
from .symbolic import COUNT_CAP, constant_count, jacobian, split_constant, substitute

ZERO_COORDINATE = "ZeroCoordinate"
JACOBIAN_NOT_NILPOTENT = "JacobianNotNilpotentAt0"
COMPANION_NOT_WF = "CompanionNotWFAt0"
NOT_PARTIALLY_POLYNOMIAL = "NotPartiallyPolynomialInMarker"
INFINITE_CONSTANT = "InfiniteConstantTerm"
UNSUPPORTED_CONSTANT = "UnsupportedConstantComposition"


class ConstantTermNonzero(DomainError):
    """is_well_founded_at_zero was called on a system with H(0,0) != 0."""


@dataclass(frozen=True)
class WellFoundedReport:
    verdict: bool
    reason: Optional[str] = None
    constant_term: Tuple[int, ...] = ()
    jacobian_nilpotence_order: Optional[int] = None
    detail: str = ""
    zero_coordinates: Tuple[str, ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "reason": self.reason,
            "constant_term": list(self.constant_term) if self.verdict else None,
            "jacobian_nilpotence_order": self.jacobian_nilpotence_order,
        }


# -- nonzero evaluation ----------------------------------------------------

AtomSpec = Union[bool, Mapping[str, bool], Callable[[str], bool]]


def _atom_fn(atoms_zero: AtomSpec) -> Callable[[str], bool]:
    """Normalize to a predicate "atom sort s is nonzero"."""
    if isinstance(atoms_zero, bool):
        return lambda s: not atoms_zero
    if callable(atoms_zero):
        return atoms_zero
    return lambda s: bool(atoms_zero.get(s, False))


def _nz(e: Expr, prof: Mapping[str, bool], atom_nz: Callable[[str], bool]) -> bool:
    if isinstance(e, ZeroT):
        return False
    if isinstance(e, OneT):
        return True
    if isinstance(e, Atom):
        return atom_nz(e.sort)
    if isinstance(e, Ref):
        return bool(prof.get(e.name, False))
    if isinstance(e, Sum):
        return any(_nz(t, prof, atom_nz) for t in e.terms)
    if isinstance(e, Prod):
        return all(_nz(f, prof, atom_nz) for f in e.factors)
    if isinstance(e, Ctor):
        if 0 in e.card:
            return True
        return _nz(e.child, prof, atom_nz)
    if isinstance(e, Integral):
        return _nz(e.child, prof, atom_nz)
    raise TypeError(f"not an expression: {e!r}")


def nonzero_eval(expr: Expr, profile: Mapping[str, bool], atoms_zero: AtomSpec = True) -> bool:
    """Is ``expr`` a nonzero species when Y_i is nonzero exactly where ``profile`` says?

    ``atoms_zero`` is either a bool (all atoms zero / all nonzero) or a map
    from sort name to "this sort is nonzero".
    """
    if isinstance(atoms_zero, bool):
        return _nz(expr, profile, lambda s: not atoms_zero)
    return _nz(expr, profile, _atom_fn(atoms_zero))


def profile_iterate(sys: SystemSpec, atom_nz: Callable[[str], bool], steps: Optional[int] = None) -> Dict[str, bool]:
    """m-fold iteration of the nonzero profile from all-false."""
    prof = {n: False for n in sys.names}
    for _ in range(sys.m if steps is None else steps):
        prof = {n: _nz(h, prof, atom_nz) for n, h in zip(sys.names, sys.rhs)}
    return prof


def zero_coordinates(sys: SystemSpec) -> FrozenSet[int]:
    """Indices of the coordinates of the solution that are the zero species."""
    prof = profile_iterate(sys, lambda s: True)
    return frozenset(i for i, n in enumerate(sys.names) if not prof[n])


# -- boolean matrices ------------------------------------------------------


def bool_jacobian(sys: SystemSpec, profile: Mapping[str, bool], atom_nz: Callable[[str], bool], jac=None) -> np.ndarray:
    jac = jacobian(sys) if jac is None else jac
    return np.array([[_nz(e, profile, atom_nz) for e in row] for row in jac], dtype=bool).reshape(sys.m, sys.m)


def _bmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a.astype(np.int64) @ b.astype(np.int64)) > 0


def is_nilpotent(b: np.ndarray) -> bool:
    """B^m = 0, tested by repeated squaring up to an exponent >= m."""
    m = b.shape[0]
    p, e = b, 1
    while e < m:
        p, e = _bmul(p, p), 2 * e
    return not p.any()


def nilpotence_order(b: np.ndarray) -> Optional[int]:
    """Smallest p with B^p = 0, or None."""
    m = b.shape[0]
    if m == 0:
        return 0
    p = b
    for k in range(1, m + 1):
        if not p.any():
            return k
        p = _bmul(p, b)
    return None


# -- well-foundedness at 0 -------------------------------------------------


def constant_is_zero(sys: SystemSpec) -> bool:
    """H(0, 0) = 0."""
    prof = {n: False for n in sys.names}
    return not any(_nz(h, prof, lambda s: False) for h in sys.rhs)


def is_well_founded_at_zero(sys: SystemSpec) -> WellFoundedReport:
    if not constant_is_zero(sys):
        raise ConstantTermNonzero("H(0,0) is nonzero; use is_well_founded")
    b = bool_jacobian(sys, {n: False for n in sys.names}, lambda s: False)
    if not is_nilpotent(b):
        return WellFoundedReport(False, JACOBIAN_NOT_NILPOTENT, detail="the Jacobian matrix at 0 is not nilpotent")
    order = nilpotence_order(b)
    zc = zero_coordinates(sys)
    if zc:
        names = tuple(sys.names[i] for i in sorted(zc))
        return WellFoundedReport(
            False,
            ZERO_COORDINATE,
            jacobian_nilpotence_order=order,
            detail="zero coordinate(s): " + ", ".join(names),
            zero_coordinates=names,
        )
    return WellFoundedReport(True, None, tuple(0 for _ in sys.names), order)


# -- polynomiality ---------------------------------------------------------


def _poly(e: Expr, nz: Callable[[Expr], bool]) -> bool:
    # Unbounded constructors are only allowed on children that vanish under
    # the valuation ``nz``; everything else is polynomial by construction.
    if isinstance(e, (Sum, Prod)):
        return all(_poly(c, nz) for c in (e.terms if isinstance(e, Sum) else e.factors))
    if isinstance(e, Ctor):
        if not e.card.is_finite and nz(e.child):
            return False
        return _poly(e.child, nz)
    if isinstance(e, Integral):
        return _poly(e.child, nz)
    return True


def structurally_polynomial(e: Expr, profile: Mapping[str, bool], atom_nz: Callable[[str], bool]) -> bool:
    """Polynomial in the variables that ``profile``/``atom_nz`` mark nonzero."""
    return _poly(e, lambda x: _nz(x, profile, atom_nz))


def prune_zero_coordinates(sys: SystemSpec, zc: Iterable[int]) -> SystemSpec:
    zc = set(zc)
    if not zc:
        return sys
    bind = {sys.names[i]: Zero for i in zc}
    eqs = [
        type(eq)(eq.name, substitute(eq.rhs, bind), eq.integrand)
        for i, eq in enumerate(sys.equations)
        if i not in zc
    ]
    return SystemSpec(tuple(eqs), sys.sorts, sys.mode)


def is_polynomial(sys: SystemSpec) -> bool:
    """Is every coordinate of the solution a polynomial species?"""
    pruned = prune_zero_coordinates(sys, zero_coordinates(sys))
    if pruned.m == 0:
        return True
    prof = {n: True for n in pruned.names}
    every = lambda s: True  # noqa: E731
    if not all(structurally_polynomial(h, prof, every) for h in pruned.rhs):
        return False
    return is_nilpotent(bool_jacobian(pruned, prof, every))


def specialize(sys: SystemSpec, keep: Iterable[str]) -> SystemSpec:
    """Set every atom sort not in ``keep`` to zero."""
    keep = set(keep)
    zero_atoms = {s: Zero for s in sys.sorts if s not in keep}
    return sys.with_rhs([substitute(h, {}, zero_atoms) for h in sys.rhs])


def is_partially_polynomial(sys: SystemSpec, markers: Union[str, Iterable[str]] = MARKER) -> bool:
    """Is the solution polynomial in the marker sort(s)?

    Three conditions: the system with non-marker atoms set to 0 has a
    polynomial solution S0; the Jacobian at (markers, 0, S0) is nilpotent;
    H is polynomial in the markers and in every Y_i with S0_i nonzero.
    """
    markers = {markers} if isinstance(markers, str) else set(markers)
    spec = specialize(sys, markers)
    if not is_polynomial(spec):
        return False
    is_marker = lambda s: s in markers  # noqa: E731
    s0 = profile_iterate(spec, is_marker)
    if not is_nilpotent(bool_jacobian(sys, s0, is_marker)):
        return False
    none = {n: False for n in sys.names}
    if not all(structurally_polynomial(h, none, is_marker) for h in sys.rhs):
        return False
    for name in sys.names:
        if s0[name]:
            only = {n: n == name for n in sys.names}
            if not all(structurally_polynomial(h, only, lambda s: False) for h in sys.rhs):
                return False
    return True


# -- companion system and general well-foundedness -------------------------


def companion_system(sys: SystemSpec) -> Tuple[SystemSpec, Tuple[int, ...]]:
    """K = (H with its size-0 structures removed) + c * Z1, and the counts c.

    Raises InfiniteConstantTerm or CompositionUndefined when the size-0
    structures cannot be separated.
    """
    counts, rhs = [], []
    for h in sys.rhs:
        c, rest = split_constant(h)
        counts.append(c)
        rhs.append(make_sum([rest, scaled(c, Atom(MARKER))]))
    sorts = tuple(sys.sorts) + ((MARKER,) if MARKER not in sys.sorts else ())
    return sys.with_rhs(rhs, sorts), tuple(counts)


def constant_term(sys: SystemSpec, cap: int = COUNT_CAP) -> Tuple[int, ...]:
    """H^m(0, 0) as integer counts of size-0 structures."""
    values = {n: 0 for n in sys.names}
    for _ in range(sys.m):
        values = {n: constant_count(h, values, cap) for n, h in zip(sys.names, sys.rhs)}
    return tuple(values[n] for n in sys.names)


def is_well_founded(sys: SystemSpec, cap: int = COUNT_CAP) -> WellFoundedReport:
    if constant_is_zero(sys):
        return is_well_founded_at_zero(sys)
    try:
        comp, _ = companion_system(sys)
    except InfiniteConstantTerm as exc:
        return WellFoundedReport(False, INFINITE_CONSTANT, detail=str(exc))
    except CompositionUndefined as exc:
        return WellFoundedReport(False, UNSUPPORTED_CONSTANT, detail=str(exc))
    rep = is_well_founded_at_zero(comp)
    if not rep.verdict:
        return WellFoundedReport(
            False, COMPANION_NOT_WF, jacobian_nilpotence_order=rep.jacobian_nilpotence_order,
            detail=f"companion system: {rep.reason}",
        )
    if not is_partially_polynomial(comp, MARKER):
        return WellFoundedReport(
            False, NOT_PARTIALLY_POLYNOMIAL, jacobian_nilpotence_order=rep.jacobian_nilpotence_order,
            detail="the companion solution is not polynomial in the size-0 marker",
        )
    try:
        const = constant_term(sys, cap)
    except InfiniteConstantTerm as exc:
        return WellFoundedReport(False, INFINITE_CONSTANT, detail=str(exc))
    return WellFoundedReport(True, None, const, rep.jacobian_nilpotence_order)
