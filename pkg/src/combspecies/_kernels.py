"""Float64 kernels used by the numeric oracle and the FLOAT series ring.

Every kernel has a numba-compiled version and a plain numpy version with
the same signature.  The numba path is used unless the environment variable
``COMBSPECIES_DISABLE_NUMBA`` is set to a non-empty value other than ``0``,
or numba cannot be imported.  numba is imported lazily, on the first kernel
call, so that exact-arithmetic code paths never pay its import cost.
"""

from __future__ import annotations

import math
import os

import numpy as np

_FLAG = "COMBSPECIES_DISABLE_NUMBA"


# -- numpy reference versions ---------------------------------------------


def np_convolve(a, b):
    return np.convolve(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64))


def np_horner_at_powers(coeffs, alpha, kmax):
    """v[k-1] = sum_i coeffs[i] * alpha^(k i) for k = 1..kmax."""
    c = np.asarray(coeffs, dtype=np.float64)
    xs = alpha ** np.arange(1, kmax + 1, dtype=np.float64)
    acc = np.zeros(kmax)
    for ci in c[::-1]:
        acc = acc * xs + ci
    return acc


def np_polya_sums(g, sign):
    """s[k-1] = sum_{j >= 1, kj <= L} sign^(j+1) g[kj-1] / j for k = 1..L."""
    g = np.asarray(g, dtype=np.float64)
    L = g.shape[0]
    out = np.zeros(L)
    for k in range(1, L + 1):
        j = np.arange(1, L // k + 1)
        w = np.where(j % 2 == 1, 1.0, float(sign)) / j
        out[k - 1] = np.dot(w, g[k * j - 1])
    return out


def np_cyc_sums(g, phi):
    """s[k-1] = sum_{j >= 1, kj <= L} phi(j)/j * log(1/(1 - g[kj-1]))."""
    g = np.asarray(g, dtype=np.float64)
    L = g.shape[0]
    logs = -np.log1p(-g)
    out = np.zeros(L)
    for k in range(1, L + 1):
        j = np.arange(1, L // k + 1)
        out[k - 1] = np.dot(phi[j - 1] / j, logs[k * j - 1])
    return out


# -- numba versions --------------------------------------------------------


def _build_numba():
    from numba import njit

    @njit(cache=True)
    def convolve(a, b):
        n, m = a.shape[0], b.shape[0]
        out = np.zeros(n + m - 1)
        for i in range(n):
            x = a[i]
            if x != 0.0:
                for j in range(m):
                    out[i + j] += x * b[j]
        return out

    @njit(cache=True)
    def horner_at_powers(coeffs, alpha, kmax):
        out = np.zeros(kmax)
        x = 1.0
        for k in range(kmax):
            x *= alpha
            acc = 0.0
            for i in range(coeffs.shape[0] - 1, -1, -1):
                acc = acc * x + coeffs[i]
            out[k] = acc
        return out

    @njit(cache=True)
    def polya_sums(g, sign):
        L = g.shape[0]
        out = np.zeros(L)
        for k in range(1, L + 1):
            acc = 0.0
            s = 1.0
            j = 1
            while k * j <= L:
                acc += s * g[k * j - 1] / j
                s *= sign
                j += 1
            out[k - 1] = acc
        return out

    @njit(cache=True)
    def cyc_sums(g, phi):
        L = g.shape[0]
        logs = np.empty(L)
        for i in range(L):
            logs[i] = -math.log1p(-g[i])
        out = np.zeros(L)
        for k in range(1, L + 1):
            acc = 0.0
            j = 1
            while k * j <= L:
                acc += phi[j - 1] / j * logs[k * j - 1]
                j += 1
            out[k - 1] = acc
        return out

    return {
        "convolve": convolve,
        "horner_at_powers": horner_at_powers,
        "polya_sums": polya_sums,
        "cyc_sums": cyc_sums,
    }


_NUMPY = {
    "convolve": np_convolve,
    "horner_at_powers": np_horner_at_powers,
    "polya_sums": np_polya_sums,
    "cyc_sums": np_cyc_sums,
}
_impl = None
BACKEND = None


def numba_disabled() -> bool:
    return os.environ.get(_FLAG, "") not in ("", "0")


def _select():
    global _impl, BACKEND
    if _impl is None:
        if numba_disabled():
            _impl, BACKEND = _NUMPY, "numpy"
        else:
            try:
                _impl, BACKEND = _build_numba(), "numba"
            except ImportError:  # pragma: no cover - numba missing
                _impl, BACKEND = _NUMPY, "numpy"
    return _impl


def backend() -> str:
    _select()
    return BACKEND


def reset():
    """Forget the selected implementation (the env flag is re-read next call)."""
    global _impl, BACKEND
    _impl, BACKEND = None, None


def numba_kernels():
    return _build_numba()


def numpy_kernels():
    return dict(_NUMPY)


def convolve(a, b):
    return _select()["convolve"](np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64))


def horner_at_powers(coeffs, alpha: float, kmax: int):
    return _select()["horner_at_powers"](np.asarray(coeffs, dtype=np.float64), float(alpha), int(kmax))


def polya_sums(g, sign: float = 1.0):
    return _select()["polya_sums"](np.asarray(g, dtype=np.float64), float(sign))


def cyc_sums(g, phi):
    return _select()["cyc_sums"](np.asarray(g, dtype=np.float64), np.asarray(phi, dtype=np.float64))


def totients(n: int) -> np.ndarray:
    """Euler's phi(1..n) by a sieve."""
    phi = np.arange(n + 1, dtype=np.int64)
    for p in range(2, n + 1):
        if phi[p] == p:
            phi[p::p] -= phi[p::p] // p
    return phi[1:].astype(np.float64)
