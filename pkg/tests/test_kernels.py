import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from combspecies import _kernels
from combspecies.evaluate import totient

FAST = _kernels.numba_kernels()
REF = _kernels.numpy_kernels()

_vec = arrays(np.float64, st.integers(1, 60), elements=st.floats(0, 0.5))


def test_totients():
    assert list(_kernels.totients(12)) == [totient(n) for n in range(1, 13)]


def test_reference_kernels_by_hand():
    g = np.array([0.3, 0.09, 0.027])
    # k = 1: g1 + g2/2 + g3/3 ; k = 2: g2 ; k = 3: g3
    assert REF["polya_sums"](g, 1.0) == pytest.approx([0.3 + 0.045 + 0.009, 0.09, 0.027])
    assert REF["polya_sums"](g, -1.0) == pytest.approx([0.3 - 0.045 + 0.009, 0.09, 0.027])
    phi = _kernels.totients(3)
    logs = [-math.log1p(-x) for x in g]
    assert REF["cyc_sums"](g, phi) == pytest.approx([logs[0] + logs[1] / 2 + 2 * logs[2] / 3, logs[1], logs[2]])
    assert REF["horner_at_powers"](np.array([1.0, 2.0]), 0.5, 2) == pytest.approx([2.0, 1.5])


@settings(max_examples=40, deadline=None)
@given(_vec, _vec)
def test_convolve(a, b):
    assert FAST["convolve"](a, b) == pytest.approx(REF["convolve"](a, b), rel=1e-12, abs=1e-300)


@settings(max_examples=40, deadline=None)
@given(_vec, st.floats(0, 0.9), st.integers(1, 20))
def test_horner(c, alpha, kmax):
    assert FAST["horner_at_powers"](c, alpha, kmax) == pytest.approx(REF["horner_at_powers"](c, alpha, kmax), rel=1e-12, abs=1e-300)


@settings(max_examples=40, deadline=None)
@given(_vec, st.sampled_from([1.0, -1.0]))
def test_polya(g, sign):
    assert FAST["polya_sums"](g, sign) == pytest.approx(REF["polya_sums"](g, sign), rel=1e-12, abs=1e-300)


@settings(max_examples=40, deadline=None)
@given(_vec)
def test_cyc(g):
    phi = _kernels.totients(len(g))
    assert FAST["cyc_sums"](g, phi) == pytest.approx(REF["cyc_sums"](g, phi), rel=1e-12, abs=1e-300)


def test_env_flag(monkeypatch):
    monkeypatch.setenv(_kernels._FLAG, "1")
    _kernels.reset()
    try:
        assert _kernels.backend() == "numpy"
        monkeypatch.setenv(_kernels._FLAG, "")
        _kernels.reset()
        assert _kernels.backend() == "numba"
    finally:
        monkeypatch.delenv(_kernels._FLAG, raising=False)
        _kernels.reset()
