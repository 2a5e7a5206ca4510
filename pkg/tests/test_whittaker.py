import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lwtransform.errors import DomainError, UnsupportedRank
from lwtransform.spectral import SpectralPoint
from lwtransform.whittaker import (
    Method,
    WhittakerEvaluator,
    default_gl3_contour,
    i_nu,
    jacquet_oracle,
    whittaker_gl2,
    whittaker_gl3,
)


def test_i_nu_examples():
    p = SpectralPoint(3, (0.3, -0.8))
    assert abs(i_nu(p, [1.0, 1.0]) - 1) < 1e-15
    y1, y2 = 1.7, 0.6
    nu1, nu2 = p.nu
    assert abs(i_nu(p, [y1, y2]) - y1 ** (nu1 + 2 * nu2) * y2 ** (2 * nu1 + nu2)) < 1e-14
    assert abs(i_nu(SpectralPoint(2, (0.0,)), [4.0]) - 2.0) < 1e-15


def test_gl2_examples():
    ref = 2 * float(mpmath.besselk(0, 2 * mpmath.pi))
    assert abs(whittaker_gl2(0.0, 1.0) - ref) < 1e-14
    assert abs(jacquet_oracle(2, 0.0, 1.0) - ref) < 1e-8
    assert whittaker_gl2(-1.3, 0.8) == whittaker_gl2(1.3, 0.8)
    for y in (3.0, 5.0, 8.0):
        assert abs(whittaker_gl2(2.0, y)) < 3 * math.sqrt(y) * math.exp(-2 * math.pi * y)


@settings(max_examples=30, deadline=None)
@given(st.floats(-4, 4), st.floats(0.3, 3))
def test_gl2_oracle_property(t, y):
    w = whittaker_gl2(t, y)
    assert abs(jacquet_oracle(2, t, y) - w) < 1e-9 * max(abs(w), 1e-3)


def test_gl3_matches_oracle_at_origin():
    assert abs(whittaker_gl3(0, 0, 1, 1) - jacquet_oracle(3, (0, 0), (1, 1))) < 1e-5


def test_gl3_swap_is_conjugation():
    # swapping (t1, t2) negates alpha, i.e. conjugates W; W is nearly real
    a = whittaker_gl3(0.7, -0.4, 0.9, 1.4)
    b = whittaker_gl3(-0.4, 0.7, 0.9, 1.4)
    assert abs(a - b.conjugate()) < 1e-15
    assert abs(a - b) < 1e-8
    # W is exactly real only on the diagonal y1 = y2
    assert abs(whittaker_gl3(0.7, -0.4, 1.2, 1.2).imag) < 1e-15


def test_gl3_decay():
    for t in ((0.0, 0.0), (1.0, 0.5)):
        w2 = abs(whittaker_gl3(*t, 2.0, 1.0))
        w4 = abs(whittaker_gl3(*t, 4.0, 1.0))
        assert w4 * 10 < w2
        assert abs(whittaker_gl3(*t, 1.0, 4.0)) * 10 < abs(whittaker_gl3(*t, 1.0, 2.0))


def test_gl3_grid_matches_points():
    ev = WhittakerEvaluator.for_t(3, (0.4, 0.9))
    axes = [np.array([0.6, 1.0, 1.5]), np.array([0.7, 1.3])]
    G = ev.grid(axes)
    pts = np.array([[a, b] for a in axes[0] for b in axes[1]])
    vals, err = ev.evaluate_points(pts)
    assert np.max(np.abs(G.ravel() - vals)) < 1e-15 and err < 1e-8


def test_evaluator_methods_and_validation():
    assert WhittakerEvaluator.for_t(2, 0.5).method is Method.ClosedFormGL2
    assert WhittakerEvaluator.for_t(3, (0, 0)).method is Method.MellinBarnesGL3
    with pytest.raises(DomainError):
        WhittakerEvaluator.for_t(2, 0.5, method=Method.MellinBarnesGL3)
    with pytest.raises(DomainError):
        WhittakerEvaluator.for_t(3, (0, 0), accuracy=0.0)
    ev = WhittakerEvaluator.for_t(2, 1.0, method=Method.JacquetOracle)
    assert abs(ev([0.8]) - whittaker_gl2(1.0, 0.8)) < 1e-9


def test_with_t_grows_contour():
    ev = WhittakerEvaluator.for_t(3, (0.0, 0.0))
    big = ev.with_t((10.0, 5.0))
    assert big.contour.height >= default_gl3_contour(big.point.alpha).height
    assert big.contour.height > ev.contour.height


def test_table_rows_are_deterministic():
    ev = WhittakerEvaluator.for_t(3, (0.2, 0.1))
    pts = np.array([[0.8, 1.1], [1.2, 0.9], [1.0, 1.0]])
    r1 = ev.table(pts, threads=1)
    r3 = ev.table(pts, threads=3)
    assert [r[:5] for r in r1] == [r[:5] for r in r3]


def test_oracle_rejects_bad_input():
    with pytest.raises(DomainError):
        jacquet_oracle(3, (0, 0), (1.0,))
    with pytest.raises(UnsupportedRank):
        jacquet_oracle(4, (0, 0, 0), (1, 1, 1))
