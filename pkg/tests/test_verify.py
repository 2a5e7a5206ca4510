import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lwtransform.errors import BoundaryError, DomainError
from lwtransform.quadrature import ContourSpec, GridFunction
from lwtransform.specfun import gamma
from lwtransform.spectral import SecondSpectralPoint, SpectralPoint
from lwtransform.verify import (
    IdentityReport,
    mellin_forward,
    mellin_inverse,
    mellin_kernel,
    mellin_plancherel,
    mellin_roundtrip,
    residue_limit,
    residue_r11,
    stade_check,
    stade_lhs,
    stade_rhs,
    symmetric_test_function,
)

tv = st.floats(-3, 3)


def test_identity_report_fields():
    r = IdentityReport("X", 1.0, 1.0 + 1e-9, threshold=1e-6)
    assert abs(r.rel_err - r.abs_err / abs(r.rhs)) < 1e-25 and 0.9e-9 < r.rel_err < 1.1e-9 and r.passed
    z = IdentityReport("Y", 0.0, 0.0, threshold=1e-6)
    assert z.rel_err == 0.0 and z.passed
    a = IdentityReport("MellinKernel", 1e-10, 0.0, absolute=True)
    assert a.passed
    d = json.loads(a.to_json())
    assert d["identity"] == "MellinKernel" and "rel_err" in d


def test_stade_n2_closed_value():
    rep = stade_check(2, 0.0, 0.0, 1.0)
    assert abs(rep.rhs - math.pi / 2) < 1e-13
    assert abs(rep.lhs - math.pi / 2) < 1e-6
    assert rep.passed


@settings(max_examples=30, deadline=None)
@given(tv, tv, tv, tv, st.floats(1, 3))
def test_stade_rhs_symmetries(t1, t2, u1, u2, s):
    p, q = SpectralPoint(3, (t1, t2)), SecondSpectralPoint(3, (u1, u2))
    base = stade_rhs(3, p, q, s)
    assert abs(stade_rhs(3, SpectralPoint(3, (u1, u2)), SecondSpectralPoint(3, (t1, t2)), s) - base) \
        <= 1e-13 * abs(base)
    # Weyl images of t permute alpha
    a = p.alpha
    b = a[[1, 2, 0]]
    t_img = (((b[0] - b[1]) / 3j).real, ((b[1] - b[2]) / 3j).real)
    assert abs(stade_rhs(3, SpectralPoint(3, t_img), q, s) - base) <= 1e-12 * abs(base)


def test_stade_normalizations():
    p, q = SpectralPoint(3, (0.3, 0.1)), SecondSpectralPoint(3, (0.2, -0.4))
    assert abs(stade_rhs(3, p, q, 1.0, "literal") / stade_rhs(3, p, q, 1.0) - 2) < 1e-14
    p2, q2 = SpectralPoint(2, (0.3,)), SecondSpectralPoint(2, (0.7,))
    assert stade_rhs(2, p2, q2, 1.0, "literal") == stade_rhs(2, p2, q2, 1.0)


def test_stade_n2_complex_s_and_lhs_symmetry():
    rep = stade_check(2, 0.8, -1.1, 1 + 0.7j)
    assert rep.rel_err < 1e-6
    p, q = SpectralPoint(2, (0.8,)), SecondSpectralPoint(2, (-1.1,))
    a = stade_lhs(2, p, q, 1.5)
    b = stade_lhs(2, SpectralPoint(2, (-1.1,)), SecondSpectralPoint(2, (0.8,)), 1.5)
    assert abs(a - b) < 1e-14 * abs(a)


def test_stade_n3_complex_s():
    rep = stade_check(3, (0.4, -0.2), (0.1, 0.3), 1 + 0.5j)
    assert rep.rel_err < 1e-3


def test_stade_rejects_small_s():
    p = SpectralPoint(2, (0.0,))
    with pytest.raises(DomainError):
        stade_lhs(2, p, SecondSpectralPoint(2, (0.0,)), 0.9)


def test_residue_exact_at_zero_and_constant_h():
    rng = np.random.default_rng(3)
    for _ in range(5):
        t1, t2 = rng.uniform(-2, 2, 2)
        H = symmetric_test_function(rng.normal(size=4))
        assert abs(residue_r11(H, t1, t2, 0.0) - H(t1, t2) / 6) < 1e-14 * abs(H(t1, t2))
    one = lambda a, b: 1.0
    lim = residue_limit(one, 0.7, 0.3)
    assert abs(lim["extrapolated"] - 1 / 6) < 1e-4


def test_symmetric_test_function_is_weyl_invariant():
    H = symmetric_test_function([0.3, -1.2, 0.5, 0.8])
    t1, t2 = 0.7, -0.4
    a = SpectralPoint(3, (t1, t2)).alpha
    for perm in ((1, 0, 2), (2, 1, 0), (1, 2, 0)):
        b = a[list(perm)]
        s1, s2 = ((b[0] - b[1]) / 3j).real, ((b[1] - b[2]) / 3j).real
        assert abs(H(s1, s2) - H(t1, t2)) < 1e-13


def test_residue_limit_first_order_and_extrapolation():
    rng = np.random.default_rng(8)
    for _ in range(10):
        t1, t2 = rng.uniform(-2, 2, 2)
        H = symmetric_test_function(rng.normal(size=4))
        lim = residue_limit(H, t1, t2)
        assert all(1.7 < r < 2.3 for r in lim["ratios"][-4:])
        rel = abs(lim["extrapolated"] - lim["target"]) / abs(lim["target"])
        assert rel < 1e-3


def test_residue_rejects_degenerate():
    with pytest.raises(DomainError):
        residue_r11(lambda a, b: 1.0, 0.0, 0.5, 0.1)


def test_mellin_zero_function():
    z = GridFunction(2, [(0.5, 2.0)], (16,), np.zeros(16))
    assert mellin_forward(z, 0.3j) == 0
    assert mellin_inverse(lambda s: 0 * s, 1.3) == 0


def test_mellin_forward_of_exponential_is_gamma():
    f = GridFunction.from_callable(2, [(1e-9, 60.0)], (3000,), lambda y: np.exp(-y))
    for s in (1.0, 2 + 3j, 1.5 - 0.5j):
        assert abs(mellin_forward(f, s) - gamma(s)) < 1e-8 * abs(gamma(s))


@pytest.mark.parametrize("x", [2.0, 0.5, math.e, 1.001, 0.999, 1.05, 0.95, 10.0])
def test_mellin_kernel_both_sides(x):
    want = max(0.0, 1 - 1 / x)
    assert abs(mellin_kernel(x) - want) < 1e-8


def test_mellin_kernel_boundary():
    with pytest.raises(BoundaryError):
        mellin_kernel(1.0)


def test_mellin_roundtrip_and_plancherel():
    _, errs = mellin_roundtrip(points=20)
    assert len(errs) == 20 and errs.max() < 1e-8
    assert mellin_plancherel().rel_err < 1e-6


def test_mellin_inverse_of_gamma():
    # Mellin inverse of Gamma(s) on Re s = 2 is e^{-x}
    spec = ContourSpec((2.0,), 60.0, 8)
    for x in (0.5, 1.0, 2.5):
        assert abs(mellin_inverse(gamma, x, spec) - math.exp(-x)) < 1e-10
