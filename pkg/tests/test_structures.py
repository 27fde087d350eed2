import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dressedzrp.core import build_xn, build_yxn, tetrahedron_edge
from dressedzrp.multicenter import cross_sections, phases
from dressedzrp.structures import (QuadraticError, XnResult, solve_quadratic, xn_cross_section,
                                   xn_phases, yxn_phases, yxn_quadratic)


def test_x2_example():
    r = xn_phases(2, 1.0, 1.0, math.pi / 2)
    assert r.tan_eta_1 == pytest.approx(-2.570796, abs=1e-6)
    assert r.tan_eta_deg == pytest.approx(-0.570796, abs=1e-6)


def test_small_kR_series():
    n, R, alpha, k = 4, 4.51, 0.33, 1e-6
    r = xn_phases(n, R, alpha, k)
    assert r.tan_eta_1 == pytest.approx(-n * k * R / (alpha * R + n - 1), rel=1e-9)


def test_cross_section_examples():
    assert xn_cross_section(XnResult(4, 1.0, 1.0, 1.0, 0.0, 0.0)).total == 0.0
    cs = xn_cross_section(XnResult(4, 1.0, 1.0, 1.0, 1.0, 0.0))
    assert cs.total == pytest.approx(2 * math.pi)
    assert cs.multiplicities == (1, 3)


@pytest.mark.parametrize("k", [0.1, 0.9])
def test_cross_section_matches_multicenter(k):
    r = xn_phases(4, 4.51, 0.33, k)
    cs = cross_sections(phases(build_xn(4, 4.51, 0.33), k))
    assert xn_cross_section(r).total == pytest.approx(cs.averaged, rel=1e-10)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([2, 3, 4]), st.floats(1.0, 8.0), st.floats(-2.0, 2.0), st.floats(0.02, 2.0))
def test_xn_against_solver(n, R, alpha, k):
    cf = xn_phases(n, R, alpha, k).tan_etas
    num = phases(build_xn(n, R, alpha), k).tan_etas
    gap = np.abs(np.arctan(cf) - np.arctan(num)) % math.pi
    assert np.all(np.minimum(gap, math.pi - gap) < 1e-10)


@settings(max_examples=50, deadline=None)
@given(st.floats(1.0, 5.0), st.floats(-2.0, 2.0), st.floats(-2.0, 2.0), st.floats(0.02, 2.0))
def test_yx4_against_solver(D, alpha, beta, k):
    R = tetrahedron_edge(D)
    cf = yxn_phases(4, R, D, alpha, beta, k)
    for x in cf.tan_eta_12:
        if math.isfinite(x):
            assert cf.quadratic_residual(x) < 1e-10
    num = phases(build_yxn(4, D, alpha, beta), k).tan_etas
    gap = np.abs(np.arctan(cf.tan_etas) - np.arctan(num)) % math.pi
    assert np.all(np.minimum(gap, math.pi - gap) < 1e-10)


@pytest.mark.parametrize("n,R,D", [(2, 3.0, 2.5), (3, 3.0, 2.5)])
def test_small_yxn_against_solver(n, R, D):
    for k in (0.1, 0.6, 1.4):
        cf = yxn_phases(n, R, D, 0.33, 0.41, k).tan_etas
        num = phases(build_yxn(n, D, 0.33, 0.41, R=R), k).tan_etas
        assert np.allclose(np.arctan(cf), np.arctan(num), atol=1e-10)


def _nearest(roots, target):
    return min(roots, key=lambda x: abs(x - target))


def test_large_D_limit_with_rate():
    n, R, alpha, beta, k = 4, 4.51, 0.33, 0.41, 0.3
    x1_inf = xn_phases(n, R, alpha, k).tan_eta_1
    x2_inf = -k / beta
    devs = []
    for D in (1e2, 1e3, 1e4):
        roots = yxn_phases(n, R, D, alpha, beta, k).tan_eta_12
        devs.append((abs(_nearest(roots, x1_inf) - x1_inf), abs(_nearest(roots, x2_inf) - x2_inf)))
    assert devs[1][0] < 1e-2 and devs[1][1] < 1e-2
    for (a1, a2), (b1, b2) in zip(devs, devs[1:]):
        assert b1 <= a1 / 10 and b2 <= a2 / 10


def test_large_beta_limit():
    n, R, D, alpha, k = 4, 4.51, 2.76, 0.33, 0.7
    x1 = xn_phases(n, R, alpha, k).tan_eta_1
    prev = None
    for beta in (1e2, 1e3, 1e4):
        roots = yxn_phases(n, R, D, alpha, beta, k).tan_eta_12
        dev = abs(_nearest(roots, x1) - x1)
        if prev is not None:
            assert dev <= prev / 5
        prev = dev
    assert prev < 1e-3
    inf = yxn_phases(n, R, D, alpha, math.inf, k).tan_eta_12
    assert x1 in inf and 0.0 in inf


def test_complex_roots_reported():
    with pytest.raises(QuadraticError, match="discriminant"):
        solve_quadratic(1.0, 0.0, 1.0)
    # the tabulated silane distances are not realizable and give complex roots near 1.1 eV
    k = math.sqrt(2 * 1.08 / 27.2114)
    with pytest.raises(QuadraticError):
        yxn_phases(4, 4.51, 2.76, 0.33, 0.41, k)


def test_quadratic_cancellation_free():
    # roots 1e-9 and 1e9 without loss
    r = solve_quadratic(1.0, -(1e9 + 1e-9), 1.0)
    assert r[0] == pytest.approx(1e-9, rel=1e-14) and r[1] == pytest.approx(1e9, rel=1e-14)
    assert solve_quadratic(0.0, 2.0, -4.0) == (2.0, math.inf)


def test_quadratic_coefficients_consistent():
    n, R, D, a, b, k = 4, tetrahedron_edge(2.76), 2.76, 0.33, 0.41, 0.5
    A2, A1, A0 = yxn_quadratic(n, R, D, a, b, k)
    for x in yxn_phases(n, R, D, a, b, k).tan_eta_12:
        P = k * R + (n - 1) * math.sin(k * R)
        Q = a * R + (n - 1) * math.cos(k * R)
        lhs = (k + b * x) * (P + x * Q)
        rhs = n * R * (math.sin(k * D) + x * math.cos(k * D)) ** 2 / D ** 2
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)
