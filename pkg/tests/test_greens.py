import math

import numpy as np
import pytest

from dressedzrp.core import DressingError, DressingStep, Geometry, GeometryError, build_xn, build_yxn
from dressedzrp.darboux import dressed_free_wave, dressed_potential_u0
from dressedzrp.greens import (coincidence_corrections, dressed_green, dressed_kernels,
                               dressed_outgoing_wave, free_green, free_kernels, kernels_for,
                               kernels_from_distances, swave_correction)
from dressedzrp.oracle import richardson_limit, schrodinger_residual


def x4_in_background(b):
    g = build_xn(4, 4.51, 0.33)
    return Geometry(g.sites, DressingStep(b), (0.0, 0.0, 0.0), g.labels)


def test_free_green_examples():
    assert free_green(1.0, (0, 0, 0), (math.pi, 0, 0)) == pytest.approx(-1 / math.pi, abs=1e-15)
    g = free_green(1.0, (0, 0, 0), (0, 2, 0))
    assert g.imag == pytest.approx(math.sin(2) / 2) and g.real == pytest.approx(math.cos(2) / 2)
    assert free_green(1e-9, (0, 0, 0), (0, 0, 3)) == pytest.approx(1 / 3)
    with pytest.raises(GeometryError):
        free_green(1.0, (1, 1, 1), (1, 1, 1))


def test_free_kernels_x2():
    ks = free_kernels(build_xn(2, 1.0, 0.33), math.pi)
    assert abs(ks.s[0, 1]) < 1e-15
    assert ks.c[0, 1] == pytest.approx(-1.0)
    assert np.all(ks.delta_alpha == 0) and np.all(ks.delta_k == 0)


def test_kernels_small_k():
    k = 1e-6
    ks = free_kernels(build_xn(3, 2.0, 1.0), k)
    off = ~np.eye(3, dtype=bool)
    assert np.allclose(ks.s[off], k, rtol=1e-10)
    assert np.allclose(ks.c[off], 0.5, rtol=1e-10)


def test_kernels_reject_zero_distance():
    with pytest.raises(GeometryError):
        kernels_from_distances(np.array([[0.0, 0.0], [0.0, 0.0]]), 1.0)


@pytest.mark.parametrize("k", [0.05, 0.5, 2.0])
def test_dressed_kernels_symmetric(k):
    ks = dressed_kernels(x4_in_background(0.6), k)
    assert np.array_equal(ks.s, ks.s.T) and np.array_equal(ks.c, ks.c.T)
    assert np.all(np.isfinite(ks.delta_alpha)) and np.all(np.isfinite(ks.delta_k))


def test_swave_correction_symmetric():
    for ra, rb in [(0.5, 2.0), (3.0, 1.1)]:
        assert swave_correction(0.7, 0.4, ra, rb) == swave_correction(0.7, 0.4, rb, ra)


def test_dressed_green_errors():
    with pytest.raises(DressingError):
        dressed_green(1.0, 1.0, (1, 0, 0), (0, 2, 0), e=0.5)
    with pytest.raises(GeometryError):
        dressed_green(1.0, 1.0, (0, 0, 0), (0, 2, 0))
    with pytest.raises(GeometryError):
        coincidence_corrections(1.0, 1.0, 0.0)
    with pytest.raises(GeometryError):
        dressed_kernels(build_yxn(4, 2.76, 0.33, 0.41), 0.5, b=1.0)


def test_dressed_green_large_b_rate():
    # the correction vanishes like 1/b: b * dg -> -exp(ik(r + r'))/(r r')
    k, r, rp = 1.0, np.array([1.0, 0, 0]), np.array([0, 2.0, 0])
    lim = -np.exp(3j * k) / 2.0
    prev = None
    for b in (1e2, 1e3, 1e4, 1e5):
        dg = dressed_green(k, b, r, rp) - free_green(k, r, rp)
        err = abs(b * dg - lim)
        assert err < 1.0 / b
        if prev is not None:
            assert err < prev
        prev = err
    g, g0 = dressed_green(k, 1e7, r, rp), free_green(k, r, rp)
    assert abs(g - g0) / abs(g0) < 1e-6


def test_coincidence_large_b_rate():
    k, rho = 1.0, 2.0
    for b in (1e2, 1e3, 1e4):
        da, dk = coincidence_corrections(k, b, rho)
        assert abs(complex(da, dk) + np.exp(2j * k * rho) / (b * rho * rho)) < 1.0 / b ** 2 * 10


def test_dressed_kernels_converge_monotonically():
    k = 0.5
    free = free_kernels(x4_in_background(1.0), k)
    errs = []
    for b in (1.0, 3.0, 10.0, 30.0, 100.0, 1e4, 1e8):
        ks = dressed_kernels(x4_in_background(b), k)
        errs.append(max(np.abs(ks.s - free.s).max(), np.abs(ks.c - free.c).max(),
                        np.abs(ks.delta_alpha).max(), np.abs(ks.delta_k).max()))
    assert all(a > b for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-8


@pytest.mark.parametrize("k,b,rho", [(1.0, 1.0, 2.0), (0.3, 0.7, 1.2), (2.0, -0.5, 3.0)])
def test_coincidence_matches_extrapolated_limit(k, b, rho):
    ri = np.array([0.0, rho, 0.0])
    direction = np.array([0.6, 0.0, 0.8])

    def regular_part(h):
        return dressed_green(k, b, ri + h * direction, ri) - 1.0 / h

    lim = richardson_limit(regular_part, 0.05, levels=6)
    da, dk = coincidence_corrections(k, b, rho)
    assert abs(lim - complex(da, k + dk)) < 1e-8


def test_coincidence_small_k_finite_and_continuous():
    vals = [complex(*coincidence_corrections(k, 1.0, 1.0)) for k in (1e-4, 2e-4, 4e-4)]
    assert all(np.isfinite(v) for v in vals)
    assert abs(vals[0] - vals[1]) < 1e-3 and abs(vals[1] - vals[2]) < 1e-3


@pytest.mark.parametrize("k,b", [(0.4, 1.0), (1.5, 0.3)])
def test_radial_solutions_of_the_dressed_equation(k, b):
    u = lambda r: dressed_potential_u0(DressingStep(b), r)
    r = np.linspace(0.3, 15, 60)
    f_re = lambda x: dressed_outgoing_wave(k, b, x).real
    f_im = lambda x: dressed_outgoing_wave(k, b, x).imag
    for f in (f_re, f_im, lambda x: dressed_free_wave(k, b, x)):
        assert np.max(np.abs(schrodinger_residual(f, u, k, r))) < 1e-6
    # Wronskian of regular and outgoing waves equals the free value -k
    h = 1e-6
    psi, f = dressed_free_wave(k, b, r), dressed_outgoing_wave(k, b, r)
    dpsi = (dressed_free_wave(k, b, r + h) - dressed_free_wave(k, b, r - h)) / (2 * h)
    df = (dressed_outgoing_wave(k, b, r + h) - dressed_outgoing_wave(k, b, r - h)) / (2 * h)
    assert np.allclose(psi * df - dpsi * f, -k, atol=1e-7)


def test_kernels_for_dispatch():
    g = build_xn(3, 2.0, 0.5)
    assert np.array_equal(kernels_for(g, 0.4).c, free_kernels(g, 0.4).c)
    bg = Geometry(g.sites, DressingStep(0.5), (0.0, 0.0, 1.0), g.labels)
    assert np.any(kernels_for(bg, 0.4).delta_k != 0)
