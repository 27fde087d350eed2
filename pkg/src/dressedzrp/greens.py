"""Outgoing Green functions and the s/c interaction kernels of the multi-centre system.

Normalization: ``(-lap + 2v - k^2) g = 4 pi delta``, so the free kernel is
``exp(ik|r - r'|)/|r - r'|``.  The dressed background (prop function
``sinh(br)`` centred at the dressing centre) only changes the s-wave about
that centre:

    g = g0 + [psi1(r<) f1(r>) - sin(k r<) exp(ik r>)] / (k r r')

with ``psi1`` the dressed regular wave and ``f1 = (b coth(br) - ik) exp(ikr) /
sqrt(k^2 + b^2)`` the dressed outgoing wave.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import GeometryError, DressingError, Geometry, is_infinite
from .darboux import dressed_free_wave


@dataclass(frozen=True)
class KernelSet:
    """Off-diagonal ``s = Im g``, ``c = Re g`` and the diagonal corrections.

    Near site ``i`` the Green function behaves as
    ``1/|r - r_i| + delta_alpha_i + i (k + delta_k_i)``.
    """

    k: float
    s: np.ndarray
    c: np.ndarray
    delta_alpha: np.ndarray
    delta_k: np.ndarray

    @property
    def n(self) -> int:
        return self.s.shape[0]


def _as_point(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (3,):
        raise GeometryError(f"expected a 3-vector, got shape {p.shape}")
    return p


def free_green(k: float, r, rp) -> complex:
    d = float(np.linalg.norm(_as_point(r) - _as_point(rp)))
    if d == 0:
        raise GeometryError("free Green function is singular at coincident points")
    return complex(math.cos(k * d), math.sin(k * d)) / d


def kernels_from_distances(dist, k: float) -> KernelSet:
    """Free-space kernels from a pairwise distance matrix (diagonal ignored)."""
    dist = np.asarray(dist, dtype=float)
    n = dist.shape[0]
    off = ~np.eye(n, dtype=bool)
    if np.any(dist[off] <= 0):
        raise GeometryError("distinct sites must have positive separations")
    s = np.zeros((n, n))
    c = np.zeros((n, n))
    s[off] = np.sin(k * dist[off]) / dist[off]
    c[off] = np.cos(k * dist[off]) / dist[off]
    return KernelSet(k, s, c, np.zeros(n), np.zeros(n))


def free_kernels(geometry: Geometry, k: float) -> KernelSet:
    return kernels_from_distances(geometry.distances(), k)


def dressed_outgoing_wave(k: float, b: float, r):
    """``f1(r) = (b coth(br) - ik) exp(ikr) / sqrt(k^2 + b^2)``."""
    r = np.asarray(r, dtype=float)
    return (b / np.tanh(b * r) - 1j * k) * np.exp(1j * k * r) / math.sqrt(k * k + b * b)


def swave_correction(k: float, b: float, ra: float, rb: float) -> complex:
    """Dressed minus free s-wave part of ``g`` for radii ``ra``, ``rb`` from the centre.

    Symmetric in its radii; finite at ``ra == rb``.
    """
    if ra <= 0 or rb <= 0:
        raise GeometryError("Green-function correction is undefined at the dressing centre")
    lo, hi = (ra, rb) if ra <= rb else (rb, ra)
    psi = float(dressed_free_wave(k, b, lo))
    f = complex(dressed_outgoing_wave(k, b, hi))
    free = math.sin(k * lo) * complex(math.cos(k * hi), math.sin(k * hi))
    return (psi * f - free) / (k * lo * hi)


def _check_background(e):
    if not is_infinite(e):
        raise DressingError("dressed Green function is only available for the e = inf prop function")


def dressed_green(k: float, b: float, r, rp, center=(0.0, 0.0, 0.0), e: float = math.inf) -> complex:
    """Outgoing Green function of the dressed background centred at ``center``."""
    _check_background(e)
    r, rp, c0 = _as_point(r), _as_point(rp), _as_point(center)
    ra = float(np.linalg.norm(r - c0))
    rb = float(np.linalg.norm(rp - c0))
    if ra == 0 or rb == 0:
        raise GeometryError("dressed Green function is singular at the dressing centre")
    return free_green(k, r, rp) + swave_correction(k, b, ra, rb)


def coincidence_corrections(k: float, b: float, site_radius: float):
    """``(delta_alpha, delta_k)`` with ``delta_alpha + i delta_k`` the regular part
    of the dressed correction at coincident arguments."""
    if not site_radius > 0:
        raise GeometryError("a site at the dressing centre is not supported")
    d = swave_correction(k, b, site_radius, site_radius)
    return d.real, d.imag


def dressed_kernels(geometry: Geometry, k: float, b: float | None = None) -> KernelSet:
    """Kernels for ``geometry`` in its dressed background (or the given ``b``)."""
    if b is None:
        if geometry.background is None:
            raise DressingError("geometry has no background dressing and no b was given")
        _check_background(geometry.background.e)
        b = geometry.background.b
    radii = geometry.radii()
    if np.any(radii <= 1e-12 * (1.0 + radii.max(initial=0.0))):
        raise GeometryError("sites at the dressing centre are not supported with a dressed background")
    base = free_kernels(geometry, k)
    n = len(geometry)
    s, c = base.s.copy(), base.c.copy()
    da, dk = np.zeros(n), np.zeros(n)
    for i in range(n):
        d = swave_correction(k, b, radii[i], radii[i])
        da[i], dk[i] = d.real, d.imag
        for j in range(i):
            d = swave_correction(k, b, radii[i], radii[j])
            s[i, j] += d.imag
            s[j, i] = s[i, j]
            c[i, j] += d.real
            c[j, i] = c[i, j]
    return KernelSet(k, s, c, da, dk)


def kernels_for(geometry: Geometry, k: float) -> KernelSet:
    """Free kernels, or dressed ones when the geometry carries a background step."""
    if geometry.background is None:
        return free_kernels(geometry, k)
    return dressed_kernels(geometry, k)
