"""Single-centre generalized zero-range potential (GZRP).

A GZRP in channel ``l`` is the boundary condition

    D^{2l+1}(r^l psi)|_0 = -alpha_l (2l+1)! / ((2l+1)!! (2l-1)!!) (r^l psi)|_0

on the free radial wave ``psi = cos(eta) j_l(kr) + sin(eta) n_l(kr)``.  It gives
``exp(2i eta_l) = (alpha_l - i k^{2l+1}) / (alpha_l + i k^{2l+1})`` and the
S-matrix poles are the ``2l+1`` roots of ``alpha_l + i k^{2l+1} = 0``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import spherical_jn, spherical_yn

from .core import Channel, ZRPError


def double_factorial(n: int) -> int:
    """``n!!`` with the convention ``(-1)!! = 1``."""
    if n < -1:
        raise ValueError(f"double factorial undefined for {n}")
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


@dataclass(frozen=True)
class SMatrixElement:
    value: complex
    channel: Channel
    k: float

    @property
    def phase(self) -> float:
        """Phase shift folded into (-pi/2, pi/2]."""
        eta = 0.5 * cmath.phase(self.value)
        return fold_phase(eta)


def fold_phase(eta: float) -> float:
    """Map a phase shift onto the branch (-pi/2, pi/2]."""
    eta = math.fmod(eta, math.pi)
    if eta > math.pi / 2:
        eta -= math.pi
    elif eta <= -math.pi / 2:
        eta += math.pi
    return eta


def phase_from_tan(t: float) -> float:
    if math.isinf(t):
        return math.pi / 2
    return math.atan(t)


def s_matrix_element(ch: Channel, k: float) -> SMatrixElement:
    if not k > 0:
        raise ZRPError(f"k must be positive, got {k!r}")
    if ch.free:
        return SMatrixElement(1.0 + 0.0j, ch, k)
    K = k ** (2 * ch.l + 1)
    return SMatrixElement(complex(ch.alpha, -K) / complex(ch.alpha, K), ch, k)


def tan_phase(ch: Channel, k: float) -> float:
    """``tan eta_l = -k^{2l+1} / alpha_l``; ``alpha = 0`` gives ``-inf`` (eta = pi/2)."""
    if ch.free:
        return 0.0
    K = k ** (2 * ch.l + 1)
    if ch.alpha == 0:
        return -math.inf
    return -K / ch.alpha


def phase(ch: Channel, k: float) -> float:
    return phase_from_tan(tan_phase(ch, k))


@dataclass(frozen=True)
class Pole:
    """An S-matrix pole ``k``; ``kind`` is bound, antibound or resonance."""

    kind: str
    k: complex

    @property
    def energy(self) -> complex:
        """Complex energy ``k**2 / 2`` (negative real for bound/antibound poles)."""
        return 0.5 * self.k * self.k

    @property
    def binding_energy(self) -> float:
        """Positive magnitude ``|k|**2 / 2`` of the imaginary-axis pole."""
        return 0.5 * abs(self.k) ** 2


@dataclass(frozen=True)
class PoleSet:
    channel: Channel
    bound: Optional[Pole]
    antibound: Optional[Pole]
    resonances: tuple

    @property
    def all(self) -> tuple:
        axis = tuple(p for p in (self.bound, self.antibound) if p is not None)
        return axis + tuple(Pole("resonance", z) for z in self.resonances)

    def residuals(self) -> np.ndarray:
        m = 2 * self.channel.l + 1
        return np.array([abs(self.channel.alpha + 1j * p.k ** m) for p in self.all])


def _axis_pole(ch: Channel) -> Optional[Pole]:
    if ch.free:
        raise ZRPError("a free channel (alpha = inf) has no poles")
    if ch.alpha == 0:
        return None
    m = 2 * ch.l + 1
    signed = (-1) ** ch.l * ch.alpha
    b = math.copysign(abs(signed) ** (1.0 / m), signed)
    return Pole("bound" if b > 0 else "antibound", complex(0.0, b))


def bound_state(ch: Channel) -> Optional[Pole]:
    """Imaginary-axis pole ``k = i b`` with ``b**(2l+1) = (-1)**l alpha``.

    The state is bound when ``b > 0`` (i.e. ``(-1)**l alpha > 0``) and antibound
    otherwise; ``binding_energy`` is ``alpha**(2/(2l+1)) / 2`` in both cases.
    Returns ``None`` for ``alpha = 0``.
    """
    return _axis_pole(ch)


def resonance_poles(ch: Channel) -> PoleSet:
    """All ``2l+1`` roots of ``alpha + i k^{2l+1} = 0``, split by location.

    The roots are ``|alpha|^{1/(2l+1)}`` times the ``(2l+1)``-th roots of
    ``i sign(alpha)``; exactly one of them lies on the imaginary axis and the
    other ``2l`` are resonances, closed under ``k -> -conj(k)``.
    """
    axis = _axis_pole(ch)
    if axis is None:
        return PoleSet(ch, None, None, ())
    m = 2 * ch.l + 1
    rho = abs(ch.alpha) ** (1.0 / m)
    theta0 = math.copysign(math.pi / 2, ch.alpha)
    roots = [rho * cmath.exp(1j * (theta0 + 2 * math.pi * j) / m) for j in range(m)]
    roots.sort(key=lambda z: abs(z - axis.k))
    res = tuple(sorted(roots[1:], key=lambda z: (z.imag, z.real)))
    bound = axis if axis.kind == "bound" else None
    anti = axis if axis.kind == "antibound" else None
    return PoleSet(ch, bound, anti, res)


def riccati_bessel(l: int, x):
    """Riccati-Bessel pair ``(j_l(x), n_l(x)) = (x j_l^sph(x), -x y_l^sph(x))``.

    Normalized so that ``j_0 = sin x``, ``n_0 = cos x`` and near zero
    ``j_l ~ x^{l+1}/(2l+1)!!``, ``n_l ~ (2l-1)!! x^{-l}``.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ZRPError("riccati_bessel needs x > 0")
    j = x * spherical_jn(l, x)
    n = -x * spherical_yn(l, x)
    if j.ndim == 0:
        return float(j), float(n)
    return j, n


def riccati_bessel_derivative(l: int, x):
    """Derivatives ``(j_l'(x), n_l'(x))`` of the Riccati-Bessel pair."""
    x = np.asarray(x, dtype=float)
    dj = spherical_jn(l, x) + x * spherical_jn(l, x, derivative=True)
    dn = -(spherical_yn(l, x) + x * spherical_yn(l, x, derivative=True))
    if dj.ndim == 0:
        return float(dj), float(dn)
    return dj, dn


def radial_wave(ch: Channel, k: float, r):
    """Free-region wave ``cos(eta) j_l(kr) + sin(eta) n_l(kr)`` obeying the GZRP condition."""
    eta = phase(ch, k)
    j, n = riccati_bessel(ch.l, k * np.asarray(r, dtype=float))
    return math.cos(eta) * j + math.sin(eta) * n
