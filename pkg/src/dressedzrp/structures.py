"""Closed-form phases of the equidistant X_n and YX_n structures.

For ``n`` identical s-wave scatterers at mutual distance ``R`` the compatibility
determinant factorizes into a symmetric mode and an ``(n-1)``-fold mode:

    tan eta_1   = -(kR + (n-1) sin kR) / (alpha R + (n-1) cos kR)
    tan eta_deg = -(kR - sin kR) / (alpha R - cos kR)

Adding a central scatterer Y (inverse scattering length ``beta``, distance
``D`` to every X) leaves the degenerate family unchanged and couples the two
symmetric amplitudes, whose ``x = tan eta`` solve

    (k + beta x)(kR + (n-1) sin kR + x (alpha R + (n-1) cos kR))
        = n R (sin kD + x cos kD)^2 / D^2
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ZRPError, is_infinite
from .multicenter import CrossSections, mode_cross_section


class QuadraticError(ZRPError):
    pass


def _ratio(num: float, den: float) -> float:
    if den == 0:
        return math.copysign(math.inf, num) if num != 0 else math.inf
    return num / den


@dataclass(frozen=True)
class XnResult:
    n: int
    R: float
    alpha: float
    k: float
    tan_eta_1: float
    tan_eta_deg: float

    @property
    def tan_etas(self) -> np.ndarray:
        return np.sort([self.tan_eta_1] + [self.tan_eta_deg] * (self.n - 1))


@dataclass(frozen=True)
class YxnResult:
    n: int
    R: float
    D: float
    alpha: float
    beta: float
    k: float
    tan_eta_12: tuple
    tan_eta_deg: float

    @property
    def tan_etas(self) -> np.ndarray:
        return np.sort(list(self.tan_eta_12) + [self.tan_eta_deg] * (self.n - 1))

    def quadratic_residual(self, x: float) -> float:
        """Residual of the YX_n quadratic at ``x``, scaled by the size of its terms."""
        A2, A1, A0 = yxn_quadratic(self.n, self.R, self.D, self.alpha, self.beta, self.k)
        scale = abs(A2) * x * x + abs(A1) * abs(x) + abs(A0)
        return abs((A2 * x + A1) * x + A0) / (scale if scale > 0 else 1.0)


def _check(n, R, k, alpha):
    if int(n) != n or n < 2:
        raise ZRPError(f"n must be an integer >= 2, got {n!r}")
    if not R > 0 or not k > 0:
        raise ZRPError("R and k must be positive")
    if is_infinite(alpha):
        raise ZRPError("X scatterers need a finite alpha")


def xn_symmetric_parts(n: int, R: float, alpha: float, k: float):
    """Numerator ``kR + (n-1) sin kR`` and denominator ``alpha R + (n-1) cos kR``."""
    kR = k * R
    return kR + (n - 1) * math.sin(kR), alpha * R + (n - 1) * math.cos(kR)


def degenerate_tan(R: float, alpha: float, k: float) -> float:
    kR = k * R
    return _ratio(-(kR - math.sin(kR)), alpha * R - math.cos(kR))


def xn_phases(n: int, R: float, alpha: float, k: float) -> XnResult:
    _check(n, R, k, alpha)
    P, Q = xn_symmetric_parts(n, R, alpha, k)
    return XnResult(int(n), R, alpha, k, _ratio(-P, Q), degenerate_tan(R, alpha, k))


def yxn_quadratic(n: int, R: float, D: float, alpha: float, beta: float, k: float):
    """Coefficients ``(A2, A1, A0)`` of the YX_n quadratic multiplied through by its denominator."""
    P, Q = xn_symmetric_parts(n, R, alpha, k)
    w = n * R / (D * D)
    s, c = math.sin(k * D), math.cos(k * D)
    A2 = beta * Q - w * c * c
    A1 = k * Q + beta * P - 2.0 * w * s * c
    A0 = k * P - w * s * s
    return A2, A1, A0


def solve_quadratic(A2: float, A1: float, A0: float):
    """Real roots of ``A2 x^2 + A1 x + A0`` in ascending order, cancellation-free.

    A vanishing leading coefficient sends one root to infinity.
    """
    disc = A1 * A1 - 4.0 * A2 * A0
    if disc < 0:
        if disc > -1e-14 * (A1 * A1 + abs(4.0 * A2 * A0)):
            disc = 0.0
        else:
            raise QuadraticError(f"complex roots: discriminant {disc!r}")
    q = -0.5 * (A1 + math.copysign(math.sqrt(disc), A1))
    roots = []
    roots.append(q / A2 if A2 != 0 else math.inf)
    roots.append(A0 / q if q != 0 else (math.inf if A0 != 0 else 0.0))
    return tuple(sorted(roots, key=lambda x: (math.isinf(x), x)))


def yxn_phases(n: int, R: float, D: float, alpha: float, beta: float, k: float) -> YxnResult:
    """Quadratic roots ``x1 <= x2`` and the ``(n-1)``-fold value for YX_n.

    ``beta = inf`` removes Y, leaving the X_n symmetric root and ``x = 0``.
    """
    _check(n, R, k, alpha)
    if not D > 0:
        raise ZRPError("D must be positive")
    if is_infinite(beta):
        P, Q = xn_symmetric_parts(n, R, alpha, k)
        roots = tuple(sorted((_ratio(-P, Q), 0.0)))
    else:
        roots = solve_quadratic(*yxn_quadratic(n, R, D, alpha, beta, k))
    return YxnResult(int(n), R, D, alpha, beta, k, roots, degenerate_tan(R, alpha, k))


def xn_cross_section(result) -> CrossSections:
    """Partial and integral cross sections ``sigma = sum sigma_lambda`` (degenerate counted n-1 times)."""
    k = result.k
    if isinstance(result, XnResult):
        tans = [result.tan_eta_1, result.tan_eta_deg]
        mult = (1, result.n - 1)
    else:
        tans = [*result.tan_eta_12, result.tan_eta_deg]
        mult = (1, 1, result.n - 1)
    partial = np.array([mode_cross_section(t, k) for t in tans])
    total = float(np.dot(partial, mult))
    return CrossSections(partial, mult, total, total, 0.0)
