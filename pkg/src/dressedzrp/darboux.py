"""First-order Darboux dressing of zero-range potentials.

A dressing step ``(b, e)`` uses the prop function ``phi(r)``, the solution at
``k = i b`` obeying the ZRP boundary condition with inverse scattering length
``e``.  With ``s = phi'/phi`` it maps

    u  ->  u - s'
    psi -> (s - D) psi / sqrt(k**2 + b**2)

For the s-wave ``phi = sinh(br) - (b/e) cosh(br)``; ``e = inf`` gives
``sinh(br)`` and ``e = +-b`` gives a pure exponential, so the potential is
unchanged and only the boundary condition at the origin moves.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import spherical_jn, spherical_yn

from .core import INF, Channel, DressingError, DressingStep, is_infinite
from .gzrp import double_factorial, fold_phase, phase as gzrp_phase, s_matrix_element

__all__ = [
    "DressingStep", "DressedChannel", "prop_function", "prop_node", "log_derivative",
    "asymptotic_log_derivative", "dressed_potential_u0", "dress_wavefunction",
    "dressed_free_wave", "dressed_tan_phase0", "darboux_phase", "boundary_alpha",
    "effective_alpha", "dressed_zrp_smatrix", "dressed_boundary_coefficient",
    "background_delta",
]


class PropNodeError(DressingError):
    """The prop function vanishes inside the evaluation range."""

    def __init__(self, node: float):
        super().__init__(f"prop function has a node at r = {node!r}")
        self.node = node


def prop_node(step: DressingStep) -> Optional[float]:
    """Location ``r > 0`` of the s-wave prop-function node, or ``None``.

    ``tanh(b r) = b/e`` has a positive root exactly when ``e > |b|``.
    """
    if is_infinite(step.e) or not step.e > abs(step.b):
        return None
    return math.atanh(step.b / step.e) / step.b


def _prop_general(l: int, step: DressingStep, r, derivative: bool = False):
    # analytic continuation of j_l(kr) + tan(eta) n_l(kr) to k = i b, made real
    b, e = step.b, step.e
    z = 1j * b * np.asarray(r, dtype=float)
    t = 0.0 if is_infinite(e) else -((1j * b) ** (2 * l + 1)) / e
    norm = 1j ** (l + 1)
    if not derivative:
        J = z * spherical_jn(l, z)
        N = -z * spherical_yn(l, z)
        return np.real((J + t * N) / norm)
    dJ = spherical_jn(l, z) + z * spherical_jn(l, z, derivative=True)
    dN = -(spherical_yn(l, z) + z * spherical_yn(l, z, derivative=True))
    return np.real(1j * b * (dJ + t * dN) / norm)


def prop_function(step: DressingStep, r, l: int = 0):
    """Prop function ``phi_l(r, ib)``; for ``l = 0`` this is ``sinh(br) - (b/e) cosh(br)``."""
    r = np.asarray(r, dtype=float)
    if l == 0:
        br = step.b * r
        if is_infinite(step.e):
            return np.sinh(br)
        return np.sinh(br) - (step.b / step.e) * np.cosh(br)
    return _prop_general(l, step, r)


def log_derivative(step: DressingStep, r, l: int = 0):
    """``s_l(r) = phi_l'(r) / phi_l(r)``.

    Raises PropNodeError when an evaluation point sits on a node of the prop
    function (s-wave), reporting the node.
    """
    r = np.asarray(r, dtype=float)
    if l > 0:
        return _prop_general(l, step, r, derivative=True) / _prop_general(l, step, r)
    b, e = step.b, step.e
    node = prop_node(step)
    if node is not None and np.any(np.abs(r - node) <= 1e-12 * (1.0 + node)):
        raise PropNodeError(node)
    if step.trivial:
        return np.full(r.shape, -e) if r.ndim else -e
    th = np.tanh(b * r)
    if is_infinite(e):
        return b / th
    q = b / e
    return b * (1.0 - q * th) / (th - q)


def asymptotic_log_derivative(step: DressingStep) -> float:
    """``lim s(r)`` as ``r -> inf`` for the s-wave prop function.

    Equals ``|b|`` unless ``e = |b|``, where the growing exponential cancels and
    the prop function is ``-exp(-|b| r)`` (limit ``-|b|``).
    """
    b = abs(step.b)
    if not is_infinite(step.e) and step.e == b:
        return -b
    return b


def dressed_potential_u0(step: DressingStep, r, check: bool = True):
    """Dressed s-wave potential ``u0 - s'`` for a free background.

    ``-b^2 (b^2 - e^2) / (b cosh(br) - e sinh(br))^2`` for finite ``e`` and its
    limit ``b^2 / sinh(br)^2`` for ``e = inf``.  With ``check`` the parameters
    must give a potential without poles on ``r > 0`` (``b/e`` outside ``[0, 1)``
    for positive ``b``); ``r`` may be complex when ``check`` is off.
    """
    b, e = step.b, step.e
    if check:
        node = prop_node(step)
        if node is not None:
            raise DressingError(
                f"dressed potential is singular at r = {node!r}: "
                f"b/e = {b / e!r} must lie outside [0, 1)")
    r = np.asarray(r)
    if is_infinite(e):
        return b * b / np.sinh(b * r) ** 2
    return -b * b * (b * b - e * e) / (b * np.cosh(b * r) - e * np.sinh(b * r)) ** 2


def dress_wavefunction(psi: Callable, psi_prime: Callable, step: DressingStep,
                       k: Optional[float] = None, l: int = 0) -> Callable:
    """Return ``r -> (s(r) psi(r) - psi'(r)) / sqrt(k**2 + b**2)``.

    With ``k=None`` the normalization is skipped, which allows dressing the
    prop function itself (it is annihilated).
    """
    if k is None:
        norm = 1.0
    else:
        kb = k * k + step.b * step.b
        if not kb > 0:
            raise DressingError("k**2 + b**2 must be positive")
        norm = 1.0 / math.sqrt(kb)

    def dressed(r):
        r = np.asarray(r, dtype=float)
        return norm * (log_derivative(step, r, l) * psi(r) - psi_prime(r))

    return dressed


def dressed_free_wave(k: float, b: float, r):
    """``(b coth(br) sin(kr) - k cos(kr)) / sqrt(k^2 + b^2)``: the dressed regular s-wave."""
    wave = dress_wavefunction(lambda x: np.sin(k * x), lambda x: k * np.cos(k * x),
                              DressingStep(b), k)
    return wave(r)


def dressed_tan_phase0(e: float, b: float, k: float) -> float:
    """Closed form ``(e - b) k / (b e + k^2)`` for the ``e = alpha`` dressing.

    ``be + k^2 = 0`` returns ``inf`` (eta = pi/2).  Note the sign convention:
    radial integration of the dressed potential (and the Darboux map itself)
    gives this expression with ``b`` replaced by ``-|b|``; see ``darboux_phase``.
    """
    den = b * e + k * k
    if den == 0:
        return math.inf
    return (e - b) * k / den


def darboux_phase(alpha: float, step: DressingStep, k: float) -> float:
    """Phase of the dressed s-wave ``(s - D) psi`` for a ZRP ``alpha``.

    The dressed wave is ``sin(kr + eta0 - arctan(k / s_inf))`` at large ``r``,
    with ``s_inf`` from ``asymptotic_log_derivative``.  For ``alpha = e`` the
    tangent is ``k (e + |b|) / (k^2 - e|b|)``.  Result folded into (-pi/2, pi/2].
    """
    eta0 = gzrp_phase(Channel(0, alpha), k)
    return fold_phase(eta0 - math.atan2(k, asymptotic_log_derivative(step)))


def boundary_alpha(alpha: float, step: DressingStep, k: float) -> float:
    """Inverse scattering length seen by the dressed s-wave at the origin.

    The dressed wave obeys ``D psi = ((b^2 + k^2)/(alpha - e) + e) psi`` at
    ``r = 0``, i.e. ``alpha_eff = (b^2 + k^2)/(e - alpha) - e`` in the
    ``D psi = -alpha psi`` convention.  ``alpha = e`` gives ``inf`` (regular
    dressed wave); ``alpha = inf`` gives ``-e``.
    """
    b, e = step.b, step.e
    if is_infinite(e):
        raise DressingError("boundary_alpha needs a finite e")
    if is_infinite(alpha):
        return -e
    if alpha == e:
        return INF
    return (b * b + k * k) / (e - alpha) - e


def effective_alpha(alpha: float, b: float, sign: int, k: float) -> float:
    """Energy-dependent inverse scattering length of a trivially dressed ZRP.

    The step has ``e = sign * b``, so the potential stays zero and the whole
    effect is the boundary condition ``alpha -> (b^2 + k^2)/(e - alpha) - e``.
    ``tan(eta) = -k / alpha_eff`` then reproduces ``dressed_zrp_smatrix`` with
    parameter ``-sign * b``.  ``alpha = e`` yields ``inf``.
    """
    if sign not in (1, -1):
        raise DressingError(f"sign must be +1 or -1, got {sign!r}")
    return boundary_alpha(alpha, DressingStep(b, sign * b), k)


def dressed_zrp_smatrix(ch: Channel, b: float, k: float) -> complex:
    """``(alpha - ik^{2l+1})/(alpha + ik^{2l+1}) * (b - ik)/(b + ik)``."""
    base = s_matrix_element(ch, k).value
    return base * complex(b, -k) / complex(b, k)


def dressed_boundary_coefficient(ch: Channel, step: DressingStep, k: float):
    """Derivative order and coefficient of the dressed GZRP boundary condition.

    Finite ``e`` (``l > 0``) acts on ``r^{l-1} psi`` with order ``2l - 1``;
    ``e = inf`` acts on ``r^{l+1} psi`` with order ``2l + 3``.
    """
    l, a, b = ch.l, ch.alpha, step.b
    den = k * k - b * b
    if den == 0:
        raise DressingError("dressed boundary coefficient is singular at k**2 = b**2")
    if is_infinite(step.e):
        order = 2 * l + 3
        coef = -a * math.factorial(2 * l + 3) / (
            den * double_factorial(2 * l + 3) * double_factorial(2 * l - 1))
        return order, coef
    if l == 0:
        raise DressingError("finite-e dressed boundary condition is defined for l > 0")
    order = 2 * l - 1
    coef = -a * math.factorial(2 * l - 1) / (
        den * double_factorial(2 * l + 1) * double_factorial(2 * l - 3))
    return order, coef


def background_delta(b: float, k: float) -> float:
    """Phase ``-arctan(k/|b|)`` of the ``e = inf`` dressing of the free wave."""
    return -math.atan(k / abs(b))


@dataclass(frozen=True)
class DressedChannel:
    """A channel together with the single Darboux step applied to it."""

    base: Channel
    step: DressingStep

    @classmethod
    def from_steps(cls, base: Channel, steps: Sequence[DressingStep]) -> "DressedChannel":
        steps = list(steps)
        if len(steps) != 1:
            raise DressingError(
                f"exactly one dressing step is supported, got {len(steps)} (chains not implemented)")
        return cls(base, steps[0])

    def delta(self, k: float) -> float:
        return background_delta(self.step.b, k)

    def smatrix(self, k: float) -> complex:
        return dressed_zrp_smatrix(self.base, self.step.b, k)
