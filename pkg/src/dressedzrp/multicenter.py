"""Multi-centre s-wave ZRP scattering: compatibility pencil, phases, amplitudes, cross sections.

Imposing the ZRP conditions on a superposition of Green functions gives, for
every partial wave with ``x = tan(eta)``,

    (Ms + x Mc) c = 0,
    Ms_ij = s_ij,  Ms_ii = k + delta_k_i,
    Mc_ij = c_ij,  Mc_ii = alpha_i + delta_alpha_i.

``Ms`` is ``k / (4 pi)`` times the Gram matrix of the site waves on the unit
sphere, so for physical input it is positive definite and the pencil reduces
to a symmetric-definite eigenproblem ``Mc v = mu Ms v`` with ``x = -1/mu``.
Otherwise a definite ``Mc`` is used as the metric, and QZ is the last resort.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from .core import DressingError, Geometry, ZRPError, is_infinite
from .darboux import background_delta, boundary_alpha, dressed_free_wave
from .greens import KernelSet, kernels_for

LOG = logging.getLogger(__name__)

DEGENERACY_TOL = 1e-8


class PencilError(ZRPError):
    pass


@dataclass(frozen=True)
class Mode:
    """One partial wave: ``tan_eta`` with an ``(n, multiplicity)`` coefficient basis.

    With a positive-definite ``Ms`` the basis is ``Ms``-orthonormal.
    """

    tan_eta: float
    coeffs: np.ndarray

    @property
    def multiplicity(self) -> int:
        return self.coeffs.shape[1]

    @property
    def eta(self) -> float:
        return math.pi / 2 if math.isinf(self.tan_eta) else math.atan(self.tan_eta)


@dataclass(frozen=True)
class PhaseSolution:
    k: float
    modes: tuple
    background_delta: float = 0.0
    metric: bool = True  # coefficients Ms-orthonormal
    background_weights: tuple = ()  # per mode, sum over its basis of (c . phi)^2

    @property
    def n(self) -> int:
        return sum(m.multiplicity for m in self.modes)

    @property
    def tan_etas(self) -> np.ndarray:
        """All ``tan(eta)`` values, repeated by multiplicity, ascending."""
        return np.array([m.tan_eta for m in self.modes for _ in range(m.multiplicity)])

    @property
    def multiplicities(self) -> tuple:
        return tuple(m.multiplicity for m in self.modes)


@dataclass(frozen=True)
class CrossSections:
    """Per-mode ``sigma_lambda``, their multiplicities and the integral values (a0^2).

    ``interference`` is the background/mode cross term (zero when undressed);
    ``averaged = background + total + interference``.
    """

    partial: np.ndarray
    multiplicities: tuple
    total: float
    averaged: float
    background: float = 0.0
    interference: float = 0.0


def site_alphas(geometry: Geometry, k: float) -> np.ndarray:
    """Inverse scattering lengths at wavenumber ``k``.

    Dressed sites must carry a trivial step (``e = +-b``) and contribute the
    energy-dependent effective value.
    """
    out = np.empty(len(geometry))
    for i, site in enumerate(geometry.sites):
        step = site.dressing
        if step is None:
            if is_infinite(site.alpha):
                raise ZRPError(f"site {geometry.labels[i]} has alpha = inf and no dressing: not a scatterer")
            out[i] = site.alpha
            continue
        if not step.trivial:
            raise DressingError(
                f"site {geometry.labels[i]}: only trivial site dressings (e = +-b) enter the "
                "multi-centre system; use a background dressing for e = inf")
        a = boundary_alpha(site.alpha, step, k)
        if is_infinite(a):
            raise ZRPError(f"site {geometry.labels[i]}: effective alpha is infinite at k={k}")
        out[i] = a
    return out


def assemble_system(geometry: Geometry, kernels: KernelSet, k: float):
    """Return ``(Ms, Mc)`` of the compatibility pencil ``(Ms + x Mc) c = 0``."""
    n = len(geometry)
    if kernels.n != n:
        raise ZRPError(f"kernel size {kernels.n} does not match {n} sites")
    if kernels.k != k:
        raise ZRPError("kernels were evaluated at a different k")
    alphas = site_alphas(geometry, k)
    Ms = kernels.s.copy()
    Mc = kernels.c.copy()
    idx = np.arange(n)
    Ms[idx, idx] = k + kernels.delta_k
    Mc[idx, idx] = alphas + kernels.delta_alpha
    return Ms, Mc


def _group(xs, tol=DEGENERACY_TOL):
    groups = []
    for i, x in enumerate(xs):
        if groups:
            x0 = xs[groups[-1][0]]
            same = (math.isinf(x) and math.isinf(x0)) or (
                not math.isinf(x) and not math.isinf(x0) and abs(x - x0) < tol * (1.0 + abs(x0)))
            if same:
                groups[-1].append(i)
                continue
        groups.append([i])
    return groups


def _residual(Ms, Mc, x, W):
    R = Ms @ W + x * (Mc @ W)
    scale = (np.linalg.norm(Ms, 2) + abs(x) * np.linalg.norm(Mc, 2)) * np.linalg.norm(W, axis=0)
    return float(np.max(np.linalg.norm(R, axis=0) / scale))


def _refine(Ms, Mc, x, W, sweeps=2):
    """Subspace inverse iteration plus Rayleigh-Ritz on the original pencil.

    Recovers the accuracy lost by the Cholesky reduction when ``Ms`` is nearly
    singular (small k, where all ``s_ij`` approach ``k``).  The Ritz step runs
    on ``span(W, Z)`` and a sweep is kept only if it lowers the residual, so a
    shift sitting on a degenerate root cannot spoil the subspace.
    """
    m = W.shape[1]
    best = _residual(Ms, Mc, x, W)
    for _ in range(sweeps):
        try:
            Z = np.linalg.solve(Ms + x * Mc, Mc @ W)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(Z)):
            break
        Q, _ = np.linalg.qr(np.hstack([W, Z / np.linalg.norm(Z, axis=0)]))
        try:
            mu, Y = scipy.linalg.eigh(Q.T @ Mc @ Q, Q.T @ Ms @ Q)
        except np.linalg.LinAlgError:
            break
        with np.errstate(divide="ignore"):
            cand = -1.0 / mu
        pick = np.argsort(np.abs(cand - x))[:m]
        pick.sort()
        W_new = Q @ Y[:, pick]
        x_new = float(np.mean(cand[pick]))
        res = _residual(Ms, Mc, x_new, W_new)
        if not res < best:
            break
        x, W, best = x_new, W_new, res
    return x, W


def _solve_definite(Ms, Mc):
    mu, V = scipy.linalg.eigh(Mc, Ms)
    scale = np.linalg.norm(Mc, 2) / max(np.linalg.norm(Ms, 2), 1e-300)
    xs = []
    for m in mu:
        if abs(m) <= 1e-14 * max(scale, 1e-300):
            xs.append(math.inf)
        else:
            xs.append(-1.0 / m)
    order = sorted(range(len(xs)), key=lambda i: (math.isinf(xs[i]), xs[i]))
    xs = [xs[i] for i in order]
    V = V[:, order]
    modes = []
    for g in _group(xs):
        if math.isinf(xs[g[0]]):
            modes.append(Mode(math.inf, V[:, g]))
            continue
        x, W = _refine(Ms, Mc, float(np.mean([xs[i] for i in g])), V[:, g])
        modes.append(Mode(x, W))
    modes.sort(key=lambda m: (math.isinf(m.tan_eta), m.tan_eta))
    return tuple(modes)


def _solve_mc_definite(Ms, C, sign):
    """``Ms v = lam C v`` with ``C = sign * Mc`` positive definite; ``x = -sign * lam``."""
    lam, V = scipy.linalg.eigh(Ms, C)
    xs = list(-sign * lam)
    order = sorted(range(len(xs)), key=lambda i: xs[i])
    xs = [xs[i] for i in order]
    V = V[:, order]
    return tuple(Mode(float(np.mean([xs[i] for i in g])), V[:, g]) for g in _group(xs))


def _solve_qz(Ms, Mc):
    w = scipy.linalg.eigvals(Ms, -Mc, homogeneous_eigvals=True)
    a, b = w
    xs = []
    for ai, bi in zip(a, b):
        if abs(bi) <= 1e-13 * abs(ai):
            xs.append(math.inf)
            continue
        lam = ai / bi
        if abs(lam.imag) <= 1e-9 * (1.0 + abs(lam)):
            xs.append(float(lam.real))
    if not xs:
        raise PencilError("compatibility pencil has no real roots; Ms is not positive definite")
    xs.sort(key=lambda x: (math.isinf(x), x))
    modes = []
    for g in _group(xs):
        x = xs[g[0]] if math.isinf(xs[g[0]]) else float(np.mean([xs[i] for i in g]))
        M = Mc if math.isinf(x) else Ms + x * Mc
        _, _, vh = np.linalg.svd(M)
        basis = vh[-len(g):].T
        modes.append(Mode(x, basis))
    return tuple(modes)


def solve_phases(Ms, Mc, k: float, background: float = 0.0) -> PhaseSolution:
    """All real roots ``x = tan(eta)`` of ``det(Ms + x Mc) = 0`` with null vectors.

    Roots closer than ``1e-8 (1 + |x|)`` are merged into one degenerate mode.
    ``x = inf`` (``eta = pi/2``) appears for null directions of ``Mc``.
    """
    Ms = np.asarray(Ms, dtype=float)
    Mc = np.asarray(Mc, dtype=float)
    for name, M in (("Ms", Ms), ("Mc", Mc)):
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise PencilError(f"{name} must be square")
        if not np.allclose(M, M.T, rtol=1e-12, atol=1e-14 * (1.0 + np.abs(M).max())):
            raise PencilError(f"{name} is not symmetric")
    if Ms.shape != Mc.shape:
        raise PencilError("Ms and Mc differ in shape")
    try:
        np.linalg.cholesky(Ms)
    except np.linalg.LinAlgError:
        pass
    else:
        return PhaseSolution(k, _solve_definite(Ms, Mc), background, metric=True)
    for sign in (1.0, -1.0):
        try:
            np.linalg.cholesky(sign * Mc)
        except np.linalg.LinAlgError:
            continue
        LOG.debug("Ms not positive definite; reducing by Mc")
        return PhaseSolution(k, _solve_mc_definite(Ms, sign * Mc, sign), background, metric=False)
    LOG.debug("neither Ms nor Mc definite; using QZ")
    return PhaseSolution(k, _solve_qz(Ms, Mc), background, metric=False)


def _swave_profile(geometry: Geometry, k: float) -> np.ndarray:
    """``psi1(rho_i) / (k rho_i)``: the dressed s-wave about the centre at each site."""
    rho = geometry.radii()
    return dressed_free_wave(k, geometry.background.b, rho) / (k * rho)


def phases(geometry: Geometry, k: float) -> PhaseSolution:
    """Assemble and solve the compatibility system for ``geometry`` at ``k``."""
    kernels = kernels_for(geometry, k)
    Ms, Mc = assemble_system(geometry, kernels, k)
    if geometry.background is None:
        return solve_phases(Ms, Mc, k)
    sol = solve_phases(Ms, Mc, k, background_delta(geometry.background.b, k))
    phi = _swave_profile(geometry, k)
    weights = tuple(float(np.sum((phi @ m.coeffs) ** 2)) for m in sol.modes)
    return replace(sol, background_weights=weights)


def distorted_wave(geometry: Geometry, k: float, points, directions):
    """``Psi1(r, k n)`` for ``points`` (m, 3) and unit ``directions`` (N, 3) -> (N, m).

    The plane wave, with its s-wave about the dressing centre replaced by the
    dressed one when the geometry has a background step.
    """
    pts = np.asarray(points, dtype=float)
    dirs = np.atleast_2d(np.asarray(directions, dtype=float))
    c0 = np.array(geometry.center)
    rel = pts - c0
    shift = np.exp(1j * k * dirs @ c0)[:, None]
    out = np.exp(1j * k * dirs @ rel.T)
    if geometry.background is not None:
        b = geometry.background.b
        rho = np.linalg.norm(rel, axis=1)
        delta = background_delta(b, k)
        corr = (np.exp(1j * delta) * dressed_free_wave(k, b, rho) - np.sin(k * rho)) / (k * rho)
        out = out + corr[None, :]
    return shift * out


def partial_amplitude(mode: Mode, geometry: Geometry, k: float):
    """Return ``n -> A_lambda(n)`` of shape (N, multiplicity).

    ``A(n) = sqrt(k / 4pi) sum_i c_i Psi1(r_i, -k n)``, which is orthonormal on
    the unit sphere when the mode basis is ``Ms``-orthonormal.
    """
    pts = geometry.positions
    coeffs = mode.coeffs * math.sqrt(k / (4.0 * math.pi))

    def amplitude(n):
        n = np.atleast_2d(np.asarray(n, dtype=float))
        return distorted_wave(geometry, k, pts, -n) @ coeffs

    return amplitude


def scattering_amplitude(solution: PhaseSolution, geometry: Geometry, half_phase_factor: bool = False):
    """Return ``F(n, n0)`` for directions arrays (N, 3) evaluated pairwise.

    ``F = F1 + (4pi / 2ik) sum (exp(2i eta) - 1) A(n) A(-n0)``.  Without a
    background ``A(-n0) = conj(A(n0))``; with one, the incoming side must be
    the outgoing distorted wave and the two differ.  With ``half_phase_factor``
    ``exp(i eta) - 1`` is used instead, the unitary factor of eta/2 (for comparison only).
    """
    k = solution.k
    amps = [partial_amplitude(m, geometry, k) for m in solution.modes]
    c0 = np.array(geometry.center)
    d = solution.background_delta

    def F(n, n0):
        n = np.atleast_2d(np.asarray(n, dtype=float))
        n0 = np.atleast_2d(np.asarray(n0, dtype=float))
        out = np.zeros(n.shape[0], dtype=complex)
        if geometry.background is not None:
            out += np.exp(1j * k * (n0 - n) @ c0) * (np.exp(2j * d) - 1) / (2j * k)
        for mode, amp in zip(solution.modes, amps):
            eta = mode.eta
            factor = (np.exp(1j * eta) - 1) if half_phase_factor else (np.exp(2j * eta) - 1)
            out += 4 * math.pi / (2j * k) * factor * np.sum(amp(n) * amp(-n0), axis=1)
        return out

    return F


def mode_cross_section(tan_eta: float, k: float) -> float:
    """``4pi/k^2 * tan^2 / (1 + tan^2)``, i.e. ``4pi sin^2(eta) / k^2``."""
    if math.isinf(tan_eta):
        return 4 * math.pi / (k * k)
    t2 = tan_eta * tan_eta
    return 4 * math.pi / (k * k) * t2 / (1.0 + t2)


def cross_sections(solution: PhaseSolution, k: float | None = None) -> CrossSections:
    """Per-mode and orientation-averaged integral cross sections.

    ``sigma_lambda = 4pi sin^2(eta)/k^2``.  With a dressed background each mode
    also interferes with the background s-wave, adding
    ``4pi/k w Im(sin(eta) e^{i eta} (e^{2i delta} - 1))`` per mode (``w`` its
    background weight) on top of ``4pi sin^2(delta)/k^2``.
    """
    k = solution.k if k is None else k
    if not k > 0:
        raise ZRPError("cross sections need k > 0")
    partial = np.array([mode_cross_section(m.tan_eta, k) for m in solution.modes])
    mult = solution.multiplicities
    total = float(np.dot(partial, mult))
    cross = 0.0
    if solution.background_weights:
        bgf = np.exp(2j * solution.background_delta) - 1
        for m, w in zip(solution.modes, solution.background_weights):
            eta = m.eta
            cross += 4 * math.pi / k * w * (math.sin(eta) * np.exp(1j * eta) * bgf).imag
    bg = 4 * math.pi / (k * k) * math.sin(solution.background_delta) ** 2
    return CrossSections(partial, mult, total, total + bg + cross, bg, float(cross))


def averaged_cross_section(Ms, Mc, k: float) -> float:
    """Orientation-averaged cross section ``-(4pi/k^2) Im tr[(Mc + i Ms)^{-1} Ms]``.

    Needs no eigen-decomposition and stays defined when the pencil has complex
    roots (kernels from a distance table that no point set realizes exactly).
    """
    G = np.linalg.solve(np.asarray(Mc) + 1j * np.asarray(Ms), np.asarray(Ms))
    return float(-4 * math.pi / (k * k) * np.trace(G).imag)
