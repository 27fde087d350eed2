"""Independent numerical verifiers.

* ``integrate_phase`` - fixed-step RK4 integration of the radial equation with
  a least-squares tail fit for the phase shift.
* ``det_scan`` - roots of ``det(Ms + x Mc)`` by scanning the eigenvalues of the
  symmetric matrix ``cos(t) Ms + sin(t) Mc`` over the projective line.
* ``sphere_quadrature`` - Gauss-Legendre x trapezoid product rule on the sphere.
* finite-difference and Richardson helpers used by the tests.

None of these call into the solvers they are used to check.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar
from scipy.special import spherical_jn, spherical_yn

DEFAULT_QUADRATURE_ORDER = 48


class OracleError(ValueError):
    pass


class OracleAccuracyError(OracleError):
    pass


@dataclass(frozen=True)
class RadialGrid:
    """Radial nodes from ``r_min`` to ``r_max``.

    Below ``step / ratio`` the spacing grows geometrically (``h_i = ratio * r_i``)
    so potentials and start conditions singular at the origin are resolved;
    beyond that the grid is uniform with spacing ``step``.
    """

    r_min: float
    r_max: float
    step: float
    ratio: float = 0.01

    def __post_init__(self):
        if not self.r_min > 0 or not self.r_max > self.r_min or not self.step > 0 or not self.ratio > 0:
            raise OracleError(f"invalid grid {self}")

    @property
    def graded(self) -> np.ndarray:
        pts = []
        r = self.r_min
        while r * self.ratio < self.step and r < self.r_max:
            pts.append(r)
            r *= 1.0 + self.ratio
        return np.asarray(pts)

    @property
    def uniform_start(self) -> float:
        g = self.graded
        return float(g[-1]) if len(g) else self.r_min

    @property
    def nodes(self) -> np.ndarray:
        g = self.graded
        r0 = self.uniform_start
        m = int(round((self.r_max - r0) / self.step))
        uni = r0 + self.step * np.arange(m + 1)
        return np.concatenate([g[:-1], uni]) if len(g) else uni

    @property
    def size(self) -> int:
        return len(self.nodes)


def _path(grid: RadialGrid, detours: Sequence[float], radius: float):
    """Integration nodes along the real axis with upper semicircles around ``detours``.

    Detours replace a run of nodes; the remaining real nodes are unchanged.
    """
    h = grid.step
    r_nodes = grid.nodes
    pts = []
    j = 0
    for p in sorted(detours):
        if radius is None:
            radius = min(1.0, 0.75 * (p - grid.r_min))
        lo = int(np.searchsorted(r_nodes, p - radius)) - 1
        hi = int(np.searchsorted(r_nodes, p + radius))
        if lo <= j or hi >= len(r_nodes) - 1:
            raise OracleError(f"detour around r={p} does not fit inside the grid")
        pts.extend(r_nodes[j:lo + 1])
        a, b = r_nodes[lo], r_nodes[hi]
        centre, rad = 0.5 * (a + b), 0.5 * (b - a)
        m = max(8, int(math.ceil(math.pi * rad / h)))
        ang = np.linspace(math.pi, 0.0, m + 1)[1:-1]
        pts.extend(centre + rad * np.exp(1j * ang))
        j = hi
    pts.extend(r_nodes[j:])
    return np.asarray(pts, dtype=complex), j


def _riccati(l, x):
    return x * spherical_jn(l, x), -x * spherical_yn(l, x)


def integrate_phase(u: Callable, l: int, k, grid: RadialGrid, alpha: float | None = None,
                    start_power: int | None = None, detours: Sequence[float] = (),
                    detour_radius: float | None = None, tail_fraction: float = 0.25,
                    fit_tol: float = 1e-6) -> np.ndarray | float:
    """Phase shift ``tan(eta)`` of ``-psi'' + (2u + l(l+1)/r^2) psi = k^2 psi``.

    Start conditions at ``grid.r_min``: with ``alpha`` the ZRP condition
    ``psi'/psi = -alpha`` at the origin, with the potential neglected below
    ``r_min`` (s-wave, ``alpha = inf`` meaning ``psi(0) = 0``); otherwise the regular ``psi = r^p`` with
    ``p = start_power`` (default ``l + 1``).  ``u`` must accept complex
    arguments when ``detours`` (real pole positions) are given; the path then
    bypasses each pole on an upper semicircle of ``detour_radius`` (default
    ``min(1, 0.75 r_pole)``), which is exact for poles without monodromy.

    The tail fit (last ``tail_fraction`` of the grid) uses, for ``l = 0``, the
    exact discrete free solution of RK4 so the scheme's dispersion in the
    asymptotic region does not bias the phase.
    """
    scalar = np.ndim(k) == 0
    k = np.atleast_1d(np.asarray(k, dtype=float))
    if np.any(k <= 0):
        raise OracleError("k must be positive")
    z, j_tail_seg = _path(grid, detours, detour_radius)
    r_real = grid.nodes

    half = r_real[r_real >= 0.5 * grid.r_max]
    tail_u = np.abs(np.real(u(half))) * half ** 2
    if not np.all(np.isfinite(tail_u)) or tail_u[-1] > 0.5 * tail_u[0] + 1e-14:
        raise OracleError("potential does not decay faster than 1/r^2 on the outer half of the grid")

    mid = 0.5 * (z[1:] + z[:-1])
    cent = l * (l + 1)

    def vpot(x):
        out = 2.0 * np.asarray(u(x), dtype=complex)
        if cent:
            out = out + cent / x ** 2
        return out

    V0 = vpot(z)
    Vm = vpot(mid)
    if not (np.all(np.isfinite(V0)) and np.all(np.isfinite(Vm))):
        raise OracleError("potential is not finite on the integration path")
    dz = np.diff(z)
    if np.max(np.abs(V0[:-1]) * np.abs(dz) ** 2) > 1.0 or np.max(np.abs(Vm) * np.abs(dz) ** 2) > 1.0:
        raise OracleError("step too coarse for the potential (|2u| h^2 > 1); potential singular on the path?")

    r0 = grid.r_min
    k2 = k * k
    if alpha is not None and math.isinf(alpha):
        alpha, start_power = None, 1
    if alpha is not None:
        if l != 0:
            raise OracleError("ZRP start condition is s-wave only")
        # free solution obeying psi'/psi = -alpha at the origin, carried to r_min
        y = (np.cos(k * r0) - alpha * np.sin(k * r0) / k).astype(complex)
        yp = (-k * np.sin(k * r0) - alpha * np.cos(k * r0)).astype(complex)
    else:
        p = l + 1 if start_power is None else start_power
        y = np.full(k.shape, r0 ** p, dtype=complex)
        yp = np.full(k.shape, p * r0 ** (p - 1), dtype=complex)

    n = len(z)
    psi = np.empty((n, k.size), dtype=complex)
    psi[0] = y
    for i in range(n - 1):
        h = dz[i]
        a0, am, a1 = V0[i] - k2, Vm[i] - k2, V0[i + 1] - k2
        k1y, k1p = yp, a0 * y
        k2y, k2p = yp + 0.5 * h * k1p, am * (y + 0.5 * h * k1y)
        k3y, k3p = yp + 0.5 * h * k2p, am * (y + 0.5 * h * k2y)
        k4y, k4p = yp + h * k3p, a1 * (y + h * k3y)
        y = y + h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y)
        yp = yp + h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p)
        psi[i + 1] = y

    # tail window on the final straight segment
    n_tail = max(16, int(tail_fraction * grid.size))
    seg_len = len(r_real) - j_tail_seg
    if n_tail > seg_len:
        raise OracleError("tail window overlaps a detour")
    rt = r_real[-n_tail:]
    pt = psi[-n_tail:]
    if np.max(np.abs(pt.imag)) > 1e-6 * np.max(np.abs(pt.real)):
        raise OracleAccuracyError("solution did not return real from the complex detour")
    pt = pt.real
    h = grid.step
    out = np.empty(k.size)
    for m, kk in enumerate(k):
        if l == 0:
            lam = np.polyval([1 / 24, 1 / 6, 1 / 2, 1, 1], 1j * kk * h)
            theta, mod = np.angle(lam), np.abs(lam)
            jj = np.arange(n_tail)
            env = mod ** jj
            basis = np.column_stack([env * np.sin(theta * jj), env * np.cos(theta * jj)])
        else:
            jr, nr = _riccati(l, kk * rt)
            basis = np.column_stack([jr, nr])
        coef, *_ = np.linalg.lstsq(basis, pt[:, m], rcond=None)
        resid = pt[:, m] - basis @ coef
        amp = np.hypot(*coef)
        if np.sqrt(np.mean(resid ** 2)) > fit_tol * amp:
            raise OracleAccuracyError(
                f"tail fit residual {np.sqrt(np.mean(resid ** 2)) / amp:.2e} exceeds {fit_tol:.0e} at k={kk}")
        if l == 0:
            k_num = theta / h
            phi_tail = math.atan2(coef[1], coef[0])
            ru = grid.uniform_start
            eta = phi_tail - kk * ru - k_num * (rt[0] - ru)
            out[m] = math.tan(eta)
        else:
            out[m] = coef[1] / coef[0]
    return float(out[0]) if scalar else out


def _branch_eigs(Ms, Mc, thetas):
    M = np.cos(thetas)[:, None, None] * Ms[None] + np.sin(thetas)[:, None, None] * Mc[None]
    return np.linalg.eigvalsh(M)


def det_scan(Ms, Mc, x_range=None, samples: int = 2000, tol: float = 1e-13) -> list:
    """Real roots of ``det(Ms + x Mc) = 0`` with multiplicity, ascending (``inf`` last).

    ``det`` factorizes into the eigenvalue branches of the symmetric matrix
    ``cos(t) Ms + sin(t) Mc`` with ``x = tan(t)``; each sign change of a sorted
    branch is bracketed and bisected, so a k-fold root shows up as k crossings.
    Branches that touch zero without crossing are located as local minima of
    ``|eigenvalue|`` and accepted only if the minimum is numerically zero.
    Without ``x_range`` the whole projective line (including ``x = inf``) is
    scanned.
    """
    Ms = np.asarray(Ms, dtype=float)
    Mc = np.asarray(Mc, dtype=float)
    scale = np.linalg.norm(Ms, 2) + np.linalg.norm(Mc, 2)
    if x_range is None:
        # rotate the seam of the projective line to a well-conditioned point
        best, t0 = -1.0, 0.0
        for cand in np.linspace(0.1, 3.0, 30):
            w = np.min(np.abs(np.linalg.eigvalsh(math.cos(cand) * Ms + math.sin(cand) * Mc)))
            if w > best:
                best, t0 = w, cand
        lo, hi = t0 - math.pi / 2, t0 + math.pi / 2
    else:
        lo, hi = math.atan(x_range[0]), math.atan(x_range[1])
    ts = np.linspace(lo, hi, samples + 1)
    ev = _branch_eigs(Ms, Mc, ts)

    def branch(j):
        return lambda t: np.linalg.eigvalsh(math.cos(t) * Ms + math.sin(t) * Mc)[j]

    found = []
    n = Ms.shape[0]
    for j in range(n):
        g = branch(j)
        e = ev[:, j]
        for i in range(samples):
            a, b = e[i], e[i + 1]
            if a == 0.0:
                found.append(ts[i])
            elif a * b < 0:
                found.append(brentq(g, ts[i], ts[i + 1], xtol=1e-15, rtol=1e-15, maxiter=200))
        # tangential zeros
        absd = np.abs(e)
        for i in range(1, samples):
            if absd[i] < absd[i - 1] and absd[i] <= absd[i + 1] and e[i - 1] * e[i + 1] > 0:
                res = minimize_scalar(lambda t: abs(g(t)), bounds=(ts[i - 1], ts[i + 1]),
                                      method="bounded", options={"xatol": 1e-14})
                if abs(res.fun) <= 1e3 * tol * scale:
                    warnings.warn(f"det_scan: tangential (even-multiplicity) root near t={res.x:.6g}")
                    found.extend([res.x, res.x])
    roots = []
    for t in found:
        c = math.cos(t)
        roots.append(math.inf if abs(c) < 1e-15 else math.tan(t))
    roots.sort(key=lambda x: (math.isinf(x), x))
    return roots


def sphere_nodes(order: int = DEFAULT_QUADRATURE_ORDER):
    """Directions (N, 3) and weights (N,) of the product rule; weights sum to 4 pi."""
    mu, wmu = np.polynomial.legendre.leggauss(order)
    nphi = 2 * order
    phi = 2 * math.pi * np.arange(nphi) / nphi
    st = np.sqrt(1.0 - mu ** 2)
    dirs = np.stack(np.broadcast_arrays(
        st[:, None] * np.cos(phi)[None, :], st[:, None] * np.sin(phi)[None, :],
        mu[:, None] * np.ones(nphi)[None, :]), axis=-1).reshape(-1, 3)
    w = (wmu[:, None] * np.full(nphi, 2 * math.pi / nphi)[None, :]).reshape(-1)
    return dirs, w


def sphere_quadrature(f: Callable, order: int = DEFAULT_QUADRATURE_ORDER):
    """Integral of ``f`` over the unit sphere; ``f`` maps (N, 3) directions to (N, ...) values."""
    dirs, w = sphere_nodes(order)
    vals = np.asarray(f(dirs))
    return np.tensordot(w, vals, axes=(0, 0))


def second_derivative(f: Callable, r, h: float):
    """Fourth-order central difference of ``f`` at ``r``."""
    r = np.asarray(r, dtype=float)
    return (-f(r + 2 * h) + 16 * f(r + h) - 30 * f(r) + 16 * f(r - h) - f(r - 2 * h)) / (12 * h * h)


def schrodinger_residual(psi: Callable, u: Callable, k: float, r, h: float = 1e-3):
    """``-psi'' + 2u psi - k^2 psi`` by finite differences."""
    r = np.asarray(r, dtype=float)
    return -second_derivative(psi, r, h) + (2 * u(r) - k * k) * psi(r)


def richardson_limit(f: Callable, h0: float, levels: int = 5):
    """Limit of ``f(h)`` as ``h -> 0`` from ``f(h0), f(h0/2), ...`` (error series in powers of h)."""
    table = [[f(h0 / 2 ** i)] for i in range(levels)]
    for j in range(1, levels):
        for i in range(j, levels):
            prev, cur = table[i - 1][j - 1], table[i][j - 1]
            table[i].append(cur + (cur - prev) / (2 ** j - 1))
    return table[-1][-1]
