"""Shared conventions: units, channel/site data types and the X_n / YX_n builders.

Everything is in atomic units (hbar = m = 1, Bohr radius = 1), so a particle
with wavenumber ``k`` has energy ``E = k**2 / 2`` Hartree.  The eV conversion
constant is only used at the CLI boundary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

HARTREE_EV = 27.2114
INF = math.inf


class ZRPError(ValueError):
    """Base class for domain errors raised by this package."""


class GeometryError(ZRPError):
    pass


class UnsupportedStructureError(GeometryError):
    pass


class DressingError(ZRPError):
    pass


def is_infinite(value: float) -> bool:
    """True for the free-wave marker ``alpha = inf`` (or ``e = inf``)."""
    return math.isinf(value)


def energy_to_wavenumber(E: float) -> float:
    """Return ``k = sqrt(2E)`` for an energy in Hartree."""
    if not E > 0:
        raise ZRPError(f"energy must be positive, got {E!r}")
    return math.sqrt(2.0 * E)


def wavenumber_to_energy(k: float) -> float:
    if not k > 0:
        raise ZRPError(f"wavenumber must be positive, got {k!r}")
    return 0.5 * k * k


def ev_to_hartree(E_ev):
    return E_ev / HARTREE_EV


def hartree_to_ev(E_ha):
    return E_ha * HARTREE_EV


@dataclass(frozen=True)
class Channel:
    """One partial-wave channel of a generalized ZRP.

    ``alpha`` is the inverse scattering length in units of a0**-(2l+1);
    ``math.inf`` means no scatterer in this channel (free wave).
    """

    l: int
    alpha: float

    def __post_init__(self):
        if int(self.l) != self.l or self.l < 0:
            raise ZRPError(f"angular momentum must be a non-negative integer, got {self.l!r}")
        if math.isnan(self.alpha):
            raise ZRPError("alpha is NaN")

    @property
    def free(self) -> bool:
        return is_infinite(self.alpha)


@dataclass(frozen=True)
class DressingStep:
    """Parameters ``(b, e)`` of one first-order Darboux transformation.

    The prop (seed) function is the solution at ``k = i b`` obeying the ZRP
    boundary condition with inverse scattering length ``e``; ``e = inf``
    selects the regular solution ``sinh(b r)``.
    """

    b: float
    e: float = INF

    def __post_init__(self):
        if self.b == 0 or math.isnan(self.b) or math.isinf(self.b):
            raise DressingError(f"dressing parameter b must be finite and nonzero, got {self.b!r}")
        if math.isnan(self.e):
            raise DressingError("dressing parameter e is NaN")

    @property
    def trivial(self) -> bool:
        """``e = +-b``: the dressed potential vanishes identically."""
        return not is_infinite(self.e) and abs(abs(self.e) - abs(self.b)) <= 1e-15 * abs(self.b)


@dataclass(frozen=True)
class Site:
    """An s-wave ZRP at ``position`` (a0), optionally carrying a trivial dressing."""

    position: tuple
    alpha: float
    dressing: Optional[DressingStep] = None

    def __post_init__(self):
        pos = tuple(float(x) for x in self.position)
        if len(pos) != 3:
            raise GeometryError(f"site position must be a 3-vector, got {self.position!r}")
        object.__setattr__(self, "position", pos)

    @property
    def channel(self) -> Channel:
        return Channel(0, self.alpha)

    @property
    def r(self) -> np.ndarray:
        return np.array(self.position)


@dataclass(frozen=True)
class Geometry:
    """Ordered scatterer sites plus an optional background dressing.

    The background dressing (e = inf prop function) is centred at ``center``;
    sites may not sit on the centre while a background is present.
    """

    sites: tuple
    background: Optional[DressingStep] = None
    center: tuple = (0.0, 0.0, 0.0)
    labels: tuple = field(default=())

    def __post_init__(self):
        sites = tuple(self.sites)
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if self.labels and len(self.labels) != len(sites):
            raise GeometryError("labels must match the number of sites")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i + 1) for i in range(len(sites))))
        else:
            object.__setattr__(self, "labels", tuple(self.labels))
        pos = self.positions
        for i in range(len(sites)):
            for j in range(i):
                if np.linalg.norm(pos[i] - pos[j]) <= 1e-12 * (1.0 + np.abs(pos[i]).max()):
                    raise GeometryError(f"sites {j + 1} and {i + 1} coincide at {sites[i].position}")

    def __len__(self):
        return len(self.sites)

    @property
    def positions(self) -> np.ndarray:
        if not self.sites:
            return np.zeros((0, 3))
        return np.array([s.position for s in self.sites])

    @property
    def alphas(self) -> np.ndarray:
        return np.array([s.alpha for s in self.sites])

    def distances(self) -> np.ndarray:
        """Pairwise distance matrix (zeros on the diagonal)."""
        pos = self.positions
        return np.linalg.norm(pos[:, None, :] - pos[None, :, :], axis=-1)

    def radii(self) -> np.ndarray:
        """Distance of every site from the dressing centre."""
        return np.linalg.norm(self.positions - np.array(self.center), axis=1)

    def rotated(self, rotation: np.ndarray) -> "Geometry":
        """Rigidly rotate sites (and centre) about the origin."""
        rot = np.asarray(rotation, dtype=float)
        sites = tuple(Site(tuple(rot @ s.r), s.alpha, s.dressing) for s in self.sites)
        return Geometry(sites, self.background, tuple(rot @ np.array(self.center)), self.labels)

    def with_alphas(self, alphas: Sequence[float]) -> "Geometry":
        sites = tuple(Site(s.position, a, s.dressing) for s, a in zip(self.sites, alphas))
        return Geometry(sites, self.background, self.center, self.labels)

    def with_dressing(self, index: int, step: Optional[DressingStep]) -> "Geometry":
        sites = list(self.sites)
        s = sites[index]
        sites[index] = Site(s.position, s.alpha, step)
        return Geometry(tuple(sites), self.background, self.center, self.labels)


def _xn_positions(n: int, R: float) -> np.ndarray:
    if n == 2:
        return np.array([[0.0, 0.0, -R / 2], [0.0, 0.0, R / 2]])
    if n == 3:
        rho = R / math.sqrt(3.0)
        ang = 2.0 * math.pi * np.arange(3) / 3.0
        return np.column_stack([rho * np.cos(ang), rho * np.sin(ang), np.zeros(3)])
    if n == 4:
        # alternate corners of a cube with edge R / sqrt(2)
        a = R / (2.0 * math.sqrt(2.0))
        return a * np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)
    raise UnsupportedStructureError(f"X_n is only defined for n in (2, 3, 4), got n={n}")


def build_xn(n: int, R: float, alpha: float = INF) -> Geometry:
    """Equidistant structure of ``n`` identical scatterers, all pair distances ``R``.

    X2 lies on the z axis, X3 in the xy plane and X4 is the tetrahedron inscribed
    in a cube; all are centred on the origin.
    """
    if not R > 0:
        raise GeometryError(f"R must be positive, got {R!r}")
    pos = _xn_positions(int(n), float(R))
    sites = tuple(Site(tuple(p), alpha) for p in pos)
    return Geometry(sites, labels=tuple(f"X{i + 1}" for i in range(n)))


def tetrahedron_edge(D: float) -> float:
    """Edge of the regular tetrahedron whose circumradius is ``D``."""
    return 2.0 * math.sqrt(2.0 / 3.0) * D


def build_yxn(n: int, D: float, alpha: float = INF, beta: float = INF,
              R: Optional[float] = None, y_position=None) -> Geometry:
    """X_n plus a central scatterer Y at distance ``D`` from every X.

    For ``n = 4`` Y sits at the tetrahedron centroid (the origin) and the edge
    is forced to ``R = 2 sqrt(2/3) D``.  For ``n`` in (2, 3) the caller gives
    ``R``; Y defaults to the symmetry axis through the X_n centroid, or may be
    passed explicitly as ``y_position`` (checked for equidistance).

    Y is always the last site and the dressing centre is placed on it.
    """
    n = int(n)
    if not D > 0:
        raise GeometryError(f"D must be positive, got {D!r}")
    if n == 4:
        R_forced = tetrahedron_edge(D)
        if R is not None and abs(R - R_forced) > 1e-12 * R_forced:
            raise GeometryError(f"YX4 requires R = 2 sqrt(2/3) D = {R_forced!r}, got R={R!r}")
        R = R_forced
        xs = _xn_positions(4, R)
        y = np.zeros(3)
        if y_position is not None and np.linalg.norm(np.asarray(y_position, float) - y) > 1e-12 * D:
            raise GeometryError("for YX4 the Y scatterer must sit at the tetrahedron centroid")
    elif n in (2, 3):
        if R is None:
            raise GeometryError(f"YX{n} needs an explicit X-X distance R")
        xs = _xn_positions(n, float(R))
        rho = float(np.linalg.norm(xs[0]))
        if D < rho:
            raise GeometryError(f"D={D} is shorter than the X{n} circumradius {rho}")
        if y_position is None:
            y = np.array([0.0, 0.0, math.sqrt(D * D - rho * rho)]) if n == 3 \
                else np.array([math.sqrt(D * D - rho * rho), 0.0, 0.0])
        else:
            y = np.asarray(y_position, dtype=float)
        dist = np.linalg.norm(xs - y, axis=1)
        if np.max(np.abs(dist - D)) > 1e-12 * D:
            raise GeometryError(f"Y position is not at distance D={D} from every X: {dist}")
    else:
        raise UnsupportedStructureError(f"YX_n is only defined for n in (2, 3, 4), got n={n}")
    sites = tuple(Site(tuple(p), alpha) for p in xs) + (Site(tuple(y), beta),)
    labels = tuple(f"X{i + 1}" for i in range(n)) + ("Y",)
    return Geometry(sites, center=tuple(y), labels=labels)
