"""Named targets and the ``Target`` model shared by the CLI and the estimator.

A target couples a real-space ``Geometry`` (alphas, dressings, background)
with the distance table that feeds the free kernels.  For the tabulated
presets the two differ slightly: ``silane`` quotes R = 4.51 next to D = 2.76,
while the exact tetrahedron has R = 4.5071.  Free kernels use the quoted
table; a dressed background needs real positions and uses the geometry.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .core import (INF, DressingError, DressingStep, Geometry, GeometryError, Site, ZRPError,
                   build_xn, build_yxn, is_infinite)
from .darboux import background_delta
from .greens import dressed_kernels, kernels_from_distances
from .multicenter import (PhaseSolution, assemble_system, averaged_cross_section, cross_sections,
                          mode_cross_section, phases, solve_phases)
from .structures import QuadraticError, xn_phases, yxn_phases

PRESETS = {
    "single": {"structure": "single", "alpha": 0.33},
    "x2": {"structure": "xn", "n": 2, "R": 4.51, "alpha": 0.33},
    "x3": {"structure": "xn", "n": 3, "R": 4.51, "alpha": 0.33},
    "x4": {"structure": "xn", "n": 4, "R": 4.51, "alpha": 0.33},
    "yx4": {"structure": "yxn", "n": 4, "D": 2.76, "alpha": 0.33, "beta": 0.41},
    "silane": {"structure": "yxn", "n": 4, "R": 4.51, "D": 2.76, "alpha": 0.33, "beta": 0.41},
    "silane-dressed": {"structure": "yxn", "n": 4, "R": 4.51, "D": 2.76, "alpha": 0.35, "beta": 0.38,
                       "needs_dressing": True},
}

MODES = ("effective-alpha", "dressed-kernels")


@dataclass(frozen=True)
class Target:
    """Scattering target: geometry plus the distance table for free kernels."""

    geometry: Geometry
    table: np.ndarray
    structure: str = "general"
    params: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.geometry)

    @property
    def dressed(self) -> bool:
        g = self.geometry
        return g.background is not None or any(s.dressing is not None for s in g.sites)

    def system(self, k: float):
        g = self.geometry
        if g.background is not None:
            kernels = dressed_kernels(g, k)
        else:
            kernels = kernels_from_distances(self.table, k)
        return assemble_system(g, kernels, k)

    def solve(self, k: float) -> PhaseSolution:
        """Phases from the generalized eigenproblem."""
        g = self.geometry
        if self.n == 0:
            return PhaseSolution(k, (), background_delta(g.background.b, k))
        if g.background is not None:
            return phases(g, k)
        Ms, Mc = self.system(k)
        return solve_phases(Ms, Mc, k)

    def closed_form(self, k: float):
        """Closed-form result for undressed X_n / YX_n / single targets, else ``None``."""
        if self.dressed:
            return None
        p = self.params
        if self.structure == "xn":
            return xn_phases(p["n"], p["R"], p["alpha"], k)
        if self.structure == "yxn":
            return yxn_phases(p["n"], p["R"], p["D"], p["alpha"], p["beta"], k)
        return None

    def tan_etas(self, k: float, fast: bool = True) -> np.ndarray:
        """All ``n`` values of ``tan(eta)`` ascending, repeated by multiplicity.

        Complex pencil roots (possible for tabulated distances) give ``nan``.
        """
        if fast:
            try:
                cf = self.closed_form(k)
            except QuadraticError:
                cf = None
            if cf is not None:
                return cf.tan_etas
        if self.structure == "single" and not self.dressed:
            return np.array([-k / self.params["alpha"]])
        vals = self.solve(k).tan_etas
        if len(vals) < self.n:
            vals = np.concatenate([vals, np.full(self.n - len(vals), np.nan)])
        return vals

    def ics(self, k: float) -> float:
        """Orientation-averaged integral cross section (a0^2)."""
        if self.geometry.background is not None:
            return cross_sections(self.solve(k)).averaged
        Ms, Mc = self.system(k)
        return averaged_cross_section(Ms, Mc, k)

    def channel_sections(self, k: float, fast: bool = True) -> np.ndarray:
        """Per-channel ``4pi sin^2(eta)/k^2`` in ``tan_etas`` order (undressed background)."""
        if self.geometry.background is not None:
            sol = self.solve(k)
            cs = cross_sections(sol)
            return np.repeat(cs.partial, cs.multiplicities)
        tans = self.tan_etas(k, fast)
        return np.array([np.nan if np.isnan(t) else mode_cross_section(t, k) for t in tans])


def _table(n: int, R: float, D: Optional[float]) -> np.ndarray:
    m = n + (D is not None)
    t = np.full((m, m), float(R))
    if D is not None:
        t[n, :] = D
        t[:, n] = D
    np.fill_diagonal(t, 0.0)
    return t


def make_target(structure: str, n: int = 1, alpha: float = INF, beta: float = INF,
                R: Optional[float] = None, D: Optional[float] = None) -> Target:
    """Build a ``single``, ``xn`` or ``yxn`` target.

    For ``yxn`` with ``n = 4`` and a given ``R`` the positions use the exact
    tetrahedron from ``D`` while the kernel table keeps the given ``R``.
    """
    if structure == "single":
        if is_infinite(alpha):
            raise ZRPError("single target needs a finite alpha")
        g = Geometry((Site((0.0, 0.0, 0.0), alpha),), labels=("X1",))
        return Target(g, np.zeros((1, 1)), "single", {"alpha": alpha})
    n = int(n)
    if structure == "xn":
        if R is None:
            raise GeometryError("xn needs R")
        g = build_xn(n, R, alpha)
        return Target(g, _table(n, R, None), "xn", {"n": n, "R": R, "alpha": alpha})
    if structure == "yxn":
        if D is None:
            raise GeometryError("yxn needs D")
        if n == 4:
            g = build_yxn(4, D, alpha, beta)
            if R is None:
                R = math.dist(g.sites[0].position, g.sites[1].position)
        else:
            g = build_yxn(n, D, alpha, beta, R=R)
        return Target(g, _table(n, R, D), "yxn",
                      {"n": n, "R": R, "D": D, "alpha": alpha, "beta": beta})
    raise ZRPError(f"unknown structure {structure!r}")


def preset(name: str, **overrides) -> Target:
    """Target for a named preset; keyword overrides replace its parameters."""
    if name not in PRESETS:
        raise ZRPError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    cfg = {k: v for k, v in PRESETS[name].items() if k != "needs_dressing"}
    unknown = set(overrides) - {"n", "alpha", "beta", "R", "D"}
    if unknown:
        raise ZRPError(f"unknown preset parameter(s): {', '.join(sorted(unknown))}")
    cfg.update(overrides)
    return make_target(**cfg)


def target_from_geometry(geometry: Geometry) -> Target:
    """Wrap a geometry; sites dressed with ``e = inf`` become the background centre."""
    bg = [i for i, s in enumerate(geometry.sites)
          if s.dressing is not None and is_infinite(s.dressing.e)]
    if len(bg) > 1:
        raise DressingError("only one background (e = inf) dressing is supported")
    if bg:
        geometry = _to_background(geometry, bg[0])
    return Target(geometry, geometry.distances())


def _to_background(geometry: Geometry, index: int) -> Geometry:
    if geometry.background is not None:
        raise DressingError("geometry already has a background dressing")
    site = geometry.sites[index]
    keep = [i for i in range(len(geometry)) if i != index]
    return Geometry(tuple(geometry.sites[i] for i in keep), DressingStep(site.dressing.b),
                    site.position, tuple(geometry.labels[i] for i in keep))


def resolve_sites(geometry: Geometry, selector: str) -> list:
    """Site indices for a label, a 1-based number, ``X`` (all X sites) or ``all``."""
    labels = geometry.labels
    if selector == "all":
        return list(range(len(labels)))
    if selector in labels:
        return [labels.index(selector)]
    if selector == "X":
        idx = [i for i, lab in enumerate(labels) if lab.startswith("X")]
        if idx:
            return idx
    if selector.isdigit() and 1 <= int(selector) <= len(labels):
        return [int(selector) - 1]
    raise GeometryError(f"no site {selector!r}; sites are {', '.join(labels)}")


def dress(target: Target, sites: str, b: float, e: Optional[float] = None,
          mode: str = "effective-alpha") -> Target:
    """Apply one dressing step to the named site(s).

    Without ``e`` the mode decides: ``effective-alpha`` uses the trivial step
    ``e = -b`` (boundary condition only), ``dressed-kernels`` uses ``e = inf``
    which turns the site into the dressed background centre.
    """
    if mode not in MODES:
        raise ZRPError(f"mode must be one of {MODES}, got {mode!r}")
    if e is None:
        e = -b if mode == "effective-alpha" else INF
    step = DressingStep(b, e)
    idx = resolve_sites(target.geometry, sites)
    g = target.geometry
    if is_infinite(e):
        if len(idx) != 1:
            raise DressingError("a background (e = inf) dressing needs exactly one site")
        g = _to_background(g.with_dressing(idx[0], step), idx[0])
        keep = [i for i in range(target.n) if i != idx[0]]
        return replace(target, geometry=g, table=target.table[np.ix_(keep, keep)])
    if not step.trivial:
        raise DressingError(
            f"site dressing needs e = +-b (got b={b}, e={e}); finite e != +-b changes the potential "
            "and is not supported in the multi-centre system")
    for i in idx:
        g = g.with_dressing(i, step)
    return replace(target, geometry=g)


def energy_grid(emin: float, emax: float, count: int, log: bool = False) -> np.ndarray:
    if not (emin > 0 and emax > emin):
        raise ZRPError(f"energy grid needs 0 < emin < emax, got {emin}, {emax}")
    if count < 2:
        raise ZRPError(f"grid needs at least 2 points, got {count}")
    return np.geomspace(emin, emax, count) if log else np.linspace(emin, emax, count)
