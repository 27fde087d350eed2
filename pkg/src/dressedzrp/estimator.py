"""Scikit-learn style wrapper: energies in, integral cross sections out."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from .core import HARTREE_EV, ZRPError, energy_to_wavenumber
from .presets import PRESETS, Target, dress, preset

DEFAULT_B_GRID = np.concatenate([-np.geomspace(3.0, 0.02, 40), np.geomspace(0.02, 3.0, 40)])


def _energies(X) -> np.ndarray:
    E = np.asarray(X, dtype=float)
    if E.ndim == 2:
        if E.shape[1] != 1:
            raise ValueError(f"expected a single energy column, got shape {E.shape}")
        E = E[:, 0]
    elif E.ndim != 1:
        raise ValueError(f"expected energies as (n,) or (n, 1), got shape {E.shape}")
    if not np.all(E > 0):
        raise ValueError("energies must be positive")
    return E


class ZRPCrossSection(RegressorMixin, BaseEstimator):
    """Orientation-averaged ICS of a preset target, optionally dressed.

    ``fit(E, sigma_ref)`` picks the dressing parameter ``b`` from ``b_grid``
    that minimizes the mean squared log-mismatch to the reference curve
    (skipped when ``dress_b`` is given or ``dress_sites`` is ``None``).
    ``predict(E)`` returns the cross section in a0^2.  Energies are in
    ``energy_unit`` ("eV" or "Ha").
    """

    def __init__(self, preset="silane-dressed", alpha=None, beta=None, R=None, D=None,
                 mode="effective-alpha", dress_sites="X", dress_b=None, dress_e=None,
                 b_grid=None, energy_unit="eV"):
        self.preset = preset
        self.alpha = alpha
        self.beta = beta
        self.R = R
        self.D = D
        self.mode = mode
        self.dress_sites = dress_sites
        self.dress_b = dress_b
        self.dress_e = dress_e
        self.b_grid = b_grid
        self.energy_unit = energy_unit

    def _base(self) -> Target:
        over = {k: v for k, v in (("alpha", self.alpha), ("beta", self.beta), ("R", self.R),
                                   ("D", self.D)) if v is not None}
        return preset(self.preset, **over)

    def target(self, b=None) -> Target:
        """Target with dressing parameter ``b`` applied (``None``: undressed)."""
        base = self._base()
        if b is None or self.dress_sites is None:
            return base
        return dress(base, self.dress_sites, b, self.dress_e, self.mode)

    def _k(self, E):
        if self.energy_unit == "eV":
            E = E / HARTREE_EV
        elif self.energy_unit != "Ha":
            raise ValueError(f"energy_unit must be 'eV' or 'Ha', got {self.energy_unit!r}")
        return np.array([energy_to_wavenumber(e) for e in E])

    def curve(self, E, b=None) -> np.ndarray:
        t = self.target(b)
        return np.array([t.ics(k) for k in self._k(_energies(E))])

    def scan(self, E, b_grid=None):
        """Curves for every ``b`` in the grid; rows that fail to evaluate are ``nan``."""
        grid = np.asarray(DEFAULT_B_GRID if b_grid is None else b_grid, dtype=float)
        E = _energies(E)
        out = np.full((len(grid), len(E)), np.nan)
        for i, b in enumerate(grid):
            try:
                out[i] = self.curve(E, b)
            except ZRPError:
                pass
        return grid, out

    def fit(self, X, y=None):
        E = _energies(X)
        self.n_features_in_ = 1
        needs = PRESETS.get(self.preset, {}).get("needs_dressing", False)
        if self.dress_sites is None:
            self.b_ = None
        elif self.dress_b is not None:
            self.b_ = float(self.dress_b)
        else:
            if y is None:
                if needs:
                    raise ValueError(f"preset {self.preset!r} needs dress_b or a reference curve")
                self.b_ = None
            else:
                y = np.asarray(y, dtype=float).ravel()
                if y.shape != E.shape or not np.all(y > 0):
                    raise ValueError("reference cross sections must be positive and match the energies")
                grid, curves = self.scan(E, self.b_grid)
                with np.errstate(invalid="ignore", divide="ignore"):
                    mismatch = np.mean((np.log(curves) - np.log(y)) ** 2, axis=1)
                mismatch[~np.isfinite(mismatch)] = np.inf
                if not np.isfinite(mismatch).any():
                    raise ZRPError("no b in the grid gives a valid curve")
                best = int(np.argmin(mismatch))
                self.b_ = float(grid[best])
                self.scan_b_ = grid
                self.scan_mismatch_ = mismatch
        return self

    def predict(self, X):
        check_is_fitted(self, "n_features_in_")
        return self.curve(X, self.b_)
