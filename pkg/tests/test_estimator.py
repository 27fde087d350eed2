import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from dressedzrp.estimator import ZRPCrossSection
from dressedzrp.presets import dress, preset, resolve_sites


def test_params_and_clone():
    est = ZRPCrossSection(preset="silane", alpha=0.3, dress_sites=None)
    p = est.get_params()
    assert p["preset"] == "silane" and p["alpha"] == 0.3
    c = clone(est)
    assert c.get_params() == p and c is not est


def test_predict_requires_fit():
    with pytest.raises(NotFittedError):
        ZRPCrossSection(preset="silane").predict([1.0])


def test_undressed_predict_matches_target():
    E = np.array([0.5, 1.0, 4.0])
    est = ZRPCrossSection(preset="silane", dress_sites=None).fit(E)
    k = np.sqrt(2 * E / 27.2114)
    expected = [preset("silane").ics(kk) for kk in k]
    assert np.allclose(est.predict(E), expected, rtol=1e-14)
    assert np.allclose(est.predict(E[:, None]), expected, rtol=1e-14)


def test_fixed_b():
    est = ZRPCrossSection(dress_b=-0.8).fit([1.0])
    assert est.b_ == -0.8
    t = dress(preset("silane-dressed"), "X", -0.8)
    assert est.predict([0.35])[0] == pytest.approx(t.ics(math.sqrt(0.7 / 27.2114)), rel=1e-14)


def test_fit_recovers_b():
    E = np.geomspace(0.1, 5, 15)
    truth = ZRPCrossSection(dress_b=-1.2).fit(E).predict(E)
    est = ZRPCrossSection().fit(E, truth)
    assert est.b_ == pytest.approx(-1.2, rel=0.07)
    assert est.score(E, truth) > 0.9
    assert len(est.scan_mismatch_) == len(est.scan_b_)


def test_dressed_preset_needs_b():
    with pytest.raises(ValueError):
        ZRPCrossSection().fit([1.0])


def test_bad_inputs():
    with pytest.raises(ValueError):
        ZRPCrossSection(preset="silane", dress_sites=None).fit([-1.0])
    with pytest.raises(ValueError):
        ZRPCrossSection().fit([1.0, 2.0], [1.0])
    with pytest.raises(ValueError):
        ZRPCrossSection(preset="silane", dress_sites=None, energy_unit="K").fit([1.0]).predict([1.0])


def test_site_resolution():
    g = preset("silane").geometry
    assert resolve_sites(g, "X") == [0, 1, 2, 3]
    assert resolve_sites(g, "Y") == [4]
    assert resolve_sites(g, "2") == [1]
    assert resolve_sites(g, "all") == [0, 1, 2, 3, 4]
    with pytest.raises(Exception):
        resolve_sites(g, "Z")


def test_dressed_kernels_mode_replaces_site():
    t = dress(preset("silane-dressed"), "Y", 0.9, mode="dressed-kernels")
    assert t.n == 4 and t.geometry.background.b == 0.9
    assert t.ics(0.3) > 0
