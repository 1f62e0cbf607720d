import math

import numpy as np
import pytest

from genfunlab.config import DEFAULT_CONFIG
from genfunlab.core import GeneralizedPoint, point_value
from genfunlab.gallery import UnknownName, gallery, gallery_names
from genfunlab.pairing import make_battery, pair, weak_equal
from genfunlab.scales import estimate_order
from genfunlab.testfun import Battery, TestFunction, bump

EPS = DEFAULT_CONFIG.grid.array


def test_names_and_unknown():
    names = gallery_names()
    assert "weak_point_support" in names and "etau_counterexample" in names
    with pytest.raises(UnknownName):
        gallery("does_not_exist")


def test_weak_point_support_vanishes_left_of_origin():
    f = gallery("weak_point_support").gf
    for eps in (EPS[0], EPS[10], EPS[-1]):
        xs = np.linspace(-2.0, eps / 8.0, 50)
        assert np.all(f.eval(eps, xs, 0) == 0.0)


def test_weak_point_support_closed_form_on_positive_axis():
    f = gallery("weak_point_support").gf
    eps = EPS[5]
    xs = np.array([0.5, 1.0, 2.0])
    expected = np.exp(-xs * math.log(eps) ** 2)
    assert np.allclose(f.eval(eps, xs, 0), expected, rtol=1e-12)


def test_weak_point_support_pierced_battery_zero():
    f = gallery("weak_point_support").gf
    rep = weak_equal(f, None, make_battery("pierced", "bump"))
    assert rep.weakly_equal


def test_weak_point_support_phi0_pairing_not_negligible():
    # phi0 = exp(1/(x(x-2))) on (0,2) reaches down to the origin; the measured
    # slope (about sqrt(2) up to log factors) is recorded, far below the
    # negligibility threshold
    def phi0_raw(x, k=0):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        m = (x > 1e-12) & (x < 2.0 - 1e-12)
        if k == 0:
            out[m] = np.exp(1.0 / (x[m] * (x[m] - 2.0)))
        else:
            raise NotImplementedError
        return out

    phi0 = TestFunction(1, lambda x, b: phi0_raw(x, b[0]), (0.0, 2.0), "bump", "phi0")
    f = gallery("weak_point_support").gf
    c = pair(f, phi0)
    rep = c.order
    assert not rep.negligible
    assert rep.fitted_slope <= 4.0
    assert 1.0 <= rep.fitted_slope <= 2.0      # measured ~ 1.5 on this grid


def test_radial_oscillator_point_value():
    entry = gallery("radial_oscillator")
    f = entry.gf
    one = GeneralizedPoint.constant(1.0)
    c = point_value(f, one)
    assert c.order.fitted_slope == pytest.approx(-1.0, abs=0.1)
    rho0 = entry.meta["expected"]["point_value_at_1_coefficient"]
    assert c.samples[0].real == pytest.approx(rho0 / EPS[0], rel=1e-9)


def test_radial_oscillator_weakly_zero_1d():
    f = gallery("radial_oscillator").gf
    rep = weak_equal(f, None, make_battery("full", "bump"))
    assert rep.weakly_equal


def test_radial_oscillator_plane_weakly_zero():
    f = gallery("radial_oscillator", dim=2).gf
    bat = make_battery("pierced", "polar", dim=2, count=6)
    rep = weak_equal(f, None, bat)
    assert rep.weakly_equal


def test_etau_counterexample_growth_violation():
    f = gallery("etau_counterexample").gf
    N = 3
    xs = np.linspace(-N, N, 301)
    for eps in EPS:
        vals = np.abs(f.eval(eps, xs, 0)) * (1.0 + np.abs(xs)) ** (-N)
        assert np.max(vals) >= eps ** (-N), eps


def test_etau_counterexample_derivative_recurrence():
    f = gallery("etau_counterexample").gf
    eps = 0.25
    h = 1e-6
    x0 = 0.4
    fd = (f.eval(eps, np.array([x0 + h]), 0)[0] - f.eval(eps, np.array([x0 - h]), 0)[0]) / (2 * h)
    an = f.eval(eps, np.array([x0]), (1,))[0]
    assert abs(fd - an) / abs(an) < 1e-6


def test_etau_counterexample_weakly_zero_battery():
    f = gallery("etau_counterexample").gf
    rep = weak_equal(f, None, make_battery("full", "bump"))
    assert rep.weakly_equal


def test_density_counterexample():
    bat = Battery(tuple(make_battery("full", "bump"))[:6], "six", "full")
    entry = gallery("density_counterexample", battery=bat)
    f = entry.gf
    phi0 = entry.meta["phi0"]
    # zero on every battery element, unit on the extra target
    for phi in bat:
        c = pair(f, phi)
        assert estimate_order(c.pairs(), resolution=np.asarray(c.resolution) + 1e-8).negligible, phi.label
    c0 = pair(f, phi0)
    diff = [(e, v - 1.0) for e, v in c0.pairs()]
    rep = estimate_order(diff, resolution=np.asarray(c0.resolution) + 1e-8)
    assert rep.negligible


def test_plateau_net_shape():
    entry = gallery("plateau_net")
    obj = entry.meta["gen_test_object"]
    for eps in (0.25, EPS[-1]):
        tf = obj.at_eps(eps)
        assert np.all(tf(np.linspace(-eps / 2, eps / 2, 9)) == 0.0)
        xs = np.linspace(2 * eps, 1.9, 9)
        assert np.allclose(tf(xs), 1.0)
    # moderate growth of derivatives up to the declared degree
    eps = EPS[8]
    tf = obj.at_eps(eps)
    xs = np.linspace(-3 * eps, 3 * eps, 400)
    for k in (1, 2, 3, 4):
        sup = float(np.max(np.abs(tf(xs, k))))
        assert sup <= 50.0 * eps ** (-k)
