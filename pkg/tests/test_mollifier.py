import math

import numpy as np
import pytest
from scipy.integrate import quad

from genfunlab.mollifier import build_mollifier, cutoff_hat


@pytest.fixture(scope="module")
def moll():
    return build_mollifier()


def test_cutoff_shape():
    xi = np.array([0.0, 0.5, 1.0, 1.5, 2.0, 3.0])
    v = cutoff_hat(xi)
    assert v[0] == 1.0 and v[1] == 1.0 and v[2] == 1.0
    assert 0.0 < v[3] < 1.0
    assert v[4] == 0.0 and v[5] == 0.0
    # bridge symmetry psi(u) + psi(1-u) = 1 makes the transition balanced
    assert cutoff_hat(np.array([1.25]))[0] + cutoff_hat(np.array([1.75]))[0] == pytest.approx(1.0)


def test_rho_center_value(moll):
    # rho(0) = (1/pi)(1 + int_0^1 bridge) = 3/(2 pi) by bridge symmetry
    assert float(moll.rho(np.array([0.0]))[0]) == pytest.approx(3.0 / (2.0 * math.pi), abs=1e-13)


def test_unit_mass(moll):
    # independent quadrature oracle (limited by quad's own tolerance) plus the
    # tight internal closure check of the cached antiderivative
    val, _ = quad(lambda t: float(moll.rho(np.array([t]))[0]), -500, 500, limit=4000)
    assert val == pytest.approx(1.0, abs=2e-8)
    assert abs(float(moll.tables._arrays["M_0_total_defect"][0])) < 1e-12


def test_vanishing_moments_oracle(moll):
    for m in (1, 2):
        val, _ = quad(lambda t: t ** m * float(moll.rho(np.array([t]))[0]),
                      -500, 500, limit=4000)
        assert abs(val) < 1e-7, m     # quad's own accuracy dominates here
    # table route is tighter
    t = moll.tables
    for m in (1, 2, 3):
        assert abs(float(t._arrays[f"M_{m}_total_defect"][0])) < 1e-10


def test_rapid_decay_envelope(moll):
    # |rho(t)| <= C_k (1+|t|)^-k for every k <= 6: the weighted envelope must
    # peak in the interior and fall by orders of magnitude toward the edge,
    # witnessing super-polynomial decay with a finite C_k
    ts = np.linspace(1.0, 480.0, 960)
    vals = np.abs(moll.rho(ts))
    for k in range(1, 7):
        ratio = vals * (1 + ts) ** float(k)
        peak = int(np.argmax(ratio))
        assert ts[peak] < 300.0, k
        assert ratio[-1] < 1e-3 * ratio[peak], k


def test_derivative_tables_consistent(moll):
    # spline of rho' vs finite differences of rho
    for t0 in (0.3, 1.7, -2.4, 9.9):
        h = 1e-5
        fd = (float(moll.rho(np.array([t0 + h]))[0]) - float(moll.rho(np.array([t0 - h]))[0])) / (2 * h)
        an = float(moll.rho(np.array([t0]), 1)[0])
        assert an == pytest.approx(fd, abs=1e-8)


def test_antiderivative(moll):
    t = moll.tables
    assert float(t.P(np.array([-600.0]))[0]) == 0.0
    assert float(t.P(np.array([600.0]))[0]) == 1.0
    # P' = rho
    h = 1e-5
    for s in (0.0, 1.3, -2.8):
        fd = (float(t.P(np.array([s + h]))[0]) - float(t.P(np.array([s - h]))[0])) / (2 * h)
        assert fd == pytest.approx(float(moll.rho(np.array([s]))[0]), abs=1e-8)


def test_scaled_eval(moll):
    eps = 2.0 ** -6
    x = np.array([0.0, eps, -3 * eps])
    v = moll.rho_scaled(eps, x)
    ref = moll.rho(x / eps) / eps
    assert np.allclose(v, ref)


def test_tail_radius_monotone(moll):
    r1 = moll.tail_radius(2.0 ** -4, 4)
    r2 = moll.tail_radius(2.0 ** -4, 10)
    assert r2 >= r1
    assert moll.tail_radius(2.0 ** -24, 10) <= moll.tables.radius


def test_pv_profile_oracle(moll):
    t = moll.tables
    # fold integral oracle at s = 1.3
    def rho1(u):
        return float(moll.rho(np.array([u]))[0])
    ref, _ = quad(lambda y: (rho1(1.3 - y) - rho1(1.3 + y)) / y, 1e-12, 530, limit=4000)
    assert float(t.G(np.array([1.3]), 0)[0]) == pytest.approx(ref, abs=1e-8)
    # far field
    assert float(t.G(np.array([505.0]), 0)[0]) == pytest.approx(1.0 / 505.0, rel=1e-10)
    assert float(t.G(np.array([-505.0]), 1)[0]) == pytest.approx(-1.0 / 505.0 ** 2, rel=1e-9)


def test_halfline_profile_far_fields(moll):
    t = moll.tables
    s = np.array([505.0])
    assert float(t.A(s, 0.5, 0)[0]) == pytest.approx(math.sqrt(505.0), rel=1e-12)
    assert float(t.A(-s, 0.5, 0)[0]) == 0.0
    assert float(t.L(s, 1)[0]) == pytest.approx(1.0 / 505.0, rel=1e-9)


def test_integer_profile_matches_moments(moll):
    t = moll.tables
    # A(s, 1) = int_0^inf y rho(s-y) dy = s M_0(s) - M_1(s)
    s = np.array([0.7, -1.2, 3.3])
    lhs = t.A(s, 1.0, 0)
    rhs = s * t.M(s, 0) - t.M(s, 1)
    assert np.allclose(lhs, rhs, atol=1e-14)


def test_describe(moll):
    d = moll.describe()
    assert d["moment_order"] == "inf"
    assert d["rho0"] == pytest.approx(3 / (2 * math.pi))
