import math

import numpy as np
import pytest

from genfunlab.config import DEFAULT_CONFIG
from genfunlab.core import (
    DerivativeOrderExceeded,
    DomainMismatch,
    GeneralizedFunction,
    GeneralizedPoint,
    Net,
    NonPositiveScale,
    PiercedOriginError,
    PointOutsideDomain,
    ScaleOutOfRange,
    classical_function,
    constant_function,
    full_line,
    pierced_line,
    point_value,
    smooth_net,
)
from genfunlab.embed import embed
from genfunlab.gallery import monomial

EPS = DEFAULT_CONFIG.grid.array


def test_point_value_square():
    f = monomial(2)
    x = GeneralizedPoint.constant(3.0)
    c = point_value(f, x)
    assert all(abs(v - 9.0) < 1e-14 for v in c.samples)
    assert abs(c.order.fitted_slope) < 1e-12


def test_point_value_mollified_delta():
    f = embed("delta(0)")
    x = GeneralizedPoint.constant(0.0)
    c = point_value(f, x)
    # rho_eps(0) = rho(0)/eps: slope -1
    assert c.order.fitted_slope == pytest.approx(-1.0, abs=1e-9)
    rho0 = 3.0 / (2.0 * math.pi)
    assert c.samples[0].real == pytest.approx(rho0 / EPS[0], rel=1e-10)


def test_point_value_requires_bound():
    f = monomial(2)
    free = GeneralizedPoint(lambda e: np.array(1.0), 1, None)
    with pytest.raises(PointOutsideDomain):
        point_value(f, free)


def test_pierced_guard():
    f = GeneralizedFunction(smooth_net(lambda x, b: 1.0 / x if b == (0,) else None),
                            pierced_line())
    with pytest.raises(PiercedOriginError):
        f.eval(0.5, np.array([0.0]), 0)
    pt = GeneralizedPoint.constant(0.0)
    with pytest.raises(PointOutsideDomain):
        point_value(f, pt)


def test_algebra_sum_product():
    f = monomial(2)
    g = monomial(3)
    h = f + g
    assert h.eval(0.5, np.array([2.0]), 0)[0] == pytest.approx(12.0)
    prod = f * g
    assert prod.eval(0.5, np.array([2.0]), 0)[0] == pytest.approx(32.0)
    # Leibniz: D(x^2 * x^3) = 5 x^4
    assert prod.eval(0.5, np.array([2.0]), (1,))[0] == pytest.approx(80.0)


def test_domain_mismatch():
    f = monomial(2)
    g = GeneralizedFunction(smooth_net(lambda x, b: x), pierced_line())
    with pytest.raises(DomainMismatch):
        _ = f + g


def test_derive_polynomial():
    f = monomial(3)
    df = f.derive(1)
    assert df.eval(0.5, np.array([2.0]), 0)[0] == pytest.approx(12.0)


def test_derive_fd_fallback():
    # net exposing only order 0 analytically
    net = Net(1, lambda eps, x, beta: np.sin(x) if beta == (0,) else None, max_order=0)
    f = GeneralizedFunction(net, full_line())
    with pytest.raises(DerivativeOrderExceeded):
        f.derive(1)
    df = f.derive(1, fd_fallback=True)
    assert df.net.approx_derivatives
    val = df.eval(0.25, np.array([0.3]), 0)[0]
    assert val == pytest.approx(math.cos(0.3), abs=1e-4)


def test_dilate_polynomial():
    f = monomial(2)
    g = f.dilate(2.0)
    assert g.eval(0.5, np.array([1.5]), 0)[0] == pytest.approx(9.0)
    # identity dilation is exact
    h = f.dilate(1.0)
    x = np.linspace(-2, 2, 9)
    assert np.array_equal(h.eval(0.5, x, 0), f.eval(0.5, x, 0))


def test_dilate_chain_rule():
    f = monomial(3)
    g = f.dilate(2.0)   # g(x) = 8 x^3, g'(x) = 24 x^2
    assert g.eval(0.5, np.array([1.0]), (1,))[0] == pytest.approx(24.0)


def test_dilate_group_law():
    f = embed("delta(0)")
    g = f.dilate(2.0).dilate(1.5)
    h = f.dilate(3.0)
    x = np.array([0.01, -0.02, 0.2])
    for eps in (0.25, 2.0 ** -10):
        assert np.allclose(g.eval(eps, x, 0), h.eval(eps, x, 0), rtol=1e-12)


def test_dilate_generalized_factor():
    lam = GeneralizedPoint(lambda e: np.array(2.0 + e), 1, (2.0, 3.0), "2+eps")
    f = monomial(1)
    g = f.dilate(lam)
    assert g.eval(0.5, np.array([1.0]), 0)[0] == pytest.approx(2.5)


def test_dilate_rejects_nonpositive():
    f = monomial(1)
    with pytest.raises(NonPositiveScale):
        f.dilate(-1.0)
    bad = GeneralizedPoint(lambda e: np.array(e), 1, (0.0, 1.0), "eps")
    with pytest.raises(NonPositiveScale):
        f.dilate(bad)


def test_regularized_dilate_mollified_delta_exact():
    # H_lam(iota(delta)) = lam^-1 iota(delta) exactly at every (eps, x)
    f = embed("delta(0)")
    lam = 2.0
    g = f.regularized_dilate(lam)
    rng = np.random.default_rng(1)
    for eps in EPS[::4]:
        x = rng.uniform(-3 * eps, 3 * eps, 10)
        lhs = g.eval(eps, x, 0)
        rhs = f.eval(eps, x, 0) / lam
        assert np.allclose(lhs, rhs, rtol=5e-13)


def test_regularized_dilate_group_law():
    f = embed("heaviside")
    g = f.regularized_dilate(2.0).regularized_dilate(1.5)
    h = f.regularized_dilate(3.0)
    x = np.array([-0.3, 0.01, 0.5])
    for eps in (0.25, 2.0 ** -12):
        assert np.allclose(g.eval(eps, x, 0), h.eval(eps, x, 0), rtol=1e-12, atol=1e-15)


def test_regularized_dilate_range_check():
    f = monomial(1)
    with pytest.raises(ScaleOutOfRange):
        f.regularized_dilate(32.0)   # 32 * 2^-4 = 2 > 1
    with pytest.raises(NonPositiveScale):
        f.regularized_dilate(0.0)


def test_constant_function_pairing_scale():
    one = constant_function(2.5)
    assert one.eval(0.5, np.array([1.0, 2.0]), 0)[0] == pytest.approx(2.5)
    assert one.eval(0.5, np.array([1.0]), (1,))[0] == 0.0


def test_leibniz_identity_random_nets():
    # derive(f g) = derive(f) g + f derive(g) at sampled (eps, x), 1e-10 rel
    rng = np.random.default_rng(42)
    f = embed("heaviside")
    g = monomial(2)
    prod = f * g
    for _ in range(10):
        eps = float(rng.choice(EPS))
        x = rng.uniform(-2, 2, 5)
        lhs = prod.eval(eps, x, (1,))
        rhs = f.derive(1).eval(eps, x, 0) * g.eval(eps, x, 0) + \
            f.eval(eps, x, 0) * g.derive(1).eval(eps, x, 0)
        scale = np.maximum(np.abs(lhs), 1.0)
        assert np.all(np.abs(lhs - rhs) <= 1e-10 * scale)


def test_point_derivative_consistency():
    # centered difference of point values matches derive's point value
    f = embed("heaviside")
    for eps in (0.25, 0.015625):
        h = eps / 32
        x0 = 0.3 * eps
        pv = lambda xx: f.eval(eps, np.array([xx]), 0)[0].real
        fd = (pv(x0 + h) - pv(x0 - h)) / (2 * h)
        dv = f.derive(1).eval(eps, np.array([x0]), 0)[0].real
        assert fd == pytest.approx(dv, rel=1e-3)
