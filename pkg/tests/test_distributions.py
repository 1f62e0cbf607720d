import math

import numpy as np
import pytest
from scipy.integrate import quad

from genfunlab.distributions import (
    BadSpec,
    DistributionSpec,
    UnsupportedAlpha,
    classical_pairing,
    parse_spec,
    smooth_function,
)
from genfunlab.testfun import bump, plateau, poly_bump


EVEN = bump(0.0, 1.5)                      # even test function
OFF = bump(0.7, 0.5)                       # support [0.2, 1.2], misses 0
WIDE = bump(0.3, 2.0)                      # support [-1.7, 2.3], covers 0


def brute(f, lo, hi, pts=()):
    val, err = quad(f, lo, hi, limit=800, points=list(pts) or None, epsabs=1e-13)
    return val


def test_parse_roundtrip():
    for text, kind in [("delta(2)", "delta"), ("heaviside", "heaviside"),
                       ("pow_minus(2)", "pow_minus"), ("finpart_h(1)", "finpart_h"),
                       ("xplus(0.5)", "xplus"), ("xminus(alpha=-0.5)", "xminus"),
                       ("smooth(x**2)", "smooth")]:
        assert parse_spec(text).kind == kind
    with pytest.raises(BadSpec):
        parse_spec("frobnicate(3)")
    with pytest.raises(UnsupportedAlpha):
        parse_spec("xplus(-2)")


def test_delta_derivatives():
    spec = DistributionSpec("delta", k=1)
    assert classical_pairing(spec, WIDE) == pytest.approx(-float(WIDE(np.array([0.0]), 1)[0]))
    spec0 = DistributionSpec("delta")
    assert classical_pairing(spec0, WIDE) == pytest.approx(float(WIDE(np.array([0.0]), 0)[0]))


def test_heaviside():
    val = classical_pairing(DistributionSpec("heaviside"), WIDE)
    ref = brute(lambda x: float(WIDE(np.array([x]))[0]), 0.0, 2.3)
    assert val.real == pytest.approx(ref, abs=1e-11)


def test_pv_odd_kernel_even_test():
    # <x^-1, phi> = 0 for even phi
    val = classical_pairing(DistributionSpec("pow_minus", m=1), EVEN)
    assert abs(val) < 1e-11


def test_pv_vs_brute_force():
    # for support away from 0 the pairing is a plain integral
    val = classical_pairing(DistributionSpec("pow_minus", m=1), OFF)
    ref = brute(lambda x: float(OFF(np.array([x]))[0]) / x, 0.2, 1.2)
    assert val.real == pytest.approx(ref, abs=1e-11)


def test_pv_symmetric_limit_oracle():
    # brute-force oracle: lim_R int_{-R}^{R} (phi(x) - phi(0))/x dx, via the
    # principal-value fold int_0^R (phi(x)-phi(-x))/x dx
    ref = brute(lambda x: (float(WIDE(np.array([x]))[0]) - float(WIDE(np.array([-x]))[0])) / x,
                1e-12, 2.5)
    val = classical_pairing(DistributionSpec("pow_minus", m=1), WIDE)
    assert val.real == pytest.approx(ref, abs=1e-10)


def test_pow_minus_two_derivative_relation():
    # D x^-1 = -x^-2  =>  <x^-2, phi> = <x^-1, phi'>
    dphi = bump(0.3, 2.0)
    dphi_fn = lambda x, b: WIDE(x, (b[0] + 1,))
    from genfunlab.testfun import TestFunction
    phi_prime = TestFunction(1, dphi_fn, WIDE.support, "bump", "phi'")
    lhs = classical_pairing(DistributionSpec("pow_minus", m=2), WIDE)
    rhs = classical_pairing(DistributionSpec("pow_minus", m=1), phi_prime)
    assert lhs.real == pytest.approx(rhs.real, abs=1e-9)


def test_finpart_vs_halfline_relation():
    # W_2 = -D W_1 - delta':  <W_2, phi> = <W_1, phi'> + phi'(0)
    from genfunlab.testfun import TestFunction
    phi_prime = TestFunction(1, lambda x, b: WIDE(x, (b[0] + 1,)), WIDE.support, "bump", "phi'")
    w2 = classical_pairing(DistributionSpec("finpart_h", m=2), WIDE)
    w1p = classical_pairing(DistributionSpec("finpart_h", m=1), phi_prime)
    dphi0 = float(WIDE(np.array([0.0]), 1)[0])
    assert w2.real == pytest.approx(w1p.real + dphi0, abs=1e-9)


def test_finpart_scaling_anomaly():
    # <W_m(lam .), phi> = lam^-m [ <W_m, phi> + ln(lam) D^{m-1}phi(0)/(m-1)! ]
    from genfunlab.testfun import TestFunction
    lam = 2.0
    for m in (1, 2):
        scaled = TestFunction(1, lambda x, b, l=lam: WIDE(np.asarray(x) / l, b) / l ** (b[0] + 1),
                              (WIDE.support[0] * lam, WIDE.support[1] * lam), "bump", "phi(x/l)/l")
        lhs = classical_pairing(DistributionSpec("finpart_h", m=m), scaled)
        base = classical_pairing(DistributionSpec("finpart_h", m=m), WIDE)
        jet = float(WIDE(np.array([0.0]), m - 1)[0])
        rhs = lam ** -m * (base.real + math.log(lam) * jet / math.factorial(m - 1))
        assert lhs.real == pytest.approx(rhs, abs=1e-9), m


def test_xplus_sqrt_vs_improper_integral():
    # phi0 = exp(1/(x(x-2))) on (0,2); <x_+^{-1/2}, phi0> equals the improper
    # integral directly since alpha > -1
    def phi0_raw(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        m = (x > 0) & (x < 2)
        out[m] = np.exp(1.0 / (x[m] * (x[m] - 2.0)))
        return out

    from genfunlab.testfun import TestFunction
    phi0 = TestFunction(1, lambda x, b: phi0_raw(x) if b[0] == 0 else None,
                        (0.0, 2.0), "bump", "phi0")
    val = classical_pairing(DistributionSpec("xplus", alpha=-0.5), phi0)
    ref = brute(lambda x: x ** -0.5 * float(phi0_raw(np.array([x]))[0]), 1e-14, 2.0)
    assert val.real == pytest.approx(ref, abs=1e-9)


def test_xplus_subtracted_continuation():
    # -2 < alpha < -1: independent oracle through the derivative relation
    # D x_+^{a+1} = (a+1) x_+^a, whose right side is an absolutely convergent
    # improper integral against phi'
    a = -1.5
    val = classical_pairing(DistributionSpec("xplus", alpha=a), WIDE)
    ref = -brute(lambda x: x ** (a + 1) * float(WIDE(np.array([x]), 1)[0]),
                 1e-13, 2.3) / (a + 1)
    assert val.real == pytest.approx(ref, abs=1e-8)


def test_xminus_reflection():
    val = classical_pairing(DistributionSpec("xminus", alpha=0.5), OFF)
    assert abs(val) < 1e-14  # OFF is supported in (0, inf)
    val2 = classical_pairing(DistributionSpec("xminus", alpha=0.5), EVEN)
    ref = classical_pairing(DistributionSpec("xplus", alpha=0.5), EVEN)
    assert val2.real == pytest.approx(ref.real, abs=1e-11)  # EVEN is even


def test_smooth_expression():
    val = classical_pairing(DistributionSpec("smooth", expr="x**2"), EVEN)
    ref = brute(lambda x: x ** 2 * float(EVEN(np.array([x]))[0]), -1.5, 1.5)
    assert val.real == pytest.approx(ref, abs=1e-11)
    f = smooth_function("sin(x)")
    assert f(np.array([0.3]), 1)[0] == pytest.approx(math.cos(0.3))
    with pytest.raises(BadSpec):
        smooth_function("__import__('os')")


def test_poly_bump_pairings():
    pb = poly_bump([0.0, 1.0], 0.0, 1.0)   # x * bump(x)
    v = classical_pairing(DistributionSpec("delta", k=1), pb)
    # d/dx [x b(x)] at 0 = b(0); pairing is -phi'(0)
    assert v.real == pytest.approx(-float(bump(0, 1)(np.array([0.0]))[0]))
