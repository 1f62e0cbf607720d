import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genfunlab.config import DEFAULT_CONFIG, EpsGrid
from genfunlab.scales import (
    HARMONIC_SCALE,
    POLYNOMIAL_SCALE,
    ScaleFamily,
    TooFewSamples,
    UnsupportedScale,
    classify_against,
    dump_net_csv,
    estimate_order,
)

EPS = DEFAULT_CONFIG.grid.array


def net(fn):
    return [(e, fn(e)) for e in EPS]


def test_pure_power_law():
    rep = estimate_order(net(lambda e: e ** 2))
    assert abs(rep.fitted_slope - 2.0) < 1e-9
    assert str(rep.verdict) == "Moderate(0)"
    assert not rep.negligible


def test_dominant_power_law():
    rep = estimate_order(net(lambda e: e ** -3 * (1 + e)))
    assert abs(rep.fitted_slope + 3.0) < 0.01
    assert str(rep.verdict) == "Moderate(3)"


def test_oscillating_negligible():
    # eps^10 sin(1/eps) evaluated on the default grid: the oracle is the
    # direct evaluation itself; slope stays above the threshold.
    rep = estimate_order(net(lambda e: e ** 10 * math.sin(1.0 / e)))
    assert rep.negligible
    assert rep.fitted_slope >= 8.0


def test_all_zero_sentinel():
    rep = estimate_order(net(lambda e: 0.0))
    assert rep.negligible
    assert rep.basis == "all-zero"
    assert math.isinf(rep.fitted_slope)


def test_resolution_masking():
    # values below their certified resolution count as zeros
    vals = net(lambda e: 1e-18)
    res = np.full(len(EPS), 1e-15)
    rep = estimate_order(vals, resolution=res)
    assert rep.negligible and rep.basis in ("masked", "all-zero")


def test_too_few_samples():
    with pytest.raises(TooFewSamples):
        estimate_order([(2.0 ** -k, 1.0) for k in range(4, 10)])


def test_log_correction_classifies_at_base_order():
    for k in (-3, -2, 2, 3):
        rep = estimate_order(net(lambda e, k=k: e ** 2 * abs(math.log(e)) ** k))
        assert str(rep.verdict) == "Moderate(0)", (k, rep.fitted_slope)
        # slope should sit near 2 after the floor(slope + 0.25) correction
        assert abs(rep.fitted_slope - 2.0) < 0.25


@given(k=st.integers(min_value=-3, max_value=3))
@settings(max_examples=20, deadline=None)
def test_shift_law(k):
    base = estimate_order(net(lambda e: 5.0 * e ** 1.5))
    shifted = estimate_order(net(lambda e: 5.0 * e ** (1.5 + k)))
    assert abs(shifted.fitted_slope - base.fitted_slope - k) < 1e-6


@given(a=st.floats(min_value=-3, max_value=3), b=st.floats(min_value=-3, max_value=3))
@settings(max_examples=20, deadline=None)
def test_product_law(a, b):
    u = estimate_order(net(lambda e: e ** a))
    v = estimate_order(net(lambda e: e ** b))
    uv = estimate_order(net(lambda e: e ** (a + b)))
    assert abs(uv.fitted_slope - u.fitted_slope - v.fitted_slope) < 1e-6


@given(seed=st.integers(min_value=0, max_value=10 ** 6))
@settings(max_examples=25, deadline=None)
def test_monotone_verdict(seed):
    # if u dominates v pointwise and u is negligible, so is v
    rng = np.random.default_rng(seed)
    u = net(lambda e: e ** 10)
    shrink = rng.uniform(0.0, 1.0, len(EPS))
    v = [(e, uv * s) for (e, uv), s in zip(u, shrink)]
    ru = estimate_order(u)
    rv = estimate_order(v)
    assert ru.negligible
    assert rv.negligible


def test_scale_axioms_builtins():
    POLYNOMIAL_SCALE.validate(DEFAULT_CONFIG.grid)
    HARMONIC_SCALE.validate(DEFAULT_CONFIG.grid)


def test_bad_scale_rejected():
    growing = ScaleFamily("growing", lambda n, eps: np.full_like(eps, float(n + 1)))
    with pytest.raises(UnsupportedScale):
        growing.validate(DEFAULT_CONFIG.grid)


def test_harmonic_vs_polynomial_log_net():
    slow = net(lambda e: 1.0 / abs(math.log(e)))
    assert classify_against(slow, HARMONIC_SCALE).negligible          # tends to 0
    assert not classify_against(slow, POLYNOMIAL_SCALE).negligible    # slope ~ 0


def test_eps_net_both_scales():
    lin = net(lambda e: e)
    assert classify_against(lin, HARMONIC_SCALE).negligible
    rep = classify_against(lin, POLYNOMIAL_SCALE)
    assert not rep.negligible
    assert abs(rep.fitted_slope - 1.0) < 1e-9


def test_constant_not_harmonic_negligible():
    one = net(lambda e: 1.0)
    assert not classify_against(one, HARMONIC_SCALE).negligible


def test_csv_dump_roundtrip():
    text = dump_net_csv(net(lambda e: complex(e, -e)))
    lines = text.strip().split("\n")
    assert lines[0] == "eps,re,im"
    assert len(lines) == len(EPS) + 1
    e0, re0, im0 = (float(t) for t in lines[1].split(","))
    assert e0 == EPS[0] and re0 == EPS[0] and im0 == -EPS[0]


def test_custom_grid():
    grid = EpsGrid.geometric(2, 12)
    assert len(grid) == 11
    with pytest.raises(ValueError):
        EpsGrid((0.5, 0.25))
