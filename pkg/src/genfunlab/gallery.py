"""Named nets: every explicit construction the test suites exercise.

Each entry ships analytic derivative closures and metadata recording its
expected verdicts (weakly zero on which domains, point-value behavior,
growth certificates), so batch runs can compare measured against expected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .config import DEFAULT_CONFIG, LabConfig
from .core import (
    Domain,
    GeneralizedFunction,
    Net,
    full_line,
    full_plane,
    pierced_line,
    pierced_plane,
)
from .mollifier import Mollifier, build_mollifier
from .quadrature import integrate
from .testfun import (
    Battery,
    GenTestObject,
    TestFunction,
    bump,
    plateau,
    poly_bump,
    smoothstep,
    smoothstep_deriv,
)


class UnknownName(KeyError):
    pass


@dataclass(frozen=True)
class GalleryEntry:
    gf: GeneralizedFunction
    meta: dict = field(default_factory=dict)

    @property
    def label(self) -> str:
        return self.gf.label


# ---------------- classical building blocks ----------------

def monomial(k: int, dim: int = 1) -> GeneralizedFunction:
    """x^k (dim 1) with exact derivative closures."""
    if dim != 1:
        raise ValueError("monomial is one-dimensional; use plane_polynomial")

    def ev(eps, x, beta):
        j = beta[0]
        if j > k:
            return np.zeros_like(x)
        c = math.factorial(k) / math.factorial(k - j)
        return c * np.asarray(x, dtype=float) ** (k - j)

    return GeneralizedFunction(Net(1, ev, max_order=64, label=f"x^{k}"), full_line())


def abs_power(alpha: float) -> GeneralizedFunction:
    """|x|^alpha on the pierced line, derivatives exact away from 0."""

    def ev(eps, x, beta):
        j = beta[0]
        x = np.asarray(x, dtype=float)
        c = 1.0
        for i in range(j):
            c *= (alpha - i)
        return c * np.abs(x) ** (alpha - j) * np.sign(x) ** j

    return GeneralizedFunction(Net(1, ev, max_order=16, label=f"|x|^{alpha:g}"),
                               pierced_line())


def radial_power(alpha: float) -> GeneralizedFunction:
    """|x|^alpha on the pierced plane with first partials."""

    def ev(eps, pts, beta):
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        r = np.hypot(pts[:, 0], pts[:, 1])
        if beta == (0, 0):
            return r ** alpha
        if sum(beta) == 1:
            i = 0 if beta == (1, 0) else 1
            return alpha * pts[:, i] * r ** (alpha - 2.0)
        raise NotImplementedError("radial_power exposes first partials")

    return GeneralizedFunction(Net(2, ev, max_order=1, label=f"r^{alpha:g}"),
                               pierced_plane())


def angular_power(alpha: float, mode: int = 2, kind: str = "sin") -> GeneralizedFunction:
    """trig(mode theta) |x|^alpha on the pierced plane, first partials exact.

    mode 2, kind "sin" is sin(2 theta)/... note sin(2 theta) = 2 x1 x2 / r^2.
    """
    trig = np.sin if kind == "sin" else np.cos
    dtrig = (lambda t: mode * np.cos(mode * t)) if kind == "sin" \
        else (lambda t: -mode * np.sin(mode * t))

    def ev(eps, pts, beta):
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        x1, x2 = pts[:, 0], pts[:, 1]
        r = np.hypot(x1, x2)
        th = np.arctan2(x2, x1)
        if beta == (0, 0):
            return trig(mode * th) * r ** alpha
        if sum(beta) == 1:
            dr = alpha * r ** (alpha - 2.0) * trig(mode * th)
            dth = r ** (alpha - 2.0) * dtrig(th)
            if beta == (1, 0):
                return dr * x1 - dth * x2
            return dr * x2 + dth * x1
        raise NotImplementedError("angular_power exposes first partials")

    return GeneralizedFunction(
        Net(2, ev, max_order=1, label=f"{kind}{mode}t*r^{alpha:g}"), pierced_plane())


def plane_polynomial(coeffs: dict[tuple[int, int], float]) -> GeneralizedFunction:
    """Polynomial sum c_{ab} x1^a x2^b with exact partial derivatives."""

    def ev(eps, pts, beta):
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        out = np.zeros(pts.shape[0])
        for (a, b), c in coeffs.items():
            if beta[0] > a or beta[1] > b:
                continue
            ca = math.factorial(a) / math.factorial(a - beta[0])
            cb = math.factorial(b) / math.factorial(b - beta[1])
            out += c * ca * cb * pts[:, 0] ** (a - beta[0]) * pts[:, 1] ** (b - beta[1])
        return out

    return GeneralizedFunction(Net(2, ev, max_order=32, label="poly2"), full_plane())


# ---------------- the named catalog ----------------

def _weak_point_support(config: LabConfig) -> GalleryEntry:
    """f_eps(x) = eps^(x |ln eps|) for x >= eps, smoothly cut to 0 below eps/2.

    The cutoff is a compactly supported smoothstep rising across [eps/2,
    3 eps/2], so the net vanishes identically on the negative axis.
    """

    def ev(eps, x, beta):
        x = np.asarray(x, dtype=float)
        L2 = math.log(eps) ** 2
        k = beta[0]
        out = np.zeros_like(x)
        live = x > 0.25 * eps
        if not np.any(live):
            return out
        xl = x[live]
        amp = np.exp(-np.minimum(xl * L2, 745.0))
        tot = np.zeros_like(xl)
        half = eps / 2.0
        for j in range(k + 1):
            step_j = smoothstep_deriv((xl - eps) / half, j) / half ** j
            tot += math.comb(k, j) * (-L2) ** (k - j) * step_j
        out[live] = amp * tot
        return out

    def features(eps):
        return [(eps, 1.5 * eps, eps / 8.0)]

    net = Net(1, ev, max_order=8, label="weak_point_support", features=features,
              eval_resolution=lambda eps: 1e-9)
    gf = GeneralizedFunction(net, full_line(), None)
    meta = {
        "expected": {
            "weakly_zero_on_pierced_battery": True,
            "weakly_zero_on_full_battery": False,
            "phi0_slope_at_most": 4.0,
        },
        "growth_certificate": None,
        "notes": "vanishes for x <= eps/4 exactly; decays beyond all orders for x > 0 fixed",
    }
    return GalleryEntry(gf, meta)


def _radial_oscillator(config: LabConfig, dim: int = 1, cutoff: bool = True) -> GalleryEntry:
    """Two-scale mollifier packet at |x| = 1 whose moments all cancel:
    g_eps(t) = eps^-1 [2 rho((2t-2)/eps) - rho((t-1)/eps)].
    """
    moll = build_mollifier(config=config)
    t = moll.tables
    psi = plateau(1.0, 1.0, 2.0) if cutoff else None

    def g(eps, tt, k):
        tt = np.asarray(tt, dtype=float)
        a = 2.0 * (2.0 / eps) ** k * t.rho((2.0 * tt - 2.0) / eps, k)
        b = (1.0 / eps) ** k * t.rho((tt - 1.0) / eps, k)
        return (a - b) / eps

    if dim == 1:
        def ev(eps, x, beta):
            k = beta[0]
            if psi is None:
                return g(eps, x, k)
            tot = np.zeros_like(np.asarray(x, dtype=float))
            for j in range(k + 1):
                tot += math.comb(k, j) * g(eps, x, j) * psi.eval(x, (k - j,))
            return tot

        def features(eps):
            R = moll.tail_radius(eps, config.m_star + 2)
            return [(1.0, 8 * eps, eps / 8.0), (1.0, R * eps, 0.75 * eps)]

        net = Net(1, ev, max_order=6, label="radial_oscillator", features=features,
                  eval_resolution=lambda eps: 5e-12)
        gf = GeneralizedFunction(net, full_line(),
                                 (-1.0, 3.0) if cutoff else None)
    else:
        def ev(eps, pts, beta):
            pts = np.asarray(pts, dtype=float).reshape(-1, 2)
            r = np.hypot(pts[:, 0], pts[:, 1])
            if beta == (0, 0):
                return g(eps, r, 0)
            if sum(beta) == 1:
                i = 0 if beta == (1, 0) else 1
                with np.errstate(invalid="ignore", divide="ignore"):
                    return g(eps, r, 1) * pts[:, i] / r
            raise NotImplementedError("plane oscillator exposes first partials")

        def features(eps):
            R = moll.tail_radius(eps, config.m_star + 2)
            return [(1.0, 8 * eps, eps / 8.0), (1.0, R * eps, 0.75 * eps)]

        net = Net(2, ev, max_order=1, label="radial_oscillator2", features=features,
                  eval_resolution=lambda eps: 5e-12)
        gf = GeneralizedFunction(net, pierced_plane(),
                                 ("ball", 0.0, 3.0) if cutoff else None)

    rho0 = float(moll.rho(np.array([0.0]))[0])
    meta = {
        "expected": {
            "weakly_zero_on_pierced_battery": True,
            "point_value_at_1_slope": -1.0,
            "point_value_at_1_coefficient": rho0,
        },
        "growth_certificate": None,
        "notes": "all moments of the packet cancel; naive restriction g(1) = rho(0)/eps",
    }
    return GalleryEntry(gf, meta)


def _etau_counterexample(config: LabConfig) -> GalleryEntry:
    """f_eps(x) = e^{i x / eps} eps^{-x} e^{x^2}: weakly zero, yet no
    representative satisfies the tempered growth bounds."""

    def amp_poly(eps: float, k: int) -> np.polynomial.Polynomial:
        # a^(k) = p_k(x) a with p_{k+1} = p_k' + p_k (2x - ln eps)
        p = np.polynomial.Polynomial([1.0])
        lin = np.polynomial.Polynomial([-math.log(eps), 2.0])
        for _ in range(k):
            p = p.deriv() + p * lin
        return p

    def smooth_part(eps, x, k):
        x = np.asarray(x, dtype=float)
        a = np.exp(x * x - x * math.log(eps))
        return amp_poly(eps, k)(x) * a

    def ev(eps, x, beta):
        k = beta[0]
        x = np.asarray(x, dtype=float)
        carrier = np.exp(1j * x / eps)
        a = np.exp(x * x - x * math.log(eps))
        tot = np.zeros_like(x, dtype=complex)
        for j in range(k + 1):
            tot += math.comb(k, j) * (1j / eps) ** j * amp_poly(eps, k - j)(x) * a
        return carrier * tot

    net = Net(1, ev, max_order=8, label="etau_counterexample",
              carrier=lambda eps: 1.0 / eps, smooth_part=smooth_part)
    gf = GeneralizedFunction(net, full_line(), None)
    meta = {
        "expected": {
            "weakly_zero_on_full_battery": True,
            "tempered_violation_order": 3,
        },
        "growth_certificate": None,
        "notes": "sup_{|x|<=N} |f_eps| (1+|x|)^-N >= eps^-N for every N",
    }
    return GalleryEntry(gf, meta)


def _density_counterexample(config: LabConfig, battery: Battery | None = None,
                            n_dict: int = 40) -> GalleryEntry:
    """Finite form of the dense-set failure: smooth g with int g phi_j = 0 for
    every battery element yet int g phi_0 = 1, switched on dyadic eps bands."""
    from .testfun import make_battery

    battery = battery or make_battery("full", "bump", config=config)
    phis = list(battery)[: min(len(battery), 32)]
    phi0 = bump(0.1, 0.8, label="phi0_target")

    # dictionary of polynomial bumps on a wide window
    dico = [poly_bump([0.0] * k + [1.0], -0.2, 4.5) for k in range(n_dict)]

    def moment(phi, d):
        lo = max(phi.support[0], d.support[0])
        hi = min(phi.support[1], d.support[1])
        if hi <= lo:
            return 0.0
        return integrate(lambda x: phi.eval(x, (0,)) * d.eval(x, (0,)),
                         lo, hi, abs_tol=1e-12).value.real

    rows = [[moment(phi0, d) for d in dico]]
    for p in phis:
        rows.append([moment(p, d) for d in dico])
    M = np.asarray(rows)

    coeffs = []        # coefficients of g_n killing the first n battery rows
    sups = []
    for n in range(len(phis) + 1):
        rhs = np.zeros(n + 1)
        rhs[0] = 1.0
        a, *_ = np.linalg.lstsq(M[: n + 1], rhs, rcond=None)
        coeffs.append(a)
        xs = np.linspace(-5.0, 5.0, 2001)
        sup = 0.0
        for j in range(4):
            vals = sum(c * d.eval(xs, (j,)) for c, d in zip(a, dico))
            sup = max(sup, float(np.max(np.abs(vals))))
        sups.append(max(sup, 1.0))

    def band(eps: float) -> int:
        # deepest n whose derivative sups stay below 1/eps (moderateness)
        n = 0
        for i, s in enumerate(sups):
            if s <= 1.0 / eps:
                n = i
        return n

    def ev(eps, x, beta):
        a = coeffs[band(eps)]
        return sum(c * d.eval(np.asarray(x, dtype=float), beta) for c, d in zip(a, dico))

    net = Net(1, ev, max_order=8, label="density_counterexample")
    gf = GeneralizedFunction(net, full_line(), (-5.0, 5.0))
    meta = {
        "battery": battery.descriptor,
        "phi0": phi0,
        "expected": {
            "zero_on_battery": True,
            "unit_on_phi0": True,
        },
        "notes": "Gram-system interpolation in a polynomial-bump dictionary",
    }
    return GalleryEntry(gf, meta)


def _plateau_net(config: LabConfig, outer: float = 4.0) -> GalleryEntry:
    """eps-dependent plateau vanishing for |x| <= eps/2, one for 2 eps <= |x| <= outer/2.

    Built from a LOCAL unit-mass mollifier supported in [-1/2, 1/2] (the
    moment-vanishing one has tails and would not vanish exactly near 0).
    """
    Psi = plateau(0.0, outer / 2.0, outer)

    def hole(eps, x, k):
        # k-th derivative of 1 - (chi_[-eps,eps] * rho_eps)(x)
        up = (np.asarray(x, dtype=float) + eps) / eps
        dn = (np.asarray(x, dtype=float) - eps) / eps
        if k == 0:
            return 1.0 - (smoothstep(2.0 * up) - smoothstep(2.0 * dn))
        c = (2.0 / eps) ** k
        return -c * (smoothstep_deriv(2.0 * up, k) - smoothstep_deriv(2.0 * dn, k))

    def ev(eps, x, beta):
        k = beta[0]
        tot = np.zeros_like(np.asarray(x, dtype=float))
        for j in range(k + 1):
            tot += math.comb(k, j) * hole(eps, x, j) * Psi.eval(x, (k - j,))
        return tot

    obj = GenTestObject(1, ev, (-outer, outer), 4, "plateau_net")
    net = Net(1, ev, max_order=6, label="plateau_net",
              features=lambda eps: [(0.0, 3 * eps, eps / 4.0)],
              eval_resolution=lambda eps: 1e-9)
    gf = GeneralizedFunction(net, full_line(), (-outer, outer))
    meta = {
        "gen_test_object": obj,
        "expected": {"vanishes_within": 0.5, "unit_beyond": 2.0},
        "growth_certificate": 4,
    }
    return GalleryEntry(gf, meta)


_CATALOG: dict[str, Callable] = {
    "weak_point_support": _weak_point_support,
    "radial_oscillator": _radial_oscillator,
    "etau_counterexample": _etau_counterexample,
    "density_counterexample": _density_counterexample,
    "plateau_net": _plateau_net,
}


def gallery(name: str, *, config: LabConfig = DEFAULT_CONFIG, **kw) -> GalleryEntry:
    """Construct a named net with its expected-verdict metadata."""
    try:
        builder = _CATALOG[name]
    except KeyError:
        raise UnknownName(f"unknown gallery net {name!r}; know {sorted(_CATALOG)}")
    return builder(config, **kw)


def gallery_names() -> list[str]:
    return sorted(_CATALOG)
