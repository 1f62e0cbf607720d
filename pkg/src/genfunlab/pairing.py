"""Pairing engine: integrals of nets against test functions, weak equality.

pair() produces a generalized constant whose per-eps samples carry an honest
resolution: quadrature error, conditioning (mass of |f phi| times machine
epsilon), and the net's own evaluation accuracy.  The order classifier masks
samples below their resolution, so "negligible" never rests on digits the
quadrature cannot certify.

For nets that declare a fast carrier frequency (e^{i omega x} amplitudes),
pairings whose oscillation outruns the panel budget return a certified
bound instead: m-fold integration by parts gives |integral| <= omega^-m
|| D^m (a phi) ||_1, reported as a zero sample with that resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_CONFIG, LabConfig
from .core import DomainMismatch, GeneralizedConstant, GeneralizedFunction, PiercedOriginError
from .quadrature import integrate, integrate_polar, oscillation_edges, refine_edges
from .scales import OrderReport
from .testfun import Battery, GenTestObject, TestFunction, make_battery

__all__ = ["pair", "weak_equal", "WeakEqualReport", "make_battery", "Battery"]


def _interval_1d(f: GeneralizedFunction, phi: TestFunction) -> tuple[float, float]:
    lo, hi = float(phi.support[0]), float(phi.support[1])
    if f.support_bound is not None:
        lo = max(lo, float(f.support_bound[0]))
        hi = min(hi, float(f.support_bound[1]))
    if f.domain.kind == "box" and f.domain.box is not None:
        lo = max(lo, float(f.domain.box[0][0]))
        hi = min(hi, float(f.domain.box[1][0]))
    if f.domain.kind == "pierced" and lo < 0.0 < hi:
        raise PiercedOriginError(
            f"test function {phi.label} straddles the pierced origin")
    return lo, hi


def _annulus_2d(f: GeneralizedFunction, phi: TestFunction) -> tuple[float, float]:
    sup = phi.support
    if isinstance(sup[0], str):            # ("annulus", r0, r1)
        r0, r1 = float(sup[1]), float(sup[2])
    else:                                   # box
        lo, hi = np.asarray(sup[0], dtype=float), np.asarray(sup[1], dtype=float)
        corners = np.array([[lo[0], lo[1]], [lo[0], hi[1]], [hi[0], lo[1]], [hi[0], hi[1]]])
        r1 = float(np.max(np.hypot(corners[:, 0], corners[:, 1])))
        inside = lo[0] <= 0 <= hi[0] and lo[1] <= 0 <= hi[1]
        r0 = 0.0 if inside else float(min(np.min(np.abs(lo)), np.min(np.abs(hi))))
    if f.support_bound is not None and isinstance(f.support_bound[0], str):
        r1 = min(r1, float(f.support_bound[2]))
        r0 = max(r0, float(f.support_bound[1]))
    if f.domain.kind == "pierced" and r0 <= 0.0:
        r0 = 1e-9   # battery supports certify vanishing near 0 themselves
    return r0, r1


def _certified_bound(f: GeneralizedFunction, phi: TestFunction, eps: float,
                     lo: float, hi: float, omega: float) -> float:
    """IBP bound |int e^{i omega x} a(x) phi(x) dx| <= omega^-m ||D^m(a phi)||_1."""
    best = math.inf
    for m in (4, 8, 12, 16):
        def dm(x, m=m):
            tot = np.zeros_like(x)
            for j in range(m + 1):
                tot = tot + math.comb(m, j) * f.net.smooth_part(eps, x, j) \
                    * phi.eval(x, (m - j,))
            return np.abs(tot)
        mass = integrate(dm, lo, hi, abs_tol=1e-6, max_panels=512).value.real
        best = min(best, float(mass) / omega ** m)
    return best


def pair(f: GeneralizedFunction, phi: TestFunction | GenTestObject, *,
         config: LabConfig = DEFAULT_CONFIG) -> GeneralizedConstant:
    """Quadrature pairing int f_eps phi (phi possibly eps-dependent)."""
    eps_grid = config.grid.array
    samples: list[complex] = []
    resol: list[float] = []
    for eps in eps_grid:
        phi_e = phi.at_eps(eps) if isinstance(phi, GenTestObject) else phi
        if f.dim != phi_e.dim:
            raise DomainMismatch("net and test function dimensions differ")
        abs_tol = max(eps ** (config.m_star + 2), config.quad_abs_floor)
        if f.dim == 1:
            lo, hi = _interval_1d(f, phi_e)
            if hi <= lo:
                samples.append(0.0)
                resol.append(0.0)
                continue
            omega = f.net.carrier(eps) if f.net.carrier is not None else 0.0
            osc = oscillation_edges(lo, hi, omega, config.osc_max_panels)
            if osc is None and f.net.smooth_part is not None:
                bound = _certified_bound(f, phi_e, eps, lo, hi, omega)
                samples.append(0.0)
                resol.append(bound)
                continue
            edges = list(osc or [])
            if f.net.features is not None:
                edges += refine_edges(lo, hi, f.net.features(eps), eps / 4.0)
            rel = 5e-15
            if f.net.eval_resolution is not None:
                rel = max(rel, f.net.eval_resolution(eps))
            q = integrate(lambda x: f.eval(eps, x, 0) * phi_e.eval(x, (0,) * 1),
                          lo, hi, abs_tol=abs_tol, initial_edges=edges,
                          order=config.quad_order, max_panels=config.quad_max_panels,
                          floor_rel=rel)
            samples.append(q.value)
            resol.append(max(q.error, rel * q.abs_mass))
        else:
            r0, r1 = _annulus_2d(f, phi_e)
            if r1 <= r0:
                samples.append(0.0)
                resol.append(0.0)
                continue
            edges = []
            if f.net.features is not None:
                edges += refine_edges(r0, r1, f.net.features(eps), eps / 4.0)

            def integrand(pts, eps=eps, phi_e=phi_e):
                return f.eval(eps, pts, 0) * phi_e.eval(pts, (0, 0))

            q = integrate_polar(integrand, r0, r1, abs_tol=abs_tol,
                                initial_edges=edges, order=config.quad_order,
                                n_theta=config.theta_nodes)
            rel = 5e-15
            if f.net.eval_resolution is not None:
                rel = max(rel, f.net.eval_resolution(eps))
            samples.append(q.value)
            resol.append(max(q.error, rel * q.abs_mass))
    label = f"<{f.label},{getattr(phi, 'label', 'phi')}>"
    return GeneralizedConstant.from_samples(eps_grid, samples, resolution=resol,
                                            label=label, config=config)


@dataclass(frozen=True)
class WeakEqualReport:
    """Verdict of a battery test for equality in the generalized-distribution sense."""

    weakly_equal: bool
    per_test: tuple[tuple[str, OrderReport], ...]
    battery_descriptor: str
    worst_label: str
    worst_slope: float

    def describe(self) -> dict:
        return {
            "weakly_equal": self.weakly_equal,
            "battery": self.battery_descriptor,
            "worst": {"test": self.worst_label, "slope": self.worst_slope},
            "per_test": [
                {"test": lab, **rep.describe()} for lab, rep in self.per_test
            ],
        }


def weak_equal(f: GeneralizedFunction, g: GeneralizedFunction | None,
               battery: Battery, *, config: LabConfig = DEFAULT_CONFIG) -> WeakEqualReport:
    """Test f = g against every battery element; g = None means g = 0."""
    diff = f if g is None else f - g
    per: list[tuple[str, OrderReport]] = []
    worst_label, worst_slope = "", math.inf
    ok = True
    for phi in battery:
        rep = pair(diff, phi, config=config).order
        per.append((phi.label, rep))
        if not rep.negligible:
            ok = False
        if rep.fitted_slope < worst_slope:
            worst_slope = rep.fitted_slope
            worst_label = phi.label
    return WeakEqualReport(ok, tuple(per), battery.descriptor, worst_label, worst_slope)
