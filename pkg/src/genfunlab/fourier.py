"""Fourier transform of compactly supported nets at slow-scale points.

A slow-scale point grows slower than every power of 1/eps; transforms taken
there detect weak nonvanishing (the three-way equivalence below).  Probes
run over a deterministic family of power-growth and log-growth points, and
weak_zero_check cross-checks the classical battery, the eps-dependent test
objects, and the probe transforms against each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .config import DEFAULT_CONFIG, LabConfig
from .core import GeneralizedConstant, GeneralizedFunction, GeneralizedPoint
from .pairing import _certified_bound, weak_equal
from .quadrature import integrate, integrate_polar, oscillation_edges, refine_edges
from .scales import OrderReport, estimate_order
from .testfun import Battery, make_battery, plateau, tensor_bump


class MissingSupportBound(ValueError):
    pass


class MissingGrowthCertificate(ValueError):
    pass


@dataclass(frozen=True)
class SlowScalePoint:
    """Generalized frequency with |xi_eps| below every power eps^-a."""

    net: Callable[[float], np.ndarray]
    dim: int = 1
    family_tag: str = "custom"
    label: str = "xi"

    def __call__(self, eps: float) -> np.ndarray:
        return np.asarray(self.net(float(eps)), dtype=float)

    def check_slow_scale(self, config: LabConfig = DEFAULT_CONFIG,
                         exponents: Sequence[float] = (0.5, 0.25, 0.125)) -> bool:
        """Certify sub-power growth on the small-eps window.

        Requires |xi_eps| <= eps^-a for the weakest tested exponent and a
        measured growth exponent at most half of it (the root ladder members
        eps^(-1/N), N >= 4, sit exactly at that edge; genuinely power-growing
        points fail).
        """
        a_max = max(exponents)
        eps = config.grid.array[-config.window_size:]
        mags = np.array([float(np.linalg.norm(np.atleast_1d(self(e)))) for e in eps])
        if not np.all(mags <= eps ** (-a_max) * (1 + 1e-12)):
            return False
        live = mags > 0
        if not np.any(live):
            return True
        slope = np.polyfit(np.log(1.0 / eps[live]), np.log(mags[live]), 1)[0]
        return bool(slope <= a_max / 2.0 + 0.02)


def probe_family(dim: int = 1, depth: int = 3, *,
                 config: LabConfig = DEFAULT_CONFIG) -> list[SlowScalePoint]:
    """Deterministic slow-scale probes: c eps^(-1/N) and c |ln eps|^p.

    depth >= 3 controls the ladder of root exponents N = 4, 8, 16, ...;
    scale factors c run over 1/2, 1, 2.  Plane probes repeat each magnitude
    along the axes and the diagonal.
    """
    if depth < 3:
        raise ValueError("probe_family needs depth >= 3")
    Ns = [4 * 2 ** i for i in range(depth)]
    cs = [0.5, 1.0, 2.0]
    mags: list[tuple[str, Callable[[float], float]]] = []
    for N in Ns:
        for c in cs:
            mags.append((f"root({N})x{c:g}", lambda e, N=N, c=c: c * e ** (-1.0 / N)))
    for p in (1, 2):
        for c in cs:
            mags.append((f"log^{p}x{c:g}", lambda e, p=p, c=c: c * abs(math.log(e)) ** p))

    if dim == 1:
        return [SlowScalePoint(lambda e, m=m: np.array(m(e)), 1,
                               tag.split("x")[0], tag)
                for tag, m in mags]
    dirs = [np.array([1.0, 0.0]), np.array([0.0, 1.0]),
            np.array([1.0, 1.0]) / math.sqrt(2.0)]
    out = []
    for tag, m in mags:
        for i, w in enumerate(dirs):
            out.append(SlowScalePoint(lambda e, m=m, w=w: m(e) * w, 2,
                                      tag.split("x")[0], f"{tag}@w{i}"))
    return out


def _support_interval(f: GeneralizedFunction) -> tuple[float, float]:
    if f.support_bound is None:
        raise MissingSupportBound(f"{f.label} carries no compact support bound")
    if isinstance(f.support_bound[0], str):
        raise MissingSupportBound("1d transform needs an interval support bound")
    return float(f.support_bound[0]), float(f.support_bound[1])


def fourier(f: GeneralizedFunction, xi: SlowScalePoint | GeneralizedPoint, *,
            config: LabConfig = DEFAULT_CONFIG) -> GeneralizedConstant:
    """hat f(xi) = int_K f_eps(x) e^{-i xi_eps . x} dx as a generalized constant."""
    eps_grid = config.grid.array
    samples: list[complex] = []
    resol: list[float] = []
    if f.dim == 1:
        lo, hi = _support_interval(f)
        for eps in eps_grid:
            xv = float(np.atleast_1d(xi(eps))[0])
            abs_tol = max(eps ** (config.m_star + 2), config.quad_abs_floor)
            carrier = f.net.carrier(eps) if f.net.carrier is not None else 0.0
            freq = abs(xv) + carrier
            osc = oscillation_edges(lo, hi, freq, config.osc_max_panels)
            if osc is None and f.net.smooth_part is not None:
                # fold the probe into the carrier and certify a bound
                phase = carrier - xv if carrier else abs(xv)
                bound = _certified_bound(f, plateau(0.5 * (lo + hi), (hi - lo) / 2,
                                                    (hi - lo)), eps, lo, hi, abs(phase))
                samples.append(0.0)
                resol.append(bound)
                continue
            edges = list(osc or [])
            if f.net.features is not None:
                edges += refine_edges(lo, hi, f.net.features(eps), eps / 4.0)
            rel = 5e-15
            if f.net.eval_resolution is not None:
                rel = max(rel, f.net.eval_resolution(eps))
            q = integrate(lambda x: f.eval(eps, x, 0) * np.exp(-1j * xv * x),
                          lo, hi, abs_tol=abs_tol, initial_edges=edges,
                          order=config.quad_order, max_panels=config.osc_max_panels,
                          floor_rel=rel)
            samples.append(q.value)
            resol.append(max(q.error, rel * q.abs_mass))
    else:
        if f.support_bound is None or not isinstance(f.support_bound[0], str):
            raise MissingSupportBound("plane transform needs a ball support bound")
        r0, r1 = float(f.support_bound[1]), float(f.support_bound[2])
        for eps in eps_grid:
            xiv = np.atleast_1d(xi(eps)).astype(float)
            abs_tol = max(eps ** (config.m_star + 2), config.quad_abs_floor)
            edges = []
            if f.net.features is not None:
                edges += refine_edges(r0, r1, f.net.features(eps), eps / 4.0)
            fmag = float(np.linalg.norm(xiv))
            osc = oscillation_edges(r0, r1, fmag, config.osc_max_panels)
            edges += osc or []
            n_theta = max(config.theta_nodes,
                          int(2 ** math.ceil(math.log2(max(8.0 * fmag * r1, 1.0)))))
            n_theta = min(n_theta, 4096)

            def integrand(pts, eps=eps, xiv=xiv):
                ph = pts[:, 0] * xiv[0] + pts[:, 1] * xiv[1]
                return f.eval(eps, pts, 0) * np.exp(-1j * ph)

            q = integrate_polar(integrand, r0, r1, abs_tol=abs_tol,
                                initial_edges=edges, order=config.quad_order,
                                n_theta=n_theta, max_theta=4096)
            rel = 5e-15
            if f.net.eval_resolution is not None:
                rel = max(rel, f.net.eval_resolution(eps))
            samples.append(q.value)
            resol.append(max(q.error, rel * q.abs_mass))
    return GeneralizedConstant.from_samples(
        eps_grid, samples, resolution=resol,
        label=f"F[{f.label}]({getattr(xi, 'label', 'xi')})", config=config)


@dataclass(frozen=True)
class WeakZeroReport:
    """Three-way weak-zero test: battery, eps-dependent objects, transforms."""

    battery_zero: bool
    gen_zero: bool
    fourier_zero: bool
    agreement: bool
    battery_report: object
    gen_report: object
    probe_reports: tuple[tuple[str, OrderReport], ...]

    @property
    def weakly_zero(self) -> bool:
        return self.battery_zero and self.gen_zero and self.fourier_zero

    def describe(self) -> dict:
        return {
            "battery_zero": self.battery_zero,
            "gen_zero": self.gen_zero,
            "fourier_zero": self.fourier_zero,
            "agreement": self.agreement,
            "probes": [{"probe": lab, **rep.describe()} for lab, rep in self.probe_reports],
        }


def weak_zero_check(f: GeneralizedFunction, battery: Battery | None = None,
                    probes: Sequence[SlowScalePoint] | None = None, *,
                    config: LabConfig = DEFAULT_CONFIG) -> WeakZeroReport:
    """Evaluate all three weak-zero characterizations and compare them."""
    _support_interval(f) if f.dim == 1 else None
    battery = battery or make_battery("full" if f.domain.kind == "full" else "pierced",
                                      "bump", dim=1, config=config)
    probes = list(probes) if probes is not None else probe_family(f.dim, config=config)
    rep_bat = weak_equal(f, None, battery, config=config)
    gen_bat = make_battery("full", "gen_scaled", config=config)
    rep_gen = weak_equal(f, None, gen_bat, config=config)
    probe_reports = []
    all_neg = True
    for xi in probes:
        rep = fourier(f, xi, config=config).order
        probe_reports.append((xi.label, rep))
        all_neg = all_neg and rep.negligible
    legs = (rep_bat.weakly_equal, rep_gen.weakly_equal, all_neg)
    return WeakZeroReport(*legs, agreement=len(set(legs)) == 1,
                          battery_report=rep_bat, gen_report=rep_gen,
                          probe_reports=tuple(probe_reports))


def regular_inverse_check(f: GeneralizedFunction, growth_certificate: int | None, *,
                          probes: Sequence[SlowScalePoint] | None = None,
                          config: LabConfig = DEFAULT_CONFIG) -> dict:
    """Slow-scale transforms all negligible => the net itself vanishes.

    Valid for nets with a uniform growth exponent over all derivative orders;
    the certificate is declared, not verified (no finite check can exhaust
    "for all orders").  The conclusion is checked directly on point values.
    """
    if growth_certificate is None:
        raise MissingGrowthCertificate(f"{f.label} declares no uniform growth exponent")
    lo, hi = _support_interval(f)
    probes = list(probes) if probes is not None else probe_family(f.dim, config=config)
    probe_reports = [(xi.label, fourier(f, xi, config=config).order) for xi in probes]
    probes_zero = all(r.negligible for _, r in probe_reports)
    xs = np.linspace(lo, hi, 33)
    eps_grid = config.grid.array
    vals = np.stack([np.abs(np.asarray(f.eval(e, xs, 0))) for e in eps_grid])
    worst = [(e, float(np.max(vals[i]))) for i, e in enumerate(eps_grid)]
    point_rep = estimate_order(worst, config=config)
    min_slope = min((r.fitted_slope for _, r in probe_reports), default=math.inf)
    return {
        "verdict": "zero" if probes_zero and point_rep.negligible else "not_zero",
        "probes_negligible": probes_zero,
        "point_values_negligible": point_rep.negligible,
        "point_value_slope": point_rep.fitted_slope,
        "min_probe_slope": min_slope,
        "threshold_sensitive": (not probes_zero) and 0.0 < min_slope < config.m_star,
        "probe_reports": probe_reports,
    }
