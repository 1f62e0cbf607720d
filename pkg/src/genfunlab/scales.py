"""Asymptotic scales and the numerical moderateness/negligibility classifier.

A scalar net is a family eps -> u_eps sampled on the grid.  The classifier
fits log|u| against log eps on the smallest-eps windows and turns the slope
into one of three verdicts: Negligible (decays at least like eps**m_star),
Moderate(N) (bounded by eps**-N), or NotModerate.

The "for all m" quantifier of true negligibility is undecidable from finite
samples, so Negligible always means "at the configured finite order"; the
threshold is carried in every report.  Sample values can also carry a
per-point resolution (what the producing quadrature can actually certify);
values at or below their resolution are masked like exact zeros, since a
number indistinguishable from 0 at working precision supports no slope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .config import DEFAULT_CONFIG, EpsGrid, LabConfig


class TooFewSamples(ValueError):
    pass


class UnsupportedScale(ValueError):
    pass


@dataclass(frozen=True)
class Verdict:
    kind: str                 # "negligible" | "moderate" | "not_moderate"
    order: int | None = None  # N for moderate verdicts

    def __str__(self) -> str:
        if self.kind == "moderate":
            return f"Moderate({self.order})"
        return {"negligible": "Negligible", "not_moderate": "NotModerate"}[self.kind]

    @property
    def negligible(self) -> bool:
        return self.kind == "negligible"


NEGLIGIBLE = Verdict("negligible")
NOT_MODERATE = Verdict("not_moderate")


def moderate(n: int) -> Verdict:
    return Verdict("moderate", n)


@dataclass(frozen=True)
class OrderReport:
    """Fitted asymptotic order of a scalar net, with diagnostics.

    fitted_slope is the raw least-squares exponent on the reported window
    (+inf sentinel when every usable sample is zero/below resolution);
    fit_residual is the max deviation of log|u| from the fit line, relative
    to the window mean magnitude of log|u|.
    """

    fitted_slope: float
    fit_residual: float
    window: tuple[float, float]          # (eps_max, eps_min) of the reported window
    verdict: Verdict
    threshold: int                       # m_star used
    basis: str                           # "slope" | "masked" | "all-zero"
    window_slopes: tuple[float, ...] = ()
    window_residuals: tuple[float, ...] = ()
    masked_fraction: float = 0.0

    @property
    def negligible(self) -> bool:
        return self.verdict.negligible

    def describe(self) -> dict:
        return {
            "slope": self.fitted_slope,
            "residual": self.fit_residual,
            "verdict": str(self.verdict),
            "threshold": self.threshold,
            "basis": self.basis,
            "window": list(self.window),
        }


@dataclass(frozen=True)
class ScaleFamily:
    """Gauge sequence n -> a_n on (0,1] defining moderateness/negligibility.

    The three scale axioms (eventual smallness, monotonicity in n, closure
    under products up to reindexing) are checked numerically on the grid via
    validate(); the polynomial and harmonic built-ins satisfy them exactly.
    """

    name: str
    gauge: Callable[[int, np.ndarray], np.ndarray]

    def a(self, n: int, eps: np.ndarray) -> np.ndarray:
        return np.asarray(self.gauge(n, np.asarray(eps, dtype=float)), dtype=float)

    def validate(self, grid: EpsGrid, *, n_max: int = 8, n_search: int = 256,
                 c_values: Sequence[float] = (10.0, 1.0, 0.1, 0.01)) -> None:
        """Raise UnsupportedScale if an axiom fails on the small-eps window."""
        eps = grid.array[-6:]
        for c in c_values:
            if not any(np.all(self.a(n, eps) <= c * (1 + 1e-12)) for n in range(n_search)):
                raise UnsupportedScale(f"{self.name}: no a_N <= {c} found up to N={n_search}")
        for n in range(n_max):
            if not np.all(self.a(n + 1, eps) <= self.a(n, eps) * (1 + 1e-12)):
                raise UnsupportedScale(f"{self.name}: a_{n+1} > a_{n} on the grid")
        for n in range(1, 5):
            for m in range(1, 5):
                target = self.a(n, eps) * self.a(m, eps)
                if not any(np.all(self.a(nn, eps) <= target * (1 + 1e-12)) for nn in range(n_search)):
                    raise UnsupportedScale(f"{self.name}: no a_N <= a_{n} a_{m} up to N={n_search}")


POLYNOMIAL_SCALE = ScaleFamily("polynomial", lambda n, eps: eps ** n)
HARMONIC_SCALE = ScaleFamily("harmonic", lambda n, eps: np.full_like(eps, 1.0 / max(n, 1)))

BUILTIN_SCALES = {"polynomial": POLYNOMIAL_SCALE, "harmonic": HARMONIC_SCALE}


@dataclass(frozen=True)
class WindowPolicy:
    """Which sub-ranges of the grid the fits run on."""

    size: int = 6
    count: int = 3

    def windows(self, n: int) -> list[tuple[int, int]]:
        """Index ranges [i0, i1) ordered smallest-eps first."""
        out = []
        for j in range(self.count):
            i1 = n - j
            i0 = i1 - self.size
            if i0 < 0:
                break
            out.append((i0, i1))
        if not out:
            raise TooFewSamples(f"{n} samples cannot host a window of {self.size}")
        return out


def _fit_window(logeps: np.ndarray, logu: np.ndarray) -> tuple[float, float]:
    """Least-squares slope and relative max deviation on one window."""
    A = np.vstack([logeps, np.ones_like(logeps)]).T
    coef, *_ = np.linalg.lstsq(A, logu, rcond=None)
    dev = np.max(np.abs(A @ coef - logu))
    scale = max(1.0, abs(float(np.mean(logu))))
    return float(coef[0]), float(dev / scale)


def effective_order(slope: float, margin: float = 0.25) -> int:
    """Integer order declared for a fitted slope (absorbs |log eps|**k factors)."""
    if math.isinf(slope):
        return 10 ** 9
    return int(math.floor(slope + margin))


def estimate_order(
    samples: Sequence[tuple[float, complex]] | np.ndarray,
    window_policy: WindowPolicy | None = None,
    *,
    resolution: np.ndarray | None = None,
    config: LabConfig = DEFAULT_CONFIG,
) -> OrderReport:
    """Classify a scalar net from its grid samples.

    samples: (eps, value) pairs sorted by strictly decreasing eps, >= 8 points.
    resolution: optional per-sample certified accuracy; |value| <= resolution
    is treated as an exact zero for fitting purposes.
    """
    arr = np.asarray([(e, v) for e, v in samples], dtype=complex)
    if arr.shape[0] < 8:
        raise TooFewSamples(f"need >= 8 samples, got {arr.shape[0]}")
    eps = arr[:, 0].real
    if np.any(np.diff(eps) >= 0):
        raise ValueError("samples must be sorted by strictly decreasing eps")
    vals = np.abs(arr[:, 1])
    policy = window_policy or WindowPolicy(config.window_size, config.window_count)

    floor = np.full_like(vals, config.zero_floor)
    if resolution is not None:
        floor = np.maximum(floor, np.asarray(resolution, dtype=float))
    masked = vals <= floor
    n = len(vals)
    windows = policy.windows(n)
    i0s, i1s = windows[0]
    small_window = (eps[i0s], eps[i1s - 1])
    masked_fraction = float(np.mean(masked))

    if np.all(masked):
        return OrderReport(math.inf, 0.0, small_window, NEGLIGIBLE, config.m_star,
                           "all-zero", masked_fraction=1.0)

    # Masked majority on the smallest window: indistinguishable from 0 there.
    n_masked_small = int(np.sum(masked[i0s:i1s]))
    if n_masked_small * 2 >= (i1s - i0s):
        return OrderReport(math.inf, 0.0, small_window, NEGLIGIBLE, config.m_star,
                           "masked", masked_fraction=masked_fraction)

    logeps = np.log(eps)
    with np.errstate(divide="ignore"):
        logu = np.log(np.where(masked, 1.0, vals))

    slopes, residuals = [], []
    for (i0, i1) in windows:
        keep = ~masked[i0:i1]
        if int(np.sum(keep)) < 4:
            # mask-dominated window: supports negligibility, fits nothing
            continue
        s, r = _fit_window(logeps[i0:i1][keep], logu[i0:i1][keep])
        slopes.append(s)
        residuals.append(r)
    if not slopes:
        return OrderReport(math.inf, 0.0, small_window, NEGLIGIBLE, config.m_star,
                           "masked", masked_fraction=masked_fraction)

    slope, residual = slopes[0], residuals[0]
    neg = all(
        effective_order(s, config.slope_margin) >= config.m_star and r <= config.residual_tol
        for s, r in zip(slopes, residuals)
    )
    if neg:
        verdict = NEGLIGIBLE
    else:
        order = effective_order(slope, config.slope_margin)
        if residual > 10 * config.residual_tol and order < 0:
            # Steep and badly non-power-law: refuse a moderate certificate.
            verdict = NOT_MODERATE if -order > config.max_moderate_order else Verdict("moderate", max(0, -order))
        elif -order > config.max_moderate_order:
            verdict = NOT_MODERATE
        else:
            verdict = Verdict("moderate", max(0, -order))
    return OrderReport(slope, residual, small_window, verdict, config.m_star, "slope",
                       tuple(slopes), tuple(residuals), masked_fraction)


def classify_against(
    samples: Sequence[tuple[float, complex]],
    scale: ScaleFamily,
    *,
    config: LabConfig = DEFAULT_CONFIG,
) -> OrderReport:
    """Classify a net against an arbitrary scale family.

    Polynomial delegates to estimate_order.  For the harmonic scale,
    negligibility coincides with convergence to 0, certified here by window
    maxima that decay (or are already tiny) toward small eps.  Other gauges
    must pass the axiom suite; they get the generic window-ratio test.
    """
    if scale.name == "polynomial":
        return estimate_order(samples, config=config)
    scale.validate(config.grid)

    arr = np.asarray([(e, v) for e, v in samples], dtype=complex)
    if arr.shape[0] < 8:
        raise TooFewSamples(f"need >= 8 samples, got {arr.shape[0]}")
    eps = arr[:, 0].real
    vals = np.abs(arr[:, 1])
    n = len(vals)
    w = config.window_size
    # disjoint windows, smallest-eps first, for decay-trend comparisons
    windows = [(max(0, n - (j + 1) * w), n - j * w) for j in range(min(3, n // w))]
    i0s, i1s = windows[0]
    small_window = (eps[i0s], eps[i1s - 1])

    def window_max(f: np.ndarray, win: tuple[int, int]) -> float:
        return float(np.max(f[win[0]:win[1]]))

    if scale.name == "harmonic":
        m_small = window_max(vals, windows[0])
        m_prev = min(window_max(vals, w) for w in windows[1:]) if len(windows) > 1 else math.inf
        tends_to_zero = m_small <= max(config.harmonic_abs_tol, config.harmonic_decay * m_prev)
        verdict = NEGLIGIBLE if tends_to_zero else Verdict("moderate", 0)
        slope = -math.inf if not tends_to_zero else math.inf
        return OrderReport(slope, 0.0, small_window, verdict, config.m_star,
                           "window-max" if tends_to_zero else "window-max-stall")

    # generic validated scale: ratio trend per tested order
    def ratio_ok(m: int) -> bool:
        r = vals / np.maximum(scale.a(m, eps), 1e-300)
        small = window_max(r, windows[0])
        prev = min(window_max(r, w) for w in windows[1:]) if len(windows) > 1 else math.inf
        return small <= max(1e-12, prev)

    if all(ratio_ok(m) for m in range(1, config.m_star + 1)):
        return OrderReport(math.inf, 0.0, small_window, NEGLIGIBLE, config.m_star, "ratio-trend")
    for n in range(config.max_moderate_order + 1):
        r = vals * scale.a(n, eps)
        small = window_max(r, windows[0])
        prev = max(window_max(r, w) for w in windows[1:]) if len(windows) > 1 else math.inf
        if small <= max(1.0, prev):
            return OrderReport(-float(n), 0.0, small_window, Verdict("moderate", n),
                               config.m_star, "ratio-trend")
    return OrderReport(-math.inf, math.inf, small_window, NOT_MODERATE, config.m_star, "ratio-trend")


def dump_net_csv(samples: Sequence[tuple[float, complex]]) -> str:
    """CSV net dump: header eps,re,im; one row per grid point, 17 significant digits."""
    lines = ["eps,re,im"]
    for e, v in samples:
        c = complex(v)
        lines.append(f"{float(e):.17g},{c.real:.17g},{c.imag:.17g}")
    return "\n".join(lines) + "\n"
