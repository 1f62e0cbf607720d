"""Smooth compactly supported test functions with exact supports and derivatives.

The base kernel is the standard bump b(u) = exp(-1/(1-u^2)) on (-1,1).  Its
derivatives are P_k(u) (1-u^2)^{-2k} b(u) with integer-coefficient
polynomials P_k obtained by a closed recurrence, so every test function in a
battery carries analytic derivative closures to any order we ask for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .config import DEFAULT_CONFIG, LabConfig
from .quadrature import gauss_rule


@lru_cache(maxsize=None)
def _bump_deriv_poly(k: int) -> tuple[np.ndarray, int]:
    """Coefficients P_k and exponent q_k with b^(k) = P_k (1-u^2)^{-q_k} b."""
    if k == 0:
        return np.array([1.0]), 0
    pk, q = _bump_deriv_poly(k - 1)
    one_minus = np.array([1.0, 0.0, -1.0])             # 1 - u^2
    dp = P.polyder(pk)
    # d/du [ Pk (1-u^2)^-q b ] = [ Pk' (1-u^2)^2 + 2q u Pk (1-u^2) - 2u Pk ] (1-u^2)^-(q+2) b
    term1 = P.polymul(dp, P.polymul(one_minus, one_minus))
    term2 = P.polymul(np.array([0.0, 2.0 * q]), P.polymul(pk, one_minus))
    term3 = P.polymul(np.array([0.0, -2.0]), pk)
    n = max(len(term1), len(term2), len(term3))
    coeffs = np.zeros(n)
    coeffs[: len(term1)] += term1
    coeffs[: len(term2)] += term2
    coeffs[: len(term3)] += term3
    return coeffs, q + 2


def bump_deriv(u: np.ndarray, k: int = 0) -> np.ndarray:
    """k-th derivative of exp(-1/(1-u^2)), zero outside (-1,1)."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    if not np.any(inside):
        return out
    ui = u[inside]
    t = 1.0 - ui * ui
    pk, q = _bump_deriv_poly(k)
    # assemble in log space: the bump beats the (1-u^2)^-q blowup
    log_mag = -1.0 / t - q * np.log(t)
    pval = P.polyval(ui, pk)
    vals = np.zeros_like(ui)
    live = log_mag > -745.0  # under this, exp underflows to 0 anyway
    vals[live] = pval[live] * np.exp(log_mag[live])
    out[inside] = vals
    return out


@lru_cache(maxsize=1)
def bump_l1_norm() -> float:
    """Integral of the standard bump over (-1,1)."""
    x, w = gauss_rule(200)
    return float(np.sum(w * bump_deriv(x, 0)))


def smoothstep(u: np.ndarray) -> np.ndarray:
    """C^inf step: 0 for u <= -1, 1 for u >= 1, strictly increasing between."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    out[u >= 1.0] = 1.0
    mid = (u > -1.0) & (u < 1.0)
    if np.any(mid):
        grid, cdf = _smoothstep_table()
        out[mid] = np.interp(u[mid], grid, cdf)
    return out


@lru_cache(maxsize=1)
def _smoothstep_table() -> tuple[np.ndarray, np.ndarray]:
    # cumulative integral of the bump on a fine grid; interp error ~ h^2 * b'' is
    # below 1e-9 at this resolution, enough for a cutoff whose exactness claims
    # only concern its support.
    n = 1 << 16
    grid = np.linspace(-1.0, 1.0, n + 1)
    vals = bump_deriv(grid, 0)
    cdf = np.concatenate([[0.0], np.cumsum((vals[1:] + vals[:-1]) * 0.5 * (2.0 / n))])
    return grid, cdf / cdf[-1]


def smoothstep_deriv(u: np.ndarray, k: int) -> np.ndarray:
    """k-th derivative of smoothstep (k >= 1 is bump-based and exact)."""
    if k == 0:
        return smoothstep(u)
    return bump_deriv(u, k - 1) / bump_l1_norm()


@dataclass(frozen=True)
class TestFunction:
    """Smooth compactly supported function with exact support bounds.

    eval(x, beta) returns the beta-th derivative; dim 1 takes flat arrays,
    dim 2 takes (..., 2) arrays with beta a 2-tuple.
    """

    dim: int
    eval: Callable[[np.ndarray, tuple], np.ndarray]
    support: tuple    # 1d: (lo, hi); 2d box: ((lo1,lo2),(hi1,hi2)); annulus: ("annulus", r0, r1)
    family_tag: str
    label: str

    def __call__(self, x: np.ndarray, beta: tuple | int = 0) -> np.ndarray:
        if isinstance(beta, int):
            beta = (beta,) if self.dim == 1 else (beta, beta)
        return self.eval(np.asarray(x, dtype=float), tuple(beta))

    def support_interval(self) -> tuple[float, float]:
        if self.dim != 1:
            raise ValueError("support_interval is for 1d test functions")
        return self.support  # type: ignore[return-value]


def bump(center: float = 0.0, halfwidth: float = 1.0, *, label: str | None = None) -> TestFunction:
    """Scaled translate of the standard bump."""
    c, s = float(center), float(halfwidth)

    def ev(x: np.ndarray, beta: tuple) -> np.ndarray:
        k = beta[0]
        return bump_deriv((x - c) / s, k) / s ** k

    return TestFunction(1, ev, (c - s, c + s), "bump",
                        label or f"bump(c={c:g},h={s:g})")


def plateau(center: float = 0.0, inner: float = 0.5, outer: float = 1.0,
            *, label: str | None = None) -> TestFunction:
    """Plateau bump: 1 on [c-inner, c+inner], 0 outside [c-outer, c+outer]."""
    c, a, b = float(center), float(inner), float(outer)
    if not 0 < a < b:
        raise ValueError("need 0 < inner < outer")
    w = 0.5 * (b - a)          # transition halfwidth
    m = 0.5 * (a + b)          # transition midpoint distance

    def ev(x: np.ndarray, beta: tuple) -> np.ndarray:
        k = beta[0]
        u = x - c
        right = smoothstep_deriv((m - u) / w, k) / w ** k
        left = smoothstep_deriv((u + m) / w, k) / w ** k
        if k == 0:
            return right + left - 1.0
        return right * (-1.0) ** k + left

    return TestFunction(1, ev, (c - b, c + b), "plateau",
                        label or f"plateau(c={c:g},{a:g},{b:g})")


def poly_bump(coeffs: Sequence[float], center: float, halfwidth: float,
              *, label: str | None = None) -> TestFunction:
    """Polynomial times a bump; derivatives by the Leibniz rule."""
    base = np.asarray(coeffs, dtype=float)
    c, s = float(center), float(halfwidth)

    def ev(x: np.ndarray, beta: tuple) -> np.ndarray:
        k = beta[0]
        out = np.zeros_like(x)
        for j in range(k + 1):
            pj = P.polyder(base, j) if j else base
            if len(pj) == 0:
                continue
            out += math.comb(k, j) * P.polyval(x, pj) * bump_deriv((x - c) / s, k - j) / s ** (k - j)
        return out

    return TestFunction(1, ev, (c - s, c + s), "polybump",
                        label or f"polybump(c={c:g},h={s:g})")


def tensor_bump(fx: TestFunction, fy: TestFunction, *, label: str | None = None) -> TestFunction:
    """Product test function f(x1) g(x2) on the plane."""
    if fx.dim != 1 or fy.dim != 1:
        raise ValueError("tensor factors must be 1d")

    def ev(x: np.ndarray, beta: tuple) -> np.ndarray:
        pts = np.asarray(x, dtype=float).reshape(-1, 2)
        return fx.eval(pts[:, 0], (beta[0],)) * fy.eval(pts[:, 1], (beta[1],))

    lo = (fx.support[0], fy.support[0])
    hi = (fx.support[1], fy.support[1])
    return TestFunction(2, ev, (lo, hi), "tensor", label or f"tensor({fx.label},{fy.label})")


def polar_bump(r_center: float, r_halfwidth: float, mode: int, kind: str = "cos",
               *, label: str | None = None) -> TestFunction:
    """u(|x|) v(x/|x|) with a radial bump and a trigonometric angular factor.

    Only the function values and first cartesian derivatives are provided;
    the polar batteries are consumed by pairings, which never differentiate
    their test functions.
    """
    rc, rh = float(r_center), float(r_halfwidth)
    if rc - rh <= 0:
        raise ValueError("radial support must avoid the origin")

    def angular(theta: np.ndarray, d: int = 0) -> np.ndarray:
        if mode == 0:
            return np.ones_like(theta) if d == 0 else np.zeros_like(theta)
        f = np.cos if kind == "cos" else np.sin
        if d == 0:
            return f(mode * theta)
        g = np.sin if kind == "cos" else np.cos
        sgn = -1.0 if kind == "cos" else 1.0
        return sgn * mode * g(mode * theta)

    def ev(x: np.ndarray, beta: tuple) -> np.ndarray:
        pts = np.asarray(x, dtype=float).reshape(-1, 2)
        r = np.hypot(pts[:, 0], pts[:, 1])
        theta = np.arctan2(pts[:, 1], pts[:, 0])
        u0 = bump_deriv((r - rc) / rh, 0)
        if beta == (0, 0):
            return u0 * angular(theta)
        if sum(beta) == 1:
            u1 = bump_deriv((r - rc) / rh, 1) / rh
            v0, v1 = angular(theta), angular(theta, 1)
            with np.errstate(invalid="ignore", divide="ignore"):
                if beta == (1, 0):
                    return u1 * (pts[:, 0] / r) * v0 - u0 * v1 * pts[:, 1] / r ** 2
                return u1 * (pts[:, 1] / r) * v0 + u0 * v1 * pts[:, 0] / r ** 2
        raise NotImplementedError("polar test functions provide derivatives up to order 1")

    lab = label or f"polar(r={rc:g}±{rh:g},{kind}{mode})"
    return TestFunction(2, ev, ("annulus", rc - rh, rc + rh), "polar", lab)


@dataclass(frozen=True)
class GenTestObject:
    """eps-dependent test object: a net of test functions with common support.

    moderate_degree caps the sup-norm growth eps**-N of the derivatives the
    object is actually used at (checked by sampling on the grid).
    """

    dim: int
    eval: Callable[[float, np.ndarray, tuple], np.ndarray]
    support: tuple
    moderate_degree: int
    label: str

    def at_eps(self, eps: float) -> TestFunction:
        return TestFunction(self.dim, lambda x, b: self.eval(eps, x, b),
                            self.support, "gen", f"{self.label}@eps={eps:g}")


def gen_scaled(psi: TestFunction, mu: Callable[[float], float], *,
               mu_min: float = 1.0, label: str | None = None) -> GenTestObject:
    """Family x -> psi(mu_eps x); mu_eps >= mu_min keeps supports uniform."""
    lo, hi = psi.support
    worst = max(abs(lo), abs(hi)) / mu_min
    sup = (-worst, worst)

    def ev(eps: float, x: np.ndarray, beta: tuple) -> np.ndarray:
        m = mu(eps)
        return psi.eval(m * x, beta) * m ** beta[0]

    return GenTestObject(1, ev, sup, 0, label or f"scaled({psi.label})")


@dataclass(frozen=True)
class Battery:
    """Finite surrogate for the universal quantifier over test functions."""

    elements: tuple
    descriptor: str
    domain: str = "full"

    def __post_init__(self):
        if not self.elements:
            raise EmptyBattery("battery must be nonempty")

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)


class EmptyBattery(ValueError):
    pass


def _halton(i: int, base: int) -> float:
    f, r = 1.0, 0.0
    while i > 0:
        f /= base
        r += f * (i % base)
        i //= base
    return r


def make_battery(domain: str, policy: str = "bump", *, dim: int = 1,
                 config: LabConfig = DEFAULT_CONFIG, seed: int | None = None,
                 count: int | None = None) -> Battery:
    """Deterministic battery for a domain ("full", "pierced", "positive").

    Policies: "bump" (plateau+poly bumps), "tensor" (d=2 products),
    "polar" (d=2 annulus products), "gen_scaled" (eps-dependent dilations
    of a plateau).  The seed perturbs centers/scales for robustness runs.
    """
    seed = config.battery_seed if seed is None else seed
    rng = np.random.default_rng(seed) if seed else None

    def jitter(v: float, rel: float = 0.1) -> float:
        if rng is None:
            return v
        return v * (1.0 + rel * (2.0 * rng.random() - 1.0))

    if policy == "bump" and dim == 1:
        n = count or config.battery_bumps
        els: list = []
        if domain == "full":
            centers = [0.0, 1.0, -1.0, 0.5, -0.5, 2.0, -2.0, 1.5, -1.5, 3.0, -3.0, 0.25]
            widths = [1.0, 0.5, 0.5, 0.75, 0.75, 1.0, 1.0, 0.5, 0.5, 1.0, 1.0, 0.25]
            for i in range(n):
                els.append(bump(jitter(centers[i % len(centers)]),
                                jitter(widths[i % len(widths)])))
            for j in range(config.battery_polybumps):
                coeffs = [0.0] * (j + 1) + [1.0]      # x^(j+1)
                els.append(poly_bump(coeffs, jitter(0.3 * (j - 2)), jitter(1.2)))
        elif domain in ("pierced", "positive"):
            lo, hi = config.pierced_inner, config.pierced_outer
            ratio = (hi / 2.0) / lo
            m = n if domain == "positive" else (n + 1) // 2
            for i in range(m):
                c0 = lo * ratio ** (i / max(m - 1, 1))
                h = jitter(0.45 * c0)
                c = jitter(c0 * 1.45)
                els.append(bump(c, min(h, c - lo * 0.999)))
            if domain == "pierced":
                mirrored = [bump(-(b.support[0] + b.support[1]) / 2.0,
                                 (b.support[1] - b.support[0]) / 2.0)
                            for b in els[: n - m]]
                els.extend(mirrored)
        else:
            raise ValueError(f"unknown domain {domain!r}")
        return Battery(tuple(els), f"bump[{len(els)}] {domain} seed={seed}", domain)

    if policy == "tensor" and dim == 2:
        n = count or 6
        els = []
        for i in range(n):
            f1 = bump(jitter(0.4 * (i - n / 2)), jitter(0.8))
            f2 = bump(jitter(-0.3 * (i - n / 2)), jitter(1.0))
            els.append(tensor_bump(f1, f2))
        return Battery(tuple(els), f"tensor[{n}] seed={seed}", domain)

    if policy == "polar" and dim == 2:
        n = count or config.battery_polar
        els = []
        specs = [(0, "cos"), (1, "cos"), (1, "sin"), (2, "cos"), (2, "sin"), (3, "cos")]
        radii = [(1.0, 0.6), (2.0, 1.2)]
        i = 0
        for rc, rh in radii:
            for mode, kind in specs:
                if i >= n:
                    break
                els.append(polar_bump(jitter(rc), jitter(rh), mode, kind))
                i += 1
        return Battery(tuple(els), f"polar[{len(els)}] seed={seed}", domain)

    if policy == "gen_scaled":
        base = plateau(0.0, 1.0, 2.0)
        mus = [("1+eps", lambda e: 1.0 + e), ("1+sqrt(eps)", lambda e: 1.0 + math.sqrt(e)),
               ("2-eps", lambda e: 2.0 - e)]
        els = [gen_scaled(base, mu, label=f"gen:{name}") for name, mu in mus]
        return Battery(tuple(els), f"gen_scaled[{len(els)}] seed={seed}", domain)

    raise ValueError(f"unknown battery policy {policy!r} for dim {dim}")
