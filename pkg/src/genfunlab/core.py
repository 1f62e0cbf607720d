"""Generalized functions as eps-parametrized nets, with points and constants.

A Net is the representative: a deterministic rule (eps, x, beta) -> value of
the beta-th derivative at x.  GeneralizedFunction adds the domain, an
optional compact support bound, and metadata the quadrature engine uses
(feature zones of width ~eps, carrier frequency of oscillatory nets, and the
absolute accuracy of the evaluation rule itself).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .config import DEFAULT_CONFIG, LabConfig
from .scales import OrderReport, estimate_order

PIERCED_GUARD = 1e-12


class DomainMismatch(ValueError):
    pass


class PointOutsideDomain(ValueError):
    pass


class PiercedOriginError(ValueError):
    pass


class DerivativeOrderExceeded(ValueError):
    pass


class NonPositiveScale(ValueError):
    pass


class ScaleOutOfRange(ValueError):
    pass


@dataclass(frozen=True)
class Domain:
    kind: str            # "full" | "pierced" | "box"
    dim: int = 1
    box: tuple | None = None   # ((lo,), (hi,)) or ((lo1,lo2),(hi1,hi2))

    def check_points(self, x: np.ndarray) -> None:
        if self.kind == "pierced":
            r = np.abs(x) if self.dim == 1 else np.hypot(x[..., 0], x[..., 1])
            if np.any(r < PIERCED_GUARD):
                raise PiercedOriginError("evaluation at the pierced origin")
        elif self.kind == "box" and self.box is not None:
            lo, hi = np.asarray(self.box[0]), np.asarray(self.box[1])
            pts = np.atleast_2d(x) if self.dim == 2 else np.asarray(x)[..., None]
            if np.any(pts < lo - 1e-12) or np.any(pts > hi + 1e-12):
                raise PointOutsideDomain("evaluation outside the box domain")

    def compatible(self, other: "Domain") -> bool:
        return self.kind == other.kind and self.dim == other.dim and self.box == other.box

    def describe(self) -> str:
        return f"{self.kind}(d={self.dim})"


def full_line() -> Domain:
    return Domain("full", 1)


def pierced_line() -> Domain:
    return Domain("pierced", 1)


def full_plane() -> Domain:
    return Domain("full", 2)


def pierced_plane() -> Domain:
    return Domain("pierced", 2)


@dataclass(frozen=True)
class Net:
    """Representative net of a generalized function.

    eval(eps, x, beta) must be vectorized over x and deterministic; beta is a
    multi-index of length dim.  max_order is the largest derivative order the
    rule supplies analytically.  features(eps) lists (center, halfwidth)
    zones (radial zones for dim 2) where the function varies at scale eps.
    carrier(eps) reports the dominant oscillation frequency, if any, and
    smooth_part, when present, evaluates derivatives of the non-oscillatory
    amplitude so pairings can certify bounds by repeated integration by parts.
    """

    dim: int
    eval: Callable[[float, np.ndarray, tuple], np.ndarray]
    max_order: int = 8
    label: str = "net"
    features: Callable[[float], list[tuple[float, float]]] | None = None
    carrier: Callable[[float], float] | None = None
    smooth_part: Callable[[float, np.ndarray, int], np.ndarray] | None = None
    eval_resolution: Callable[[float], float] | None = None
    approx_derivatives: bool = False

    def __call__(self, eps: float, x: np.ndarray, beta: tuple | int = 0) -> np.ndarray:
        if isinstance(beta, int):
            beta = (beta,) * self.dim if beta else (0,) * self.dim
        return self.eval(float(eps), np.asarray(x, dtype=float), tuple(beta))


def smooth_net(f: Callable, dim: int = 1, max_order: int = 8, label: str = "smooth") -> Net:
    """Net of a fixed classical function: f(x, beta) independent of eps."""
    return Net(dim, lambda eps, x, beta: f(x, beta), max_order, label)


def constant_function(c: complex, dim: int = 1, domain: "Domain | None" = None) -> "GeneralizedFunction":
    """The constant generalized function x -> c."""
    c = complex(c)

    def ev(eps, x, beta):
        x = np.asarray(x, dtype=float)
        shape = x.shape if dim == 1 else (x.reshape(-1, 2).shape[0],)
        out = np.zeros(shape, dtype=complex)
        if not any(beta):
            out += c
        return out

    net = Net(dim, ev, max_order=64, label=f"const({c:g})" if c.imag == 0 else f"const({c})")
    return GeneralizedFunction(net, domain or Domain("full", dim))


def classical_function(f: Callable, dim: int = 1, *, max_order: int = 8,
                       label: str = "classical", domain: "Domain | None" = None,
                       support: tuple | None = None) -> "GeneralizedFunction":
    """Wrap a fixed smooth function f(x, beta) as a generalized function."""
    return GeneralizedFunction(smooth_net(f, dim, max_order, label),
                               domain or Domain("full", dim), support)


@dataclass(frozen=True)
class GeneralizedFunction:
    net: Net
    domain: Domain
    support_bound: tuple | None = None    # 1d (lo, hi); 2d ("ball", r) or box

    def eval(self, eps: float, x: np.ndarray, beta: tuple | int = 0) -> np.ndarray:
        self.domain.check_points(np.asarray(x, dtype=float))
        return self.net(eps, x, beta)

    @property
    def dim(self) -> int:
        return self.net.dim

    @property
    def label(self) -> str:
        return self.net.label

    def with_label(self, label: str) -> "GeneralizedFunction":
        return replace(self, net=replace(self.net, label=label))

    # ----- algebra -----

    def _binary(self, other, op, opname: str, support):
        if isinstance(other, (int, float, complex)):
            c = complex(other)
            if opname == "mul":
                new = Net(self.dim,
                          lambda eps, x, beta: c * self.net.eval(eps, x, beta),
                          self.net.max_order, f"({c:g}*{self.label})",
                          self.net.features, self.net.carrier, None,
                          self.net.eval_resolution, self.net.approx_derivatives)
                return GeneralizedFunction(new, self.domain, self.support_bound)
            raise TypeError("scalars only multiply")
        if not isinstance(other, GeneralizedFunction):
            return NotImplemented
        if not self.domain.compatible(other.domain):
            raise DomainMismatch(f"{self.domain.describe()} vs {other.domain.describe()}")
        f, g = self.net, other.net

        def features(eps):
            out = []
            for n in (f, g):
                if n.features is not None:
                    out.extend(n.features(eps))
            return out

        def resolution(eps):
            r = 0.0
            for n in (f, g):
                if n.eval_resolution is not None:
                    r += n.eval_resolution(eps)
            return r

        if opname == "mul":
            def ev(eps, x, beta):
                # Leibniz in 1d; dim 2 products only at beta = 0
                if self.dim == 1:
                    k = beta[0]
                    tot = 0.0
                    for j in range(k + 1):
                        tot = tot + math.comb(k, j) * f.eval(eps, x, (j,)) * g.eval(eps, x, (k - j,))
                    return tot
                if any(beta):
                    raise DerivativeOrderExceeded("dim-2 products expose only order 0")
                return f.eval(eps, x, beta) * g.eval(eps, x, beta)
        else:
            sgn = 1.0 if opname == "add" else -1.0

            def ev(eps, x, beta):
                return f.eval(eps, x, beta) + sgn * g.eval(eps, x, beta)

        new = Net(self.dim, ev, min(f.max_order, g.max_order),
                  f"({self.label}{ {'add': '+', 'sub': '-', 'mul': '*'}[opname] }{other.label})",
                  features, f.carrier or g.carrier, None, resolution,
                  f.approx_derivatives or g.approx_derivatives)
        return GeneralizedFunction(new, self.domain, support)

    def __add__(self, other):
        sup = _hull(self.support_bound, getattr(other, "support_bound", None))
        return self._binary(other, None, "add", sup)

    def __sub__(self, other):
        sup = _hull(self.support_bound, getattr(other, "support_bound", None))
        return self._binary(other, None, "sub", sup)

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self._binary(other, None, "mul", self.support_bound)
        sup = _intersect(self.support_bound, getattr(other, "support_bound", None))
        return self._binary(other, None, "mul", sup)

    __rmul__ = __mul__

    def __neg__(self):
        return self * (-1.0)

    # ----- calculus -----

    def derive(self, beta: tuple | int = 1, *, fd_fallback: bool = False) -> "GeneralizedFunction":
        if isinstance(beta, int):
            beta = (beta,) if self.dim == 1 else (beta, 0)
        shift = tuple(beta)
        order = sum(shift)
        f = self.net
        if order + 0 > f.max_order and not fd_fallback:
            raise DerivativeOrderExceeded(
                f"requested +{order} beyond analytic order {f.max_order}; "
                "pass fd_fallback=True for finite differences")

        if order <= f.max_order:
            def ev(eps, x, b):
                total = tuple(bi + si for bi, si in zip(b, shift))
                if sum(total) > f.max_order:
                    raise DerivativeOrderExceeded(f"order {sum(total)} > {f.max_order}")
                return f.eval(eps, x, total)
            approx = f.approx_derivatives
        else:
            def ev(eps, x, b):
                # centered finite difference at step h = eps/64 (1d only)
                h = eps / 64.0
                total = tuple(bi + si for bi, si in zip(b, shift))
                extra = sum(total) - f.max_order
                def d(fun, k):
                    if k == 0:
                        return fun
                    return lambda xx: (d(fun, k - 1)(xx + h) - d(fun, k - 1)(xx - h)) / (2 * h)
                base = lambda xx: f.eval(eps, xx, (f.max_order,))
                return d(base, extra)(x)
            approx = True

        new = Net(self.dim, ev, max(f.max_order - order, 0), f"D{shift}{self.label}",
                  f.features, f.carrier, None, f.eval_resolution, approx)
        return GeneralizedFunction(new, self.domain, self.support_bound)

    def dilate(self, lam) -> "GeneralizedFunction":
        """x -> f(lam x) with the derivative chain factor lam^|beta|."""
        lam_fn, lo, hi = _as_positive_scale(lam)
        f = self.net

        def ev(eps, x, beta):
            le = lam_fn(eps)
            return le ** sum(beta) * f.eval(eps, le * np.asarray(x, dtype=float), beta)

        def features(eps):
            if f.features is None:
                return []
            return _scale_features(f.features(eps), lam_fn(eps))

        sup = None
        if self.support_bound is not None and self.dim == 1:
            a, b = self.support_bound
            sup = (min(a / lo, a / hi), max(b / lo, b / hi))
        new = Net(self.dim, ev, f.max_order, f"dilate({self.label})", features,
                  (lambda eps: f.carrier(eps) * lam_fn(eps)) if f.carrier else None,
                  None, f.eval_resolution, f.approx_derivatives)
        return GeneralizedFunction(new, self.domain, sup)

    def regularized_dilate(self, lam: float, *, config: LabConfig = DEFAULT_CONFIG) -> "GeneralizedFunction":
        """Rescale both the variable and the regularization: (eps, x) -> (lam eps, lam x)."""
        lam = float(lam)
        if lam <= 0:
            raise NonPositiveScale("regularized dilation needs lam > 0")
        if lam * config.grid.values[0] > 1.0 + 1e-12:
            raise ScaleOutOfRange(f"lam*eps = {lam * config.grid.values[0]:g} leaves (0,1]")
        f = self.net

        def ev(eps, x, beta):
            return lam ** sum(beta) * f.eval(lam * eps, lam * np.asarray(x, dtype=float), beta)

        def features(eps):
            if f.features is None:
                return []
            return _scale_features(f.features(lam * eps), lam)

        sup = None
        if self.support_bound is not None and self.dim == 1:
            a, b = self.support_bound
            sup = (a / lam, b / lam)
        new = Net(self.dim, ev, f.max_order, f"regdilate({lam:g},{self.label})", features,
                  (lambda eps: f.carrier(lam * eps) * lam) if f.carrier else None,
                  None, f.eval_resolution, f.approx_derivatives)
        return GeneralizedFunction(new, self.domain, sup)


def _scale_features(feats: list[tuple], scale: float) -> list[tuple]:
    """Map feature hints (center, halfwidth[, cap]) under x -> x/scale."""
    out = []
    for f in feats:
        scaled = (f[0] / scale, f[1] / scale) + tuple(c / scale for c in f[2:])
        out.append(scaled)
    return out


def _hull(a, b):
    if a is None or b is None:
        return None
    if isinstance(a, tuple) and len(a) == 2 and not isinstance(a[0], str):
        return (min(a[0], b[0]), max(a[1], b[1]))
    return None


def _intersect(a, b):
    if a is None:
        return b
    if b is None:
        return a
    if isinstance(a, tuple) and len(a) == 2 and not isinstance(a[0], str):
        lo, hi = max(a[0], b[0]), min(a[1], b[1])
        return (lo, hi) if lo < hi else (0.0, 0.0)
    return a


@dataclass(frozen=True)
class GeneralizedPoint:
    """Net eps -> point, with an optional compact bound certifying usability."""

    net: Callable[[float], np.ndarray]
    dim: int = 1
    compact_bound: tuple | None = None   # (lo, hi) componentwise arrays or floats
    label: str = "point"

    def __call__(self, eps: float) -> np.ndarray:
        return np.asarray(self.net(float(eps)), dtype=float)

    @classmethod
    def constant(cls, value, dim: int = 1, label: str | None = None) -> "GeneralizedPoint":
        v = np.asarray(value, dtype=float)
        return cls(lambda eps: v, dim, (v, v), label or f"const({value})")

    def positive(self, grid) -> bool:
        if self.compact_bound is not None:
            lo = np.min(np.asarray(self.compact_bound[0], dtype=float))
            return bool(lo > 0)
        return all(np.all(self(e) > 0) for e in grid.values)


def _as_positive_scale(lam) -> tuple[Callable[[float], float], float, float]:
    """Normalize a dilation factor to (eps -> lam_eps, lower, upper)."""
    if isinstance(lam, (int, float)):
        lam = float(lam)
        if lam <= 0:
            raise NonPositiveScale(f"dilation factor {lam} must be positive")
        return (lambda eps: lam), lam, lam
    if isinstance(lam, GeneralizedPoint):
        if lam.compact_bound is None:
            raise NonPositiveScale("generalized dilation factor needs a compact bound")
        lo = float(np.min(np.asarray(lam.compact_bound[0], dtype=float)))
        hi = float(np.max(np.asarray(lam.compact_bound[1], dtype=float)))
        if lo <= 0:
            raise NonPositiveScale("generalized dilation factor must be bounded away from 0")
        return (lambda eps: float(lam(eps))), lo, hi
    raise TypeError(f"cannot use {lam!r} as a dilation factor")


@dataclass(frozen=True)
class GeneralizedConstant:
    """Scalar net sampled on the grid, classified on construction."""

    samples: tuple[complex, ...]
    eps: tuple[float, ...]
    order: OrderReport
    resolution: tuple[float, ...] | None = None
    label: str = "constant"

    @classmethod
    def from_samples(cls, eps: Sequence[float], samples: Sequence[complex], *,
                     resolution: Sequence[float] | None = None,
                     label: str = "constant",
                     config: LabConfig = DEFAULT_CONFIG) -> "GeneralizedConstant":
        pairs = list(zip(eps, samples))
        res = None if resolution is None else np.asarray(resolution, dtype=float)
        rep = estimate_order(pairs, resolution=res, config=config)
        return cls(tuple(complex(v) for v in samples), tuple(float(e) for e in eps),
                   rep, None if res is None else tuple(res), label)

    def __add__(self, other: "GeneralizedConstant") -> "GeneralizedConstant":
        return self._combine(other, 1.0, "+")

    def __sub__(self, other: "GeneralizedConstant") -> "GeneralizedConstant":
        return self._combine(other, -1.0, "-")

    def _combine(self, other, sgn, opname):
        if not isinstance(other, GeneralizedConstant):
            return NotImplemented
        if self.eps != other.eps:
            raise DomainMismatch("constants live on different grids")
        vals = [a + sgn * b for a, b in zip(self.samples, other.samples)]
        res = None
        if self.resolution is not None or other.resolution is not None:
            r1 = self.resolution or (0.0,) * len(vals)
            r2 = other.resolution or (0.0,) * len(vals)
            res = [a + b for a, b in zip(r1, r2)]
        return GeneralizedConstant.from_samples(self.eps, vals, resolution=res,
                                                label=f"({self.label}{opname}{other.label})")

    def scaled(self, factors) -> "GeneralizedConstant":
        """Multiply samples by per-eps factors (e.g. lambda^alpha weights)."""
        fac = np.asarray(factors, dtype=complex)
        if fac.ndim == 0:
            fac = np.full(len(self.samples), complex(fac))
        vals = [v * f for v, f in zip(self.samples, fac)]
        res = None if self.resolution is None else [r * abs(f) for r, f in zip(self.resolution, fac)]
        return GeneralizedConstant.from_samples(self.eps, vals, resolution=res, label=self.label)

    def pairs(self) -> list[tuple[float, complex]]:
        return list(zip(self.eps, self.samples))


def point_value(f: GeneralizedFunction, x: GeneralizedPoint, *,
                config: LabConfig = DEFAULT_CONFIG) -> GeneralizedConstant:
    """Evaluate f at a compactly supported generalized point."""
    if x.compact_bound is None:
        raise PointOutsideDomain("point value needs a compactly bounded point")
    if f.domain.kind == "pierced":
        lo = np.asarray(x.compact_bound[0], dtype=float)
        hi = np.asarray(x.compact_bound[1], dtype=float)
        if f.dim == 1 and lo <= 0 <= hi:
            raise PointOutsideDomain("compact bound meets the pierced origin")
    eps = config.grid.array
    vals = []
    for e in eps:
        pt = x(e)
        arr = np.atleast_2d(pt) if f.dim == 2 else np.atleast_1d(pt)
        vals.append(complex(np.asarray(f.eval(e, arr, 0)).ravel()[0]))
    res = None
    if f.net.eval_resolution is not None:
        res = [f.net.eval_resolution(e) for e in eps]
    return GeneralizedConstant.from_samples(eps, vals, resolution=res,
                                            label=f"{f.label}({x.label})", config=config)
