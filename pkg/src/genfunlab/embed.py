"""Embedding of catalog distributions into the algebra via the mollifier.

Every embedded net evaluates through one-dimensional profiles of s = x/eps:
convolving a homogeneous distribution of degree a with the scaled mollifier
gives eps^(a-|beta|) Q(x/eps), where Q is a fixed profile table, and the
finite parts pick up an extra ln(eps) term from their scaling anomaly.
Derivatives always fall on the mollifier, so they shift the profile order
instead of differentiating tables numerically.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .config import DEFAULT_CONFIG, LabConfig
from .core import Domain, GeneralizedFunction, Net, full_line, full_plane
from .distributions import DistributionSpec, UnsupportedAlpha, parse_spec, smooth_function
from .mollifier import Mollifier, build_mollifier
from .quadrature import gauss_rule

_CORE_WIDTH = 12.0     # halfwidth (in units of eps) of the mollified feature zone


def _w_profile_coeffs(m: int, beta: int) -> dict:
    """Coefficients of Q_{W_m, beta} over the L_j and rho^(j) tables.

    Built from W_1 = D(H ln x) and the recursion
    W_{m+1} = ( -D W_m + (-1)^m delta^(m) / m! ) / m.
    """
    if m == 1:
        return {("L", beta + 1): 1.0}
    prev = _w_profile_coeffs(m - 1, beta + 1)
    out = {k: -v / (m - 1) for k, v in prev.items()}
    key = ("rho", beta + m - 1)
    out[key] = out.get(key, 0.0) + (-1.0) ** (m - 1) / math.factorial(m - 1) / (m - 1)
    return out


def embed(spec: DistributionSpec | str, moll: Mollifier | None = None, *,
          dim: int = 1, config: LabConfig = DEFAULT_CONFIG) -> GeneralizedFunction:
    """Embed a catalog distribution as a generalized function.

    dim 2 supports the delta and polynomial smooth entries (tensor mollifier);
    the singular one-dimensional regularizations stay on the line.
    """
    if isinstance(spec, str):
        spec = parse_spec(spec)
    moll = moll or build_mollifier(config=config)
    t = moll.tables
    if dim == 2:
        return _embed_2d(spec, moll, config)

    label = f"emb[{spec.label}]"
    rel_fourier = 1e-11      # relative accuracy of the Fourier-built tables
    rel_halfline = 1e-9      # relative accuracy of the convolution-built profiles

    def features(eps):
        # mollified core at eps/4 panels, oscillating tail at eps panels
        R = moll.tail_radius(eps, config.m_star + 2)
        return [(0.0, _CORE_WIDTH * eps, eps / 4.0), (0.0, R * eps, 1.5 * eps)]

    if spec.kind == "delta":
        k = spec.k

        def ev(eps, x, beta):
            b = beta[0]
            return t.rho(x / eps, k + b) / eps ** (1 + k + b)

        res = lambda eps: rel_fourier

    elif spec.kind == "heaviside":
        def ev(eps, x, beta):
            b = beta[0]
            if b == 0:
                return t.P(x / eps)
            return t.rho(x / eps, b - 1) / eps ** b

        res = lambda eps: rel_fourier

    elif spec.kind == "pow_minus":
        m = spec.m
        c = (-1.0) ** (m - 1) / math.factorial(m - 1)

        def ev(eps, x, beta):
            b = beta[0]
            return c * t.G(x / eps, m - 1 + b) / eps ** (m + b)

        res = lambda eps: rel_fourier

    elif spec.kind == "finpart_h":
        m = spec.m
        c_log = (-1.0) ** (m - 1) / math.factorial(m - 1)

        def ev(eps, x, beta):
            b = beta[0]
            s = x / eps
            out = np.zeros_like(np.asarray(s, dtype=float))
            for (fam, j), cf in _w_profile_coeffs(m, b).items():
                out = out + cf * (t.L(s, j) if fam == "L" else t.rho(s, j))
            out = out + math.log(eps) * c_log * t.rho(s, m - 1 + b)
            return out / eps ** (m + b)

        res = lambda eps: rel_halfline

    elif spec.kind in ("xplus", "xminus"):
        a = spec.alpha
        if a <= -1.0:
            raise UnsupportedAlpha(
                f"embedding supports alpha > -1 (classical pairings go lower); got {a}")
        sign = 1.0 if spec.kind == "xplus" else -1.0

        def ev(eps, x, beta):
            b = beta[0]
            s = np.asarray(x, dtype=float) / eps
            if sign > 0:
                return t.A(s, a, b) * eps ** (a - b)
            return (-1.0) ** b * t.A(-s, a, b) * eps ** (a - b)

        res = (lambda eps: rel_fourier) if (a == round(a) and a >= 0) \
            else (lambda eps: rel_halfline)

    elif spec.kind == "smooth":
        return _embed_smooth_1d(spec, moll, config)

    else:
        raise ValueError(f"cannot embed {spec.kind!r}")

    net = Net(1, lambda eps, x, beta: ev(eps, np.asarray(x, dtype=float), beta),
              max_order=config.max_table_order - 2 if spec.kind != "heaviside" else 4,
              label=label, features=features, eval_resolution=res)
    return GeneralizedFunction(net, full_line(), None)


def _embed_smooth_1d(spec: DistributionSpec, moll: Mollifier,
                     config: LabConfig) -> GeneralizedFunction:
    """Smooth catalog entries: exact for polynomials, numeric convolution else.

    A mollifier with every moment vanishing reproduces polynomials exactly,
    so those nets evaluate as the polynomial itself.  Everything else runs
    the convolution integral against the mollifier tables.
    """
    import sympy as sp

    x = sp.symbols("x")
    f_sym = sp.sympify(spec.expr, locals={"x": x})
    f = smooth_function(spec.expr)
    label = f"emb[{spec.label}]"

    if f_sym.is_polynomial(x):
        net = Net(1, lambda eps, xs, beta: f(xs, beta[0]) + 0.0,
                  max_order=12, label=label)
        return GeneralizedFunction(net, full_line(), None)

    t = moll.tables
    xg, wg = gauss_rule(10)

    def ev(eps, xs, beta):
        b = beta[0]
        R = moll.tail_radius(eps, config.m_star + 2)
        n_pan = max(8, int(math.ceil(2 * R / 0.5)))
        edges = np.linspace(-R, R, n_pan + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 * (edges[1:] - edges[:-1])
        tn = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
        tw = (half[:, None] * wg[None, :]).ravel() * t.rho(tn, b)
        xs = np.asarray(xs, dtype=float)
        out = np.empty(xs.shape, dtype=float)
        chunk = max(1, int(2e6) // len(tn))
        flat = xs.ravel()
        res = np.empty_like(flat)
        for i in range(0, len(flat), chunk):
            X = flat[i:i + chunk]
            res[i:i + chunk] = f(X[:, None] - eps * tn[None, :], 0) @ tw
        return res.reshape(xs.shape) / eps ** b

    net = Net(1, lambda eps, xs, beta: ev(eps, xs, beta), max_order=6, label=label,
              eval_resolution=lambda eps: 1e-11)
    return GeneralizedFunction(net, full_line(), None)


def _embed_2d(spec: DistributionSpec, moll: Mollifier,
              config: LabConfig) -> GeneralizedFunction:
    t = moll.tables
    if spec.kind == "delta":
        k = spec.k
        if k:
            raise ValueError("plane delta derivatives go through derive()")

        def ev(eps, pts, beta):
            pts = np.asarray(pts, dtype=float).reshape(-1, 2)
            return (t.rho(pts[:, 0] / eps, beta[0]) * t.rho(pts[:, 1] / eps, beta[1])
                    / eps ** (2 + beta[0] + beta[1]))

        def features2(eps):
            R = moll.tail_radius(eps, config.m_star + 2)
            return [(0.0, _CORE_WIDTH * eps, eps / 4.0), (0.0, R * eps, 1.5 * eps)]

        net = Net(2, ev, max_order=config.max_table_order - 2, label="emb2[delta]",
                  features=features2, eval_resolution=lambda eps: 1e-11)
        return GeneralizedFunction(net, full_plane(), None)

    if spec.kind == "smooth":
        import sympy as sp

        x1, x2 = sp.symbols("x1 x2")
        f_sym = sp.sympify(spec.expr, locals={"x1": x1, "x2": x2})
        if not f_sym.is_polynomial(x1, x2):
            raise ValueError("plane smooth embeddings are polynomial-only")
        lambdas: dict = {}

        def ev(eps, pts, beta):
            key = tuple(beta)
            if key not in lambdas:
                lambdas[key] = sp.lambdify((x1, x2), sp.diff(f_sym, x1, beta[0], x2, beta[1]), "numpy")
            pts = np.asarray(pts, dtype=float).reshape(-1, 2)
            out = lambdas[key](pts[:, 0], pts[:, 1])
            return np.broadcast_to(np.asarray(out, dtype=float), (pts.shape[0],)).copy()

        net = Net(2, ev, max_order=12, label=f"emb2[{spec.label}]")
        return GeneralizedFunction(net, full_plane(), None)

    raise ValueError(f"plane embedding catalog covers delta and smooth, not {spec.kind!r}")


@lru_cache(maxsize=None)
def embedded(text: str, dim: int = 1) -> GeneralizedFunction:
    """Cached convenience constructor from a catalog string."""
    return embed(parse_spec(text), dim=dim)
