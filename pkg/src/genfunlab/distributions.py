"""Catalog of classical distributions with exact-to-quadrature pairings.

The singular entries follow the standard regularizations: x^-m by symmetric
Taylor subtraction, FinPart(H/x^m) by the half-line subtraction on (0,1)
plus its closure constants, and x_+^alpha / x_-^alpha by analytic
continuation.  Near the singularity the subtracted integrand is evaluated
through the integral form of the Taylor remainder, which is free of
cancellation; away from it, directly.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import roots_jacobi

from .quadrature import gauss_rule, integrate
from .testfun import TestFunction


class UnsupportedAlpha(ValueError):
    pass


class BadSpec(ValueError):
    pass


@dataclass(frozen=True)
class DistributionSpec:
    """Symbolic tag + parameters identifying a catalog distribution."""

    kind: str                      # delta | heaviside | pow_minus | finpart_h | xplus | xminus | smooth
    k: int = 0                     # delta derivative order
    m: int = 1                     # pow_minus / finpart_h order
    alpha: float = 0.0             # xplus/xminus exponent
    expr: str = ""                 # smooth expression in x

    def __post_init__(self):
        if self.kind == "delta" and self.k < 0:
            raise BadSpec("delta derivative order must be >= 0")
        if self.kind in ("pow_minus", "finpart_h") and self.m < 1:
            raise BadSpec("singular power order m must be >= 1")
        if self.kind in ("xplus", "xminus"):
            a = self.alpha
            if a < 0 and abs(a - round(a)) < 1e-12:
                raise UnsupportedAlpha(f"alpha = {a} is a negative integer")

    @property
    def label(self) -> str:
        return {
            "delta": f"delta({self.k})" if self.k else "delta",
            "heaviside": "heaviside",
            "pow_minus": f"pow_minus({self.m})",
            "finpart_h": f"finpart_h({self.m})",
            "xplus": f"xplus({self.alpha:g})",
            "xminus": f"xminus({self.alpha:g})",
            "smooth": f"smooth({self.expr})",
        }[self.kind]

    @property
    def homogeneity_degree(self) -> float | None:
        """Classical homogeneity degree, where one exists."""
        return {
            "delta": -1.0 - self.k,
            "heaviside": 0.0,
            "pow_minus": -float(self.m),
            "finpart_h": None,          # scaling has a log anomaly
            "xplus": self.alpha,
            "xminus": self.alpha,
        }.get(self.kind)


def parse_spec(text: str) -> DistributionSpec:
    """Parse catalog strings: delta(k), heaviside, pow_minus(m), finpart_h(m),
    xplus(alpha), xminus(alpha), smooth(<expr>)."""
    text = text.strip()
    if "(" not in text:
        name, arg = text, None
    else:
        name, _, rest = text.partition("(")
        if not rest.endswith(")"):
            raise BadSpec(f"unbalanced spec string {text!r}")
        arg = rest[:-1]
        name = name.strip()
    # tolerate keyword-style arguments like xplus(alpha=0.5)
    if arg is not None and "=" in arg and name != "smooth":
        arg = arg.split("=", 1)[1]
    if name == "delta":
        return DistributionSpec("delta", k=int(arg) if arg else 0)
    if name == "heaviside":
        return DistributionSpec("heaviside")
    if name == "pow_minus":
        return DistributionSpec("pow_minus", m=int(arg))
    if name == "finpart_h":
        return DistributionSpec("finpart_h", m=int(arg))
    if name == "xplus":
        return DistributionSpec("xplus", alpha=float(arg))
    if name == "xminus":
        return DistributionSpec("xminus", alpha=float(arg))
    if name == "smooth":
        if not arg:
            raise BadSpec("smooth(<expr>) needs an expression")
        return DistributionSpec("smooth", expr=arg)
    raise BadSpec(f"unknown distribution {name!r}")


# ---------------- safe smooth expressions ----------------

_ALLOWED_CALLS = {"sin": np.sin, "cos": np.cos, "tanh": np.tanh, "atan": np.arctan}


def _check_expr(node: ast.AST) -> None:
    allowed = (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Constant, ast.Name,
               ast.Call, ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow,
               ast.USub, ast.UAdd, ast.Load)
    for sub in ast.walk(node):
        if not isinstance(sub, allowed):
            raise BadSpec(f"disallowed syntax in smooth expression: {type(sub).__name__}")
        if isinstance(sub, ast.Name) and sub.id not in ("x",) and sub.id not in _ALLOWED_CALLS:
            raise BadSpec(f"unknown name {sub.id!r} in smooth expression")
        if isinstance(sub, ast.Call):
            if not isinstance(sub.func, ast.Name) or sub.func.id not in _ALLOWED_CALLS:
                raise BadSpec("only sin/cos/tanh/atan calls are allowed")


@lru_cache(maxsize=None)
def smooth_function(expr: str) -> Callable[[np.ndarray, int], np.ndarray]:
    """Compile a polynomially bounded smooth expression of x, with derivatives.

    Derivatives are produced symbolically (sympy) so catalog smooth entries
    carry analytic closures like every other net.
    """
    tree = ast.parse(expr, mode="eval")
    _check_expr(tree)
    import sympy as sp

    x = sp.symbols("x")
    f = sp.sympify(expr, locals={"x": x})
    lambdas: dict[int, Callable] = {}

    def ev(xv: np.ndarray, k: int = 0) -> np.ndarray:
        if k not in lambdas:
            lambdas[k] = sp.lambdify(x, sp.diff(f, x, k), "numpy")
        out = lambdas[k](np.asarray(xv, dtype=float))
        return np.broadcast_to(np.asarray(out, dtype=float), np.shape(xv)).copy()

    return ev


# ---------------- stable subtracted integrands ----------------

def taylor_remainder(phi: TestFunction, x: np.ndarray, m: int) -> np.ndarray:
    """(phi(x) - sum_{j<m} phi^(j)(0) x^j / j!) / x^m without cancellation.

    Uses the integral remainder (1/(m-1)!) int_0^1 (1-t)^(m-1) phi^(m)(t x) dt.
    """
    x = np.asarray(x, dtype=float)
    tg, wg = gauss_rule(32)
    t = 0.5 * (tg + 1.0)
    w = 0.5 * wg * (1.0 - t) ** (m - 1) / math.factorial(m - 1)
    vals = phi.eval((x[:, None] * t[None, :]).ravel(), (m,)).reshape(len(x), len(t))
    return vals @ w


def _subtracted(phi: TestFunction, x: np.ndarray, m: int, x_switch: float = 0.5) -> np.ndarray:
    """Taylor-subtracted integrand (phi - T_{m-1} phi)/x^m, stable near 0."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    near = np.abs(x) <= x_switch
    if np.any(near):
        out[near] = taylor_remainder(phi, x[near], m)
    far = ~near
    if np.any(far):
        xf = x[far]
        t = phi.eval(xf, (0,)).astype(float)
        for j in range(m):
            t = t - _phi0_deriv(phi, j) * xf ** j / math.factorial(j)
        out[far] = t / xf ** m
    return out


def _phi0_deriv(phi: TestFunction, j: int) -> float:
    return float(phi.eval(np.array([0.0]), (j,))[0])


def _support(phi: TestFunction) -> tuple[float, float]:
    lo, hi = phi.support
    return float(lo), float(hi)


_ABS_TOL = 1e-13


def _int(f, lo, hi, edges=()):
    if hi <= lo:
        return 0.0
    return integrate(f, lo, hi, abs_tol=_ABS_TOL, initial_edges=edges,
                     max_panels=8192).value.real


def _jacobi_halfline(g: Callable[[np.ndarray], np.ndarray], alpha: float,
                     width: float = 1.0, order: int = 48) -> float:
    """int_0^width y^alpha g(y) dy with a Gauss-Jacobi endpoint rule."""
    xj, wj = roots_jacobi(order, 0.0, alpha)
    y = 0.5 * (xj + 1.0) * width
    w = wj * (width / 2.0) ** (alpha + 1.0)
    return float(np.sum(w * g(y)))


# ---------------- the pairing oracle ----------------

def classical_pairing(spec: DistributionSpec, phi: TestFunction) -> complex:
    """Exact-to-quadrature classical value <T, phi> for a catalog entry."""
    lo, hi = _support(phi)

    if spec.kind == "delta":
        return complex((-1.0) ** spec.k * _phi0_deriv(phi, spec.k))

    if spec.kind == "heaviside":
        return complex(_int(lambda x: phi.eval(x, (0,)), max(lo, 0.0), max(hi, 0.0)))

    if spec.kind == "smooth":
        f = smooth_function(spec.expr)
        return complex(_int(lambda x: f(x) * phi.eval(x, (0,)), lo, hi))

    if spec.kind == "pow_minus":
        m = spec.m
        if lo > 0 or hi < 0:
            # support away from 0: plain integral of phi / x^m
            return complex(_int(lambda x: phi.eval(x, (0,)) / x ** m, lo, hi))
        R = 2.0 * max(abs(lo), abs(hi), 1.0)

        def folded(x):
            # G(x) + G(-x) with G = (phi - T_{m-1} phi)/x^m
            return _subtracted(phi, x, m) + _subtracted(phi, -x, m)

        val = _int(folded, 0.0, R, edges=[0.25, 0.5, 1.0, abs(lo), abs(hi)])
        # analytic tail of the subtracted polynomial beyond R (even terms only)
        tail = 0.0
        for j in range(m - 1):
            if (m - j) % 2 == 0:
                tail -= 2.0 * _phi0_deriv(phi, j) / math.factorial(j) \
                    * R ** (j - m + 1) / (m - j - 1)
        return complex(val + tail)

    if spec.kind == "finpart_h":
        m = spec.m
        # the subtracted integrand (phi - T_{m-1} phi)/y^m is smooth on (0,1]
        inner = _int(lambda y: taylor_remainder(phi, y, m), 0.0, 1.0,
                     edges=[e for e in (lo, hi, 0.25, 0.5) if 0.0 < e < 1.0])
        outer = _int(lambda x: phi.eval(x, (0,)) / x ** m, 1.0, max(hi, 1.0))
        const = sum(_phi0_deriv(phi, j) / (math.factorial(j) * (m - j - 1))
                    for j in range(m - 1))
        return complex(inner + outer - const)

    if spec.kind in ("xplus", "xminus"):
        a = spec.alpha
        if spec.kind == "xminus":
            # <x_-^a, phi> = <x_+^a, phi(-.)>
            refl = TestFunction(1, lambda x, b: phi.eval(-np.asarray(x), b) * (-1.0) ** b[0],
                                (-hi, -lo), phi.family_tag, f"refl({phi.label})")
            return classical_pairing(DistributionSpec("xplus", alpha=a), refl)
        if a > -1.0:
            s_lo, s_hi = max(lo, 0.0), max(hi, 0.0)
            if s_hi <= s_lo:
                return 0.0 + 0.0j
            val = 0.0
            if s_lo == 0.0:
                # support touches 0: peel the weight singularity with a Jacobi
                # window sized to the test function, adaptive beyond it
                w0 = min(s_hi, max(0.25, 0.25 * (hi - lo)))
                val += _jacobi_halfline(lambda y: phi.eval(y, (0,)), a, width=w0)
                s_lo = w0
            if s_hi > s_lo:
                val += _int(lambda x: x ** a * phi.eval(x, (0,)), s_lo, s_hi)
            return complex(val)
        # -k-1 < a < -k: analytic continuation with subtraction on (0,1)
        k = int(math.ceil(-a)) - 1
        rem = (lambda y: taylor_remainder(phi, y, k)) if k else (lambda y: phi.eval(y, (0,)))
        w0 = 0.25
        inner = _jacobi_halfline(rem, a + k, width=w0)
        inner += _int(lambda y: y ** (a + k) * rem(y), w0, 1.0,
                      edges=[e for e in (lo, hi, 0.5) if w0 < e < 1.0])
        outer = _int(lambda x: x ** a * phi.eval(x, (0,)), 1.0, max(hi, 1.0))
        const = sum(_phi0_deriv(phi, j) / (math.factorial(j) * (a + j + 1.0))
                    for j in range(k))
        return complex(inner + outer + const)

    raise BadSpec(f"unhandled spec kind {spec.kind!r}")
