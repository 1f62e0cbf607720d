"""Shared configuration: the epsilon grid, verdict thresholds, quadrature budgets.

Every verdict produced by the lab is a *finite-grid surrogate* for an
asymptotic statement, so the grid and thresholds travel with every report.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class EpsGrid:
    """Strictly decreasing sample grid for the regularization parameter.

    Default is geometric, eps_k = 2**-k for k = 4..24.  At least 8 points,
    all in (0, 1].
    """

    values: tuple[float, ...] = tuple(2.0 ** -k for k in range(4, 25))

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.size < 8:
            raise ValueError("EpsGrid needs at least 8 points")
        if np.any(v <= 0.0) or np.any(v > 1.0):
            raise ValueError("EpsGrid values must lie in (0, 1]")
        if np.any(np.diff(v) >= 0.0):
            raise ValueError("EpsGrid must be strictly decreasing")

    @classmethod
    def geometric(cls, k_min: int = 4, k_max: int = 24) -> "EpsGrid":
        if k_max - k_min + 1 < 8:
            raise ValueError("geometric grid needs k_max - k_min >= 7")
        return cls(tuple(2.0 ** -k for k in range(k_min, k_max + 1)))

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def __len__(self) -> int:
        return len(self.values)

    def describe(self) -> dict:
        return {
            "n": len(self.values),
            "eps_max": self.values[0],
            "eps_min": self.values[-1],
        }


def _default_cache_dir() -> str:
    env = os.environ.get("GENFUNLAB_CACHE")
    if env:
        return env
    return str(Path.home() / ".cache" / "genfunlab")


@dataclass(frozen=True)
class LabConfig:
    """Knobs shared by the classifier, quadrature engine and batteries."""

    grid: EpsGrid = field(default_factory=EpsGrid)

    # order classification
    m_star: int = 8                  # negligibility declared at this finite order
    window_size: int = 6             # points per fit window
    window_count: int = 3            # smallest-eps windows that must agree
    residual_tol: float = 0.1        # max relative deviation from the fit line
    slope_margin: float = 0.25       # verdict order = floor(slope + slope_margin)
    zero_floor: float = 1e-300       # exact-zero mask threshold
    max_moderate_order: int = 40     # beyond this the net counts as not moderate
    harmonic_decay: float = 0.9      # window-max decay ratio certifying -> 0
    harmonic_abs_tol: float = 1e-3   # or immediately small on the last window

    # quadrature
    quad_order: int = 10
    quad_max_panels: int = 4096
    quad_rel_floor: float = 5e-15    # conditioning floor multiplier on int |f phi|
    quad_abs_floor: float = 1e-250   # hard floor for the absolute tolerance
    osc_max_panels: int = 32768      # beyond this, oscillatory pairings certify a bound
    theta_nodes: int = 64            # base angular grid for d=2 polar quadrature

    # batteries
    battery_bumps: int = 10
    battery_polybumps: int = 5
    battery_polar: int = 12
    battery_seed: int = 0
    pierced_inner: float = 0.4       # inner edge of default pierced-battery supports
    pierced_outer: float = 8.0

    # mollifier tables
    table_radius: float = 512.0
    table_step: float = 1.0 / 512.0
    profile_step: float = 1.0 / 256.0
    max_table_order: int = 8
    cache_dir: str = field(default_factory=_default_cache_dir)

    def with_grid(self, grid: EpsGrid) -> "LabConfig":
        return replace(self, grid=grid)

    def with_(self, **kw) -> "LabConfig":
        return replace(self, **kw)

    def describe(self) -> dict:
        return {
            "grid": self.grid.describe(),
            "m_star": self.m_star,
            "window_size": self.window_size,
            "window_count": self.window_count,
            "residual_tol": self.residual_tol,
            "battery_seed": self.battery_seed,
        }


DEFAULT_CONFIG = LabConfig()
