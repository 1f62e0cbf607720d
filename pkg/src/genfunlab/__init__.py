"""genfunlab: a numerical laboratory for algebras of generalized functions.

Generalized functions are represented as eps-parametrized nets of smooth
functions.  The lab classifies scalar nets against asymptotic scales, embeds
classical distributions through a moment-vanishing mollifier, tests weak
(distributional-sense) equality against test-function batteries, probes
compactly supported nets with slow-scale Fourier points, and runs the weak
homogeneity suite (scaling law, Euler equation, dilation profile,
1D decomposition, radial means).
"""

from .config import DEFAULT_CONFIG, EpsGrid, LabConfig
from .scales import (
    HARMONIC_SCALE,
    POLYNOMIAL_SCALE,
    OrderReport,
    ScaleFamily,
    Verdict,
    WindowPolicy,
    classify_against,
    estimate_order,
)

__all__ = [
    "DEFAULT_CONFIG",
    "EpsGrid",
    "LabConfig",
    "OrderReport",
    "ScaleFamily",
    "Verdict",
    "WindowPolicy",
    "HARMONIC_SCALE",
    "POLYNOMIAL_SCALE",
    "classify_against",
    "estimate_order",
]

__version__ = "0.1.0"
