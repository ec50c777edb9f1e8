"""tailkit: log-space numerics for heavy-tailed laws.

The package provides survival-function arithmetic that stays accurate far
below double-precision underflow: product and sum convolution tails,
distribution-class diagnostics with explicit evidence curves, and a
discounted-loss ruin model built on top of both.
"""

from .quadrature import LOG_ZERO, QuadratureError, QuadratureSpec
from .grids import GeometricGrid
from .distributions import (
    HeavyTailDistribution,
    ParameterError,
    atoms,
    make_family,
    positive_part,
    scale,
    shift,
)
from .convolve import (
    GriddedDistribution,
    GridSpec,
    mc_product_tail,
    product_dist,
    product_tail,
    sum_self_tail,
)
from .diagnostics import (
    ConditionReport,
    InsensitivityFunction,
    RatioDiagnostic,
    Verdict,
    VerdictThresholds,
    build_insensitivity,
    check_condition,
    classify,
    knot_probe_grid,
    product_subexp_verdict,
    ratio_curve,
)
from .risk import (
    LowerBoundCertificate,
    RiskModelSpec,
    RuinEstimate,
    discounted_loss_tail,
    divergence_guard,
    finite_ruin_asymptotic,
    finite_ruin_mc,
    finite_ruin_profile,
    infinite_lower_bound,
)

__version__ = "0.1.0"

__all__ = [
    "LOG_ZERO",
    "QuadratureError",
    "QuadratureSpec",
    "GeometricGrid",
    "HeavyTailDistribution",
    "ParameterError",
    "atoms",
    "make_family",
    "positive_part",
    "scale",
    "shift",
    "GriddedDistribution",
    "GridSpec",
    "mc_product_tail",
    "product_dist",
    "product_tail",
    "sum_self_tail",
    "ConditionReport",
    "InsensitivityFunction",
    "RatioDiagnostic",
    "Verdict",
    "VerdictThresholds",
    "build_insensitivity",
    "check_condition",
    "classify",
    "knot_probe_grid",
    "product_subexp_verdict",
    "ratio_curve",
    "RiskModelSpec",
    "RuinEstimate",
    "LowerBoundCertificate",
    "discounted_loss_tail",
    "divergence_guard",
    "finite_ruin_asymptotic",
    "finite_ruin_mc",
    "finite_ruin_profile",
    "infinite_lower_bound",
]
