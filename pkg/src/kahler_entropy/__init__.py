"""Diastasis functions and entropy estimates for rotation-invariant Kahler
metrics on the unit ball."""

from .calibration import CalibrationEstimate, SearchGrid, calibration_constant, grad_norm
from .diastasis import (
    PolarizedKernel,
    diastasis_eval,
    distance,
    hyperbolic_closed_forms,
    polarize_radial,
    radial_distance,
)
from .entropy import (
    EntropyEstimate,
    ExponentFit,
    asymptotic_exponent_fit,
    basepoint_sandwich_check,
    critical_exponent,
    cutoff_bisection,
    diastatic_entropy,
    volume_entropy_growth,
    volume_entropy_integral,
)
from .rigidity import (
    ComparisonReport,
    bcg_proxy_scan,
    lower_bound_check,
    minimality_scan,
    scale_metric,
    scaling_law_check,
)
from .specs import (
    HermitianMetric,
    MetricSpec,
    hyperbolic_spec,
    load_spec,
    metric_tensor,
    spec_from_dict,
    validate_spec,
    volume_density,
)

__all__ = [
    "CalibrationEstimate",
    "ComparisonReport",
    "EntropyEstimate",
    "ExponentFit",
    "HermitianMetric",
    "MetricSpec",
    "PolarizedKernel",
    "SearchGrid",
    "asymptotic_exponent_fit",
    "basepoint_sandwich_check",
    "bcg_proxy_scan",
    "calibration_constant",
    "critical_exponent",
    "cutoff_bisection",
    "diastasis_eval",
    "diastatic_entropy",
    "distance",
    "grad_norm",
    "hyperbolic_closed_forms",
    "hyperbolic_spec",
    "load_spec",
    "lower_bound_check",
    "metric_tensor",
    "minimality_scan",
    "polarize_radial",
    "radial_distance",
    "scale_metric",
    "scaling_law_check",
    "spec_from_dict",
    "validate_spec",
    "volume_density",
    "volume_entropy_growth",
    "volume_entropy_integral",
]

__version__ = "0.1.0"
