"""Ternary-outcome Bell inequality toolkit (Python bindings)."""

from ._core import (
    DivisionUndefinedError,
    InfeasibleModelError,
    InsufficientStatisticsError,
    T0,
    ValidationError,
    angular_correlation,
    chsh,
    depolarization,
    detection_rates,
    differences,
    evaluate,
    excess_violation_ratio,
    grid_scan,
    quad_from_differences,
    random_model,
    run_mc,
    solid_angle,
    t0,
    verify_theorem,
)

__all__ = [
    "DivisionUndefinedError",
    "InfeasibleModelError",
    "InsufficientStatisticsError",
    "T0",
    "ValidationError",
    "angular_correlation",
    "chsh",
    "depolarization",
    "detection_rates",
    "differences",
    "evaluate",
    "excess_violation_ratio",
    "grid_scan",
    "quad_from_differences",
    "random_model",
    "run_mc",
    "solid_angle",
    "t0",
    "verify_theorem",
]
