"""Exact and numerical calculus for multilinear Muckenhoupt weights."""

from .exponents import (
    ClassicalCondition,
    DerivedExponents,
    DimensionError,
    DomainError,
    Exp,
    ExpVector,
    RVector,
    apr_characterization,
    derived_exponents,
    hold,
    prec,
    preceq,
    rvec,
    rvec_prec,
)
from .numerics import CubeFamily, Grid, GridMismatch, SampledWeight, estimate_Ap, estimate_Apr, estimate_RH
from .operators import SampledFunction, apply_fractional, apply_truncated_cz, commutator
from .power_weights import PowerWeight, apw_counterexample, in_Ap, in_Apq, in_Apr, in_RHs
from .interpolation import solve_AAA, solve_int_lim, solve_int_Lp, stein_weiss, verify_log_convexity
from .compactness import FKReport, InputFamily, counterexample_a3, fk_scan, series_compactness_demo

__all__ = [
    "ClassicalCondition", "DerivedExponents", "DimensionError", "DomainError", "Exp", "ExpVector", "RVector",
    "apr_characterization", "derived_exponents", "hold", "prec", "preceq", "rvec", "rvec_prec",
    "CubeFamily", "Grid", "GridMismatch", "SampledWeight", "estimate_Ap", "estimate_Apr", "estimate_RH",
    "SampledFunction", "apply_fractional", "apply_truncated_cz", "commutator",
    "PowerWeight", "apw_counterexample", "in_Ap", "in_Apq", "in_Apr", "in_RHs",
    "solve_AAA", "solve_int_lim", "solve_int_Lp", "stein_weiss", "verify_log_convexity",
    "FKReport", "InputFamily", "counterexample_a3", "fk_scan", "series_compactness_demo",
]
