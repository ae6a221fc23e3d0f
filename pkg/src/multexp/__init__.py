"""Numerical experiments on exponential sums of multiplicative functions."""

__version__ = "0.1.0"

from .arcs import ArcSet, energy_split, locate, major_arcs, minor_sup
from .arith import (
    ArchimedeanTwist,
    DirichletCharacter,
    FactorSieve,
    MultFnSpec,
    build_factor_sieve,
    c_chi,
    characters_mod,
    gauss_sum,
    kronecker_character,
    standard_fn,
)
from .decomp import CriterionInput, criterion_certificate, presieve, tk_check, tk_weights
from .errors import DomainError, MultexpError, ResolutionError, ResourceError
from .expsum import CoefficientVector, coefficient_vector, grid_transform, lp_norm, mellin_eval, smooth_window
from .pretentious import (
    PrimeInterval,
    best_character,
    distance_sq,
    majorant_h,
    min_over_t,
    multiscale_consistency,
    quadratic_scan,
)

__all__ = [
    "ArcSet", "ArchimedeanTwist", "CoefficientVector", "CriterionInput", "DirichletCharacter", "DomainError",
    "FactorSieve", "MultFnSpec", "MultexpError", "PrimeInterval", "ResolutionError", "ResourceError",
    "best_character", "build_factor_sieve", "c_chi", "characters_mod", "coefficient_vector",
    "criterion_certificate", "distance_sq", "energy_split", "gauss_sum", "grid_transform", "kronecker_character",
    "locate", "lp_norm", "major_arcs", "majorant_h", "mellin_eval", "min_over_t", "minor_sup",
    "multiscale_consistency", "presieve", "quadratic_scan", "smooth_window", "standard_fn", "tk_check",
    "tk_weights",
]
