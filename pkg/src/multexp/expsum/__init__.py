from .grid import (
    CoefficientVector,
    ExpSumGrid,
    NormEstimate,
    coefficient_vector,
    default_grid_size,
    grid_transform,
    load_coefficients,
    load_grid,
    lp_norm,
    save_coefficients,
    save_grid,
)
from .window import ZERO_WINDOW, Window, mellin_eval, smooth_window, sobolev_norm

__all__ = [
    "CoefficientVector", "ExpSumGrid", "NormEstimate", "Window", "ZERO_WINDOW", "coefficient_vector",
    "default_grid_size", "grid_transform", "load_coefficients", "load_grid", "lp_norm", "mellin_eval",
    "save_coefficients", "save_grid", "smooth_window", "sobolev_norm",
]
