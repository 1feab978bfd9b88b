"""
FracHam Fractional Laplacian

两种相互独立的 (-Δ)^s 求值方法与非局部残差
"""

from .pv_quadrature import fraclap_pv, pv_weights
from .spectral import apply_multiplier, fraclap_fourier, is_power_of_two, next_power_of_two
from .residual import evaluate_fraclap, nonlocal_residual

__all__ = [
    "pv_weights",
    "fraclap_pv",
    "apply_multiplier",
    "is_power_of_two",
    "next_power_of_two",
    "fraclap_fourier",
    "evaluate_fraclap",
    "nonlocal_residual",
]
