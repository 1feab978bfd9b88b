"""
FracHam Profiles

非线性项、层解与径向解的求解驱动、s 延拓和必要条件检查
"""

from .nonlinearities import NonlinearityFactory, make_bistable, make_nonlinearity, validate_consistency
from .necessary import check_necessary_conditions, check_radial_conditions, necessary_conditions_report
from .ode_layer import ode_layer_derivative, ode_layer_slope, ode_layer_table, solve_ode_layer
from .layer import check_layer_quality, continuation_in_s, effective_nonlinearity, interface_width, solve_layer
from .radial import solve_radial

__all__ = [
    "NonlinearityFactory",
    "make_bistable",
    "make_nonlinearity",
    "validate_consistency",
    "check_necessary_conditions",
    "check_radial_conditions",
    "necessary_conditions_report",
    "ode_layer_derivative",
    "ode_layer_slope",
    "ode_layer_table",
    "solve_ode_layer",
    "check_layer_quality",
    "continuation_in_s",
    "effective_nonlinearity",
    "interface_width",
    "solve_layer",
    "solve_radial",
]
