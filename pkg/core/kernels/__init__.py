"""
FracHam Kernels

延拓理论的特殊函数常数与闭式核
"""

from .constants import (
    check_order_args,
    extension_constant,
    poisson_normalizer,
    pv_constant,
    pv_constant_forms,
    trace_scaling,
)
from .poisson import (
    kernel_mass,
    poisson_antiderivative,
    poisson_cdf,
    poisson_first_moment,
    poisson_kernel,
    poisson_profile,
    poisson_tail,
    profile_mass,
)
from .fundamental import (
    calibrate_fundamental_constant,
    fundamental_solution,
    hemisphere_flux,
    kernel_constants,
    neumann_flux_mass,
)

__all__ = [
    "check_order_args",
    "pv_constant",
    "pv_constant_forms",
    "extension_constant",
    "trace_scaling",
    "poisson_normalizer",
    "poisson_profile",
    "poisson_kernel",
    "poisson_tail",
    "poisson_cdf",
    "poisson_first_moment",
    "poisson_antiderivative",
    "kernel_mass",
    "profile_mass",
    "hemisphere_flux",
    "neumann_flux_mass",
    "calibrate_fundamental_constant",
    "fundamental_solution",
    "kernel_constants",
]
